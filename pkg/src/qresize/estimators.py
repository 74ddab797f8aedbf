"""scikit-learn style transformers wrapping the resizing passes.

These follow the estimator conventions (init stores hyperparameters
untouched, ``fit`` validates and returns self, ``transform`` does the
work), so the passes compose with ``sklearn.pipeline`` and ``clone``.
``transform`` accepts a single circuit or a list of circuits and returns
the same shape back.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .circuit import Circuit
from .dependency import CostMode, CostSpec, _resize_pipeline_detailed
from .instantiate import InstantiationConfig
from .synthesis import qsearch
from .unitary_resize import _resize_via_synthesis_detailed
from .validation import check_circuit, check_unitary, resolve_coupling


def _map_circuits(fn, X):
    if isinstance(X, Circuit):
        return fn(X)
    return [fn(check_circuit(c)) for c in X]


class DependencyResizer(BaseEstimator, TransformerMixin):
    """Width reduction through gate-dependency analysis and measure/reset
    insertion, with per-partition resynthesis.

    Parameters mirror the CLI: ``cost`` is ``"max-reuse"`` or
    ``"min-depth"``; ``coupling`` is None (all-to-all), a named topology
    ("all", "linear", "t"), an edge list, or a CouplingGraph over at least
    the output width.
    """

    def __init__(self, cost="max-reuse", mmr_weight=4.0, depth_slack=0.05,
                 coupling=None, epsilon=1e-10, max_sweeps=1000, restarts=8,
                 seed=0, resynthesize=True):
        self.cost = cost
        self.mmr_weight = mmr_weight
        self.depth_slack = depth_slack
        self.coupling = coupling
        self.epsilon = epsilon
        self.max_sweeps = max_sweeps
        self.restarts = restarts
        self.seed = seed
        self.resynthesize = resynthesize

    def _spec(self) -> CostSpec:
        return CostSpec(CostMode(self.cost), self.mmr_weight, self.depth_slack)

    def _cfg(self) -> InstantiationConfig:
        return InstantiationConfig(self.epsilon, self.max_sweeps, self.restarts, self.seed)

    def fit(self, X, y=None):
        self._spec()
        self._cfg()
        _map_circuits(check_circuit, X)
        return self

    def transform(self, X):
        spec = self._spec()
        cfg = self._cfg()

        def one(circuit: Circuit) -> Circuit:
            from .dependency import search_resize

            if not self.resynthesize:
                out, plan = search_resize(circuit, spec)
                self.plan_ = plan
                return out
            out, plan, details = _resize_pipeline_detailed(circuit, spec, self.coupling, cfg)
            self.plan_ = plan
            self.resynthesis_ = details
            return out

        return _map_circuits(one, check_circuit(X) if isinstance(X, Circuit) else X)


class UnitaryResizer(BaseEstimator, TransformerMixin):
    """Width reduction through the two-block instantiation check and
    topology-aware two-region resynthesis."""

    def __init__(self, coupling="linear", epsilon=1e-10, synth_epsilon=1e-8,
                 max_cx=12, max_sweeps=1000, restarts=8, seed=0):
        self.coupling = coupling
        self.epsilon = epsilon
        self.synth_epsilon = synth_epsilon
        self.max_cx = max_cx
        self.max_sweeps = max_sweeps
        self.restarts = restarts
        self.seed = seed

    def fit(self, X, y=None):
        _map_circuits(check_circuit, X)
        return self

    def transform(self, X):
        cfg = InstantiationConfig(self.epsilon, self.max_sweeps, self.restarts, self.seed)

        def one(circuit: Circuit) -> Circuit:
            coupling = resolve_coupling(self.coupling, circuit.width - 1)
            outcome = _resize_via_synthesis_detailed(
                circuit, coupling, cfg, self.synth_epsilon, self.max_cx)
            self.pair_ = outcome.pair
            self.check_distance_ = outcome.check_distance
            self.synthesis_distance_ = outcome.synthesis_distance
            return outcome.circuit

        return _map_circuits(one, check_circuit(X) if isinstance(X, Circuit) else X)


class NativeSynthesizer(BaseEstimator, TransformerMixin):
    """Unitary-to-circuit synthesis over a coupling graph; ``transform``
    maps matrices to CNOT+U3 circuits."""

    def __init__(self, coupling="all", epsilon=1e-8, max_cx=8, max_sweeps=1000,
                 restarts=8, seed=0):
        self.coupling = coupling
        self.epsilon = epsilon
        self.max_cx = max_cx
        self.max_sweeps = max_sweeps
        self.restarts = restarts
        self.seed = seed

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        cfg = InstantiationConfig(self.epsilon, self.max_sweeps, self.restarts, self.seed)

        def one(matrix) -> Circuit:
            target = check_unitary(matrix)
            n = int(target.shape[0]).bit_length() - 1
            coupling = resolve_coupling(self.coupling, n)
            return qsearch(target, coupling, cfg, max_cx=self.max_cx)

        if isinstance(X, np.ndarray) and X.ndim == 2:
            return one(X)
        return [one(m) for m in X]
