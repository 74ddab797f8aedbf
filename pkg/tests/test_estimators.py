import numpy as np
import pytest
from sklearn.base import clone

from qresize import (
    Circuit,
    DependencyResizer,
    NativeSynthesizer,
    UnitaryResizer,
    circuit_unitary,
    cnot,
    hs_distance,
    metrics,
    random_unitary,
)


class TestDependencyResizer:
    def test_transform_single_circuit(self):
        est = DependencyResizer(resynthesize=False)
        out = est.fit(Circuit(3, (cnot(0, 2), cnot(1, 2)))).transform(
            Circuit(3, (cnot(0, 2), cnot(1, 2))))
        assert out.width == 2
        assert est.plan_.applied

    def test_transform_list(self):
        circuits = [Circuit(3, (cnot(0, 2), cnot(1, 2))), Circuit(2, (cnot(0, 1),))]
        outs = DependencyResizer(resynthesize=False).fit(circuits).transform(circuits)
        assert [c.width for c in outs] == [2, 2]

    def test_get_params_round_trip(self):
        est = DependencyResizer(cost="min-depth", mmr_weight=2.5)
        params = est.get_params()
        assert params["cost"] == "min-depth" and params["mmr_weight"] == 2.5
        est2 = clone(est)
        assert est2.get_params() == params

    def test_set_params(self):
        est = DependencyResizer().set_params(cost="min-depth", depth_slack=0.2)
        assert est.cost == "min-depth" and est.depth_slack == 0.2

    def test_rejects_non_circuit(self):
        with pytest.raises(TypeError):
            DependencyResizer().fit(np.eye(4))

    def test_fit_transform(self):
        c = Circuit(3, (cnot(0, 2), cnot(1, 2)))
        out = DependencyResizer(resynthesize=False).fit_transform(c)
        assert out.width == 2


class TestUnitaryResizer:
    def test_planted_instance(self):
        c = Circuit(3, (cnot(0, 1), cnot(1, 2)))
        est = UnitaryResizer(coupling="linear", seed=1)
        out = est.fit(c).transform(c)
        assert out.width == 2
        assert est.pair_ is not None
        assert est.synthesis_distance_ < 1e-8

    def test_clone_compatible(self):
        est = UnitaryResizer(max_cx=6, seed=7)
        assert clone(est).get_params()["max_cx"] == 6


class TestNativeSynthesizer:
    def test_synthesizes_unitary(self):
        target = random_unitary(2, 12)
        est = NativeSynthesizer(coupling="linear", seed=2)
        out = est.fit(target).transform(target)
        assert isinstance(out, Circuit)
        assert hs_distance(circuit_unitary(out), target) < 1e-8
        assert metrics(out).cx_count <= 3

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            NativeSynthesizer().transform(np.ones((4, 4)))
