import numpy as np
import pytest

from qresize import (
    Circuit,
    CouplingGraph,
    InstantiationConfig,
    ResizePair,
    SynthesisError,
    apply_reuse,
    circuit_unitary,
    cnot,
    coupling_violations,
    find_resizable_pairs,
    fragment_topology,
    hs_distance,
    metrics,
    qsearch,
    qsearch_two_region,
    random_unitary,
)

CFG = InstantiationConfig(epsilon=1e-8)


def random_coupling(rng, n):
    # spanning tree plus extras keeps it connected
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    for _ in range(int(rng.integers(0, n))):
        a, b = rng.choice(n, size=2, replace=False)
        edges.add((min(int(a), int(b)), max(int(a), int(b))))
    return CouplingGraph.from_edges(n, edges)


class TestCouplingGraph:
    def test_named_topologies(self):
        assert CouplingGraph.linear(4).edges == frozenset({(0, 1), (1, 2), (2, 3)})
        t = CouplingGraph.t_shaped(5)
        assert (1, 4) in t.edges and len(t.edges) == 4
        assert CouplingGraph.complete(3).edges == frozenset({(0, 1), (0, 2), (1, 2)})

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            CouplingGraph.from_edges(2, [(0, 0)])

    def test_connectivity(self):
        assert CouplingGraph.linear(4).is_connected()
        assert not CouplingGraph.from_edges(4, [(0, 1), (2, 3)]).is_connected()


class TestFragmentTopology:
    def test_linear_example(self):
        frag = fragment_topology(CouplingGraph.linear(3), ResizePair(0, 3), 4)
        assert frag.edges == frozenset({(0, 1), (1, 2), (1, 3)})

    def test_complete_graph(self):
        frag = fragment_topology(CouplingGraph.complete(3), ResizePair(0, 3), 4)
        assert frag.neighbors(3) == {1, 2}
        assert (0, 3) not in frag.edges

    def test_guest_not_last_wire(self):
        frag = fragment_topology(CouplingGraph.linear(3), ResizePair(2, 1), 4)
        # post-resize labels: host 2 becomes wire 1 of the target
        host_nbrs_post = CouplingGraph.linear(3).neighbors(1)
        assert frag.neighbors(1) == {w if w < 1 else w + 1 for w in host_nbrs_post}

    def test_relabel_back_property(self, rng):
        for trial in range(50):
            n_post = int(rng.integers(2, 6))
            target = random_coupling(rng, n_post)
            pre = n_post + 1
            host, guest = rng.choice(pre, size=2, replace=False)
            pair = ResizePair(int(host), int(guest))
            frag = fragment_topology(target, pair, pre)

            def back(w):
                w = pair.host if w == pair.guest else w
                return w - (w > pair.guest)

            for a, b in frag.edges:
                x, y = back(a), back(b)
                assert x != y
                assert (min(x, y), max(x, y)) in target.edges

    def test_out_of_range_pair(self):
        with pytest.raises(ValueError):
            fragment_topology(CouplingGraph.linear(3), ResizePair(0, 9), 4)


class TestQsearch:
    def test_identity_at_root(self):
        out = qsearch(np.eye(4, dtype=complex), CouplingGraph.linear(2), CFG, max_cx=3)
        assert metrics(out).cx_count == 0

    def test_cnot_needs_one_layer(self):
        target = circuit_unitary(Circuit(2, (cnot(0, 1),)))
        out = qsearch(target, CouplingGraph.linear(2), CFG, max_cx=3)
        assert metrics(out).cx_count == 1
        assert hs_distance(circuit_unitary(out), target) < 1e-8

    def test_random_su4_within_three(self):
        for seed in range(3):
            target = random_unitary(2, 700 + seed)
            out = qsearch(target, CouplingGraph.linear(2),
                          InstantiationConfig(epsilon=1e-8, seed=seed), max_cx=4)
            assert metrics(out).cx_count <= 3
            assert hs_distance(circuit_unitary(out), target) < 1e-8

    def test_budget_exhaustion_raises(self):
        target = circuit_unitary(Circuit(2, (cnot(0, 1),)))
        with pytest.raises(SynthesisError, match="budget"):
            qsearch(target, CouplingGraph.linear(2), CFG, max_cx=0)

    def test_cnots_on_coupling_edges(self, rng):
        coupling = CouplingGraph.linear(3)
        target = circuit_unitary(Circuit(3, (cnot(0, 1), cnot(1, 2))))
        out = qsearch(target, coupling, InstantiationConfig(epsilon=1e-8, seed=2), max_cx=4)
        assert coupling_violations(out, coupling) == []

    def test_budget_monotonicity(self):
        target = random_unitary(2, 50)
        cfg = InstantiationConfig(epsilon=1e-8, seed=9)
        counts = []
        for budget in (3, 4, 5):
            counts.append(metrics(qsearch(target, CouplingGraph.linear(2), cfg, budget)).cx_count)
        assert counts[0] >= counts[1] >= counts[2]

    def test_deterministic(self):
        target = random_unitary(2, 64)
        cfg = InstantiationConfig(epsilon=1e-8, seed=4)
        a = qsearch(target, CouplingGraph.linear(2), cfg, max_cx=4)
        b = qsearch(target, CouplingGraph.linear(2), cfg, max_cx=4)
        assert a == b


class TestTwoRegion:
    def test_planted_chain(self):
        planted = Circuit(3, (cnot(0, 1), cnot(1, 2)))
        target = circuit_unitary(planted)
        frag = fragment_topology(CouplingGraph.linear(2), ResizePair(0, 2), 3)
        out = qsearch_two_region((0, 1), (1, 2), target, frag, CFG, max_cx=4)
        assert metrics(out).cx_count <= 2
        assert ResizePair(0, 2) in find_resizable_pairs(out)
        assert hs_distance(circuit_unitary(out), target) < 1e-8

    def test_product_target_solves_at_root(self):
        target = np.kron(random_unitary(1, 3), np.kron(random_unitary(1, 2), random_unitary(1, 1)))
        frag = fragment_topology(CouplingGraph.linear(2), ResizePair(0, 2), 3)
        out = qsearch_two_region((0, 1), (1, 2), target, frag, CFG, max_cx=2)
        assert metrics(out).cx_count == 0

    def test_fig_style_four_successors(self):
        from qresize.synthesis import _two_region_root, _two_region_successors

        frag = fragment_topology(CouplingGraph.linear(3), ResizePair(0, 3), 4)
        gates, regions = _two_region_root((0, 1, 2), (1, 2, 3))
        ea = sorted(e for e in frag.edges if set(e) <= {0, 1, 2})
        eb = sorted(e for e in frag.edges if set(e) <= {1, 2, 3})
        succ = list(_two_region_successors(gates, regions, ea, eb))
        assert len(succ) == 4

    def test_reuse_relabel_lands_on_target_coupling(self):
        target_coupling = CouplingGraph.linear(2)
        pair = ResizePair(0, 2)
        planted = Circuit(3, (cnot(0, 1), cnot(1, 2)))
        target = circuit_unitary(planted)
        frag = fragment_topology(target_coupling, pair, 3)
        pre = qsearch_two_region((0, 1), (1, 2), target, frag, CFG, max_cx=4)
        resized = apply_reuse(pre, pair)
        assert coupling_violations(resized, target_coupling) == []
