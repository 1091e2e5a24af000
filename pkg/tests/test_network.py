"""Network construction, validation, canned topologies, and state vectors."""

import numpy as np
import pytest

from vulnprop import (
    DanglingIndexError,
    DefenseParams,
    DuplicateEdgeError,
    Network,
    OutOfRangeError,
    SelfLoopError,
    Stage,
    VulnState,
    build_network,
    generate_topology,
    neighbors_in,
)

from conftest import symmetric_two_node


class TestBuildNetwork:
    def test_two_node_symmetric(self):
        net = build_network(
            [("a1", 0.5), ("a2", 0.5)], [(0, 1, 0.5), (1, 0, 0.5)]
        )
        assert net.n == 2
        assert net.labels == ("a1", "a2")
        assert net.alpha == {(0, 1): 0.5, (1, 0): 0.5}
        np.testing.assert_array_equal(net.default_vuln, [0.5, 0.5])

    def test_isolated_single_node(self):
        net = build_network([("a1", 0.5)], [])
        assert net.n == 1
        assert net.alpha == {}
        assert neighbors_in(net, 0) == []

    def test_self_loop_rejected(self):
        with pytest.raises(SelfLoopError):
            build_network([("a", 0.5), ("b", 0.5)], [(0, 0, 0.3)])

    def test_duplicate_edge_rejected(self):
        with pytest.raises(DuplicateEdgeError):
            build_network(
                [("a", 0.5), ("b", 0.5)], [(0, 1, 0.3), (0, 1, 0.4)]
            )

    def test_dangling_index_rejected(self):
        with pytest.raises(DanglingIndexError):
            build_network([("a", 0.5)], [(0, 1, 0.5)])

    def test_out_of_range_vuln_and_alpha(self):
        with pytest.raises(OutOfRangeError):
            build_network([("a", 1.5)], [])
        with pytest.raises(OutOfRangeError):
            build_network([("a", 0.5), ("b", 0.5)], [(0, 1, 1.5)])
        with pytest.raises(OutOfRangeError):
            build_network([("a", -0.1)], [])

    def test_duplicate_labels_rejected(self):
        with pytest.raises(OutOfRangeError):
            build_network([("a", 0.5), ("a", 0.6)], [])

    def test_missing_reverse_edge_not_created(self):
        net = build_network([("a", 0.5), ("b", 0.5)], [(0, 1, 0.3)])
        assert (0, 1) in net.alpha
        assert (1, 0) not in net.alpha

    def test_asymmetric_alphas_stored_independently(self):
        net = build_network(
            [("a", 0.5), ("b", 0.5)], [(0, 1, 0.2), (1, 0, 0.9)]
        )
        assert net.alpha[(0, 1)] == 0.2
        assert net.alpha[(1, 0)] == 0.9


class TestDefenseParams:
    def test_defaults(self):
        p = DefenseParams()
        assert (p.gamma, p.theta, p.budget_W) == (0.7, 2.0, 1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"gamma": 0.0},
            {"gamma": -1.0},
            {"theta": 0.5},
            {"budget_W": -0.1},
        ],
    )
    def test_invalid_params(self, kwargs):
        with pytest.raises(OutOfRangeError):
            DefenseParams(**kwargs)


class TestVulnState:
    def test_valid_state(self):
        s = VulnState(Stage.DEFAULT, [0.0, 0.5, 1.0])
        assert len(s) == 3
        assert s.stage is Stage.DEFAULT

    def test_out_of_range_rejected(self):
        with pytest.raises(OutOfRangeError):
            VulnState(Stage.DEFAULT, [0.5, 1.2])
        with pytest.raises(OutOfRangeError):
            VulnState(Stage.DEFAULT, [-0.2, 0.5])

    def test_tiny_overshoot_snapped(self):
        s = VulnState(Stage.DEFAULT, [1.0 + 5e-13, -5e-13])
        assert s.values[0] == 1.0
        assert s.values[1] == 0.0

    def test_values_read_only(self):
        s = VulnState(Stage.DEFAULT, [0.5, 0.5])
        with pytest.raises((ValueError, RuntimeError)):
            s.values[0] = 0.9

    def test_state_immutable(self):
        s = VulnState(Stage.DEFAULT, [0.5])
        with pytest.raises(AttributeError):
            s.stage = Stage.INVESTED

    def test_non_finite_rejected(self):
        with pytest.raises(OutOfRangeError):
            VulnState(Stage.DEFAULT, [np.nan])


class TestTopologies:
    def test_dense5_complete(self):
        net = generate_topology("dense5", 0.5, 0.1)
        assert net.n == 5
        assert len(net.edges) == 20
        assert all(abs(a - 0.1) < 1e-15 for a in net.alpha.values())
        for i in range(5):
            assert net.in_sources(i) == [j for j in range(5) if j != i]

    def test_sparse5_path(self):
        net = generate_topology("sparse5", 0.5, 0.8)
        assert net.n == 5
        assert len(net.edges) == 8

    def test_star_hub_and_leaves(self):
        net = generate_topology("star:3", 0.5, 1.0)
        assert net.n == 3
        assert net.in_sources(0) == [1, 2]
        assert net.in_sources(1) == [0]

    def test_ring(self):
        net = generate_topology("ring:6", 0.4, 0.3)
        assert net.n == 6
        assert len(net.edges) == 12
        assert net.in_sources(0) == [1, 5]

    def test_utility_shape(self):
        net = generate_topology("utility", 0.5, 0.5)
        assert net.n == 25
        # 19 leaf substations hang off the router
        router = net.labels.index("router")
        subs = [i for i, lab in enumerate(net.labels) if lab.startswith("sub_")]
        assert len(subs) == 19
        assert set(subs) <= set(net.in_sources(router))

    def test_substation_core_degrees(self):
        net = generate_topology("substation", 0.5, 0.5)
        assert net.n == 12
        for i in range(6):
            assert len(net.in_sources(i)) >= 2
        for i in range(6, 12):
            assert len(net.in_sources(i)) == 1

    def test_unknown_kind(self):
        with pytest.raises(OutOfRangeError):
            generate_topology("mesh", 0.5, 0.5)

    def test_bad_size_argument(self):
        with pytest.raises(OutOfRangeError):
            generate_topology("ring:2", 0.5, 0.5)
        with pytest.raises(OutOfRangeError):
            generate_topology("star:x", 0.5, 0.5)
        with pytest.raises(OutOfRangeError):
            generate_topology("dense5:7", 0.5, 0.5)

    def test_out_of_range_defaults(self):
        with pytest.raises(OutOfRangeError):
            generate_topology("dense5", 1.2, 0.5)
        with pytest.raises(OutOfRangeError):
            generate_topology("dense5", 0.5, -0.2)


class TestNetworkAccessors:
    def test_in_csr_layout(self):
        net = build_network(
            [("a", 0.1), ("b", 0.2), ("c", 0.3)],
            [(1, 0, 0.5), (2, 0, 0.6), (0, 2, 0.7)],
        )
        indptr, indices, alphas = net.in_csr()
        np.testing.assert_array_equal(indptr, [0, 2, 2, 3])
        np.testing.assert_array_equal(indices, [1, 2, 0])
        np.testing.assert_allclose(alphas, [0.5, 0.6, 0.7])

    def test_in_csr_arrays_read_only(self):
        net = symmetric_two_node()
        indptr, indices, alphas = net.in_csr()
        for arr in (indptr, indices, alphas):
            with pytest.raises((ValueError, RuntimeError)):
                arr[0] = 0

    def test_default_state(self):
        net = symmetric_two_node(v=0.3)
        s = net.default_state()
        assert s.stage is Stage.DEFAULT
        np.testing.assert_array_equal(s.values, [0.3, 0.3])

    def test_with_default_vuln(self):
        net = symmetric_two_node()
        other = net.with_default_vuln(0, 0.9)
        assert other.default_vuln[0] == 0.9
        assert net.default_vuln[0] == 0.5  # original untouched
        assert other.alpha == net.alpha
        with pytest.raises(OutOfRangeError):
            net.with_default_vuln(0, 1.5)

    def test_with_alpha(self):
        net = symmetric_two_node()
        other = net.with_alpha(0, 1, 0.9)
        assert other.alpha[(0, 1)] == 0.9
        assert other.alpha[(1, 0)] == 0.5
        with pytest.raises(DanglingIndexError):
            net.with_alpha(0, 5, 0.5)

    def test_with_all_alpha(self):
        net = generate_topology("dense5", 0.5, 0.5)
        other = net.with_all_alpha(0.8)
        assert all(a == 0.8 for a in other.alpha.values())
        assert len(other.edges) == len(net.edges)

    def test_neighbors_in_sorted(self):
        net = build_network(
            [("a", 0.5), ("b", 0.5), ("c", 0.5)],
            [(2, 0, 0.5), (1, 0, 0.5)],
        )
        assert [node.index for node in neighbors_in(net, 0)] == [1, 2]

    def test_neighbors_in_bad_index(self):
        net = symmetric_two_node()
        with pytest.raises(DanglingIndexError):
            neighbors_in(net, 7)


class TestImmutability:
    def test_probabilities_stay_in_range_under_clones(self):
        rng = np.random.default_rng(11)
        net = generate_topology("dense5", 0.5, 0.5)
        for _ in range(50):
            op = rng.integers(3)
            if op == 0:
                net = net.with_default_vuln(
                    int(rng.integers(5)), float(rng.uniform())
                )
            elif op == 1:
                i = int(rng.integers(5))
                j = (i + 1 + int(rng.integers(4))) % 5
                net = net.with_alpha(i, j, float(rng.uniform()))
            else:
                net = net.with_all_alpha(float(rng.uniform()))
            assert net.default_vuln.min() >= 0.0
            assert net.default_vuln.max() <= 1.0
            assert all(0.0 <= a <= 1.0 for a in net.alpha.values())

    def test_default_vuln_read_only(self):
        net = symmetric_two_node()
        with pytest.raises((ValueError, RuntimeError)):
            net.default_vuln[0] = 0.9

    def test_network_dataclass_frozen(self):
        net = symmetric_two_node()
        with pytest.raises(AttributeError):
            net.nodes = ()
