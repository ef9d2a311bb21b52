import math

import numpy as np
import pytest

from mdm.geometry import pt
from mdm.steiner import (
    CATALOG,
    InfeasibleTopology,
    SteinerTopology,
    assignments,
    best_network,
    fermat_point,
    local_min_network,
    validate_angles,
)

from oracles import fermat_oracle_length, full4_oracle_length

TWO_THIRDS_PI = 2 * math.pi / 3


def tree_length(net):
    return net.total_length()


class TestFermatPoint:
    def test_equilateral(self):
        a, b, c = pt(0, 0), pt(1, 0), pt(0.5, math.sqrt(3) / 2)
        tree, s = fermat_point(a, b, c)
        assert s is not None
        assert tree_length(tree) == pytest.approx(math.sqrt(3), abs=1e-12)
        centroid = (a + b + c) / 3
        assert np.linalg.norm(s - centroid) == pytest.approx(0.0, abs=1e-9)

    def test_obtuse_vertex_wins(self):
        # 150 degrees at the origin
        a = pt(0, 0)
        b = pt(1, 0)
        c = pt(math.cos(math.radians(150)), math.sin(math.radians(150)))
        tree, s = fermat_point(a, b, c)
        assert s is None
        assert tree_length(tree) == pytest.approx(2.0, abs=1e-12)

    def test_collinear(self):
        tree, s = fermat_point(pt(0, 0), pt(2, 0), pt(1, 0))
        assert s is None
        assert tree_length(tree) == pytest.approx(2.0)

    def test_branch_angles(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            ps = rng.uniform(-5, 5, (3, 2))
            try:
                tree, s = fermat_point(*ps)
            except ValueError:
                continue
            if s is None:
                continue
            assert not validate_angles(tree, tol=1e-9)
            dirs = [(p - s) / np.linalg.norm(p - s) for p in ps]
            for i in range(3):
                c = float(dirs[i] @ dirs[(i + 1) % 3])
                assert math.acos(max(-1, min(1, c))) == pytest.approx(TWO_THIRDS_PI, abs=1e-9)

    def test_against_descent_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            ps = rng.uniform(-3, 3, (3, 2))
            tree, _ = fermat_point(*ps)
            ours = tree_length(tree)
            ref = fermat_oracle_length(*ps)
            assert ours == pytest.approx(ref, rel=1e-8, abs=1e-8)

    def test_shorter_than_spanning_trees(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            ps = rng.uniform(-3, 3, (3, 2))
            tree, _ = fermat_point(*ps)
            d01 = np.linalg.norm(ps[0] - ps[1])
            d02 = np.linalg.norm(ps[0] - ps[2])
            d12 = np.linalg.norm(ps[1] - ps[2])
            best_spanning = min(d01 + d02, d01 + d12, d02 + d12)
            assert tree_length(tree) <= best_spanning + 1e-9


class TestLocalMinNetwork:
    def test_unit_square_full_length(self):
        sq = [pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]
        feasible = []
        for topo in assignments("full4_a") + assignments("full4_b"):
            try:
                net = local_min_network(sq, topo)
            except InfeasibleTopology:
                continue
            feasible.append(tree_length(net))
        assert feasible
        assert min(feasible) == pytest.approx(1 + math.sqrt(3), abs=1e-9)

    def test_square_both_spines_same_length(self):
        sq = [pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]
        lengths = []
        for topo in [SteinerTopology("full4_a", (0, 1, 2, 3)),
                     SteinerTopology("full4_a", (0, 3, 1, 2))]:
            try:
                net = local_min_network(sq, topo)
                lengths.append(tree_length(net))
            except InfeasibleTopology:
                pass
        assert len(lengths) == 2
        assert lengths[0] == pytest.approx(lengths[1], abs=1e-9)

    def test_full4_against_oracle(self):
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(300):
            ps = rng.uniform(-3, 3, (4, 2))
            nets = []
            for topo in assignments("full4_a"):
                try:
                    nets.append((topo, local_min_network(ps, topo)))
                except InfeasibleTopology:
                    continue
            for topo, net in nets:
                o = topo.order
                ref, _, _ = full4_oracle_length(ps[o[0]], ps[o[1]], ps[o[2]], ps[o[3]])
                assert tree_length(net) == pytest.approx(ref, rel=1e-7, abs=1e-7)
                checked += 1
        assert checked > 50

    def test_path3_angle_gate(self):
        # bent path: angle at the middle is 90 degrees, not locally minimal
        with pytest.raises(InfeasibleTopology):
            local_min_network([pt(0, 0), pt(1, 0), pt(1, 1)],
                              SteinerTopology("path3", (0, 1, 2)))
        # nearly straight: fine
        net = local_min_network([pt(0, 0), pt(1, 0.01), pt(2, 0)],
                                SteinerTopology("path3", (0, 1, 2)))
        assert len(net.edges) == 2

    def test_tripod4(self):
        ts = [pt(-2, 0), pt(0, 0), pt(1, 1), pt(1, -1)]
        net = local_min_network(ts, SteinerTopology("tripod4", (0, 1, 2, 3)))
        assert len(net.edges) == 4
        assert not validate_angles(net)

    def test_wrong_arity(self):
        with pytest.raises(InfeasibleTopology):
            local_min_network([pt(0, 0), pt(1, 0)], SteinerTopology("path3", (0, 1, 2)))

    def test_duplicate_terminals_rejected(self):
        with pytest.raises(ValueError):
            local_min_network([pt(0, 0), pt(0, 0)], SteinerTopology("seg2", (0, 1)))


class TestCatalog:
    def test_seven_types(self):
        assert len(CATALOG) == 7

    def test_best_network_table_has_seven_rows(self):
        best, table = best_network([pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)],
                                   return_table=True)
        assert len(table) == 7
        assert best is not None
        assert best[0] == pytest.approx(1 + math.sqrt(3), abs=1e-9)
        # arity-2 and arity-3 types are infeasible for four terminals
        infeasible = [row for row in table if not row[1]]
        assert {r[0] for r in infeasible} >= {"seg2", "path3", "tripod3"}

    def test_stadium_example_tripod_limit(self):
        # contact triple of the stadium chain: length tends to 2 + sqrt(3)
        r = 1.0 - 1e-6
        tree, s = fermat_point(pt(0, 1), pt(r, -1), pt(2 * r, 1))
        assert s is not None
        assert tree_length(tree) == pytest.approx(2 + math.sqrt(3), abs=5e-3)


class TestValidateAngles:
    def test_right_angle_v_flagged(self):
        from mdm.networks import EmbeddedNetwork
        net = EmbeddedNetwork(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                              [(0, 1), (0, 2)])
        v = validate_angles(net)
        assert len(v) == 1
        assert v[0][0] == 0

    def test_fermat_tripod_clean(self):
        tree, _ = fermat_point(pt(0, 0), pt(2, 0), pt(1, 1.5))
        assert validate_angles(tree) == []

    def test_local_minimality_first_order(self):
        # perturbing a branch point never shortens the tree
        rng = np.random.default_rng(4)
        for _ in range(50):
            ps = rng.uniform(-3, 3, (3, 2))
            tree, s = fermat_point(*ps)
            if s is None:
                continue
            base = tree_length(tree)
            for _ in range(8):
                d = rng.normal(size=2)
                d /= np.linalg.norm(d)
                eps = 1e-6
                perturbed = sum(np.linalg.norm(ps[i] - (s + eps * d)) for i in range(3))
                assert perturbed >= base - 1e-6 * eps - 1e-12
