from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from gptclone.exact import dot, vec
from gptclone.polytope import (
    Polytope,
    UnboundedError,
    cone_from_inequalities,
    eq,
    ge,
    hrep_to_vrep,
    is_simplex,
    le,
    lp_feasible,
    vrep_to_hrep,
)

SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]
PERMS3 = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def permutation_matrix(p):
    return vec(1 if p[i] == j else 0 for i in range(3) for j in range(3))


def birkhoff():
    return Polytope.from_vertices([permutation_matrix(p) for p in PERMS3])


points3 = st.lists(st.tuples(*[st.integers(-4, 4)] * 3), min_size=4, max_size=8, unique=True)


class TestConversions:
    def test_square_facets(self):
        p = vrep_to_hrep(Polytope.from_vertices(SQUARE))
        assert set(p.inequalities) == {
            (vec([1, 0]), 0), (vec([0, 1]), 0), (vec([-1, 0]), -1), (vec([0, -1]), -1)}
        assert p.equalities == ()

    def test_triangle_in_three_coordinates(self):
        p = vrep_to_hrep(Polytope.from_vertices([(1, 0, 0), (0, 1, 0), (0, 0, 1)]))
        assert len(p.equalities) == 1
        n, o = p.equalities[0]
        assert all(x == n[0] for x in n) and o == n[0]
        assert len(p.inequalities) == 3

    def test_birkhoff_affine_hull(self):
        assert birkhoff().affine_dim == 4

    def test_corner_triangle_vertices(self):
        p = Polytope.from_inequalities(2, [((1, 0), 0), ((0, 1), 0), ((-1, -1), -1)])
        assert hrep_to_vrep(p).vertices == (vec([0, 0]), vec([0, 1]), vec([1, 0]))

    def test_doubly_stochastic_inequalities(self):
        ineqs = [(tuple(1 if k == c else 0 for k in range(9)), 0) for c in range(9)]
        eqs = [(tuple(1 if k // 3 == i else 0 for k in range(9)), 1) for i in range(3)]
        eqs += [(tuple(1 if k % 3 == j else 0 for k in range(9)), 1) for j in range(3)]
        p = Polytope.from_inequalities(9, ineqs, eqs)
        assert set(p.vertices) == {permutation_matrix(q) for q in PERMS3}

    def test_unbounded_reports_ray(self):
        p = Polytope.from_inequalities(2, [((1, 0), 0), ((0, 1), 0)])
        with pytest.raises(UnboundedError) as info:
            p.vertices
        ray = info.value.ray
        assert all(x >= 0 for x in ray) and any(ray)

    def test_empty(self):
        p = Polytope.from_inequalities(1, [((1,), 1), ((-1,), 0)])
        assert p.is_empty and p.affine_dim == -1
        assert Polytope.empty(3).is_simplex()

    @given(points3)
    def test_hull_matches_scipy(self, pts):
        arr = np.array(pts, dtype=float)
        if np.linalg.matrix_rank(arr[1:] - arr[0]) < 3:
            return
        expected = {tuple(pts[i]) for i in ConvexHull(arr).vertices}
        got = {tuple(int(x) for x in v) for v in Polytope.from_vertices(pts).vertices}
        assert got == expected

    @given(points3)
    def test_round_trip(self, pts):
        p = vrep_to_hrep(Polytope.from_vertices(pts))
        q = Polytope.from_inequalities(p.dim, p.inequalities, p.equalities)
        assert q.vertices == p.vertices

    @given(points3)
    def test_h_route_affine_dim_matches_vertices(self, pts):
        p = vrep_to_hrep(Polytope.from_vertices(pts))
        q = Polytope.from_inequalities(p.dim, p.inequalities, p.equalities)
        assert q.affine_dim == p.affine_dim

    @given(points3)
    def test_every_vertex_is_extreme(self, pts):
        p = Polytope.from_vertices(pts)
        for v in p.vertices:
            rest = Polytope.from_vertices([w for w in p.vertices if w != v])
            assert not rest.contains(v)


class TestQueries:
    def test_square_membership(self):
        p = Polytope.from_vertices(SQUARE)
        assert p.contains((F(1, 2), F(1, 2)))
        out = p.contains((2, 0))
        assert not out
        n, o = out.violated
        assert dot(n, (2, 0)) < o and dot(n, (1, 0)) == o

    def test_birkhoff_contains_uniform(self):
        assert birkhoff().contains([F(1, 3)] * 9)

    def test_simplex_detection(self):
        assert is_simplex(Polytope.from_vertices([(0, 0), (1, 0), (0, 1)]))
        assert not is_simplex(Polytope.from_vertices(SQUARE))
        assert not is_simplex(birkhoff())

    def test_affine_dims(self):
        assert Polytope.from_vertices([(1, 2)]).affine_dim == 0
        assert Polytope.from_vertices(SQUARE).affine_dim == 2

    def test_cone_rays(self):
        c = cone_from_inequalities(2, [(1, 0), (0, 1)])
        assert set(c.extreme_rays) == {vec([1, 0]), vec([0, 1])}


class TestLP:
    def test_infeasible_interval(self):
        res = lp_feasible([ge({"x": 1}, 0), le({"x": 1}, -1)])
        assert not res.feasible and res.verify()

    def test_feasible_segment(self):
        res = lp_feasible([eq({"x": 1, "y": 1}, 1), ge({"x": 1}, 0), ge({"y": 1}, 0)])
        assert res.feasible and res.verify()
        assert res.witness["x"] + res.witness["y"] == 1

    def test_deterministic(self):
        cons = [eq({"x": 1, "y": 1, "z": 1}, 1)] + [ge({v: 1}, 0) for v in "xyz"]
        assert lp_feasible(cons).witness == lp_feasible(cons).witness

    @given(st.lists(st.tuples(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.integers(-4, 4),
                              st.sampled_from(["ge", "le", "eq"])), min_size=1, max_size=7))
    def test_agrees_with_scipy(self, rows):
        cons, A_ub, b_ub, A_eq, b_eq = [], [], [], [], []
        for coeffs, rhs, sense in rows:
            d = {f"v{i}": c for i, c in enumerate(coeffs) if c}
            cons.append({"ge": ge, "le": le, "eq": eq}[sense](d, rhs))
            if sense == "ge":
                A_ub.append([-c for c in coeffs])
                b_ub.append(-rhs)
            elif sense == "le":
                A_ub.append(coeffs)
                b_ub.append(rhs)
            else:
                A_eq.append(coeffs)
                b_eq.append(rhs)
        res = lp_feasible(cons)
        assert res.verify()
        ref = linprog(np.zeros(3), A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq or None,
                      b_eq=b_eq or None, bounds=[(None, None)] * 3, method="highs")
        assert res.feasible == (ref.status == 0)
