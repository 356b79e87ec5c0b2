import itertools
from fractions import Fraction as F

import pytest

from gptclone import zoo
from gptclone.exact import ONE, combination, dot, outer, vec
from gptclone.model import AffineMap, ModelError, effect_cone_extreme_rays, identity_map, state_space_from_polytope
from gptclone.polytope import Polytope
from gptclone.tensor import (
    BipartiteState,
    UndefinedConditionalError,
    check_pure_marginal_lemma,
    conditional,
    intermediate_tensor,
    is_entangled,
    marginals,
    max_tensor,
    min_tensor,
    monogamy_slice,
    product_state,
    separable_decomposition,
    swap,
    tensor_map,
    tensor_power,
)

HALF = F(1, 2)
QUARTER = F(1, 4)
CENTER = vec([HALF] * 4)


@pytest.fixture(scope="module")
def sq():
    return zoo.square()


@pytest.fixture(scope="module")
def sq_max(sq):
    return max_tensor(sq, sq)


@pytest.fixture(scope="module")
def sq_min(sq):
    return min_tensor(sq, sq)


def pr_vertices(t, tmin):
    return [v for v in t.vertices if separable_decomposition(v, tmin).entangled]


def point_space():
    return state_space_from_polytope(Polytope.from_vertices([(F(1, 3),)]))


class TestClassical:
    def test_delta2_products(self, delta2):
        tmax, tmin = max_tensor(delta2, delta2), min_tensor(delta2, delta2)
        assert tmax.vertices == tmin.vertices
        assert len(tmax.vertices) == 4 and tmax.is_simplex()
        assert set(tmax.vertices) == {outer(v, w) for v in delta2.vertices for w in delta2.vertices}

    def test_point_factor(self, sq):
        p = point_space()
        for t in (max_tensor(sq, p), min_tensor(p, sq)):
            assert len(t.vertices) == len(sq.vertices)
            assert t.geometry.affine_dim == sq.geometry.affine_dim


class TestSquareSquare:
    def test_vertex_counts(self, sq_max, sq_min):
        # enumeration oracle baseline, pinned
        assert len(sq_max.vertices) == 24
        assert len(sq_min.vertices) == 16
        ent = pr_vertices(sq_max, sq_min)
        assert len(ent) == 8
        assert len(sq_max.vertices) - len(ent) == 16

    def test_pr_vertices_have_uniform_marginals(self, sq_max, sq_min):
        for v in pr_vertices(sq_max, sq_min):
            assert sq_max.marginal1(v) == CENTER and sq_max.marginal2(v) == CENTER

    def test_min_inside_max(self, sq_max, sq_min):
        assert all(sq_max.contains(v) for v in sq_min.vertices)

    def test_affine_dims(self, sq_max, sq_min):
        assert sq_max.geometry.affine_dim == sq_min.geometry.affine_dim == 8

    def test_pure_marginal_lemma(self, sq_max):
        rep = check_pure_marginal_lemma(sq_max)
        assert rep.ok
        assert rep.pure_marginal == 16 and rep.vacuous == 8

    def test_swap_involution(self, sq_max):
        for v in sq_max.vertices:
            w = BipartiteState(v, sq_max)
            assert swap(swap(w)).point == v
            assert swap(w).point in set(sq_max.vertices)

    def test_pr_conditional_is_deterministic(self, sq_max, sq_min, sq):
        pr = pr_vertices(sq_max, sq_min)[0]
        omega = BipartiteState(pr, sq_max)
        cond = conditional(omega, sq.coordinate_effect("a0"))
        assert cond in set(sq.vertices)

    def test_mixture_of_local_boxes_is_separable(self, sq_min):
        mix = combination([HALF, HALF], list(sq_min.vertices[:2]))
        res = separable_decomposition(mix, sq_min)
        assert not res.entangled
        assert sum(res.weights.values()) == 1

    def test_entanglement_certificate_separates(self, sq_max, sq_min):
        for v in pr_vertices(sq_max, sq_min):
            res = is_entangled(BipartiteState(v, sq_max), sq_min)
            normal, offset = res.separating
            assert dot(normal, v) < offset
            assert all(dot(normal, w) >= offset for w in sq_min.vertices)


class TestStates:
    def test_product_marginals(self, sq, sq_max):
        for a, b in itertools.product(sq.vertices, repeat=2):
            w = product_state(a, b, sq_max)
            assert marginals(w) == (a, b)
            assert not is_entangled(w, min_tensor(sq, sq))

    def test_mixed_product(self, delta2):
        t = max_tensor(delta2, delta2)
        mid = vec([HALF, HALF])
        w = product_state(mid, delta2.vertices[0], t)
        expected = combination([HALF, HALF], [outer(delta2.vertices[0], delta2.vertices[0]),
                                              outer(delta2.vertices[1], delta2.vertices[0])])
        assert w.point == expected

    def test_uniform_mixture_marginals(self, delta2):
        t = max_tensor(delta2, delta2)
        mix = combination([QUARTER] * 4, list(t.vertices))
        assert marginals(BipartiteState(mix, t)) == (vec([HALF, HALF]), vec([HALF, HALF]))

    def test_conditional_of_product(self, sq, sq_max):
        a, b = sq.vertices[0], sq.vertices[3]
        w = product_state(a, b, sq_max)
        eff = next(e for e in (sq.coordinate_effect(x) for x in sq.labels) if e(a) > 0)
        assert conditional(w, eff) == b

    def test_conditional_undefined(self, sq, sq_max):
        a = sq.vertices[0]
        w = product_state(a, a, sq_max)
        eff = next(e for e in (sq.coordinate_effect(x) for x in sq.labels) if e(a) == 0)
        with pytest.raises(UndefinedConditionalError):
            conditional(w, eff)

    def test_swap_of_product(self, sq, sq_max):
        a, b = sq.vertices[0], sq.vertices[1]
        assert swap(product_state(a, b, sq_max)).point == outer(b, a)

    def test_swap_needs_equal_factors(self, sq, delta2):
        t = max_tensor(sq, delta2)
        with pytest.raises(ModelError):
            swap(BipartiteState(t.vertices[0], t))


PAIRS = [("delta2", "delta3"), ("square", "delta2"), ("firefly", "delta2"), ("square", "square"),
         ("delta3", "square")]


@pytest.mark.parametrize("left,right", PAIRS)
def test_conditional_identity(left, right):
    a, b = zoo.get(left), zoo.get(right)
    t = max_tensor(a, b)
    ra = effect_cone_extreme_rays(a).extreme_rays
    rb = effect_cone_extreme_rays(b).extreme_rays
    for v in t.vertices:
        w = BipartiteState(v, t)
        m1, m2 = marginals(w)
        for f in ra:
            for g in rb:
                joint = t.pair_value(v, f, g)
                if dot(f, m1):
                    assert joint == dot(f, m1) * dot(g, conditional(w, f, side=1))
                if dot(g, m2):
                    assert joint == dot(g, m2) * dot(f, conditional(w, g, side=2))


@pytest.mark.parametrize("left,right", PAIRS)
def test_lemma_on_computed_products(left, right):
    t = max_tensor(zoo.get(left), zoo.get(right))
    assert check_pure_marginal_lemma(t).ok


def test_firefly_delta2_all_vertices_pass():
    t = max_tensor(zoo.firefly(), zoo.delta2())
    rep = check_pure_marginal_lemma(t)
    assert rep.ok and rep.checked == len(t.vertices)


def test_monogamy(sq, sq_max, sq_min):
    pr = pr_vertices(sq_max, sq_min)[0]
    rep = monogamy_slice(sq_max, sq, pr)
    assert rep.ok
    assert len(rep.slice_vertices) == 4


def test_tensor_power_left_associative(delta2):
    t3 = tensor_power(delta2, 3, kind="minimal")
    assert len(t3.vertices) == 8 and t3.is_simplex()


def test_intermediate_between_min_and_max(sq, sq_max, sq_min):
    some_pr = pr_vertices(sq_max, sq_min)[0]
    geom = Polytope.from_vertices(list(sq_min.vertices) + [some_pr])
    t = intermediate_tensor(sq, sq, geom)
    assert len(t.vertices) == 17
    with pytest.raises(ModelError):
        intermediate_tensor(sq, sq, Polytope.from_vertices(list(sq_min.vertices[:15])))


def test_local_maps_tensor_to_positive_maps(sq, sq_max):
    ident = identity_map(sq)
    flip = AffineMap(sq, sq, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    m = tensor_map(flip, ident, sq_max, sq_max)
    assert all(sq_max.contains(m(v)) for v in sq_max.vertices)
