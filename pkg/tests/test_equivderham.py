"""Graded worlds, Weil/Cartan differentials, and the Chern-Weil map."""

import random
from fractions import Fraction

import pytest

from ellforge.equivderham import (
    GradedElement,
    GradedWorld,
    LieAlgebra,
    basic_subspace,
    cartan_block,
    cartan_cohomology,
    cartan_d,
    cartan_world,
    chern_weil,
    circle_rep,
    curvature,
    form_d,
    form_world,
    gauge_defect,
    invariance_defects,
    invariant_vectors,
    is_invariant_poly,
    linear_field_contraction,
    linear_field_lie,
    lie_operator,
    su2,
    torus_reduction_check,
    u1,
    u2,
    weil_contraction,
    weil_d,
    weil_relations_report,
    weil_world,
)


# ---------------------------------------------------------------------------
# graded monomial algebra


def test_odd_generators_anticommute():
    w = form_world(2)
    dx1, dx2 = w.gen("dx1"), w.gen("dx2")
    assert dx1 * dx2 == -(dx2 * dx1)
    assert (dx1 * dx1).is_zero()


def test_even_generators_commute():
    w = form_world(2)
    x1, x2 = w.gen("x1"), w.gen("x2")
    assert x1 * x2 == x2 * x1


def test_monomial_degree_is_cohomological():
    # coordinates sit in degree zero, one-forms in degree one
    w = form_world(3)
    el = w.gen("x1") * w.gen("x1") * w.gen("dx2") * w.gen("dx3")
    (key,) = el.coeffs
    assert w.monomial_degree(key) == 2
    assert el.max_degree() == 2


def test_degree_part_splits_sums():
    w = form_world(2)
    el = w.gen("x1") + w.gen("dx1") * w.gen("dx2")
    assert el.degree_part(0) == w.gen("x1")
    assert el.degree_part(2) == w.gen("dx1") * w.gen("dx2")
    assert el.degree_part(1).is_zero()


def test_elements_from_different_worlds_never_mix():
    a = form_world(2).gen("x1")
    b = form_world(3).gen("x1")
    with pytest.raises(ValueError):
        a + b


def test_world_rejects_duplicate_generator_names():
    with pytest.raises(ValueError):
        GradedWorld([("a", 0)], [("a", 1)])


def test_exterior_derivative_leibniz_on_product():
    # d(x1^2 dx2) = 2 x1 dx1 dx2
    w = form_world(2)
    d = form_d(w)
    el = w.gen("x1") * w.gen("x1") * w.gen("dx2")
    expect = 2 * (w.gen("x1") * w.gen("dx1") * w.gen("dx2"))
    assert d(el) == expect


def test_forms_cartan_magic_formula():
    # rotation field on the plane: [d, iota] agrees with the Lie action
    w = form_world(2)
    mat = [[Fraction(0), Fraction(-1)], [Fraction(1), Fraction(0)]]
    d = form_d(w)
    iota = linear_field_contraction(w, mat)
    lie = linear_field_lie(w, mat)
    rng = random.Random(7)
    names = ["x1", "x2", "dx1", "dx2"]
    for _ in range(20):
        el = GradedElement.const(w, Fraction(rng.randrange(-3, 4)))
        for _ in range(rng.randrange(1, 4)):
            el = el * w.gen(rng.choice(names))
        assert d(iota(el)) + iota(d(el)) == lie(el)


# ---------------------------------------------------------------------------
# Lie algebra data


def test_structure_constants_must_be_antisymmetric():
    f = [[[Fraction(1)]]]
    m = [((Fraction(0), Fraction(0)), (Fraction(0), Fraction(0)))]
    with pytest.raises(ValueError):
        LieAlgebra("bad", 1, f, m)


def test_structure_constants_must_satisfy_jacobi():
    dim = 3
    f = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    # antisymmetric but not Jacobi: [e1,e2]=e1, [e2,e3]=e2, [e3,e1]=e3
    for c, a, b in ((0, 0, 1), (1, 1, 2), (2, 2, 0)):
        f[c][a][b] = Fraction(1)
        f[c][b][a] = Fraction(-1)
    mats = [((Fraction(0),),)] * dim
    with pytest.raises(ValueError):
        LieAlgebra("bad", dim, f, mats)


def test_su2_matrices_realize_the_bracket():
    alg = su2()

    def mul(p, q):
        n = len(p)
        return [
            [sum(p[i][k] * q[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]

    m1, m2, m3 = alg.matrices
    comm = [
        [a - b for a, b in zip(ra, rb)] for ra, rb in zip(mul(m1, m2), mul(m2, m1))
    ]
    assert comm == [list(row) for row in m3]


def test_u2_center_commutes_with_everything():
    alg = u2()
    for a in range(1, 4):
        assert alg.bracket_coeffs(0, a) == [Fraction(0)] * 4


# ---------------------------------------------------------------------------
# Weil algebra relations


def test_weil_abelian_derivative():
    alg = u1()
    w = weil_world(alg)
    d = weil_d(alg, w)
    assert d(w.gen("ep0")) == w.gen("e0")
    assert d(w.gen("e0")).is_zero()
    assert d(d(w.gen("ep0"))).is_zero()


def test_weil_su2_connection_square():
    alg = su2()
    w = weil_world(alg)
    d = weil_d(alg, w)
    # d ep_0 = e_0 - ep_1 ep_2 and d squares to zero on it
    expect = w.gen("e0") - w.gen("ep1") * w.gen("ep2")
    assert d(w.gen("ep0")) == expect
    assert d(expect).is_zero()


def test_weil_contraction_values():
    alg = su2()
    w = weil_world(alg)
    e0 = [Fraction(1), Fraction(0), Fraction(0)]
    iota = weil_contraction(alg, w, e0)
    assert iota(w.gen("ep0")) == GradedElement.const(w, Fraction(1))
    assert iota(w.gen("ep1")).is_zero()
    assert iota(w.gen("e2")).is_zero()


def test_weil_lie_operator_kills_curvature_norm():
    alg = su2()
    w = weil_world(alg)
    d = weil_d(alg, w)
    el = GradedElement.zero(w)
    for a in range(3):
        el = el + w.gen(f"e{a}") * w.gen(f"e{a}")
    for a in range(3):
        vec = [Fraction(1 if b == a else 0) for b in range(3)]
        op = lie_operator(d, weil_contraction(alg, w, vec))
        assert op(el).is_zero()


@pytest.mark.parametrize("make, degree", [(u1, 8), (su2, 8), (u2, 6)])
def test_weil_relations_hold(make, degree):
    rep = weil_relations_report(make(), degree=degree)
    assert rep.ok
    assert rep.bracket_sign == 1


def test_basic_subspace_dimensions_u1():
    alg = u1()
    dims = [len(basic_subspace(alg, d)) for d in range(9)]
    assert dims == [1, 0, 1, 0, 1, 0, 1, 0, 1]


def test_basic_subspace_dimensions_su2():
    alg = su2()
    dims = [len(basic_subspace(alg, d)) for d in range(9)]
    assert dims == [1, 0, 0, 0, 1, 0, 0, 0, 1]


def test_basic_subspace_dimensions_u2():
    alg = u2()
    dims = [len(basic_subspace(alg, d)) for d in range(9)]
    assert dims == [1, 0, 1, 0, 2, 0, 2, 0, 3]


# ---------------------------------------------------------------------------
# Cartan model


def _random_invariants(alg, world, ambient, blocks, count, seed, matrices=None):
    """Random rational combinations of invariant block bases."""
    rng = random.Random(seed)
    basis = []
    for xdeg, fdeg, udeg in blocks:
        keys = cartan_block(alg, world, ambient, xdeg, fdeg, udeg)
        for vec in invariant_vectors(alg, world, ambient, keys, matrices):
            basis.append(
                GradedElement(world, {k: c for k, c in zip(keys, vec) if c})
            )
    out = []
    for _ in range(count):
        el = GradedElement.zero(world)
        for b in basis:
            el = el + b * Fraction(rng.randrange(-4, 5))
        out.append(el)
    return out


def test_cartan_differential_squares_to_zero_on_circle_invariants():
    alg = u1()
    world = cartan_world(alg, 2)
    d = cartan_d(alg, world)
    blocks = [
        (x, f, u)
        for x in range(4)
        for f in range(3)
        for u in range(3)
        if 0 < x + f + 2 * u <= 6
    ]
    for el in _random_invariants(alg, world, 2, blocks, 30, seed=11):
        assert d(d(el)).is_zero()


def test_cartan_differential_squares_to_zero_on_unitary_invariants():
    alg = u2()
    world = cartan_world(alg, 4)
    d = cartan_d(alg, world)
    blocks = [
        (x, f, u)
        for x in range(3)
        for f in range(3)
        for u in range(2)
        if 0 < x + f + 2 * u <= 4
    ]
    for el in _random_invariants(alg, world, 4, blocks, 10, seed=13):
        assert d(d(el)).is_zero()


def test_cartan_differential_square_detects_noninvariance():
    # d^2 = -u L is nonzero off the invariant subcomplex
    alg = u1()
    world = cartan_world(alg, 2)
    d = cartan_d(alg, world)
    el = world.gen("x1") * world.gen("dx1")
    assert not d(d(el)).is_zero()


def test_cartan_kills_equivariant_parameter():
    alg = u2()
    world = cartan_world(alg, 4)
    d = cartan_d(alg, world)
    assert d(world.gen("u0")).is_zero()


def test_moment_pairing_gives_two_quadratic_invariants():
    # r^2 u_0 together with sum_a u_a mu_a: the pairing between the
    # coadjoint motion and the rotation of the coordinates
    alg = u2()
    world = cartan_world(alg, 4)
    keys = cartan_block(alg, world, 4, 2, 0, 1)
    vecs = invariant_vectors(alg, world, 4, keys)
    assert len(vecs) == 2


def test_circle_cohomology_matches_point():
    rep = cartan_cohomology((1,), 4)
    assert rep.dims == [1, 0, 1, 0, 1]
    assert not rep.fixed_locus_positive
    assert rep.free_rank_one


def test_two_weight_cohomology_matches_point():
    rep = cartan_cohomology((1, 1), 4)
    assert rep.dims == [1, 0, 1, 0, 1]
    assert rep.free_rank_one


def test_weight_two_cohomology_matches_point():
    rep = cartan_cohomology((2,), 4)
    assert rep.dims == [1, 0, 1, 0, 1]


def test_zero_weight_flags_positive_fixed_locus():
    rep = cartan_cohomology((0, 1), 4)
    assert rep.dims == [1, 0, 1, 0, 1]
    assert rep.fixed_locus_positive


def test_cohomology_stable_under_deeper_polynomial_truncation():
    shallow = cartan_cohomology((1,), 4)
    deep = cartan_cohomology((1,), 4, wmax=6)
    assert shallow.dims == deep.dims


def test_torus_reduction_dimensions():
    rep = torus_reduction_check(4, 2)
    assert rep.group_dims == {0: 2, 1: 2, 2: 6, 3: 6, 4: 16}
    assert rep.torus_dims == {0: 2, 1: 2, 2: 7, 3: 6, 4: 17}
    assert rep.injective
    assert rep.witness_excluded
    # the swap-even torus invariants outnumber the restricted group
    # invariants in even degrees, so the full comparison fails
    assert not rep.ok


# ---------------------------------------------------------------------------
# Chern-Weil


def test_chern_weil_circle_first_chern_form():
    alg = u1()
    w = form_world(2)
    conn = [w.gen("x1") * w.gen("dx2")]
    out = chern_weil(alg, {(1,): Fraction(1)}, conn)
    assert out == -(w.gen("dx1") * w.gen("dx2"))


def test_chern_weil_flat_connection_gives_constant():
    alg = u1()
    w = form_world(2)
    conn = [GradedElement.zero(w)]
    poly = {(0,): Fraction(3), (2,): Fraction(5)}
    out = chern_weil(alg, poly, conn)
    assert out == GradedElement.const(w, Fraction(3))


def _trace_square(dim):
    poly = {}
    for a in range(dim):
        exp = [0] * dim
        exp[a] = 2
        poly[tuple(exp)] = Fraction(-1, 2)
    return poly


def test_trace_square_is_coadjoint_invariant():
    alg = u2()
    poly = _trace_square(4)
    assert is_invariant_poly(alg, poly)
    assert invariance_defects(alg, poly) == [{}, {}, {}, {}]


def test_chern_weil_rejects_noninvariant_polynomial():
    alg = su2()
    w = form_world(2)
    conn = [GradedElement.zero(w) for _ in range(3)]
    with pytest.raises(ValueError):
        chern_weil(alg, {(1, 0, 0): Fraction(1)}, conn)


def _random_connection(alg, w, rng):
    names = ["x1", "x2", "dx1", "dx2"]
    conn = []
    for _ in range(alg.dim):
        el = GradedElement.zero(w)
        for _ in range(rng.randrange(1, 4)):
            term = GradedElement.const(w, Fraction(rng.randrange(-3, 4)))
            term = term * w.gen(rng.choice(names[:2]))
            term = term * w.gen(rng.choice(names[2:]))
            el = el + term
        conn.append(el)
    return conn


def test_chern_weil_output_closed_and_gauge_invariant():
    alg = u2()
    w = form_world(2)
    d = form_d(w)
    poly = _trace_square(4)
    rng = random.Random(29)
    for _ in range(5):
        conn = _random_connection(alg, w, rng)
        out = chern_weil(alg, poly, conn)
        assert d(out).is_zero()
        direction = [Fraction(rng.randrange(-2, 3)) for _ in range(4)]
        assert gauge_defect(alg, poly, conn, direction).is_zero()


def test_curvature_of_flat_connection_vanishes():
    alg = su2()
    w = form_world(2)
    conn = [GradedElement.zero(w) for _ in range(3)]
    for comp in curvature(alg, conn):
        assert comp.is_zero()
