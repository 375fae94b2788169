"""Exterior algebra: wedge, d, contraction, pullback, operators."""

from itertools import combinations

import numpy as np
import pytest

from maflow.exterior import (
    DifferentialForm,
    GraphMap,
    NondegeneracyError,
    OperatorField,
    SymmetricTensorField,
    VectorField,
    dcoord,
    det_field,
    differential,
    ext_derivative,
    form_to_matrix,
    interior_product,
    invert_field_matrix,
    lie_derivative,
    matrix_to_form,
    normalize_index,
    operator_from_pair,
    operator_sup_diff,
    pullback,
    pullback_symmetric,
    sup_norm,
    volume_form,
    wedge,
    zero_form,
)
from maflow.fieldexpr import Chart, ChartError, ScalarField, parse_field

DIM6 = Chart(("x1", "x2", "x3", "xi1", "xi2", "xi3"))
DIM3 = Chart(("x", "y", "z"))
DIM2 = Chart(("s", "t"))


def rand_points(dim, count, seed):
    rng = np.random.default_rng(seed)
    return [tuple(p) for p in rng.uniform(-1, 1, size=(count, dim))]


def rand_form(chart, degree, rng, n_terms=3):
    """Random form with affine coefficients in one random coordinate each."""
    idxs = list(combinations(range(chart.dim), degree))
    items = []
    for _ in range(n_terms):
        key = idxs[rng.integers(0, len(idxs))]
        c0, c1 = rng.uniform(-2, 2, 2)
        axis = int(rng.integers(0, chart.dim))
        coeff = c0 + c1 * ScalarField.coordinate(chart, axis)
        items.append((key, coeff))
    return DifferentialForm.build(chart, degree, items)


def wedge_oracle(a, b, point, vectors):
    """Shuffle-sum definition of the wedge product on concrete vectors."""
    k, l = a.degree, b.degree
    total = 0.0
    for combo in combinations(range(k + l), k):
        rest = tuple(i for i in range(k + l) if i not in combo)
        sign = normalize_index(combo + rest)[1]
        total += (
            sign
            * a.apply(point, *[vectors[i] for i in combo])
            * b.apply(point, *[vectors[i] for i in rest])
        )
    return total


def test_normalize_index():
    assert normalize_index((1, 2)) == ((1, 2), 1)
    assert normalize_index((2, 1)) == ((1, 2), -1)
    assert normalize_index((3, 1, 2)) == ((1, 2, 3), 1)
    assert normalize_index((1, 1)) is None
    assert normalize_index(()) == ((), 1)


def test_build_normalizes_and_merges():
    f = DifferentialForm.build(DIM3, 2, [((1, 0), 1.0), ((0, 1), 2.0), ((2, 2), 5.0)])
    assert set(f.terms) == {(0, 1)}
    assert f.coeff((0, 1)).eval((0, 0, 0)) == 1.0
    assert f.coeff((1, 0)).eval((0, 0, 0)) == -1.0
    assert f.coeff((0, 2)).eval((0, 0, 0)) == 0.0
    with pytest.raises(ValueError):
        DifferentialForm(DIM3, 2, {(1, 0): ScalarField.constant(DIM3, 1.0)})
    with pytest.raises(ValueError):
        DifferentialForm(DIM3, 1, {(7,): ScalarField.constant(DIM3, 1.0)})


def test_apply_on_vectors():
    form = DifferentialForm.build(DIM3, 2, [((0, 1), 1.0)])
    v = (1.0, 0.0, 0.0)
    w = (0.0, 1.0, 0.0)
    assert form.apply((0, 0, 0), v, w) == 1.0
    assert form.apply((0, 0, 0), w, v) == -1.0
    with pytest.raises(ValueError):
        form.apply((0, 0, 0), v)


def test_wedge_against_shuffle_oracle():
    rng = np.random.default_rng(2024)
    for ka, kb in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (1, 3)]:
        for _ in range(8):
            a = rand_form(DIM6, ka, rng)
            b = rand_form(DIM6, kb, rng)
            w = wedge(a, b)
            p = tuple(rng.uniform(-1, 1, 6))
            vecs = [tuple(rng.uniform(-1, 1, 6)) for _ in range(ka + kb)]
            assert w.apply(p, *vecs) == pytest.approx(
                wedge_oracle(a, b, p, vecs), rel=1e-12, abs=1e-12
            )


def test_graded_commutativity():
    rng = np.random.default_rng(7)
    pts = rand_points(6, 10, 7)
    for ka, kb in [(1, 1), (1, 2), (2, 2), (2, 3)]:
        a = rand_form(DIM6, ka, rng)
        b = rand_form(DIM6, kb, rng)
        sign = (-1.0) ** (ka * kb)
        diff = wedge(a, b) - wedge(b, a) * sign
        assert sup_norm(diff, pts) < 1e-12


def test_wedge_beyond_top_degree_vanishes():
    vol = volume_form(DIM3)
    one = dcoord(DIM3, 0)
    assert wedge(vol, one).is_zero
    assert wedge(one, one).is_zero


def test_d_squared_is_zero():
    rng = np.random.default_rng(13)
    pts = rand_points(3, 8, 13)
    f = parse_field("sin(x*y) + exp(z)*x^2", DIM3)
    assert sup_norm(ext_derivative(differential(f)), pts) < 1e-12
    for degree in (1, 2):
        form = rand_form(DIM3, degree, rng)
        dd = ext_derivative(ext_derivative(form))
        assert sup_norm(dd, pts) < 1e-12


def test_differential_leibniz():
    pts = rand_points(3, 8, 17)
    f = parse_field("x*y + z^2", DIM3)
    g = parse_field("cos(x) + y*z", DIM3)
    lhs = differential(f * g)
    rhs = differential(f) * g + differential(g) * f
    assert sup_norm(lhs - rhs, pts) < 1e-12


def test_interior_product_rules():
    rng = np.random.default_rng(23)
    pts = rand_points(6, 8, 23)
    x = VectorField(
        DIM6,
        tuple(
            ScalarField.constant(DIM6, v) + ScalarField.coordinate(DIM6, (i + 1) % 6) * 0.3
            for i, v in enumerate(rng.uniform(-1, 1, 6))
        ),
    )
    for ka, kb in [(1, 1), (1, 2), (2, 2)]:
        a = rand_form(DIM6, ka, rng)
        b = rand_form(DIM6, kb, rng)
        lhs = interior_product(x, wedge(a, b))
        rhs = wedge(interior_product(x, a), b) + wedge(a, interior_product(x, b)) * (
            (-1.0) ** ka
        )
        assert sup_norm(lhs - rhs, pts) < 1e-12
    c = rand_form(DIM6, 3, rng)
    twice = interior_product(x, interior_product(x, c))
    assert sup_norm(twice, pts) < 1e-12
    with pytest.raises(ValueError):
        interior_product(x, zero_form(DIM6, 0))


def test_lie_derivative_known_case():
    # L_X (x dy) for X = d/dx is dy
    x = VectorField.basis(DIM3, 0)
    form = DifferentialForm.build(DIM3, 1, [((1,), ScalarField.coordinate(DIM3, 0))])
    out = lie_derivative(x, form)
    pts = rand_points(3, 5, 29)
    assert sup_norm(out - dcoord(DIM3, 1), pts) < 1e-12


def test_lie_derivative_is_a_derivation():
    rng = np.random.default_rng(31)
    pts = rand_points(3, 6, 31)
    x = VectorField(
        DIM3,
        (
            parse_field("y", DIM3),
            parse_field("-x", DIM3),
            parse_field("x*z", DIM3),
        ),
    )
    a = rand_form(DIM3, 1, rng)
    b = rand_form(DIM3, 1, rng)
    lhs = lie_derivative(x, wedge(a, b))
    rhs = wedge(lie_derivative(x, a), b) + wedge(a, lie_derivative(x, b))
    assert sup_norm(lhs - rhs, pts) < 1e-12
    # commutes with d
    lhs2 = lie_derivative(x, ext_derivative(a))
    rhs2 = ext_derivative(lie_derivative(x, a))
    assert sup_norm(lhs2 - rhs2, pts) < 1e-12


def _maps():
    f = GraphMap(
        DIM2,
        DIM3,
        (
            parse_field("s + t", DIM2),
            parse_field("s*t", DIM2),
            parse_field("s^2", DIM2),
        ),
    )
    g = GraphMap(
        DIM3,
        DIM2,
        (
            parse_field("x*y + z", DIM3),
            parse_field("x - y", DIM3),
        ),
    )
    return f, g


def test_pullback_commutes_with_d():
    f, _ = _maps()
    rng = np.random.default_rng(37)
    pts = rand_points(2, 8, 37)
    for degree in (0, 1, 2):
        if degree == 0:
            form = DifferentialForm(DIM3, 0, {(): parse_field("sin(x*y) + z", DIM3)})
        else:
            form = rand_form(DIM3, degree, rng)
        lhs = pullback(ext_derivative(form), f)
        rhs = ext_derivative(pullback(form, f))
        assert sup_norm(lhs - rhs, pts) < 1e-11


def test_pullback_functorial():
    f, g = _maps()
    composed = GraphMap(DIM2, DIM2, tuple(f.pull_scalar(c) for c in g.components))
    rng = np.random.default_rng(41)
    pts = rand_points(2, 8, 41)
    for degree in (1, 2):
        form = rand_form(DIM2, degree, rng)
        lhs = pullback(form, composed)
        rhs = pullback(pullback(form, g), f)
        assert sup_norm(lhs - rhs, pts) < 1e-11


def test_pullback_respects_wedge():
    f, _ = _maps()
    rng = np.random.default_rng(43)
    pts = rand_points(2, 8, 43)
    a = rand_form(DIM3, 1, rng)
    b = rand_form(DIM3, 1, rng)
    lhs = pullback(wedge(a, b), f)
    rhs = wedge(pullback(a, f), pullback(b, f))
    assert sup_norm(lhs - rhs, pts) < 1e-11
    with pytest.raises(ChartError):
        pullback(rand_form(DIM2, 1, rng), f)


def test_pullback_symmetric_matches_jacobian_congruence():
    f, _ = _maps()
    euclid = SymmetricTensorField.from_rows(
        DIM3, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    )
    h = pullback_symmetric(euclid, f)
    rng = np.random.default_rng(47)
    for _ in range(10):
        p = tuple(rng.uniform(-1, 1, 2))
        jac = np.array([[c.derivative(a).eval(p) for a in range(2)] for c in f.components])
        expect = jac.T @ euclid.eval(f.eval(p)) @ jac
        assert np.allclose(h.eval(p), expect, atol=1e-12)


def test_symmetric_tensor_guards_and_signature():
    with pytest.raises(ValueError):
        SymmetricTensorField.from_rows(DIM2, [[0.0, 1.0], [2.0, 0.0]])
    g = SymmetricTensorField.from_rows(DIM2, [[1.0, 0.0], [0.0, -1.0]])
    assert g.signature((0.0, 0.0)) == (1, 1, 0)
    z = SymmetricTensorField.from_rows(DIM2, [[1.0, 0.0], [0.0, 0.0]])
    assert z.signature((0.0, 0.0)) == (1, 0, 1)


def test_operator_algebra():
    ident = OperatorField.identity(DIM2)
    j = OperatorField.from_rows(DIM2, [[0.0, -1.0], [1.0, 0.0]])
    sq = j @ j
    assert np.allclose(sq.eval((0.3, 0.4)), -np.eye(2))
    assert np.allclose((j - j).eval((0, 0)), 0.0)
    assert np.allclose((j * 2.0).eval((0, 0)), 2 * j.eval((0, 0)))
    assert j.trace().eval((0, 0)) == 0.0
    assert operator_sup_diff(sq, ident * -1.0, rand_points(2, 4, 53)) < 1e-15
    v = VectorField.from_constants(DIM2, (1.0, 0.0))
    assert np.allclose(j.apply(v).eval((0, 0)), [0.0, 1.0])


def test_det_and_inverse():
    rows = [
        [parse_field("1 + s^2", DIM2), parse_field("t", DIM2)],
        [parse_field("t", DIM2), parse_field("2", DIM2)],
    ]
    det = det_field(rows, DIM2)
    p = (0.5, 0.3)
    assert det.eval(p) == pytest.approx((1.25) * 2 - 0.09, rel=1e-14)
    inv, det2 = invert_field_matrix(rows, DIM2)
    assert det2.eval(p) == det.eval(p)
    m = np.array([[rows[i][j].eval(p) for j in range(2)] for i in range(2)])
    mi = np.array([[inv[i][j].eval(p) for j in range(2)] for i in range(2)])
    assert np.allclose(m @ mi, np.eye(2), atol=1e-14)
    zero = ScalarField.constant(DIM2, 0.0)
    with pytest.raises(NondegeneracyError):
        invert_field_matrix([[zero, zero], [zero, zero]], DIM2)


def test_operator_from_pair_round_trip():
    chart = Chart(("x1", "x2", "u1", "u2"))
    big = DifferentialForm.build(chart, 2, [((0, 3), 1.0), ((1, 2), -1.0)])
    omega = DifferentialForm.build(
        chart, 2, [((2, 3), 1.0), ((0, 1), parse_field("-(1 + x1^2)", chart))]
    )
    a_op = operator_from_pair(omega, big)
    rng = np.random.default_rng(59)
    for _ in range(10):
        p = tuple(rng.uniform(-1, 1, 4))
        x = rng.uniform(-1, 1, 4)
        y = rng.uniform(-1, 1, 4)
        ax = a_op.eval(p) @ x
        assert big.apply(p, ax, y) == pytest.approx(omega.apply(p, x, y), rel=1e-12, abs=1e-12)
    back = matrix_to_form(chart, form_to_matrix(omega))
    assert sup_norm(back - omega, rand_points(4, 5, 59)) < 1e-15


def test_vector_field_directional_derivative():
    x = VectorField(DIM2, (parse_field("t", DIM2), parse_field("-s", DIM2)))
    f = parse_field("s^2 + s*t", DIM2)
    out = x.apply(f)
    p = (0.7, -0.2)
    expect = (-0.2) * (2 * 0.7 + (-0.2)) + (-0.7) * 0.7
    assert out.eval(p) == pytest.approx(expect, rel=1e-14)
