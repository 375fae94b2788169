"""Three-form structures on six-dimensional symplectic charts.

A degree-3 form omega on a 6-dimensional chart induces an endomorphism K
of the tangent space through the pairing

    e^j wedge i_{e_i}(omega) wedge omega = K[j][i] * vol,

a scalar invariant lambda = trace(K^2)/6, a symmetric pairing

    g(X, Y) = -(i_X(omega) wedge i_Y(omega) wedge Omega) / vol,

and a companion 3-form obtained by feeding K into the first slot of omega
and rescaling by |lambda|^(-1/2). Nondegenerate forms satisfy the operator
identity K^2 = lambda * Id; lambda > 0 gives an almost-product structure,
lambda < 0 an almost-complex one. The pairing slot order and the sign of g
are pinned by the catalog structures below and are used consistently by
every consumer in the package.

The module also carries the catalog: the unit-Hessian form, the special
Lagrangian form, the Burgers vortex family parameterized by a coefficient
a(x1, x2), the harmonic 3-form whose graph restriction is the Laplacian,
and the divergence-form pair (omega, theta) on the velocity chart whose
common vanishing on a velocity graph encodes an incompressible flow with
prescribed pressure Laplacian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .exterior import (
    DifferentialForm,
    GraphMap,
    OperatorField,
    SymmetricTensorField,
    VectorField,
    ext_derivative,
    interior_product,
    pullback,
    sup_norm,
    volume_form,
    wedge,
)
from .fieldexpr import Chart, ChartError, ScalarField, absval, sqrt
from .fieldexpr.nodes import const_value
from .fieldexpr.parse import parse_field


class NondegeneracyViolation(ValueError):
    """The operator square of a 3-form is not a multiple of the identity,
    or a vanishing invariant blocks the requested construction."""


def momentum_chart() -> Chart:
    return Chart(("x1", "x2", "x3", "xi1", "xi2", "xi3"))


def velocity_chart() -> Chart:
    return Chart(("x1", "x2", "x3", "u1", "u2", "u3"))


def base_chart3() -> Chart:
    return Chart(("x1", "x2", "x3"))


def canonical_symplectic(chart: Chart) -> DifferentialForm:
    """dq1^dp1 + dq2^dp2 + dq3^dp3 with fibers in the last three slots."""
    if chart.dim != 6:
        raise ChartError("canonical symplectic form needs a 6-dimensional chart")
    return DifferentialForm.build(chart, 2, [((i, i + 3), 1.0) for i in range(3)])


def phase_volume(chart: Chart) -> DifferentialForm:
    return volume_form(chart)


def coefficient_field(a: ScalarField | str | float, chart: Chart) -> ScalarField:
    """Coerce a coefficient given as field, expression text, or number."""
    if isinstance(a, ScalarField):
        if a.chart != chart:
            raise ChartError("coefficient lives on a different chart")
        return a
    if isinstance(a, str):
        return parse_field(a, chart)
    return ScalarField.constant(chart, float(a))


def effectivity_defect(omega: DifferentialForm, big_omega: DifferentialForm) -> DifferentialForm:
    """omega ^ Omega; identically zero exactly when omega is effective."""
    return wedge(omega, big_omega)


def _vol_coefficient(vol: DifferentialForm) -> ScalarField:
    if vol.degree != vol.chart.dim:
        raise ValueError("volume form must have top degree")
    coeff = vol.terms.get(tuple(range(vol.chart.dim)))
    if coeff is None or coeff.is_zero:
        raise NondegeneracyViolation("volume form vanishes")
    return coeff


def hitchin_tensor(omega: DifferentialForm, vol: DifferentialForm | None = None) -> OperatorField:
    """Endomorphism K with e^j ^ i_{e_i}(omega) ^ omega = K[j][i] vol.

    The probe covector sits in front; this slot order is what reproduces
    the catalog block matrices, and flipping it negates K globally.
    """
    chart = omega.chart
    if chart.dim != 6 or omega.degree != 3:
        raise ValueError("tensor construction needs a 3-form on a 6-dimensional chart")
    if vol is None:
        vol = volume_form(chart)
    vcoeff = _vol_coefficient(vol)
    full = tuple(range(6))
    one = ScalarField.constant(chart, 1.0)
    zero = ScalarField.constant(chart, 0.0)
    rows = [[zero for _ in range(6)] for _ in range(6)]
    for i in range(6):
        five = wedge(interior_product(VectorField.basis(chart, i), omega), omega)
        if five.is_zero:
            continue
        for j in range(6):
            probe = DifferentialForm(chart, 1, {(j,): one})
            entry = wedge(probe, five).coeff(full)
            if not entry.is_zero:
                rows[j][i] = entry / vcoeff
    return OperatorField(chart, tuple(tuple(r) for r in rows))


def hitchin_pfaffian(
    omega: DifferentialForm,
    vol: DifferentialForm | None = None,
    points: Sequence[Sequence[float]] | None = None,
    tol: float = 1e-10,
) -> ScalarField:
    """Scalar invariant lambda = trace(K^2)/6.

    When sample points are supplied, the proportionality K^2 = lambda * Id
    is asserted at each of them; a violation beyond the tolerance raises
    NondegeneracyViolation. lambda = 0 is legal here (degenerate form) and
    only blocks downstream constructions that divide by it.
    """
    tensor = hitchin_tensor(omega, vol)
    return _pfaffian_of(tensor, points, tol)


def _pfaffian_of(
    tensor: OperatorField,
    points: Sequence[Sequence[float]] | None = None,
    tol: float = 1e-10,
) -> ScalarField:
    square = tensor @ tensor
    lam = square.trace() * (1.0 / 6.0)
    if points is not None:
        eye = np.eye(6)
        for p in points:
            sq = square.eval(p)
            lv = lam.eval(p)
            scale = max(1.0, float(np.max(np.abs(sq))))
            if float(np.max(np.abs(sq - lv * eye))) > tol * scale:
                raise NondegeneracyViolation(
                    f"operator square is not proportional to the identity at {tuple(p)}"
                )
    return lam


def normalized_tensor(omega: DifferentialForm, vol: DifferentialForm | None = None) -> OperatorField:
    """K / sqrt(|lambda|); squares to sign(lambda) * Id for nondegenerate forms."""
    tensor = hitchin_tensor(omega, vol)
    lam = _pfaffian_of(tensor)
    if lam.is_zero:
        raise NondegeneracyViolation("invariant vanishes identically; cannot normalize")
    return tensor * _inv_sqrt_abs(lam)


def _inv_sqrt_abs(field: ScalarField) -> ScalarField:
    """1/sqrt(|f|), folded to an exact constant when f is constant."""
    value = const_value(field.ast)
    if value is not None:
        return ScalarField.constant(field.chart, 1.0 / math.sqrt(abs(value)))
    return ScalarField.constant(field.chart, 1.0) / sqrt(absval(field))


def lr_metric6(
    omega: DifferentialForm,
    big_omega: DifferentialForm,
    vol: DifferentialForm | None = None,
    normalized: bool = False,
) -> SymmetricTensorField:
    """Symmetric pairing g(X, Y) = -(i_X(omega) ^ i_Y(omega) ^ Omega)/vol.

    The leading minus is part of the convention of record: it makes the
    unit-Hessian structure produce the off-diagonal identity pairing and
    the vortex family produce signature (3, 3). With normalized=True the
    result is divided by sqrt(|lambda|).
    """
    chart = omega.chart
    if chart.dim != 6 or omega.degree != 3:
        raise ValueError("metric construction needs a 3-form on a 6-dimensional chart")
    if big_omega.chart != chart or big_omega.degree != 2:
        raise ValueError("the symplectic companion must be a 2-form on the same chart")
    if vol is None:
        vol = volume_form(chart)
    vcoeff = _vol_coefficient(vol)
    full = tuple(range(6))
    zero = ScalarField.constant(chart, 0.0)
    slots = [interior_product(VectorField.basis(chart, i), omega) for i in range(6)]
    rows = [[zero for _ in range(6)] for _ in range(6)]
    for i in range(6):
        if slots[i].is_zero:
            continue
        for j in range(i, 6):
            entry = wedge(wedge(slots[i], slots[j]), big_omega).coeff(full)
            if entry.is_zero:
                continue
            entry = -entry / vcoeff
            rows[i][j] = entry
            rows[j][i] = entry
    if normalized:
        lam = hitchin_pfaffian(omega, vol)
        if lam.is_zero:
            raise NondegeneracyViolation("invariant vanishes identically; cannot normalize")
        scale = _inv_sqrt_abs(lam)
        rows = [[e * scale for e in row] for row in rows]
    return SymmetricTensorField(chart, tuple(tuple(r) for r in rows))


def lr_compatibility(
    omega: DifferentialForm,
    big_omega: DifferentialForm,
    points: Sequence[Sequence[float]],
    vol: DifferentialForm | None = None,
    tol: float = 1e-10,
) -> dict:
    """Residual of g(A X, Y) = Omega(X, Y) with A = -sign(lambda) K/sqrt(|lambda|).

    The metric enters normalized by sqrt(|lambda|); the single sign constant
    is frozen against the unit-Hessian structure. Equivalent polynomial-exact
    statement: g(K X, Y) = -lambda * Omega(X, Y). Points where |lambda| falls
    below the tolerance are flagged as degenerate and skipped.
    """
    tensor = hitchin_tensor(omega, vol)
    lam = _pfaffian_of(tensor)
    metric = lr_metric6(omega, big_omega, vol)
    omega_mat = _form_matrix_at(big_omega)
    worst = 0.0
    degenerate = []
    for p in points:
        lv = lam.eval(p)
        if abs(lv) < tol:
            degenerate.append(tuple(float(c) for c in p))
            continue
        kmat = tensor.eval(p)
        gmat = metric.eval(p)
        amat = -math.copysign(1.0, lv) * kmat / math.sqrt(abs(lv))
        gnorm = gmat / math.sqrt(abs(lv))
        resid = amat.T @ gnorm - omega_mat(p)
        worst = max(worst, float(np.max(np.abs(resid))))
    return {
        "max_residual": worst,
        "samples": len(points),
        "degenerate_points": degenerate,
        "passed": worst < tol and not degenerate,
    }


def _form_matrix_at(form: DifferentialForm) -> Callable[[Sequence[float]], np.ndarray]:
    def at(point: Sequence[float]) -> np.ndarray:
        n = form.chart.dim
        out = np.zeros((n, n))
        for (i, j), f in form.terms.items():
            v = f.eval(point)
            out[i, j] = v
            out[j, i] = -v
        return out

    return at


def hitchin_dual(omega: DifferentialForm, vol: DifferentialForm | None = None) -> DifferentialForm:
    """Companion 3-form |lambda|^(-1/2) * omega(K X, Y, Z).

    K acts on the first slot only. For the vortex family this splits the
    form into two decomposable pieces via sum and difference.
    """
    chart = omega.chart
    tensor = hitchin_tensor(omega, vol)
    lam = _pfaffian_of(tensor)
    if lam.is_zero:
        raise NondegeneracyViolation("invariant vanishes identically; no dual form")
    scale = _inv_sqrt_abs(lam)
    items = []
    for key in combinations(range(6), 3):
        i, j, k = key
        acc = ScalarField.constant(chart, 0.0)
        for m in range(6):
            entry = tensor.rows[m][i]
            if entry.is_zero:
                continue
            base = omega.coeff((m, j, k))
            if base.is_zero:
                continue
            acc = acc + entry * base
        if not acc.is_zero:
            items.append((key, acc * scale))
    return DifferentialForm.build(chart, 3, items)


def integrability6(
    omega: DifferentialForm,
    big_omega: DifferentialForm,
    points: Sequence[Sequence[float]],
    vol: DifferentialForm | None = None,
    tol: float = 1e-10,
    flatness_points: Sequence[Sequence[float]] | None = None,
) -> dict:
    """Closure of the rescaled form and of its dual, plus metric flatness.

    The form is rescaled by |lambda|^(-1/4) before both closure checks.
    Flatness of the unnormalized metric is sampled through the curvature
    module. The verdict is the conjunction of the three checks.
    """
    from .curvature import flatness_verdict

    lam = hitchin_pfaffian(omega, vol)
    if lam.is_zero:
        raise NondegeneracyViolation("invariant vanishes identically")
    quarter = _inv_sqrt_abs(lam)
    value = const_value(quarter.ast)
    if value is not None:
        scale = ScalarField.constant(omega.chart, math.sqrt(value))
    else:
        scale = sqrt(quarter)
    omega_n = omega * scale
    closure = sup_norm(ext_derivative(omega_n), points)
    dual_n = hitchin_dual(omega_n, vol)
    dual_closure = sup_norm(ext_derivative(dual_n), points)
    metric = lr_metric6(omega, big_omega, vol)
    flat = flatness_verdict(metric, flatness_points if flatness_points is not None else points)
    passed = closure < tol and dual_closure < tol and flat["verdict"] == "Flat"
    return {
        "closure_residual": closure,
        "dual_closure_residual": dual_closure,
        "flatness": flat,
        "passed": passed,
    }


@dataclass(frozen=True)
class MAStructure6:
    """Effective 3-form together with the ambient symplectic form."""

    chart: Chart
    omega: DifferentialForm
    big_omega: DifferentialForm

    def __post_init__(self):
        if self.omega.chart != self.chart or self.big_omega.chart != self.chart:
            raise ChartError("forms must live on the structure chart")
        if self.omega.degree != 3 or self.big_omega.degree != 2:
            raise ValueError("structure needs a 3-form and a 2-form")

    @property
    def vol(self) -> DifferentialForm:
        return volume_form(self.chart)

    def effectivity(self) -> DifferentialForm:
        return effectivity_defect(self.omega, self.big_omega)

    @cached_property
    def tensor(self) -> OperatorField:
        return hitchin_tensor(self.omega)

    @cached_property
    def pfaffian(self) -> ScalarField:
        return _pfaffian_of(self.tensor)

    def metric(self, normalized: bool = False) -> SymmetricTensorField:
        return lr_metric6(self.omega, self.big_omega, normalized=normalized)

    def dual(self) -> DifferentialForm:
        return hitchin_dual(self.omega)

    def compatibility(self, points: Sequence[Sequence[float]], tol: float = 1e-10) -> dict:
        return lr_compatibility(self.omega, self.big_omega, points, tol=tol)

    def integrability(
        self,
        points: Sequence[Sequence[float]],
        tol: float = 1e-10,
        flatness_points: Sequence[Sequence[float]] | None = None,
    ) -> dict:
        return integrability6(
            self.omega, self.big_omega, points, tol=tol, flatness_points=flatness_points
        )


def hessian_one_structure(chart: Chart | None = None) -> MAStructure6:
    """dxi1^dxi2^dxi3 - dx1^dx2^dx3; graph restriction is hess(f) = 1."""
    chart = chart if chart is not None else momentum_chart()
    omega = DifferentialForm.build(chart, 3, [((3, 4, 5), 1.0), ((0, 1, 2), -1.0)])
    return MAStructure6(chart, omega, canonical_symplectic(chart))


def special_lagrangian_structure(chart: Chart | None = None) -> MAStructure6:
    """Imaginary part of (dx1+i dxi1)^(dx2+i dxi2)^(dx3+i dxi3)."""
    chart = chart if chart is not None else momentum_chart()
    omega = DifferentialForm.build(
        chart,
        3,
        [((1, 2, 3), 1.0), ((0, 2, 4), -1.0), ((0, 1, 5), 1.0), ((3, 4, 5), -1.0)],
    )
    return MAStructure6(chart, omega, canonical_symplectic(chart))


def burgers_threeform(a: ScalarField | str | float, chart: Chart | None = None) -> DifferentialForm:
    """dxi1^dxi2^dx3 + dx1^dx2^dxi3 - a dx1^dx2^dx3 with a = a(x1, x2)."""
    chart = chart if chart is not None else momentum_chart()
    coeff = coefficient_field(a, chart)
    return DifferentialForm.build(
        chart, 3, [((2, 3, 4), 1.0), ((0, 1, 5), 1.0), ((0, 1, 2), -coeff)]
    )


def burgers_structure(a: ScalarField | str | float, chart: Chart | None = None) -> MAStructure6:
    chart = chart if chart is not None else momentum_chart()
    return MAStructure6(chart, burgers_threeform(a, chart), canonical_symplectic(chart))


def laplace_threeform(chart: Chart | None = None) -> DifferentialForm:
    """Harmonic 3-form: restriction to a gradient graph is the Laplacian."""
    chart = chart if chart is not None else momentum_chart()
    return DifferentialForm.build(
        chart, 3, [((1, 2, 3), 1.0), ((0, 2, 4), -1.0), ((0, 1, 5), 1.0)]
    )


@dataclass(frozen=True)
class EulerPair6:
    """Pair of 3-forms on the velocity chart encoding incompressible flow.

    omega carries the pressure coefficient a = (Laplacian p)/2; theta is the
    divergence form. A velocity graph annihilating both is an incompressible
    flow whose pressure satisfies the prescribed Poisson equation.
    """

    chart: Chart
    a: ScalarField
    omega: DifferentialForm
    theta: DifferentialForm
    big_omega: DifferentialForm

    @property
    def vol(self) -> DifferentialForm:
        return volume_form(self.chart)

    def product_defect(self) -> DifferentialForm:
        """theta ^ omega - 3 vol; zero for every coefficient a.

        Odd-degree forms anticommute, so the reversed product carries the
        opposite sign: omega ^ theta = -3 vol.
        """
        return wedge(self.theta, self.omega) - self.vol * 3.0

    def effectivity(self) -> tuple[DifferentialForm, DifferentialForm]:
        return (
            effectivity_defect(self.omega, self.big_omega),
            effectivity_defect(self.theta, self.big_omega),
        )


def euler_pair(a: ScalarField | str | float, chart: Chart | None = None) -> EulerPair6:
    chart = chart if chart is not None else velocity_chart()
    coeff = coefficient_field(a, chart)
    omega = DifferentialForm.build(
        chart,
        3,
        [((0, 1, 2), coeff), ((2, 3, 4), -1.0), ((1, 3, 5), 1.0), ((0, 4, 5), -1.0)],
    )
    theta = DifferentialForm.build(
        chart, 3, [((1, 2, 3), 1.0), ((0, 2, 4), -1.0), ((0, 1, 5), 1.0)]
    )
    return EulerPair6(chart, coeff, omega, theta, canonical_symplectic(chart))


def pair_tensors(pair: EulerPair6) -> tuple[OperatorField, OperatorField]:
    return hitchin_tensor(pair.omega), hitchin_tensor(pair.theta)


def pair_metrics(pair: EulerPair6) -> tuple[SymmetricTensorField, SymmetricTensorField]:
    return (
        lr_metric6(pair.omega, pair.big_omega),
        lr_metric6(pair.theta, pair.big_omega),
    )


def euler_pair_relations(
    pair: EulerPair6, points: Sequence[Sequence[float]], tol: float = 1e-12
) -> dict:
    """Pointwise residuals of the block-matrix algebra of the pair.

    Checks K_omega^2 = -4a Id, K_theta^2 = 0, the anticommutator -4 Id,
    the commutator 4 diag(-Id, Id), the two metrics diag(2a Id, 2 Id) and
    diag(2 Id, 0), and the product identity theta ^ omega = 3 vol.
    """
    k_omega, k_theta = pair_tensors(pair)
    g_omega, g_theta = pair_metrics(pair)
    ko2 = k_omega @ k_omega
    kt2 = k_theta @ k_theta
    anti = k_omega @ k_theta + k_theta @ k_omega
    comm = k_omega @ k_theta - k_theta @ k_omega
    eye3 = np.eye(3)
    zero3 = np.zeros((3, 3))
    comm_target = 4.0 * np.block([[-eye3, zero3], [zero3, eye3]])
    anti_target = -4.0 * np.eye(6)
    residuals = {
        "k_omega_square": 0.0,
        "k_theta_square": 0.0,
        "anticommutator": 0.0,
        "commutator": 0.0,
        "g_omega": 0.0,
        "g_theta": 0.0,
        "product": 0.0,
    }
    product = pair.product_defect()
    for p in points:
        av = pair.a.eval(p)
        ko2_target = -4.0 * av * np.eye(6)
        g_omega_target = np.block(
            [[2.0 * av * eye3, zero3], [zero3, 2.0 * eye3]]
        )
        g_theta_target = np.block([[2.0 * eye3, zero3], [zero3, zero3]])
        updates = {
            "k_omega_square": np.max(np.abs(ko2.eval(p) - ko2_target)),
            "k_theta_square": np.max(np.abs(kt2.eval(p))),
            "anticommutator": np.max(np.abs(anti.eval(p) - anti_target)),
            "commutator": np.max(np.abs(comm.eval(p) - comm_target)),
            "g_omega": np.max(np.abs(g_omega.eval(p) - g_omega_target)),
            "g_theta": np.max(np.abs(g_theta.eval(p) - g_theta_target)),
            "product": max(
                (abs(f.eval(p)) for f in product.terms.values()), default=0.0
            ),
        }
        for name, value in updates.items():
            residuals[name] = max(residuals[name], float(value))
    worst = max(residuals.values())
    return {"residuals": residuals, "max_residual": worst, "passed": worst < tol}


def velocity_graph(u: VectorField, phase: Chart | None = None) -> GraphMap:
    """Section x -> (x, u(x)) of the velocity chart over the spatial base."""
    base = u.chart
    if base.dim != 3:
        raise ChartError("velocity graph needs a 3-dimensional base chart")
    phase = phase if phase is not None else velocity_chart()
    coords = tuple(ScalarField.coordinate(base, i) for i in range(3))
    return GraphMap(base, phase, coords + tuple(u.components))


def verify_bilagrangian(
    pair: EulerPair6,
    u: VectorField,
    points: Sequence[Sequence[float]],
    tol: float = 1e-10,
) -> dict:
    """Pull the pair back along the velocity graph and test both vanish.

    Cross-checks the fluid-dynamic reading: the theta pullback equals
    div(u) times the base volume, and for divergence-free u the omega
    pullback vanishes exactly when trace(M^2) = -2a for the velocity
    gradient M.
    """
    graph = velocity_graph(u, pair.chart)
    omega_pull = pullback(pair.omega, graph)
    theta_pull = pullback(pair.theta, graph)
    omega_residual = sup_norm(omega_pull, points)
    theta_residual = sup_norm(theta_pull, points)
    base = u.chart
    div = ScalarField.constant(base, 0.0)
    for i in range(3):
        div = div + u.components[i].derivative(i)
    trace_sq = ScalarField.constant(base, 0.0)
    for i in range(3):
        for j in range(3):
            gij = u.components[i].derivative(j)
            gji = u.components[j].derivative(i)
            if gij.is_zero or gji.is_zero:
                continue
            trace_sq = trace_sq + gij * gji
    a_base = graph.pull_scalar(pair.a)
    pressure = a_base * 2.0 + trace_sq
    div_residual = max((abs(div.eval(p)) for p in points), default=0.0)
    pressure_residual = max((abs(pressure.eval(p)) for p in points), default=0.0)
    passed = omega_residual < tol and theta_residual < tol
    return {
        "omega_residual": omega_residual,
        "theta_residual": theta_residual,
        "div_residual": div_residual,
        "pressure_residual": pressure_residual,
        "passed": passed,
    }
