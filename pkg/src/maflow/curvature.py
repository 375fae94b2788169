"""Pseudo-Riemannian curvature of coordinate metrics.

Christoffel symbols, Riemann and Ricci tensors are evaluated pointwise
from exact first and second derivatives of the metric entries, with the
inverse-metric derivative folded in through d(g^-1) = -g^-1 (dg) g^-1.
Flatness is sampled, not proven: a NonFlat verdict is exact because the
derivatives are, while a Flat verdict holds on the sampled points only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exterior import SymmetricTensorField
from .fieldexpr import Chart, ScalarField
from .ma6 import coefficient_field, momentum_chart


class SingularMetricError(ValueError):
    """Metric determinant vanishes at an evaluation point."""


@dataclass(frozen=True)
class MetricField:
    """Nondegenerate symmetric tensor; determinant checked at each point."""

    g: SymmetricTensorField
    chart: Chart

    def __post_init__(self):
        if self.g.chart != self.chart:
            raise ValueError("tensor chart does not match metric chart")

    @classmethod
    def from_tensor(cls, g: SymmetricTensorField) -> "MetricField":
        return cls(g, g.chart)

    @classmethod
    def from_rows(cls, chart: Chart, rows) -> "MetricField":
        return cls(SymmetricTensorField.from_rows(chart, rows), chart)

    def eval(self, point: Sequence[float]) -> np.ndarray:
        values = self.g.eval(point)
        _check_invertible(values, point)
        return values


def _tensor_of(g: MetricField | SymmetricTensorField) -> SymmetricTensorField:
    return g.g if isinstance(g, MetricField) else g


def _check_invertible(values: np.ndarray, point: Sequence[float]) -> None:
    n = values.shape[0]
    scale = max(1.0, float(np.max(np.abs(values))))
    if abs(np.linalg.det(values)) < 1e-12 * scale**n:
        raise SingularMetricError(
            f"metric is singular at {tuple(float(c) for c in point)}"
        )


def burgers_metric(a: ScalarField | str | float) -> MetricField:
    """Pseudo-metric of the stretched-vortex 3-form on the momentum chart.

    Equals 2a dx3@dx3 + dx1@dxi1 + dxi1@dx1 + dx2@dxi2 + dxi2@dx2
    - dx3@dxi3 - dxi3@dx3 with a = a(x1, x2); signature (3, 3) wherever
    the coefficient is finite.
    """
    chart = momentum_chart()
    if isinstance(a, ScalarField) and a.chart != chart and a.chart.dim == 2:
        x1 = ScalarField.coordinate(chart, 0)
        x2 = ScalarField.coordinate(chart, 1)
        a = a.compose(chart, (x1, x2))
    a_field = coefficient_field(a, chart)
    zero = ScalarField.constant(chart, 0.0)
    one = ScalarField.constant(chart, 1.0)
    rows = [[zero] * 6 for _ in range(6)]
    rows[0][3] = rows[3][0] = one
    rows[1][4] = rows[4][1] = one
    rows[2][5] = rows[5][2] = -one
    rows[2][2] = a_field * 2.0
    return MetricField.from_rows(chart, rows)


class _CurvatureEngine:
    """Precomputed derivative fields of one metric, reused across points."""

    def __init__(self, tensor: SymmetricTensorField, order: int):
        self.chart = tensor.chart
        self.n = tensor.chart.dim
        n = self.n
        self.entries = tensor.entries
        self.first = [
            [[tensor.entries[i][j].derivative(k) for j in range(n)] for i in range(n)]
            for k in range(n)
        ]
        self.second = None
        if order >= 2:
            self.second = [
                [
                    [
                        [
                            tensor.entries[i][j].derivative(k, m) if k <= m else None
                            for j in range(n)
                        ]
                        for i in range(n)
                    ]
                    for m in range(n)
                ]
                for k in range(n)
            ]

    def _matrix_at(self, fields, point) -> np.ndarray:
        n = self.n
        out = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                v = fields[i][j].eval(point)
                out[i, j] = v
                out[j, i] = v
        return out

    def values(self, point: Sequence[float]):
        n = self.n
        g = self._matrix_at(self.entries, point)
        _check_invertible(g, point)
        ginv = np.linalg.inv(g)
        d1 = np.stack([self._matrix_at(self.first[k], point) for k in range(n)])
        d2 = None
        if self.second is not None:
            d2 = np.empty((n, n, n, n))
            for k in range(n):
                for m in range(k, n):
                    block = self._matrix_at(self.second[k][m], point)
                    d2[k, m] = block
                    d2[m, k] = block
        return g, ginv, d1, d2

    def christoffel_at(self, point: Sequence[float]) -> np.ndarray:
        _, ginv, d1, _ = self.values(point)
        t = self._lowered(d1)
        return 0.5 * np.einsum("kl,lij->kij", ginv, t)

    @staticmethod
    def _lowered(d1: np.ndarray) -> np.ndarray:
        # t[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
        return (
            np.einsum("ijl->lij", d1)
            + np.einsum("jil->lij", d1)
            - d1
        )

    def riemann_at(self, point: Sequence[float]) -> np.ndarray:
        _, ginv, d1, d2 = self.values(point)
        t = self._lowered(d1)
        gamma = 0.5 * np.einsum("kl,lij->kij", ginv, t)
        dginv = -np.einsum("ka,mab,bl->mkl", ginv, d1, ginv)
        # dt[m, l, i, j] = d_m t[l, i, j]
        dt = np.einsum("mijl->mlij", d2) + np.einsum("mjil->mlij", d2) - d2
        dgamma = 0.5 * (
            np.einsum("mkl,lij->mkij", dginv, t)
            + np.einsum("kl,mlij->mkij", ginv, dt)
        )
        return (
            np.einsum("iljk->lijk", dgamma)
            - np.einsum("jlik->lijk", dgamma)
            + np.einsum("lim,mjk->lijk", gamma, gamma)
            - np.einsum("ljm,mik->lijk", gamma, gamma)
        )


def christoffel(
    g: MetricField | SymmetricTensorField, point: Sequence[float]
) -> np.ndarray:
    """Levi-Civita symbols Gamma[k][i][j] at a point, symmetric in (i, j)."""
    return _CurvatureEngine(_tensor_of(g), order=1).christoffel_at(point)


def riemann(
    g: MetricField | SymmetricTensorField, point: Sequence[float]
) -> np.ndarray:
    """Curvature R[l][i][j][k], antisymmetric in (i, j), first-Bianchi clean."""
    return _CurvatureEngine(_tensor_of(g), order=2).riemann_at(point)


def ricci(
    g: MetricField | SymmetricTensorField, point: Sequence[float]
) -> np.ndarray:
    """Contraction Ricci[j][k] = R[i][i][j][k]; symmetric."""
    return np.einsum("iijk->jk", riemann(g, point))


def _sampled_verdict(
    g: MetricField | SymmetricTensorField,
    points: Sequence[Sequence[float]],
    reduce_tensor,
    tol_factor: float,
) -> dict:
    engine = _CurvatureEngine(_tensor_of(g), order=2)
    max_entry = 0.0
    witness = None
    scale = 1.0
    singular = []
    checked = 0
    for p in points:
        try:
            values = engine.riemann_at(p)
            metric_values = engine._matrix_at(engine.entries, p)
        except SingularMetricError:
            singular.append(tuple(float(c) for c in p))
            continue
        checked += 1
        scale = max(scale, float(np.max(np.abs(metric_values))))
        worst = float(np.max(np.abs(reduce_tensor(values))))
        if worst > max_entry:
            max_entry = worst
            witness = tuple(float(c) for c in p)
    if checked == 0:
        raise SingularMetricError("metric is singular at every sample point")
    threshold = tol_factor * scale
    flat = max_entry < threshold
    return {
        "verdict": "Flat" if flat else "NonFlat",
        "max_entry": max_entry,
        "witness": None if flat else witness,
        "threshold": threshold,
        "mode": "sampled flatness",
        "points_checked": checked,
        "singular_points": singular,
    }


def flatness_verdict(
    g: MetricField | SymmetricTensorField, points: Sequence[Sequence[float]]
) -> dict:
    """Sampled verdict on the full curvature tensor.

    Flat iff max |Riemann| over the sample is below 1e-9 times the metric
    scale. Singular sample points are skipped and reported.
    """
    return _sampled_verdict(g, points, lambda r: r, 1e-9)


def ricci_flat_verdict(
    g: MetricField | SymmetricTensorField, points: Sequence[Sequence[float]]
) -> dict:
    """Sampled verdict on the Ricci contraction, same thresholds as flatness."""
    out = _sampled_verdict(g, points, lambda r: np.einsum("iijk->jk", r), 1e-9)
    out["verdict"] = "RicciFlat" if out["verdict"] == "Flat" else "NonRicciFlat"
    return out


def curvature_report(
    g: MetricField | SymmetricTensorField, points: Sequence[Sequence[float]]
) -> dict:
    """Riemann and Ricci maxima with both sampled verdicts, for reporting."""
    engine = _CurvatureEngine(_tensor_of(g), order=2)
    riemann_max = 0.0
    ricci_max = 0.0
    riemann_witness = None
    ricci_witness = None
    scale = 1.0
    singular = []
    checked = 0
    for p in points:
        try:
            full = engine.riemann_at(p)
            metric_values = engine._matrix_at(engine.entries, p)
        except SingularMetricError:
            singular.append(tuple(float(c) for c in p))
            continue
        checked += 1
        scale = max(scale, float(np.max(np.abs(metric_values))))
        r_full = float(np.max(np.abs(full)))
        r_ricci = float(np.max(np.abs(np.einsum("iijk->jk", full))))
        if r_full > riemann_max:
            riemann_max = r_full
            riemann_witness = tuple(float(c) for c in p)
        if r_ricci > ricci_max:
            ricci_max = r_ricci
            ricci_witness = tuple(float(c) for c in p)
    if checked == 0:
        raise SingularMetricError("metric is singular at every sample point")
    threshold = 1e-9 * scale
    flat = riemann_max < threshold
    ricci_flat = ricci_max < threshold
    return {
        "riemann_max": riemann_max,
        "ricci_max": ricci_max,
        "threshold": threshold,
        "mode": "sampled flatness",
        "points_checked": checked,
        "singular_points": singular,
        "verdicts": {
            "flat": "Flat" if flat else "NonFlat",
            "ricci_flat": "RicciFlat" if ricci_flat else "NonRicciFlat",
        },
        "witnesses": {
            "riemann": None if flat else riemann_witness,
            "ricci": None if ricci_flat else ricci_witness,
        },
    }
