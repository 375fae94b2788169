"""Truncated multivariate Taylor arithmetic.

A :class:`Series` stores Taylor coefficients of a function around a point,
indexed by exponent multi-index. Coefficients carry the 1/alpha! factor, so
the partial derivative for a multi-index is coefficient times alpha!.
Derivatives are exact in the sense that every stored coefficient up to the
series order is the true Taylor coefficient of the (piecewise analytic)
expression; nothing is approximated by differencing.

Order-0 evaluation through this module performs the same floating point
operations as the plain evaluator, so values agree bit for bit no matter
which path computed them.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement

from .errors import DomainError, OrderLimitError
from .nodes import (
    Add,
    Call,
    Compose,
    Deriv,
    Div,
    Konst,
    Lit,
    Mul,
    Neg,
    Node,
    Pow,
    Sub,
    Var,
)

MAX_ORDER = 4

_FACTORIAL = tuple(math.factorial(k) for k in range(MAX_ORDER + 1))


def multi_indices(dim: int, order: int) -> list[tuple[int, ...]]:
    """All exponent multi-indices with total degree <= order, graded lex."""
    out: list[tuple[int, ...]] = []
    for total in range(order + 1):
        block = set()
        for combo in combinations_with_replacement(range(dim), total):
            alpha = [0] * dim
            for axis in combo:
                alpha[axis] += 1
            block.add(tuple(alpha))
        out.extend(sorted(block))
    return out


def _ipow_positive(x, n: int, mul):
    """Binary exponentiation; shared by floats and series for identical
    multiplication trees."""
    result = None
    base = x
    while n:
        if n & 1:
            result = base if result is None else mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


class Series:
    """Truncated Taylor series: dict from exponent tuple to coefficient.

    Absent keys are zero. All coefficients with total degree <= order are
    trustworthy; nothing of higher degree is stored.
    """

    __slots__ = ("dim", "order", "c")

    def __init__(self, dim: int, order: int, c: dict[tuple[int, ...], float]):
        self.dim = dim
        self.order = order
        self.c = c

    @classmethod
    def constant(cls, dim: int, order: int, value: float) -> "Series":
        return cls(dim, order, {(0,) * dim: value} if value != 0.0 else {})

    @classmethod
    def coordinate(cls, dim: int, order: int, index: int, value: float) -> "Series":
        c: dict[tuple[int, ...], float] = {}
        if value != 0.0:
            c[(0,) * dim] = value
        if order >= 1:
            unit = tuple(1 if i == index else 0 for i in range(dim))
            c[unit] = 1.0
        return cls(dim, order, c)

    @property
    def value(self) -> float:
        return self.c.get((0,) * self.dim, 0.0)

    def partial(self, axes: tuple[int, ...]) -> float:
        """Mixed partial for repeated axes, e.g. (0, 0, 1) for d^3/dx0^2 dx1."""
        alpha = [0] * self.dim
        for axis in axes:
            alpha[axis] += 1
        fact = 1
        for a in alpha:
            fact *= _FACTORIAL[a]
        return self.c.get(tuple(alpha), 0.0) * fact

    def neg(self) -> "Series":
        return Series(self.dim, self.order, {k: -v for k, v in self.c.items()})

    def add(self, other: "Series") -> "Series":
        order = min(self.order, other.order)
        out = dict(self.c)
        for k, v in other.c.items():
            if k in out:
                out[k] = out[k] + v
            else:
                out[k] = v
        return Series(self.dim, order, out)

    def sub(self, other: "Series") -> "Series":
        order = min(self.order, other.order)
        out = dict(self.c)
        for k, v in other.c.items():
            if k in out:
                out[k] = out[k] - v
            else:
                out[k] = -v
        return Series(self.dim, order, out)

    def scale(self, factor: float) -> "Series":
        return Series(self.dim, self.order, {k: v * factor for k, v in self.c.items()})

    def mul(self, other: "Series") -> "Series":
        order = min(self.order, other.order)
        out: dict[tuple[int, ...], float] = {}
        for ka, va in self.c.items():
            da = sum(ka)
            for kb, vb in other.c.items():
                if da + sum(kb) > order:
                    continue
                key = tuple(a + b for a, b in zip(ka, kb))
                if key in out:
                    out[key] = out[key] + va * vb
                else:
                    out[key] = va * vb
        return Series(self.dim, order, out)

    def div(self, other: "Series", where: str = "") -> "Series":
        """Long division; the order-0 quotient is the exact float quotient."""
        b0 = other.value
        if b0 == 0.0:
            raise DomainError(f"division by a coefficient that vanishes at the point{where}")
        order = min(self.order, other.order)
        zero = (0,) * self.dim
        quot: dict[tuple[int, ...], float] = {}
        for gamma in multi_indices(self.dim, order):
            s = self.c.get(gamma, 0.0)
            for beta, vb in other.c.items():
                if beta == zero:
                    continue
                diff = tuple(g - b for g, b in zip(gamma, beta))
                if any(d < 0 for d in diff):
                    continue
                cv = quot.get(diff)
                if cv is not None:
                    s = s - vb * cv
            val = s / b0
            if val != 0.0 or gamma == zero:
                quot[gamma] = val
        return Series(self.dim, order, quot)

    def ipow(self, n: int, where: str = "") -> "Series":
        if n == 0:
            return Series.constant(self.dim, self.order, 1.0)
        if n < 0:
            denom = _ipow_positive(self, -n, Series.mul)
            one = Series.constant(self.dim, self.order, 1.0)
            return one.div(denom, where)
        return _ipow_positive(self, n, Series.mul)

    def shift_deriv(self, axis: int) -> "Series":
        """Series of the partial derivative along one axis."""
        out: dict[tuple[int, ...], float] = {}
        for alpha, v in self.c.items():
            k = alpha[axis]
            if k == 0:
                continue
            beta = alpha[:axis] + (k - 1,) + alpha[axis + 1 :]
            out[beta] = v * k
        return Series(self.dim, max(self.order - 1, 0), out)

    def drop_constant(self) -> "Series":
        zero = (0,) * self.dim
        out = {k: v for k, v in self.c.items() if k != zero}
        return Series(self.dim, self.order, out)


def compose_many(outer: Series, parts: list[Series], dim: int, order: int) -> Series:
    """Substitute inner series (with constant terms removed) into outer."""
    zero_inner = (0,) * outer.dim
    result = Series.constant(dim, order, outer.c.get(zero_inner, 0.0))
    powers: list[list[Series]] = []
    for u in parts:
        powers.append([Series.constant(dim, order, 1.0), u])
    for alpha in sorted(outer.c, key=lambda a: (sum(a), a)):
        if alpha == zero_inner:
            continue
        coeff = outer.c[alpha]
        term: Series | None = None
        for j, k in enumerate(alpha):
            if k == 0:
                continue
            while len(powers[j]) <= k:
                powers[j].append(powers[j][-1].mul(powers[j][1]))
            pw = powers[j][k]
            term = pw if term is None else term.mul(pw)
        if term is None:
            continue
        result = result.add(term.scale(coeff))
    return result


def _snippet(node: Node) -> str:
    from .nodes import render

    try:
        text = render(node)
    except Exception:
        return ""
    if len(text) > 48:
        text = text[:45] + "..."
    return f" in '{text}'"


def _coeffs_sin(x0: float, order: int) -> list[float]:
    s, c = math.sin(x0), math.cos(x0)
    cycle = (s, c, -s, -c)
    return [cycle[j % 4] / _FACTORIAL[j] for j in range(order + 1)]


def _coeffs_cos(x0: float, order: int) -> list[float]:
    s, c = math.sin(x0), math.cos(x0)
    cycle = (c, -s, -c, s)
    return [cycle[j % 4] / _FACTORIAL[j] for j in range(order + 1)]


def _coeffs_exp(x0: float, order: int) -> list[float]:
    v = math.exp(x0)
    return [v / _FACTORIAL[j] for j in range(order + 1)]


def series_for_function(fn: str, x0: float, order: int, node: Node) -> list[float]:
    """Taylor coefficients of a library function around x0."""
    try:
        if fn == "sin":
            return _coeffs_sin(x0, order)
        if fn == "cos":
            return _coeffs_cos(x0, order)
        if fn == "exp":
            return _coeffs_exp(x0, order)
        if fn == "log":
            if x0 <= 0.0:
                raise DomainError(f"log of a non-positive value{_snippet(node)}")
            out = [math.log(x0)]
            power = x0
            for j in range(1, order + 1):
                out.append(((-1.0) ** (j - 1)) / (j * power))
                power *= x0
            return out
        if fn == "sqrt":
            if x0 < 0.0:
                raise DomainError(f"sqrt of a negative value{_snippet(node)}")
            if x0 == 0.0 and order >= 1:
                raise DomainError(f"derivative of sqrt at zero{_snippet(node)}")
            out = [math.sqrt(x0)]
            for j in range(1, order + 1):
                out.append(out[j - 1] * (1.5 - j) / (j * x0))
            return out
        if fn == "abs":
            if x0 == 0.0 and order >= 1:
                raise DomainError(f"derivative of abs at zero{_snippet(node)}")
            out = [abs(x0)] + [0.0] * order
            if order >= 1:
                out[1] = 1.0 if x0 > 0.0 else -1.0
            return out
    except OverflowError:
        raise DomainError(f"overflow evaluating {fn}{_snippet(node)}") from None
    raise DomainError(f"unknown function {fn}")


def eval_series(node: Node, point: tuple[float, ...], order: int) -> Series:
    """Taylor series of the expression around the point, to the given order."""
    if order > MAX_ORDER:
        raise OrderLimitError(
            f"jet order {order} exceeds the supported maximum {MAX_ORDER}"
        )
    dim = len(point)
    if isinstance(node, Lit):
        return Series.constant(dim, order, node.value)
    if isinstance(node, Konst):
        return Series.constant(dim, order, node.value)
    if isinstance(node, Var):
        return Series.coordinate(dim, order, node.index, point[node.index])
    if isinstance(node, Neg):
        return eval_series(node.arg, point, order).neg()
    if isinstance(node, Add):
        return eval_series(node.lhs, point, order).add(eval_series(node.rhs, point, order))
    if isinstance(node, Sub):
        return eval_series(node.lhs, point, order).sub(eval_series(node.rhs, point, order))
    if isinstance(node, Mul):
        return eval_series(node.lhs, point, order).mul(eval_series(node.rhs, point, order))
    if isinstance(node, Div):
        num = eval_series(node.lhs, point, order)
        den = eval_series(node.rhs, point, order)
        return num.div(den, _snippet(node))
    if isinstance(node, Pow):
        base = eval_series(node.base, point, order)
        if node.power < 0 and base.value == 0.0:
            raise DomainError(f"negative power of a vanishing base{_snippet(node)}")
        return base.ipow(node.power, _snippet(node))
    if isinstance(node, Call):
        inner = eval_series(node.arg, point, order)
        coeffs = series_for_function(node.fn, inner.value, order, node)
        u = inner.drop_constant()
        outer = Series(1, order, {(j,): coeffs[j] for j in range(order + 1) if coeffs[j] != 0.0 or j == 0})
        return compose_many(outer, [u], dim, order)
    if isinstance(node, Deriv):
        need = order + len(node.axes)
        if need > MAX_ORDER:
            raise OrderLimitError(
                f"jet order {order} of a derivative of order {len(node.axes)} "
                f"needs operand order {need}, above the supported maximum {MAX_ORDER}"
            )
        s = eval_series(node.operand, point, need)
        for axis in node.axes:
            s = s.shift_deriv(axis)
        return s
    if isinstance(node, Compose):
        part_series = [eval_series(p, point, order) for p in node.parts]
        inner_point = tuple(p.value for p in part_series)
        outer = eval_series(node.outer, inner_point, order)
        us = [p.drop_constant() for p in part_series]
        return compose_many(outer, us, dim, order)
    raise TypeError(f"cannot evaluate {node!r}")


def eval_plain(node: Node, point: tuple[float, ...]) -> float:
    """Plain float evaluation; Deriv falls back to the series path."""
    if isinstance(node, Lit):
        return node.value
    if isinstance(node, Konst):
        return node.value
    if isinstance(node, Var):
        return point[node.index]
    if isinstance(node, Neg):
        return -eval_plain(node.arg, point)
    if isinstance(node, Add):
        return eval_plain(node.lhs, point) + eval_plain(node.rhs, point)
    if isinstance(node, Sub):
        return eval_plain(node.lhs, point) - eval_plain(node.rhs, point)
    if isinstance(node, Mul):
        return eval_plain(node.lhs, point) * eval_plain(node.rhs, point)
    if isinstance(node, Div):
        den = eval_plain(node.rhs, point)
        if den == 0.0:
            raise DomainError(f"division by a coefficient that vanishes at the point{_snippet(node)}")
        return eval_plain(node.lhs, point) / den
    if isinstance(node, Pow):
        base = eval_plain(node.base, point)
        if node.power == 0:
            return 1.0
        if node.power < 0:
            if base == 0.0:
                raise DomainError(f"negative power of a vanishing base{_snippet(node)}")
            denom = _ipow_positive(base, -node.power, lambda a, b: a * b)
            return 1.0 / denom
        return _ipow_positive(base, node.power, lambda a, b: a * b)
    if isinstance(node, Call):
        x = eval_plain(node.arg, point)
        try:
            if node.fn == "sin":
                return math.sin(x)
            if node.fn == "cos":
                return math.cos(x)
            if node.fn == "exp":
                return math.exp(x)
            if node.fn == "log":
                if x <= 0.0:
                    raise DomainError(f"log of a non-positive value{_snippet(node)}")
                return math.log(x)
            if node.fn == "sqrt":
                if x < 0.0:
                    raise DomainError(f"sqrt of a negative value{_snippet(node)}")
                return math.sqrt(x)
            if node.fn == "abs":
                return abs(x)
        except OverflowError:
            raise DomainError(f"overflow evaluating {node.fn}{_snippet(node)}") from None
        raise DomainError(f"unknown function {node.fn}")
    if isinstance(node, Deriv):
        s = eval_series(node.operand, point, len(node.axes))
        return s.partial(node.axes)
    if isinstance(node, Compose):
        inner_point = tuple(eval_plain(p, point) for p in node.parts)
        return eval_plain(node.outer, inner_point)
    raise TypeError(f"cannot evaluate {node!r}")
