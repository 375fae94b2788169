"""Coordinate charts.

A chart is an ordered tuple of distinct coordinate names. All geometric
objects in this package carry the chart they live on; operations between
objects require equal charts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

_NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        object.__setattr__(self, "names", tuple(names))
        if not self.names:
            raise ChartError("a chart needs at least one coordinate")
        for name in self.names:
            if not _NAME_RE.match(name):
                raise ChartError(f"invalid coordinate name {name!r}")
        if len(set(self.names)) != len(self.names):
            raise ChartError(f"duplicate coordinate names in {self.names!r}")

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ChartError(f"coordinate {name!r} not in chart {self.names!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def __iter__(self):
        return iter(self.names)

    def point(self, values: Sequence[float]) -> tuple[float, ...]:
        """Coerce a sequence to a point on this chart, checking the length."""
        pt = tuple(float(v) for v in values)
        if len(pt) != self.dim:
            raise ChartError(f"point of length {len(pt)} does not fit chart of dim {self.dim}")
        return pt
