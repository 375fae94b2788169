"""Deterministic sample points for numeric verification."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

DEFAULT_SEED = 42
DEFAULT_SAMPLES = 100
SEED_ENV = "MAS_SEED"


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    tol: float | None = None
    output: str | None = None
    json_output: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tolerance must be positive")

    @classmethod
    def from_env(
        cls,
        seed: int | None = None,
        samples: int | None = None,
        tol: float | None = None,
        output: str | None = None,
        json_output: bool = False,
    ) -> "RunConfig":
        if seed is None:
            raw = os.environ.get(SEED_ENV)
            seed = int(raw) if raw is not None else DEFAULT_SEED
        if samples is None:
            samples = DEFAULT_SAMPLES
        return cls(
            seed=seed,
            samples=samples,
            tol=tol,
            output=output,
            json_output=json_output,
        )


def sample_points(
    dim: int,
    count: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    low: float = -1.0,
    high: float = 1.0,
) -> np.ndarray:
    """Uniform points in a box, reproducible for a given seed."""
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=(count, dim))


def sample_points_avoiding(
    dim: int,
    count: int,
    seed: int,
    avoid_axis: int,
    margin: float = 0.1,
    low: float = -1.0,
    high: float = 1.0,
) -> np.ndarray:
    """Sample points whose given coordinate stays away from zero.

    Needed when a coefficient has a sign-degenerate locus along one axis.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(low, high, size=(count, dim))
    col = pts[:, avoid_axis]
    col[np.abs(col) < margin] = margin * np.sign(col[np.abs(col) < margin] + 0.5)
    pts[:, avoid_axis] = col
    return pts
