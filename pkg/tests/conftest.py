"""Shared helpers for writing gridded-velocity CSV fixtures."""

import csv

import numpy as np


def write_grid_csv(path, axes, components, pressure=None):
    """Write a row-major lattice CSV with header x1..,u1..[,p]."""
    dim = len(axes)
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh]
    cols += [c(*mesh).ravel() for c in components]
    header = [f"x{i}" for i in range(1, dim + 1)] + [
        f"u{i}" for i in range(1, dim + 1)
    ]
    if pressure is not None:
        cols.append(pressure(*mesh).ravel())
        header.append("p")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([repr(float(v)) for v in row])
    return str(path)


def solid_rotation_csv(path, n=16):
    """Rigid rotation u = (-x2, x1) with p = |x|^2 / 2 on [-1, 1]^2."""
    ax = np.linspace(-1.0, 1.0, n)
    return write_grid_csv(
        path,
        [ax, ax],
        [lambda x, y: -y, lambda x, y: x],
        lambda x, y: (x * x + y * y) / 2.0,
    )


def taylor_green_csv(path, n=64):
    """Taylor-Green cell on [0, 2 pi]^2 with its exact pressure."""
    ax = np.linspace(0.0, 2.0 * np.pi, n)
    return write_grid_csv(
        path,
        [ax, ax],
        [
            lambda x, y: -np.sin(x) * np.cos(y),
            lambda x, y: np.cos(x) * np.sin(y),
        ],
        lambda x, y: (np.cos(2.0 * x) + np.cos(2.0 * y)) / 4.0,
    )


def taylor_green_rhs(x, y):
    """Analytic pressure source of the Taylor-Green cell."""
    return -2.0 * np.cos(x + y) * np.cos(x - y)


def stretched_vortex_csv(path, gamma=2.0, n=6):
    """Linear stretching flow u = (-g/2 x1, -g/2 x2, g x3) on [-1, 1]^3."""
    ax = np.linspace(-1.0, 1.0, n)
    half = gamma / 2.0
    return write_grid_csv(
        path,
        [ax, ax, ax],
        [
            lambda x, y, z: -half * x,
            lambda x, y, z: -half * y,
            lambda x, y, z: gamma * z,
        ],
    )
