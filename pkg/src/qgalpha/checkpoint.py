"""Binary checkpoints.

Layout (little-endian): magic ``QGX1``, u32 n, f64 l, f64 alpha, f64 k,
f64 t, u64 step_count, then n*n (f64 real, f64 imag) pairs in row-major
mode order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .dynamics import SimState
from .spectral import Grid, SpectralField

MAGIC = b"QGX1"
_HEADER = struct.Struct("<4sIddddQ")


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class Checkpoint:
    state: SimState
    alpha: float
    k: float


def write_checkpoint(state: SimState, path, alpha: float, k: float):
    g = state.theta.grid
    header = _HEADER.pack(MAGIC, g.n, g.l, alpha, k, state.t, state.step_count)
    body = np.ascontiguousarray(state.theta.coeffs, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + body)


def read_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise CheckpointError(f"{path}: truncated header ({len(data)} bytes)")
    magic, n, l, alpha, k, t, step = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 16 * n * n
    if len(data) != expected:
        raise CheckpointError(f"{path}: expected {expected} bytes for n={n}, found {len(data)}")
    try:
        grid = Grid(n, l)
    except ValueError as exc:
        raise CheckpointError(f"{path}: {exc}") from None
    coeffs = np.frombuffer(data, dtype="<c16", offset=_HEADER.size).reshape(n, n).astype(np.complex128)
    state = SimState(t, SpectralField(grid, coeffs), step)
    return Checkpoint(state, alpha, k)
