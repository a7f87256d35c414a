"""Complex functions sampled on uniform phase-space grids.

Phase space is R^{2d}; a GridFunction samples [-L, L)^{2d} with n points
per axis (cell width h = 2L/n) and integrates by the plain Riemann sum,
which is spectrally accurate for the smooth decaying fixtures used here.
Convolution is periodic (fast transform); inputs are expected to decay to
negligible size at the boundary, otherwise wrap-around aliases.
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ConstraintViolated, GridMismatch, ZeroDilation
from .rearrangement import (
    MeasureSamples,
    orlicz_norm,
    rearrange,
    weak_orlicz_norm,
)
from .young import YoungFunction

__all__ = [
    "GridFunction",
    "DilationSpec",
    "convolve",
    "dilate",
    "dilated_convolve",
    "check_tj_constraint",
    "gaussian",
    "grid_l1",
    "grid_lp_norm",
    "grid_orlicz_norm",
    "grid_weak_orlicz_norm",
]

_GRID_TAG = b"OQHAGF1\x00"

TJ_TOL = 1e-12


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on the uniform grid of [-L, L)^{2d}."""

    d: int
    L: float
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("need d >= 1")
        if self.n < 2 or self.n % 2:
            raise ValueError("n must be even and >= 2")
        if self.L <= 0:
            raise ValueError("L must be positive")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.n,) * (2 * self.d):
            raise ValueError(f"values must have shape {(self.n,)*(2*self.d)}")
        if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", vals)

    # -- geometry ------------------------------------------------------

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def cell_volume(self) -> float:
        return self.h ** (2 * self.d)

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    def meshgrid(self) -> list[np.ndarray]:
        return list(np.meshgrid(*([self.axis()] * (2 * self.d)), indexing="ij"))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.d, self.L, self.n, values)

    def same_grid(self, other: "GridFunction") -> bool:
        return (self.d, self.n) == (other.d, other.n) and math.isclose(
            self.L, other.L, rel_tol=1e-12
        )

    # -- measure-theoretic views ----------------------------------------

    def measure_samples(self) -> MeasureSamples:
        v = np.abs(self.values).ravel()
        return MeasureSamples(v, np.full_like(v, self.cell_volume))

    def integral(self) -> complex:
        return complex(np.sum(self.values) * self.cell_volume)

    def boundary_decay(self) -> float:
        """Max |values| on the outermost cells relative to the global max."""
        peak = float(np.max(np.abs(self.values)))
        if peak == 0:
            return 0.0
        shell = 0.0
        for ax in range(2 * self.d):
            sl: list = [slice(None)] * (2 * self.d)
            for edge in (0, -1):
                sl[ax] = edge
                shell = max(shell, float(np.max(np.abs(self.values[tuple(sl)]))))
        return shell / peak

    # -- serialization ---------------------------------------------------

    def to_bytes(self) -> bytes:
        head = _GRID_TAG + struct.pack("<qdq", self.d, self.L, self.n)
        flat = np.ascontiguousarray(self.values).ravel()
        buf = np.empty(2 * flat.size, dtype="<f8")
        buf[0::2] = flat.real
        buf[1::2] = flat.imag
        return head + buf.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "GridFunction":
        if blob[:8] != _GRID_TAG:
            raise ValueError("not a grid-function blob")
        d, L, n = struct.unpack_from("<qdq", blob, 8)
        flat = np.frombuffer(blob, dtype="<f8", offset=8 + 24)
        vals = flat[0::2] + 1j * flat[1::2]
        return cls(int(d), float(L), int(n), vals.reshape((int(n),) * (2 * int(d))))

    def to_csv(self) -> str:
        coords = [c.ravel() for c in self.meshgrid()]
        flat = self.values.ravel()
        buf = io.StringIO()
        buf.write(f"# d={self.d} L={self.L!r} n={self.n}\n")
        buf.write(",".join(f"z{i+1}" for i in range(2 * self.d)) + ",re,im\n")
        for row in zip(*coords, flat):
            *cs, v = row
            buf.write(",".join(repr(float(c)) for c in cs))
            buf.write(f",{float(v.real)!r},{float(v.imag)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        lines = text.strip().splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing grid header line")
        meta = dict(tok.split("=") for tok in lines[0][1:].split())
        d, L, n = int(meta["d"]), float(meta["L"]), int(meta["n"])
        vals = []
        for ln in lines[2:]:
            parts = ln.split(",")
            vals.append(float(parts[-2]) + 1j * float(parts[-1]))
        arr = np.array(vals, dtype=complex).reshape((n,) * (2 * d))
        return cls(d, L, n, arr)


@dataclass(frozen=True)
class DilationSpec:
    """Dilation chain data: scales t_j, signs c_j, exponents p_j, target r.

    Valid specs satisfy sum c_j / t_j^2 = 1 and sum 1/p_j = n - 1 + 1/r,
    both within 1e-12; violations raise ConstraintViolated at construction.
    """

    t: tuple[float, ...]
    c: tuple[int, ...]
    p: tuple[float, ...]
    r: float

    def __post_init__(self):
        t = tuple(float(x) for x in self.t)
        c = tuple(int(x) for x in self.c)
        p = tuple(float(x) for x in self.p)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "p", p)
        if not (len(t) == len(c) == len(p)) or not t:
            raise ConstraintViolated("t, c, p must be non-empty and equal length")
        if any(x == 0 for x in t):
            raise ConstraintViolated("dilation scales must be nonzero")
        if any(x not in (-1, 1) for x in c):
            raise ConstraintViolated("signs must be +-1")
        if any(x < 1 for x in p) or self.r < 1:
            raise ConstraintViolated("exponents must be >= 1")
        if not check_tj_constraint(t, c):
            raise ConstraintViolated("sum c_j/t_j^2 != 1")
        lhs = sum(1.0 / x for x in p)
        rhs = len(p) - 1 + 1.0 / self.r
        if abs(lhs - rhs) > 1e-12:
            raise ConstraintViolated(
                f"sum 1/p_j = {lhs:.15g} != n-1+1/r = {rhs:.15g}"
            )

    @property
    def n(self) -> int:
        return len(self.t)


def check_tj_constraint(t, c) -> bool:
    """|sum c_j / t_j^2 - 1| <= 1e-12."""
    t = np.asarray(t, dtype=float)
    c = np.asarray(c, dtype=float)
    if t.shape != c.shape:
        raise ValueError("t and c must have equal length")
    if np.any(t == 0):
        raise ValueError("t_j must be nonzero")
    return bool(abs(float(np.sum(c / t**2)) - 1.0) <= TJ_TOL)


def convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Periodic convolution scaled by the cell volume.

    Exact for the discrete sum sum_z f(z) g(w - z) h^{2d}; approximates
    the continuum convolution when both inputs decay at the boundary.
    """
    if not f.same_grid(g):
        raise GridMismatch("operands live on different grids")
    ff = np.fft.fftn(f.values)
    gg = np.fft.fftn(g.values)
    conv = np.fft.ifftn(ff * gg)
    shift = tuple(-(f.n // 2) for _ in range(2 * f.d))
    conv = np.roll(conv, shift, axis=tuple(range(2 * f.d)))
    return f.with_values(conv * f.cell_volume)


def dilate(a: GridFunction, t: float) -> GridFunction:
    """Resample a(t z) on the same grid by multilinear interpolation;
    points mapped outside the domain read as 0. t = 1 is exact."""
    if t == 0:
        raise ZeroDilation("dilation scale must be nonzero")
    if t == 1.0:
        return a
    # query physical point t*z -> fractional index (t*z + L)/h
    axis_idx = (t * a.axis() + a.L) / a.h
    grids = np.meshgrid(*([axis_idx] * (2 * a.d)), indexing="ij")
    coords = np.stack([g.ravel() for g in grids])
    re = ndimage.map_coordinates(a.values.real, coords, order=1, cval=0.0)
    im = ndimage.map_coordinates(a.values.imag, coords, order=1, cval=0.0)
    return a.with_values((re + 1j * im).reshape(a.values.shape))


def dilated_convolve(spec: DilationSpec, funcs: list[GridFunction]) -> GridFunction:
    """Chain a^1_{t_1} * ... * a^n_{t_n} via the rescaling identity
    a_s * b_t = |s|^{-2d} (a * b_{t/s})_s, so intermediates stay on-grid
    and the only resampling is a final dilation by t_1.

    (The substitution z -> s z inside the convolution integral carries the
    Jacobian |s|^{-2d}; dropping it is off by |s|^{2d} per chain step, as
    the two-path consistency test demonstrates.)
    """
    if len(funcs) != spec.n:
        raise GridMismatch(f"spec has n={spec.n} but {len(funcs)} functions given")
    acc = funcs[0]
    s = spec.t[0]
    for a_j, t_j in zip(funcs[1:], spec.t[1:]):
        acc = convolve(acc, dilate(a_j, t_j / s))
    jac = abs(s) ** (-2 * funcs[0].d * (spec.n - 1))
    out = dilate(acc, s)
    return out.with_values(out.values * jac)


def gaussian(
    d: int,
    L: float,
    n: int,
    center=None,
    width: float = 1.0,
    amplitude: complex = 1.0,
) -> GridFunction:
    """amplitude * exp(-|z - center|^2 / (2 width)) sampled on the grid."""
    if width <= 0:
        raise ValueError("width must be positive")
    if center is None:
        center = np.zeros(2 * d)
    center = np.asarray(center, dtype=float)
    if center.shape != (2 * d,):
        raise ValueError(f"center must have {2*d} components")
    axis = -L + (2.0 * L / n) * np.arange(n)
    sq = np.zeros((n,) * (2 * d))
    for k in range(2 * d):
        shape = [1] * (2 * d)
        shape[k] = n
        sq = sq + ((axis - center[k]) ** 2).reshape(shape)
    return GridFunction(d, L, n, amplitude * np.exp(-sq / (2.0 * width)))


# -- grid norms ------------------------------------------------------------


def grid_l1(f: GridFunction) -> float:
    return float(np.sum(np.abs(f.values)) * f.cell_volume)


def grid_lp_norm(f: GridFunction, p: float) -> float:
    if math.isinf(p):
        return float(np.max(np.abs(f.values)))
    return float(
        (np.sum(np.abs(f.values) ** p) * f.cell_volume) ** (1.0 / p)
    )


def grid_orlicz_norm(f: GridFunction, phi: YoungFunction) -> float:
    """Orlicz norm of the grid samples seen as a simple function with
    cell-volume level measures."""
    return orlicz_norm(rearrange(f.measure_samples()), phi)


def grid_weak_orlicz_norm(f: GridFunction, phi: YoungFunction) -> float:
    return weak_orlicz_norm(rearrange(f.measure_samples()), phi)
