"""Truncated Fourier series fitting and convergence measurement.

This is the verification side of the Fourier-KAN design: a periodic
function's truncated series converges uniformly when the function is
continuous (coefficients summable), while a jump discontinuity leaves a
non-vanishing sup-norm error band near the jump however many harmonics are
kept.  Coefficients are computed by quadrature on an m-point uniform grid
over one period (the trapezoid rule collapses to equal weights there), so
fits with the same m share coefficients: the degree-G fit is a prefix of
the degree-G' fit for G < G'.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

EVAL_POINTS = 1024  # fixed uniform evaluation grid for error norms
NORMS = ("sup", "l2")


@dataclass
class FourierFit:
    """Coefficients of f_G(x) = a[0] + sum_{k=1..G} a[k] cos(kt) + b[k-1] sin(kt).

    t is x affinely mapped from the fit domain onto [-pi, pi]; a has G+1
    entries (constant term first), b has G.
    """

    grid: int
    a: np.ndarray
    b: np.ndarray
    domain: tuple[float, float] = (-np.pi, np.pi)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        lo, hi = self.domain
        t = -np.pi + 2.0 * np.pi * (x - lo) / (hi - lo)
        out = np.full_like(t, self.a[0])
        for k in range(1, self.grid + 1):
            out += self.a[k] * np.cos(k * t) + self.b[k - 1] * np.sin(k * t)
        return out

    def truncated(self, grid: int) -> "FourierFit":
        """The same fit with only the first `grid` harmonics kept."""
        if not 0 <= grid <= self.grid:
            raise ValueError(f"cannot truncate a grid-{self.grid} fit to {grid}")
        return FourierFit(
            grid=grid, a=self.a[: grid + 1].copy(), b=self.b[:grid].copy(),
            domain=self.domain,
        )


@dataclass
class ErrorCurve:
    """Truncation error as a function of harmonic count, in one norm."""

    grids: tuple[int, ...]
    errors: tuple[float, ...]
    norm: str

    def __post_init__(self):
        if len(self.grids) != len(self.errors):
            raise ValueError(
                f"{len(self.grids)} grids but {len(self.errors)} errors"
            )
        if self.norm not in NORMS:
            raise ValueError(f"norm must be one of {NORMS}, got {self.norm!r}")

    def to_csv(self, target) -> None:
        """Write "grid,error" rows; target is a path or a text file object."""
        if hasattr(target, "write"):
            self._write(target)
        else:
            with open(target, "w", newline="") as fh:
                self._write(fh)

    def _write(self, fh) -> None:
        fh.write("grid,error\n")
        for g, e in zip(self.grids, self.errors):
            fh.write(f"{g},{e!r}\n")

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self._write(buf)
        return buf.getvalue()


def _sample(f, x: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(x), dtype=np.float64)
        if vals.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):  # plain scalar function, not vectorized
        vals = np.asarray([float(f(v)) for v in x], dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function returned non-finite samples")
    return vals


def fourier_coefficients(f, grid: int, m: int = 4096,
                         domain: tuple[float, float] = (-np.pi, np.pi)) -> FourierFit:
    """Quadrature Fourier coefficients of f over one period of the domain.

    Samples at the m left-closed uniform points x_j = lo + (hi-lo) * j / m
    and applies equal weights, which is the trapezoid rule on the periodic
    extension.  m must be at least 4*grid + 4 so the top harmonic stays well
    clear of the Nyquist index.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not hi > lo:
        raise ValueError(f"domain must satisfy lo < hi, got {domain}")
    if grid < 0:
        raise ValueError(f"grid must be >= 0, got {grid}")
    if m < 4 * grid + 4:
        raise ValueError(f"m = {m} is too few samples for grid {grid}; need >= {4 * grid + 4}")
    j = np.arange(m)
    x = lo + (hi - lo) * j / m
    t = -np.pi + 2.0 * np.pi * j / m
    vals = _sample(f, x)
    a = np.empty(grid + 1)
    b = np.empty(grid)
    a[0] = vals.mean()
    for k in range(1, grid + 1):
        a[k] = 2.0 / m * np.dot(vals, np.cos(k * t))
        b[k - 1] = 2.0 / m * np.dot(vals, np.sin(k * t))
    return FourierFit(grid=grid, a=a, b=b, domain=(lo, hi))


def truncation_error(f, fit: FourierFit, norm: str = "sup") -> float:
    """Deviation between f and its fit on the fixed 1024-point uniform grid.

    "sup" is the max absolute deviation; "l2" the root-mean-square one.
    """
    if norm not in NORMS:
        raise ValueError(f"unknown norm {norm!r}; choices: {NORMS}")
    lo, hi = fit.domain
    x = lo + (hi - lo) * np.arange(EVAL_POINTS) / EVAL_POINTS
    diff = _sample(f, x) - fit.evaluate(x)
    if norm == "sup":
        return float(np.max(np.abs(diff)))
    return float(np.sqrt(np.mean(diff * diff)))


def convergence_scan(f, g_max: int, norm: str = "sup", m: int = 4096,
                     domain: tuple[float, float] = (-np.pi, np.pi)) -> ErrorCurve:
    """Truncation error for every harmonic count 1..g_max.

    All fits share one quadrature (coefficients are prefixes of the g_max
    fit), so the curve reflects truncation alone, not sampling differences.
    """
    if g_max < 1:
        raise ValueError(f"g_max must be >= 1, got {g_max}")
    m = max(m, 4 * g_max + 4)
    full = fourier_coefficients(f, g_max, m=m, domain=domain)
    errors = tuple(
        truncation_error(f, full.truncated(g), norm) for g in range(1, g_max + 1)
    )
    return ErrorCurve(grids=tuple(range(1, g_max + 1)), errors=errors, norm=norm)


def _square(x):
    return np.sign(np.sin(np.asarray(x, dtype=np.float64)))


def _sawtooth(x):
    # the identity on one period of (-pi, pi), extended periodically
    x = np.asarray(x, dtype=np.float64)
    return np.mod(x + np.pi, 2.0 * np.pi) - np.pi


FUNCTIONS = {
    "sin3x": lambda x: np.sin(3.0 * np.asarray(x, dtype=np.float64)),
    "exp_sin": lambda x: np.exp(np.sin(np.asarray(x, dtype=np.float64))),
    "sawtooth": _sawtooth,
    "square": _square,
}
