"""Integer cochain calculus over the group of integers.

Coboundaries and cocycle tests in degrees one and two, quasi-morphism
defects and homogenization, floor cocycles, and extraction of the real
class (mod 1) represented by a bounded integer 2-cocycle.

Everything here is exact integer arithmetic except where a real parameter
r enters through a floor; those floors are guarded against double-rounding
at breakpoints (see `guarded_floor_mul`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import Callable, Optional

import numpy as np

__all__ = [
    "IntegerCochain1",
    "IntegerCochain2",
    "FloorCochain",
    "DefectEstimate",
    "ClassValue",
    "guarded_floor_mul",
    "exact_floor_mul",
    "floor_cochain",
    "floor_cocycle",
    "floor_cocycle_block",
    "coboundary1",
    "coboundary_cochain2",
    "cocycle_check2",
    "defect",
    "homogenize",
    "extract_class",
    "circle_distance",
]

# Products r*k closer than this to an integer are re-decided with a rational
# stand-in for r; farther away the double-precision floor is unambiguous.
BREAKPOINT_GUARD = 1e-12
RATIONAL_GUARD_MAX_DEN = 10**6

# Defaults: 2-cocycle scans, defect scans, and class-extraction length.
DEFAULT_COCYCLE_WINDOW = 64
DEFAULT_DEFECT_WINDOW = 256
DEFAULT_EXTRACT_N = 10_000


def guarded_floor_mul(r: float, k: int) -> int:
    """floor(r*k), recomputed with a rational stand-in for r near breakpoints.

    When r*k lands within 1e-12 of an integer the double product cannot be
    trusted to fall on the correct side, so the floor is re-decided exactly
    using the closest fraction to r with denominator <= 10**6.
    """
    x = r * k
    if abs(x - round(x)) < BREAKPOINT_GUARD:
        approx = Fraction(r).limit_denominator(RATIONAL_GUARD_MAX_DEN)
        return math.floor(approx * k)
    return math.floor(x)


def exact_floor_mul(r: float, k: int) -> int:
    """floor(r*k) with r taken at its exact binary value (no guard needed)."""
    p, q = float(r).as_integer_ratio()
    return (p * k) // q


def circle_distance(a: float, b: float) -> float:
    """Distance between a and b in R/Z."""
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


@dataclass(frozen=True)
class IntegerCochain1:
    """A map Z -> Z, evaluated lazily.

    `window_hint` is the default scan range [-N, N] used by operations that
    need a finite window and are not given one explicitly.
    """

    eval: Callable[[int], int]
    window_hint: int = DEFAULT_DEFECT_WINDOW

    def __call__(self, n: int) -> int:
        v = self.eval(n)
        if not isinstance(v, Integral):
            raise TypeError(f"cochain value at {n} is not an integer: {v!r}")
        return int(v)

    def values(self, lo: int, hi: int) -> np.ndarray:
        """Values on the contiguous range [lo, hi] as int64 (overflow-checked)."""
        return np.array([self(n) for n in range(lo, hi + 1)], dtype=np.int64)


@dataclass(frozen=True)
class FloorCochain(IntegerCochain1):
    """The 1-cochain n -> floor(r*n) for a real parameter r."""

    r: float = 0.0


def floor_cochain(r: float, window_hint: int = DEFAULT_DEFECT_WINDOW) -> FloorCochain:
    if not math.isfinite(r):
        raise ValueError(f"floor cochain parameter must be finite, got {r}")
    return FloorCochain(eval=lambda n: guarded_floor_mul(r, n), window_hint=window_hint, r=r)


@dataclass(frozen=True)
class IntegerCochain2:
    """A map Z x Z -> Z, evaluated lazily.

    `block`, when provided, returns the full table on [lo, hi]^2 as an integer
    array in one call; it must agree with `eval` entrywise and exists purely so
    window scans do not pay a Python call per entry.
    """

    eval: Callable[[int, int], int]
    window_hint: int = DEFAULT_COCYCLE_WINDOW
    block: Optional[Callable[[int, int], np.ndarray]] = None

    def __call__(self, n: int, m: int) -> int:
        v = self.eval(n, m)
        if not isinstance(v, Integral):
            raise TypeError(f"cochain value at ({n}, {m}) is not an integer: {v!r}")
        return int(v)

    def table(self, lo: int, hi: int) -> np.ndarray:
        """Table T[i, j] = c(lo + i, lo + j) as int64 (overflow-checked)."""
        if self.block is not None:
            return np.asarray(self.block(lo, hi), dtype=np.int64)
        size = hi - lo + 1
        rows = [[self(n, m) for m in range(lo, hi + 1)] for n in range(lo, hi + 1)]
        out = np.array(rows, dtype=np.int64)
        assert out.shape == (size, size)
        return out


@dataclass(frozen=True)
class DefectEstimate:
    """Largest |f(n) + f(m) - f(n+m)| seen on a scan window.

    `exact` is set when a closed-form argument shows the supremum is attained
    on the window (floor cochains: the global defect is 1 unless r is an
    integer, in which case it is 0).
    """

    value: int
    window: int
    exact: bool


@dataclass(frozen=True)
class ClassValue:
    """An element of R/Z represented in [0, 1) with an error radius."""

    value: float
    error_radius: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value < 1.0:
            raise ValueError(f"class value {self.value} outside [0, 1)")
        if not 0.0 <= self.error_radius < 0.5:
            raise ValueError(f"class error radius {self.error_radius} must be in [0, 1/2)")


def coboundary1(f: IntegerCochain1, n: int, m: int) -> int:
    """delta f (n, m) = f(m) - f(n+m) + f(n), exact integer arithmetic."""
    return f(m) - f(n + m) + f(n)


def coboundary_cochain2(f: IntegerCochain1) -> IntegerCochain2:
    """The 2-cochain delta f; always a 2-cocycle."""

    def block(lo: int, hi: int) -> np.ndarray:
        vals = f.values(2 * lo, 2 * hi)
        idx = np.arange(lo, hi + 1) - 2 * lo
        return vals[idx][None, :] + vals[idx][:, None] - vals[(idx[:, None] + idx[None, :]) - (-2 * lo)]

    return IntegerCochain2(
        eval=lambda n, m: coboundary1(f, n, m), window_hint=f.window_hint, block=block
    )


def floor_cocycle(r: float, n: int, m: int) -> int:
    """floor(r*n) + floor(r*m) - floor(r*(n+m)); always in {-1, 0}."""
    if not math.isfinite(r):
        raise ValueError(f"floor cocycle parameter must be finite, got {r}")
    return guarded_floor_mul(r, n) + guarded_floor_mul(r, m) - guarded_floor_mul(r, n + m)


def _guarded_floor_range(r: float, lo: int, hi: int) -> np.ndarray:
    """floor(r*k) for k in [lo, hi], vectorized with the breakpoint guard."""
    ks = np.arange(lo, hi + 1, dtype=np.int64)
    xs = r * ks
    floors = np.floor(xs)
    near = np.abs(xs - np.rint(xs)) < BREAKPOINT_GUARD
    if near.any():
        for i in np.nonzero(near)[0]:
            floors[i] = guarded_floor_mul(r, int(ks[i]))
    return floors.astype(np.int64)


def floor_cocycle_block(r: float, lo: int, hi: int) -> np.ndarray:
    """Table of floor_cocycle(r, n, m) for n, m in [lo, hi]."""
    if not math.isfinite(r):
        raise ValueError(f"floor cocycle parameter must be finite, got {r}")
    fl = _guarded_floor_range(r, 2 * lo, 2 * hi)
    off = -2 * lo
    idx = np.arange(lo, hi + 1) + off
    return fl[idx][:, None] + fl[idx][None, :] - fl[(idx[:, None] + idx[None, :]) - off]


def _cocycle_check_table(t: np.ndarray, w: int) -> bool:
    """Cocycle test on [-w, w]^3 given the table of c on [-2w, 2w]^2."""
    off = 2 * w
    if np.abs(t).max(initial=0) <= 2**13:
        t = t.astype(np.int16)
    idx = np.arange(-w, w + 1)
    a = idx[:, None, None]
    b = idx[None, :, None]
    d = idx[None, None, :]
    delta = (
        t[b + off, d + off]
        - t[a + b + off, d + off]
        + t[a + off, b + d + off]
        - t[a + off, b + off]
    )
    return not np.any(delta)


def cocycle_check2(c: IntegerCochain2, window: int) -> bool:
    """True iff the degree-2 coboundary of c vanishes on [-window, window]^3.

    delta c(a, b, d) = c(b, d) - c(a+b, d) + c(a, b+d) - c(a, b); evaluating it
    on the window needs c on [-2*window, 2*window]^2.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    w = int(window)
    return _cocycle_check_table(c.table(-2 * w, 2 * w), w)


def _scan_defect_from_values(vals: np.ndarray, lo: int, stride_target: int = 512) -> int:
    """Max |f(n) + f(m) - f(n+m)| over a dense square plus sampled long strips.

    `vals[i]` holds f(lo + i); pairs are restricted to indices available in
    the array. The dense square catches typical suprema; the strided strips
    and doubling diagonal catch slow drift at large arguments.
    """
    n_len = len(vals)
    hi = lo + n_len - 1
    best = 0

    def upd(x: np.ndarray) -> None:
        nonlocal best
        if x.size:
            best = max(best, int(np.abs(x).max()))

    # dense square around the origin; sums reach [-2w, 2w], so w is capped by
    # half the available range on both sides
    w = min(DEFAULT_DEFECT_WINDOW, (-lo) // 2, hi // 2)
    if w >= 1:
        idx = np.arange(-w, w + 1)
        fa = vals[idx - lo]
        upd(fa[:, None] + fa[None, :] - vals[(idx[:, None] + idx[None, :]) - lo])
    # strided strips: n anywhere, m near the origin
    mw = min(64, hi)
    if mw >= 1 and lo <= -mw:
        ms = np.arange(-mw, mw + 1)
        stride = max(1, (hi - mw) // stride_target)
        ns = np.arange(0, hi - mw + 1, stride)
        upd(vals[ns - lo][:, None] + vals[ms - lo][None, :] - vals[(ns[:, None] + ms[None, :]) - lo])
    # doubling diagonal
    half = hi // 2
    if half >= 1:
        ns = np.arange(1, half + 1, max(1, half // stride_target))
        upd(2 * vals[ns - lo] - vals[2 * ns - lo])
    return best


def defect(f: IntegerCochain1, window: int) -> DefectEstimate:
    """Max |coboundary1(f, n, m)| over (n, m) in [-window, window]^2."""
    if window < 1:
        raise ValueError("window must be >= 1")
    w = int(window)
    vals = f.values(-2 * w, 2 * w)
    idx = np.arange(-w, w + 1) + 2 * w
    table = vals[idx][:, None] + vals[idx][None, :] - vals[(idx[:, None] + idx[None, :]) - 2 * w]
    value = int(np.abs(table).max())
    exact = False
    if isinstance(f, FloorCochain):
        # global defect of a floor cochain is 1, or 0 at integer parameters
        closed_form = 0 if float(f.r) == int(f.r) else 1
        exact = value == closed_form
    return DefectEstimate(value=value, window=w, exact=exact)


def homogenize(f: IntegerCochain1, k_max: int) -> tuple[float, float]:
    """Estimate lim f(k)/k for a quasi-morphism f.

    Returns (f(k_max)/k_max, D/k_max) where D is the defect measured on a
    scan reaching k_max.  |f(k)/k - lim| <= D/k is the standard bound for a
    quasi-morphism whose defect is at most D.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    k = int(k_max)
    w = min(DEFAULT_DEFECT_WINDOW, k)
    vals = f.values(-2 * w, max(2 * w, k))
    d = _scan_defect_from_values(vals, -2 * w)
    return f(k) / k, d / k


def _primitive_from_column(c: IntegerCochain2, lo: int, hi: int) -> np.ndarray:
    """f on [lo, hi] with f(0) = f(1) = 0 and f(n+1) = f(n) - c(n, 1)."""
    col = np.array([c(n, 1) for n in range(lo, hi)], dtype=np.int64)  # c(n,1), n in [lo, hi-1]
    f = np.zeros(hi - lo + 1, dtype=np.int64)
    # forward: f(n+1) = f(n) - c(n, 1) for n >= 1
    if hi >= 2:
        f[(2 - lo):] = -np.cumsum(col[1 - lo : hi - 1 - lo + 1])
    # backward: f(n) = f(n+1) + c(n, 1) for n <= -1
    if lo <= -1:
        f[: (0 - lo)] = np.cumsum(col[: 0 - lo][::-1])[::-1]
    return f


def extract_class(
    c: IntegerCochain2,
    N: int = DEFAULT_EXTRACT_N,
    *,
    window: int = DEFAULT_COCYCLE_WINDOW,
    refine: int = 0,
    defect_window: int = DEFAULT_DEFECT_WINDOW,
) -> ClassValue:
    """Real class in [0, 1) of a bounded 2-cocycle c on the integers.

    Builds a primitive f (f(0) = f(1) = 0, f(n+1) = f(n) - c(n, 1), extended
    to negatives by the same relation), and returns (-f(M)/M) mod 1 with error
    radius D/M, where D is the measured defect of f and M the final argument.

    With refine = j > 0 the primitive is continued past N by j doublings,
    f(2n) = 2 f(n) - c(n, n), so M = N * 2**j.  This is exact because f is a
    genuine primitive of a normalized cocycle (c(0, 1) = 0 is required); it
    needs c to be evaluable in O(1) at large arguments.

    For c = delta(floor(s * .)) the result is (-s) mod 1.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if refine < 0:
        raise ValueError("refine must be >= 0")
    w = int(window)
    if w < 1:
        raise ValueError("window must be >= 1")
    tbl = c.table(-2 * w, 2 * w)
    if not _cocycle_check_table(tbl, w):
        raise ValueError(f"input is not a 2-cocycle on window {window}")
    if refine > 0 and c(0, 1) != 0:
        raise ValueError("refinement requires a normalized cocycle (c(0, 1) = 0)")

    w_neg = min(int(defect_window), int(N))
    f = _primitive_from_column(c, -w_neg, int(N))
    # the window bound on |c| measures |delta f| wherever f is a true
    # primitive, which covers degenerate scan ranges at small N
    bound = int(np.abs(tbl).max(initial=0))
    d = max(_scan_defect_from_values(f, -w_neg), bound)

    m = int(N)
    top = int(f[m - (-w_neg)])
    for _ in range(int(refine)):
        top = 2 * top - c(m, m)
        m *= 2

    value = (-top / m) % 1.0
    radius = d / m
    if radius >= 0.5:
        raise ValueError(f"extraction error radius {radius} >= 1/2 (window/N too small)")
    return ClassValue(value=value, error_radius=radius)
