"""Lifts of orientation-preserving circle maps and their rotation classes.

A lift is a strictly increasing self-map F of the line with F(x+1) = F(x)+1.
Evaluation always routes through the fundamental domain, so the equivariance
relation holds exactly in floating point.  On top of the lifts: composition,
translation numbers, the canonical section (value at 0 in [0, 1)), the integer
cocycle measuring the section's failure to be a homomorphism, and the check
that the class extracted from that cocycle reproduces the rotation number.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .cohomology import (
    ClassValue,
    IntegerCochain2,
    circle_distance,
    exact_floor_mul,
    extract_class,
)

__all__ = [
    "CircleLift",
    "RigidLift",
    "ArnoldLift",
    "PiecewiseLinearLift",
    "ComposedLift",
    "CircleCoverElement",
    "GhysReport",
    "compose",
    "compose_lifts",
    "canonical_section_circle",
    "translation_number_circle",
    "euler_cocycle_circle",
    "euler_table_cochain",
    "ghys_check",
    "parse_lift_spec",
    "load_breakpoints",
]

TWO_PI = 2.0 * math.pi

# Materialized piecewise-linear compositions refuse to grow past this.
PL_BREAKPOINT_BUDGET = 100_000

# Orbit tables refuse to grow past this many points; class refinement on
# orbit-backed cocycles would need more.
ORBIT_BUDGET = 10_000_000


class CircleLift(ABC):
    """A lift of an orientation-preserving circle homeomorphism."""

    @abstractmethod
    def _eval01(self, y: float) -> float:
        """Value of the lift at y in [0, 1)."""

    def eval(self, x: float) -> float:
        # reduce to the fundamental domain so F(x + k) = F(x) + k exactly
        k = math.floor(x)
        return k + self._eval01(x - k)

    def invert(self, y: float) -> float:
        """Solve F(x) = y by bisection (the lift is strictly increasing)."""
        lo = y - self._eval01(0.0) - 1.0
        hi = lo + 3.0
        while self.eval(lo) > y:
            lo -= 1.0
        while self.eval(hi) < y:
            hi += 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= 1e-15 * max(1.0, abs(mid)):
                break
            if self.eval(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RigidLift(CircleLift):
    """x -> x + alpha."""

    alpha: float

    def _eval01(self, y: float) -> float:
        return y + self.alpha

    def invert(self, y: float) -> float:
        return y - self.alpha


@dataclass(frozen=True)
class ArnoldLift(CircleLift):
    """x -> x + omega + (K / 2 pi) sin(2 pi x), with 0 <= K < 1 so F' > 0."""

    omega: float
    coupling: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.coupling < 1.0:
            raise ValueError(f"coupling must satisfy 0 <= K < 1, got {self.coupling}")

    def _eval01(self, y: float) -> float:
        return y + self.omega + (self.coupling / TWO_PI) * math.sin(TWO_PI * y)


class PiecewiseLinearLift(CircleLift):
    """Lift interpolating breakpoints (x_i, F(x_i)) with x_i in [0, 1).

    The last segment wraps to (x_0 + 1, F(x_0) + 1); strict monotonicity of
    the breakpoint values is required and validated.
    """

    def __init__(self, points) -> None:
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("breakpoints must be a nonempty list of (x, F(x)) pairs")
        xs, ys = pts[:, 0], pts[:, 1]
        if not (xs[0] >= 0.0 and xs[-1] < 1.0 and np.all(np.diff(xs) > 0)):
            raise ValueError("breakpoint x values must be strictly increasing in [0, 1)")
        if not np.all(np.diff(ys) > 0):
            raise ValueError("breakpoint values must be strictly increasing")
        if ys[-1] >= ys[0] + 1.0:
            raise ValueError("breakpoint values must satisfy F(x0+1) = F(x0) + 1 > F(x_last)")
        self.points = pts
        # periodic extension covering [x0 - 1, x0 + 2): enough for y in [0, 1]
        self._xs = np.concatenate([xs - 1.0, xs, xs + 1.0])
        self._ys = np.concatenate([ys - 1.0, ys, ys + 1.0])

    def _eval01(self, y: float) -> float:
        return float(np.interp(y, self._xs, self._ys))

    def invert(self, y: float) -> float:
        k = math.floor(y - self._ys[len(self.points)])
        # bring the target into the extended table's value range, then shift back
        target = y - k
        return float(np.interp(target, self._ys, self._xs)) + k

    def __repr__(self) -> str:
        return f"PiecewiseLinearLift(<{len(self.points)} breakpoints>)"


@dataclass(frozen=True)
class ComposedLift(CircleLift):
    """Functional composition outer(inner(x)); no materialization."""

    outer: CircleLift
    inner: CircleLift

    def _eval01(self, y: float) -> float:
        return self.outer.eval(self.inner._eval01(y))


def compose_lifts(
    outer: CircleLift, inner: CircleLift, breakpoint_budget: int = PL_BREAKPOINT_BUDGET
) -> CircleLift:
    """Composition outer o inner, materialized where a closed form exists."""
    if isinstance(outer, RigidLift) and isinstance(inner, RigidLift):
        return RigidLift(outer.alpha + inner.alpha)
    if isinstance(outer, PiecewiseLinearLift) and isinstance(inner, PiecewiseLinearLift):
        return _compose_pl(outer, inner, breakpoint_budget)
    return ComposedLift(outer, inner)


def _compose_pl(
    outer: PiecewiseLinearLift, inner: PiecewiseLinearLift, budget: int
) -> PiecewiseLinearLift:
    xs = list(inner.points[:, 0])
    g0 = inner.eval(0.0)
    for bx in outer.points[:, 0]:
        # the unique preimage x in [0, 1) of bx mod 1 under inner
        m = math.ceil(g0 - bx)
        x = inner.invert(bx + m) % 1.0
        xs.append(x)
    xs = sorted(xs)
    uniq = [xs[0]]
    for x in xs[1:]:
        if x - uniq[-1] > 1e-12:
            uniq.append(x)
    if len(uniq) > budget:
        raise ValueError(
            f"composed lift needs {len(uniq)} breakpoints, over the budget of {budget}"
        )
    pts = [(x, outer.eval(inner.eval(x))) for x in uniq]
    return PiecewiseLinearLift(pts)


@dataclass(frozen=True)
class CircleCoverElement:
    """A lift together with an integer deck offset (the lift plus that integer)."""

    lift: CircleLift
    deck_offset: int = 0

    def eval(self, x: float) -> float:
        return self.lift.eval(x) + self.deck_offset

    def with_deck(self, m: int) -> "CircleCoverElement":
        return CircleCoverElement(self.lift, self.deck_offset + int(m))


LiftLike = Union[CircleLift, CircleCoverElement]


def _as_element(g: LiftLike) -> CircleCoverElement:
    if isinstance(g, CircleCoverElement):
        return g
    return CircleCoverElement(g, 0)


def compose(
    F: LiftLike, G: LiftLike, breakpoint_budget: int = PL_BREAKPOINT_BUDGET
) -> CircleCoverElement:
    """(F o G)(x) = F(G(x)); deck offsets add because lifts commute with them."""
    a, b = _as_element(F), _as_element(G)
    return CircleCoverElement(
        compose_lifts(a.lift, b.lift, breakpoint_budget), a.deck_offset + b.deck_offset
    )


def canonical_section_circle(g: LiftLike) -> CircleCoverElement:
    """The unique representative of g with value at 0 in [0, 1)."""
    elem = _as_element(g)
    if isinstance(elem.lift, RigidLift):
        shift = exact_floor_mul(elem.lift.alpha, 1) + elem.deck_offset
    else:
        shift = math.floor(elem.eval(0.0))
    return elem.with_deck(-shift)


def translation_number_circle(F: LiftLike, n_iter: int) -> tuple[float, float]:
    """Orbit average F^n(0)/n with the classical 1/n error bound.

    Rigid lifts are evaluated in closed form and reported with zero radius.
    The deck offset is added after the orbit, so shifting a lift by an integer
    shifts the value by exactly that integer.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    elem = _as_element(F)
    if isinstance(elem.lift, RigidLift):
        return elem.lift.alpha + elem.deck_offset, 0.0
    x = 0.0
    lift_eval = elem.lift.eval
    for _ in range(n_iter):
        x = lift_eval(x)
    return x / n_iter + elem.deck_offset, 1.0 / n_iter


def euler_cocycle_circle(g: LiftLike, h: LiftLike) -> int:
    """Integer m with s(g) o s(h) = s(g o h) + m, s the canonical section.

    The two sides are lifts of the same circle map, so they differ by an
    integer; values farther than 0.1 from an integer indicate an inconsistent
    input and raise.
    """
    sg = canonical_section_circle(g)
    sh = canonical_section_circle(h)
    gh = compose(g, h)
    sgh = canonical_section_circle(gh)
    raw = sg.eval(sh.eval(0.0)) - sgh.eval(0.0)
    m = round(raw)
    if abs(raw - m) > 0.1:
        raise ValueError(f"euler cocycle value {raw} is not near an integer")
    return int(m)


class _FloorOrbit:
    """Floors b(k) = floor(F^k(0)) of a cover element's orbit.

    Rigid lifts use exact rational arithmetic (O(1) per query at any k);
    everything else grows forward/backward orbit tables on demand.
    """

    def __init__(self, elem: CircleCoverElement) -> None:
        self.elem = elem
        self.exact = isinstance(elem.lift, RigidLift)
        if self.exact:
            p, q = float(elem.lift.alpha).as_integer_ratio()
            self._p, self._q = p, q
        else:
            self._fwd = [0.0]
            self._bwd = [0.0]

    def _grow_fwd(self, k: int) -> None:
        if k > ORBIT_BUDGET:
            raise ValueError("orbit budget exceeded; refinement needs a rigid lift")
        ev = self.elem.lift.eval
        x = self._fwd[-1]
        for _ in range(k - len(self._fwd) + 1):
            x = ev(x)
            self._fwd.append(x)

    def _grow_bwd(self, k: int) -> None:
        if k > ORBIT_BUDGET:
            raise ValueError("orbit budget exceeded; refinement needs a rigid lift")
        inv = self.elem.lift.invert
        x = self._bwd[-1]
        for _ in range(k - len(self._bwd) + 1):
            x = inv(x)
            self._bwd.append(x)

    def b(self, k: int) -> int:
        if self.exact:
            return (self._p * k) // self._q + k * self.elem.deck_offset
        if k >= 0:
            if k >= len(self._fwd):
                self._grow_fwd(k)
            return math.floor(self._fwd[k]) + k * self.elem.deck_offset
        if -k >= len(self._bwd):
            self._grow_bwd(-k)
        return math.floor(self._bwd[-k]) + k * self.elem.deck_offset

    def b_range(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self.b(k) for k in range(lo, hi + 1)], dtype=np.int64)


def euler_table_cochain(g: LiftLike) -> IntegerCochain2:
    """The 2-cochain (k, l) -> euler_cocycle_circle(g^k, g^l).

    Computed from the floors b(k) of the canonical orbit as
    b(k+l) - b(k) - b(l), which is what the per-pair definition evaluates to,
    with powers shared across entries instead of recomposed.
    """
    return _orbit_cochain(_FloorOrbit(canonical_section_circle(g)))


def _orbit_cochain(orbit: _FloorOrbit) -> IntegerCochain2:
    def block(lo: int, hi: int) -> np.ndarray:
        b = orbit.b_range(2 * lo, 2 * hi)
        idx = np.arange(lo, hi + 1) - 2 * lo
        return b[(idx[:, None] + idx[None, :]) - (-2 * lo)] - b[idx][:, None] - b[idx][None, :]

    return IntegerCochain2(
        eval=lambda k, l: orbit.b(k + l) - orbit.b(k) - orbit.b(l), block=block
    )


@dataclass(frozen=True)
class GhysReport:
    """Result of comparing the extracted class with the rotation number."""

    class_value: ClassValue
    rho: ClassValue
    difference_mod1: float
    window: int
    N: int
    n_iter: int
    chi_max_abs: int
    cocycle: IntegerCochain2 = field(repr=False)


def ghys_check(
    g: LiftLike,
    window: int = 64,
    N: int = 10_000,
    *,
    n_iter: int = 100_000,
    refine: Optional[int] = None,
) -> GhysReport:
    """Extract the class of the pulled-back section cocycle and compare with rho.

    `refine` defaults to 17 doubling steps for rigid lifts (whose cocycle is
    O(1) at any argument) and 0 otherwise.
    """
    sec = canonical_section_circle(g)
    cochain = euler_table_cochain(sec)
    if refine is None:
        refine = 17 if cochain.orbit.exact else 0
    class_value = extract_class(cochain, N, window=window, refine=refine)
    t_val, t_rad = translation_number_circle(sec, n_iter)
    rho = ClassValue(t_val % 1.0, t_rad)
    tbl = cochain.table(-window, window)
    return GhysReport(
        class_value=class_value,
        rho=rho,
        difference_mod1=circle_distance(class_value.value, rho.value),
        window=window,
        N=N,
        n_iter=n_iter,
        chi_max_abs=int(np.abs(tbl).max()),
        cocycle=cochain,
    )


def load_breakpoints(path) -> PiecewiseLinearLift:
    """Breakpoint file: CSV lines `x,Fx` with x strictly increasing in [0, 1)."""
    rows = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}:{line_no}: expected `x,Fx`, got {line!r}")
        rows.append((float(parts[0]), float(parts[1])))
    return PiecewiseLinearLift(rows)


def parse_lift_spec(spec: str) -> CircleLift:
    """Parse `rigid:<alpha>`, `arnold:<omega>:<K>` or `pl:<breakpoint file>`."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "rigid":
            return RigidLift(float(rest))
        if kind == "arnold":
            omega_s, _, k_s = rest.partition(":")
            return ArnoldLift(float(omega_s), float(k_s))
        if kind == "pl":
            return load_breakpoints(rest)
    except (ValueError, OSError) as exc:
        raise ValueError(f"bad lift spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown lift kind in spec {spec!r}")
