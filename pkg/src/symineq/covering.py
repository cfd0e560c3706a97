"""Covering numbers N(F, K, rho) = min{|A| : F subset of A + rho*K}.

Exact values are only returned where a closed form is provable: intervals in
one dimension and l_inf boxes (product structure). Everything else yields a
``CoveringCertificate``, an explicit center set whose size bounds N from
above, or a volumetric lower bound.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Union

import numpy as np

from .errors import DimensionMismatch, InputError, InternalInvariantError
from .measure import NormBall
from .rational import as_rational, ceil_q, format_rational

HALF = Fraction(1, 2)
MAX_LATTICE_DIMENSION = 4

# 3.14159265358979 < pi < 3.14159265358980
PI_LOWER = Fraction(314159265358979, 10**14)
PI_UPPER = Fraction(314159265358980, 10**14)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] in R (a 1-d region that need not be centered)."""

    lo: Fraction
    hi: Fraction
    dimension: int = field(default=1, init=False)

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, point) -> bool:
        (x,) = point if isinstance(point, tuple) else (point,)
        return self.lo <= x <= self.hi

    def pieces(self):
        return [] if self.empty else [(self.lo, True, self.hi, True)]

    def bounding_radius(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def to_json(self) -> dict:
        return {"interval": [format_rational(self.lo), format_rational(self.hi)]}


@dataclass(frozen=True)
class BallDifference:
    """The set ``outer minus inner`` (F with K removed)."""

    outer: NormBall
    inner: NormBall

    def __post_init__(self):
        if self.outer.dimension != self.inner.dimension:
            raise DimensionMismatch("outer and inner balls differ in dimension")

    @property
    def dimension(self) -> int:
        return self.outer.dimension

    def contains(self, point) -> bool:
        return self.outer.contains(point) and not self.inner.contains(point)

    def pieces(self):
        """1-d only: the two half-open pieces [-b, -a) and (a, b]."""
        if self.dimension != 1:
            raise DimensionMismatch("pieces() is defined for 1-d regions only")
        b, a = self.outer.radius, self.inner.radius
        if b <= a:
            return []
        return [(-b, True, -a, False), (a, False, b, True)]

    def bounding_radius(self) -> Fraction:
        return self.outer.radius

    def to_json(self) -> dict:
        return {"outer": self.outer.to_json(), "inner": self.inner.to_json()}


Region = Union[NormBall, BallDifference, Interval]


def _bounding_radius(region: Region) -> Fraction:
    if isinstance(region, NormBall):
        return region.radius
    return region.bounding_radius()


def _is_box_region(region: Region) -> bool:
    if region.dimension == 1:
        return True
    if isinstance(region, NormBall):
        return region.p == math.inf
    if isinstance(region, BallDifference):
        return region.outer.p == math.inf and region.inner.p == math.inf
    return False


@dataclass(frozen=True)
class CoveringCertificate:
    """A finite center set A with F contained in A + rho*K.

    ``len(centers)`` is an upper bound on N(F, K, rho). ``verification`` is
    ``"exact"`` when containment can be decided exactly (1-d, l_inf boxes)
    and ``"grid:<pitch>"`` when it is checked on a finite grid of test points.
    """

    centers: tuple
    F: Region
    K: NormBall
    rho: Fraction
    grid_pitch: Fraction | None = None

    @property
    def bound(self) -> int:
        return len(self.centers)

    @property
    def verification(self) -> str:
        if _is_box_region(self.F) and (self.K.p == math.inf or self.K.dimension == 1):
            return "exact"
        return f"grid:{format_rational(self._grid_pitch())}"

    def _grid_pitch(self) -> Fraction:
        if self.grid_pitch is not None:
            return self.grid_pitch
        return _max_admissible_pitch(self.K, self.rho) / 2

    def verify(self) -> bool:
        """Check F is contained in the union of the translates center + rho*K."""
        if self.verification == "exact":
            return _verify_boxes(self)
        return _verify_grid(self, self._grid_pitch())

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "rho": format_rational(self.rho),
            "centers": [[format_rational(c) for c in p] for p in self.centers],
            "verified": self.verify(),
            "verification": self.verification,
        }


def _verify_boxes(cert: CoveringCertificate) -> bool:
    # Membership in every region/translate depends on each coordinate only
    # through its order relative to finitely many breakpoints; testing every
    # breakpoint and every gap midpoint per axis decides containment exactly.
    F, d = cert.F, cert.F.dimension
    if isinstance(F, Interval) and F.empty:
        return True
    half = cert.rho * cert.K.radius
    lo_F = F.lo if isinstance(F, Interval) else -_bounding_radius(F)
    hi_F = F.hi if isinstance(F, Interval) else _bounding_radius(F)
    region_breaks = {lo_F, hi_F}
    if isinstance(F, BallDifference):
        region_breaks |= {-F.inner.radius, F.inner.radius}
    masks_per_axis = []
    for axis in range(d):
        groups: dict[Fraction, int] = {}
        for k, c in enumerate(cert.centers):
            groups[c[axis]] = groups.get(c[axis], 0) | (1 << k)
        coords = sorted(groups)
        breaks = set(region_breaks)
        for x in coords:
            breaks |= {x - half, x + half}
        breaks = sorted(b for b in breaks if lo_F <= b <= hi_F)
        values = breaks + [(u + v) / 2 for u, v in zip(breaks, breaks[1:])]
        masks = []
        for v in values:
            mask = 0
            for x in coords[bisect_left(coords, v - half):bisect_right(coords, v + half)]:
                mask |= groups[x]
            masks.append((v, mask))
        masks_per_axis.append(masks)
    for combo in product(*masks_per_axis):
        point = tuple(v for v, _ in combo)
        if not F.contains(point):
            continue
        mask = -1
        for _, m in combo:
            mask &= m
        if not mask:
            return False
    return True


def _verify_grid(cert: CoveringCertificate, pitch: Fraction) -> bool:
    F, K, d = cert.F, cert.K, cert.F.dimension
    if not cert.centers:
        return False
    R = _bounding_radius(F)
    steps = ceil_q(2 * R / pitch)
    axis = [min(-R + k * pitch, R) for k in range(steps + 1)]
    grid = [pt for pt in product(axis, repeat=d) if F.contains(pt)]
    if not grid:
        return True
    scale_vals = [c for pt in grid for c in pt] + [c for pt in cert.centers for c in pt] + [cert.rho * K.radius]
    D = math.lcm(*(v.denominator for v in scale_vals))
    pts = np.array([[int(c * D) for c in pt] for pt in grid], dtype=object)
    ctr = np.array([[int(c * D) for c in pt] for pt in cert.centers], dtype=object)
    radius = int(cert.rho * K.radius * D)
    covered = np.zeros(len(grid), dtype=bool)
    for c in ctr:
        s = pts - c
        if K.p == math.inf:
            inside = np.abs(s).max(axis=1) <= radius
        elif K.p == 1:
            inside = np.abs(s).sum(axis=1) <= radius
        else:
            inside = (s * s).sum(axis=1) <= radius * radius
        covered |= inside.astype(bool)
    return bool(covered.all())


def _positive(name, value) -> Fraction:
    value = as_rational(value)
    if value <= 0:
        raise InputError(f"{name} must be > 0, got {value}")
    return value


def covering_number_interval(b, a, rho) -> int:
    """Exact N([-b, b], [-a, a], rho) = ceil(b / (rho * a))."""
    b, a, rho = _positive("b", b), _positive("a", a), _positive("rho", rho)
    return ceil_q(b / (rho * a))


def covering_number_linf_box(b, a, d: int) -> int:
    """Exact N of the l_inf ball of radius b by half-scaled l_inf balls of radius a: ceil(2b/a)^d."""
    b, a = _positive("b", b), _positive("a", a)
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise InputError(f"d must be a positive integer, got {d!r}")
    return covering_number_interval(b, a, HALF) ** d


def _greedy_centers(pieces, length: Fraction) -> list[Fraction]:
    """Left-to-right greedy cover of a union of intervals by closed intervals of ``length``.

    ``pieces`` are (lo, lo_closed, hi, hi_closed). Each interval is placed at
    the leftmost uncovered point, which is optimal for interval covering.
    """
    centers: list[Fraction] = []
    frontier = None  # everything <= frontier is covered
    for lo, lo_closed, hi, hi_closed in sorted(pieces):
        start, start_open = lo, not lo_closed
        if frontier is not None and frontier >= start:
            start, start_open = frontier, True
        while start < hi or (start == hi and not start_open and hi_closed):
            centers.append(start + length / 2)
            frontier = start + length
            start, start_open = frontier, True
    return centers


def greedy_cover_1d(F_lo, F_hi, K_half_width, rho) -> CoveringCertificate:
    """Greedy cover of [F_lo, F_hi] by translates of rho*[-w, w]; its size is the exact covering number."""
    F = Interval(F_lo, F_hi)
    w, rho = _positive("K_half_width", K_half_width), _positive("rho", rho)
    K = NormBall.interval(w)
    centers = _greedy_centers(F.pieces(), 2 * rho * w)
    return CoveringCertificate(tuple((c,) for c in centers), F, K, rho)


def greedy_cover_annulus(b, a, rho=HALF) -> CoveringCertificate:
    """Greedy cover of [-b, -a) U (a, b] by translates of rho*[-a, a]."""
    b, a, rho = _positive("b", b), _positive("a", a), _positive("rho", rho)
    F = BallDifference(NormBall.interval(b), NormBall.interval(a))
    centers = _greedy_centers(F.pieces(), 2 * rho * a)
    return CoveringCertificate(tuple((c,) for c in centers), F, NormBall.interval(a), rho)


def annulus_constant_1d(b, a) -> int:
    """2*ceil(b/a) - 1, cross-checked against N([-b,b] minus [-a,a], [-a,a], 1/2) + 1."""
    b, a = _positive("b", b), _positive("a", a)
    value = 2 * ceil_q(b / a) - 1
    cert = greedy_cover_annulus(b, a)
    if cert.bound + 1 != value or not cert.verify():
        raise InternalInvariantError(
            f"annulus constant {value} disagrees with greedy cover size {cert.bound} + 1 for b={b}, a={a}"
        )
    return value


def linf_box_certificate(b, a, d: int) -> CoveringCertificate:
    """Product of 1-d greedy covers: an exact-size certificate for l_inf boxes."""
    b, a = _positive("b", b), _positive("a", a)
    axis = [c for (c,) in greedy_cover_1d(-b, b, a, HALF).centers]
    return CoveringCertificate(tuple(product(axis, repeat=d)), NormBall(d, math.inf, b), NormBall(d, math.inf, a), HALF)


def _sqrt_floor_q(x: Fraction, scale_bits: int = 32) -> Fraction:
    """A rational lower bound of sqrt(x), exact when x is a rational square."""
    num, den = x.numerator, x.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    scale = 1 << scale_bits
    # sqrt(num/den) >= isqrt(num*den*scale^2) / (den*scale)
    return Fraction(math.isqrt(num * den * scale * scale), den * scale)


def _max_admissible_pitch(K: NormBall, rho: Fraction) -> Fraction:
    """Largest lattice pitch h whose cells (half-width h/2) fit inside rho*K.

    For p = 2 with non-square dimension this is a rational lower bound of the
    true (irrational) maximum.
    """
    R, d = rho * K.radius, K.dimension
    if K.p == math.inf:
        return 2 * R
    if K.p == 1:
        return 2 * R / d
    return 2 * _sqrt_floor_q(R * R / d)


def _cell_fits(K: NormBall, rho: Fraction, pitch: Fraction) -> bool:
    corner = (pitch / 2,) * K.dimension
    return K.norm_compare(corner, rho * K.radius)


class PitchTooLarge(InputError):
    def __init__(self, pitch, max_pitch):
        super().__init__(
            f"pitch {format_rational(pitch)} is too large for the coverage guarantee; "
            f"maximal admissible pitch is {format_rational(max_pitch)}"
        )
        self.max_pitch = max_pitch


def _box_meets_ball(lo, hi, ball: NormBall) -> bool:
    nearest = tuple(min(max(Fraction(0), l), h) for l, h in zip(lo, hi))
    return ball.norm_compare(nearest)


def _box_inside_ball(lo, hi, ball: NormBall) -> bool:
    return all(ball.norm_compare(c) for c in product(*zip(lo, hi)))


def lattice_cover_upper_bound(F: Region, K: NormBall, rho, pitch) -> CoveringCertificate:
    """Cubic-lattice cover of F by translates of rho*K.

    Cells of side ``pitch`` tile the bounding box of F starting at its lower
    corner; a center is kept when its cell meets F. Every cell must fit in
    its translate of rho*K, which caps the pitch.
    """
    rho, pitch = _positive("rho", rho), _positive("pitch", pitch)
    if F.dimension != K.dimension:
        raise DimensionMismatch("F and K differ in dimension")
    d = F.dimension
    if d > MAX_LATTICE_DIMENSION:
        raise InputError(f"lattice covers are limited to d <= {MAX_LATTICE_DIMENSION}")
    if K.radius <= 0:
        raise InputError("K must have positive radius")
    if not _cell_fits(K, rho, pitch):
        raise PitchTooLarge(pitch, _max_admissible_pitch(K, rho))
    R = _bounding_radius(F)
    per_axis = max(1, ceil_q(2 * R / pitch))
    axis = [-R + pitch / 2 + k * pitch for k in range(per_axis)]
    half = pitch / 2
    centers = []
    for c in product(axis, repeat=d):
        lo = tuple(x - half for x in c)
        hi = tuple(x + half for x in c)
        if isinstance(F, BallDifference):
            keep = _box_meets_ball(lo, hi, F.outer) and not _box_inside_ball(lo, hi, F.inner)
        elif isinstance(F, Interval):
            keep = lo[0] <= F.hi and hi[0] >= F.lo
        else:
            keep = _box_meets_ball(lo, hi, F)
        if keep:
            centers.append(c)
    return CoveringCertificate(tuple(sorted(centers)), F, K, rho, grid_pitch=pitch / 2)


def _unit_volume(p, d: int, pi: Fraction) -> Fraction:
    if p == math.inf:
        return Fraction(2**d)
    if p == 1:
        return Fraction(2**d, math.factorial(d))
    # V_d = 2*pi/d * V_{d-2}, V_0 = 1, V_1 = 2
    v = Fraction(1) if d % 2 == 0 else Fraction(2)
    for k in range(2 if d % 2 == 0 else 3, d + 1, 2):
        v *= 2 * pi / k
    return v


def _volume_lower(ball: NormBall) -> Fraction:
    return _unit_volume(ball.p, ball.dimension, PI_LOWER) * ball.radius**ball.dimension


def _volume_upper(ball: NormBall) -> Fraction:
    return _unit_volume(ball.p, ball.dimension, PI_UPPER) * ball.radius**ball.dimension


def volume_lower_bound(F: Union[NormBall, BallDifference], K: NormBall, rho) -> Fraction:
    """A rational L with N(F, K, rho) >= ceil(L), from vol(F) / vol(rho*K).

    Volumes of l_2 balls use rational enclosures of pi rounded in the
    direction that keeps L a valid lower bound.
    """
    rho = _positive("rho", rho)
    if F.dimension != K.dimension:
        raise DimensionMismatch("F and K differ in dimension")
    if K.radius <= 0:
        raise InputError("K must have positive radius")
    if isinstance(F, NormBall) and F.p == K.p:
        return (F.radius / (rho * K.radius)) ** F.dimension
    if isinstance(F, BallDifference):
        # vol(A minus B) >= vol(A) - vol(B)
        vol_f = max(Fraction(0), _volume_lower(F.outer) - _volume_upper(F.inner))
    else:
        vol_f = _volume_lower(F)
    return vol_f / _volume_upper(K.scaled(rho))


def volume_lower_bound_int(F, K, rho) -> int:
    return max(1, ceil_q(volume_lower_bound(F, K, rho)))


@dataclass(frozen=True)
class CoveringConstant:
    """The constant used on the right of a symmetrization inequality.

    ``value`` is exact when ``exact`` is true; otherwise it is the size of
    ``certificate`` and bounds the true covering number from above.
    """

    value: int
    exact: bool
    certificate: CoveringCertificate | None = None


def covering_constant(F: NormBall, K: NormBall, mode: str = "sum") -> CoveringConstant:
    """N(F, K, rho_K) for ``mode="sum"`` and N(F minus K, K, rho_K) + 1 for ``mode="diff"``."""
    if F.dimension != K.dimension:
        raise DimensionMismatch("F and K differ in dimension")
    if K.radius <= 0:
        raise InputError("K must have positive inner radius")
    if mode not in ("sum", "diff"):
        raise InputError(f"mode must be 'sum' or 'diff', got {mode!r}")
    rho = K.rho
    if mode == "sum":
        if F.radius == 0:
            return CoveringConstant(1, True)
        if F.dimension == 1:
            return CoveringConstant(covering_number_interval(F.radius, K.radius, rho), True)
        if F.p == math.inf and K.p == math.inf:
            return CoveringConstant(covering_number_linf_box(F.radius, K.radius, F.dimension), True)
        cert = lattice_cover_upper_bound(F, K, rho, _max_admissible_pitch(K, rho))
        return CoveringConstant(cert.bound, False, cert)
    if F.radius == 0:
        return CoveringConstant(1, True)
    if F.dimension == 1:
        return CoveringConstant(annulus_constant_1d(F.radius, K.radius), True)
    region = BallDifference(F, K)
    cert = lattice_cover_upper_bound(region, K, rho, _max_admissible_pitch(K, rho))
    return CoveringConstant(cert.bound + 1, False, cert)
