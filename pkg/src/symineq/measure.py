"""Finite discrete laws on R^d and exact pair probabilities for i.i.d. copies.

For X, Y i.i.d. with law ``mu`` and a centered closed norm ball ``F``::

    P(X + Y in F) = sum_{i,j} w_i w_j 1{x_i + x_j in F}
    P(X - Y in F) = sum_{i,j} w_i w_j 1{x_i - x_j in F}

Both are evaluated exactly. Coordinates are rescaled to a common integer
lattice once per distribution so that membership reduces to integer
comparisons; one-dimensional laws use sorted prefix sums, higher dimensions
enumerate ordered pairs.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import accumulate, product
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, InputError
from .rational import as_rational, floor_q, format_rational

Point = tuple  # tuple[Fraction, ...]

_PAIR_BLOCK = 256
_INT64_SAFE = 2**62


def _as_point(value, dimension: int | None = None) -> Point:
    if isinstance(value, (tuple, list)):
        point = tuple(as_rational(c) for c in value)
    else:
        point = (as_rational(value),)
    if not point:
        raise InputError("points must have at least one coordinate")
    if dimension is not None and len(point) != dimension:
        raise DimensionMismatch(f"point {point} does not have dimension {dimension}")
    return point


def _parse_p(p):
    if p in (1, 2):
        return int(p)
    if p == math.inf or (isinstance(p, str) and p.strip().lower() in {"inf", "infinity", "oo"}):
        return math.inf
    if isinstance(p, str) and p.strip() in {"1", "2"}:
        return int(p)
    raise InputError(f"norm exponent must be 1, 2 or inf, got {p!r}")


@dataclass(frozen=True)
class NormBall:
    """Closed ball ``{x in R^d : ||x||_p <= radius}`` centered at the origin.

    In its own norm the ball has inner radius ``radius`` and diameter
    ``2 * radius``, so ``rho`` (inner radius over diameter) is 1/2.
    """

    dimension: int
    p: object
    radius: Fraction

    def __post_init__(self):
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise InputError(f"dimension must be a positive integer, got {self.dimension!r}")
        object.__setattr__(self, "p", _parse_p(self.p))
        radius = as_rational(self.radius)
        if radius < 0:
            raise InputError(f"radius must be >= 0, got {radius}")
        object.__setattr__(self, "radius", radius)

    @classmethod
    def interval(cls, radius) -> "NormBall":
        """The 1-d ball ``[-radius, radius]``."""
        return cls(1, math.inf, radius)

    @property
    def inner_radius(self) -> Fraction:
        return self.radius

    @property
    def diameter(self) -> Fraction:
        return 2 * self.radius

    @property
    def rho(self) -> Fraction:
        if self.radius == 0:
            raise InputError("rho is undefined for a ball of radius 0")
        return self.inner_radius / self.diameter

    @property
    def p_label(self) -> str:
        return "inf" if self.p == math.inf else str(self.p)

    def norm_compare(self, point: Sequence[Fraction], radius: Fraction | None = None) -> bool:
        """Exact test ``||point||_p <= radius`` (defaults to the ball's radius)."""
        r = self.radius if radius is None else radius
        if self.p == math.inf:
            return max(abs(c) for c in point) <= r
        if self.p == 1:
            return sum(abs(c) for c in point) <= r
        return sum(c * c for c in point) <= r * r

    def contains(self, point) -> bool:
        point = _as_point(point, self.dimension)
        return self.norm_compare(point)

    def scaled(self, factor) -> "NormBall":
        return NormBall(self.dimension, self.p, self.radius * as_rational(factor))

    def with_radius(self, radius) -> "NormBall":
        return NormBall(self.dimension, self.p, radius)

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "p": self.p_label, "radius": format_rational(self.radius)}


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely supported probability law on R^d with rational atoms and weights.

    The atom list is canonicalised on construction: duplicate points are
    merged, atoms are sorted lexicographically, so two equal laws compare
    equal and hash alike.
    """

    dimension: int
    atoms: tuple

    def __post_init__(self):
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise InputError(f"dimension must be a positive integer, got {self.dimension!r}")
        merged: dict[Point, Fraction] = {}
        for entry in self.atoms:
            try:
                point, weight = entry
            except (TypeError, ValueError):
                raise InputError(f"atom must be a (point, weight) pair, got {entry!r}") from None
            point = _as_point(point, self.dimension)
            weight = as_rational(weight)
            if weight <= 0:
                raise InputError(f"atom weights must be positive, got {weight} at {point}")
            merged[point] = merged.get(point, Fraction(0)) + weight
        if not merged:
            raise InputError("a distribution needs at least one atom")
        total = sum(merged.values())
        if total != 1:
            raise InputError(f"weights must sum to exactly 1, got {total}")
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))

    @classmethod
    def from_points(cls, points: Iterable, weights: Iterable) -> "DiscreteDistribution":
        points = [_as_point(p) for p in points]
        weights = list(weights)
        if len(points) != len(weights):
            raise InputError("points and weights differ in length")
        if not points:
            raise InputError("a distribution needs at least one atom")
        return cls(len(points[0]), tuple(zip(points, weights)))

    @classmethod
    def point_mass(cls, point) -> "DiscreteDistribution":
        point = _as_point(point)
        return cls(len(point), ((point, 1),))

    @classmethod
    def uniform(cls, points: Iterable) -> "DiscreteDistribution":
        points = list(points)
        w = Fraction(1, len(points))
        return cls.from_points(points, [w] * len(points))

    @property
    def points(self) -> list:
        return [p for p, _ in self.atoms]

    @property
    def weights(self) -> list:
        return [w for _, w in self.atoms]

    def __len__(self):
        return len(self.atoms)

    def translate(self, shift) -> "DiscreteDistribution":
        shift = _as_point(shift, self.dimension)
        return DiscreteDistribution(
            self.dimension,
            tuple((tuple(c + s for c, s in zip(p, shift)), w) for p, w in self.atoms),
        )

    def scale(self, factor) -> "DiscreteDistribution":
        lam = as_rational(factor)
        if lam == 0:
            raise InputError("scale factor must be non-zero")
        return DiscreteDistribution(
            self.dimension, tuple((tuple(lam * c for c in p), w) for p, w in self.atoms)
        )

    def product(self, other: "DiscreteDistribution") -> "DiscreteDistribution":
        """Law of (X, X') with X ~ self and X' ~ other independent."""
        return DiscreteDistribution(
            self.dimension + other.dimension,
            tuple((p + q, w * v) for (p, w), (q, v) in product(self.atoms, other.atoms)),
        )

    def marginal_mass(self, lo, hi) -> Fraction:
        """mu([lo, hi]) for a 1-d law."""
        if self.dimension != 1:
            raise DimensionMismatch("marginal_mass is defined for 1-d distributions only")
        lo, hi = as_rational(lo), as_rational(hi)
        return sum((w for (x,), w in self.atoms if lo <= x <= hi), Fraction(0))

    @cached_property
    def _lattice(self):
        """(D, X, W, V, prefix): coordinates scaled to integers X = D*x, weights to V = W*w."""
        D = reduce(math.lcm, (c.denominator for p in self.points for c in p), 1)
        W = reduce(math.lcm, (w.denominator for w in self.weights), 1)
        X = [tuple(c.numerator * (D // c.denominator) for c in p) for p in self.points]
        V = [w.numerator * (W // w.denominator) for w in self.weights]
        return D, X, W, V, [0, *accumulate(V)]

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "atoms": [
                {"point": [format_rational(c) for c in p], "weight": format_rational(w)}
                for p, w in self.atoms
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "DiscreteDistribution":
        """Parse the ``{"dimension": d, "atoms": [{"point": [...], "weight": "p/q"}]}`` schema."""
        if not isinstance(obj, dict):
            raise InputError("distribution JSON must be an object")
        missing = {"dimension", "atoms"} - obj.keys()
        if missing:
            raise InputError(f"distribution JSON is missing keys: {sorted(missing)}")
        d = obj["dimension"]
        if isinstance(d, bool) or not isinstance(d, int):
            raise InputError(f"'dimension' must be an integer, got {d!r}")
        if not isinstance(obj["atoms"], list):
            raise InputError("'atoms' must be a list")
        atoms = []
        for k, atom in enumerate(obj["atoms"]):
            if not isinstance(atom, dict) or "point" not in atom or "weight" not in atom:
                raise InputError(f"atom #{k} must be an object with 'point' and 'weight'")
            point = atom["point"]
            if not isinstance(point, list):
                raise InputError(f"atom #{k}: 'point' must be a list")
            try:
                atoms.append((tuple(_json_rational(c) for c in point), _json_rational(atom["weight"])))
            except InputError as exc:
                raise InputError(f"atom #{k}: {exc}") from None
        return cls(d, tuple(atoms))


def _json_rational(value) -> Fraction:
    if isinstance(value, float):
        raise InputError(f"JSON rationals must be strings or integers, got float {value!r}")
    return as_rational(value)


def _check_dims(mu: DiscreteDistribution, ball: NormBall):
    if mu.dimension != ball.dimension:
        raise DimensionMismatch(
            f"distribution has dimension {mu.dimension} but the ball has dimension {ball.dimension}"
        )


def _integer_threshold(ball: NormBall, D: int) -> int:
    """Largest integer T such that an integer norm value s satisfies s <= radius*D iff s <= T.

    For p = 2 the returned threshold applies to the squared norm.
    """
    r = ball.radius
    if ball.p == 2:
        return floor_q(r * r * D * D)
    return floor_q(r * D)


def _pair_mass(mu: DiscreteDistribution, ball: NormBall, sign: int) -> Fraction:
    _check_dims(mu, ball)
    D, X, W, V, prefix = mu._lattice
    T = _integer_threshold(ball, D)
    if mu.dimension == 1:
        xs = [x for (x,) in X]
        total = 0
        for xi, vi in zip(xs, V):
            if sign > 0:
                lo, hi = -T - xi, T - xi
            else:
                lo, hi = xi - T, xi + T
            total += vi * (prefix[bisect_right(xs, hi)] - prefix[bisect_left(xs, lo)])
        return Fraction(total, W * W)
    return Fraction(_pair_mass_nd(X, V, W, T, ball.p, sign, ball.dimension), W * W)


def _pair_mass_nd(X, V, W, T, p, sign, d) -> int:
    bound = max(abs(c) for x in X for c in x)
    worst = {1: 2 * d * bound, 2: 4 * d * bound * bound}.get(p, 2 * bound)
    fits = worst < _INT64_SAFE and T < _INT64_SAFE and W < _INT64_SAFE // max(len(V), 1)
    dtype = np.int64 if fits else object
    xs = np.array(X, dtype=dtype).reshape(len(X), d)
    vs = np.array(V, dtype=dtype)
    total = 0
    for start in range(0, len(X), _PAIR_BLOCK):
        block = xs[start:start + _PAIR_BLOCK]
        s = block[:, None, :] + sign * xs[None, :, :]
        if p == math.inf:
            norm = np.abs(s).max(axis=2)
        elif p == 1:
            norm = np.abs(s).sum(axis=2)
        else:
            norm = (s * s).sum(axis=2)
        inside = norm <= T
        rows = inside.astype(dtype) @ vs
        total += sum(int(v) * int(r) for v, r in zip(V[start:start + _PAIR_BLOCK], rows))
    return total


def prob_sum_in(mu: DiscreteDistribution, F: NormBall) -> Fraction:
    """Exact P(X + Y in F) for X, Y i.i.d. ~ mu (closed ball, boundary inside)."""
    return _pair_mass(mu, F, +1)


def prob_diff_in(mu: DiscreteDistribution, K: NormBall) -> Fraction:
    """Exact P(X - Y in K) for X, Y i.i.d. ~ mu."""
    return _pair_mass(mu, K, -1)


@dataclass(frozen=True)
class RatioResult:
    """Numerator and denominator of a probability ratio; ``value`` is None when undefined."""

    numerator: Fraction
    denominator: Fraction

    @property
    def defined(self) -> bool:
        return self.denominator != 0

    @property
    def value(self) -> Fraction | None:
        return self.numerator / self.denominator if self.denominator else None


def ratio(mu: DiscreteDistribution, F: NormBall, K: NormBall, mode: str = "sum") -> RatioResult:
    """P(X +/- Y in F) / P(X - Y in K); ``mode`` selects the sign in the numerator."""
    if mode not in ("sum", "diff"):
        raise InputError(f"mode must be 'sum' or 'diff', got {mode!r}")
    num = prob_sum_in(mu, F) if mode == "sum" else prob_diff_in(mu, F)
    return RatioResult(num, prob_diff_in(mu, K))
