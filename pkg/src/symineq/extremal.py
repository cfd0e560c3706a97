"""Extremal laws showing the constant ceil(2b/a) cannot be lowered.

X takes 2n equally likely values on two interleaved arithmetic progressions
with step c = (1 + eps) * a::

    x_i = i * c          for i = 1, ..., n
    x_i = i * c - r      for i = 0, -1, ..., -n + 1

Every pair of distinct atoms is more than ``a`` apart, so
P(|X - Y| <= a) = P(X = Y) = 1/(2n), while P(|X + Y| <= 1) collects about
``1 + floor((1-r)/c) + floor((1+r)/c)`` partners per atom. b is fixed to 1;
other values follow by rescaling the atoms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InputError, InternalInvariantError
from .measure import DiscreteDistribution, NormBall, prob_diff_in, prob_sum_in
from .rational import as_rational, ceil_q, floor_q, format_rational, to_decimal_string

log = logging.getLogger(__name__)

DEFAULT_EPSILON = Fraction(1, 100)
MIN_EPSILON = Fraction(1, 2**64)
ONE = Fraction(1)


@dataclass(frozen=True)
class ExtremalParams:
    n: int
    a: Fraction
    epsilon: Fraction
    r: Fraction

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n!r}")
        for name in ("a", "epsilon", "r"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.a <= 0 or self.epsilon <= 0:
            raise InputError("a and epsilon must be positive")
        if not 0 < self.r <= self.a * (1 + self.epsilon) / 2:
            raise InputError(f"r must satisfy 0 < r <= a(1+eps)/2, got r={self.r}")

    @property
    def step(self) -> Fraction:
        return (1 + self.epsilon) * self.a

    def atom(self, i: int) -> Fraction:
        if not -self.n + 1 <= i <= self.n:
            raise InputError(f"atom index {i} outside -n+1..n")
        return i * self.step if i >= 1 else i * self.step - self.r

    def indices(self) -> range:
        return range(-self.n + 1, self.n + 1)


def build_extremal(params: ExtremalParams) -> DiscreteDistribution:
    w = Fraction(1, 2 * params.n)
    atoms = tuple(((params.atom(i),), w) for i in params.indices())
    mu = DiscreteDistribution(1, atoms)
    if len(mu) != 2 * params.n:
        raise InternalInvariantError(f"extremal atoms collided for {params}")
    return mu


def _scaled_offsets(a: Fraction, epsilon: Fraction, r: Fraction) -> tuple[Fraction, Fraction]:
    c = (1 + epsilon) * a
    return (1 - r) / c, (1 + r) / c


def predicted_limit(a, epsilon, r) -> int:
    """1 + floor((1-r)/((1+eps)a)) + floor((1+r)/((1+eps)a)), the n -> infinity ratio."""
    a, epsilon, r = as_rational(a), as_rational(epsilon), as_rational(r)
    lo, hi = _scaled_offsets(a, epsilon, r)
    return 1 + floor_q(lo) + floor_q(hi)


def target_constant(a) -> int:
    """ceil(2/a): the sharp constant at b = 1."""
    return ceil_q(2 / as_rational(a))


def choose_params(a) -> tuple[Fraction, Fraction]:
    """Pick (epsilon, r) whose predicted limit equals ceil(2/a).

    With k the integer satisfying k < 1/a <= k + 1: if 1/a <= k + 1/2 take r
    small, min(a/8, (1 - k a)/2); otherwise take r = a/2. Epsilon is 1/100 if
    that works, else the largest power of 1/2 below it that does.
    """
    a = as_rational(a)
    if a <= 0:
        raise InputError(f"a must be positive, got {a}")
    inv = 1 / a
    k = ceil_q(inv) - 1
    if inv <= k + Fraction(1, 2):
        r = min(a / 8, (1 - k * a) / 2)
    else:
        r = a / 2
    target = target_constant(a)
    eps = DEFAULT_EPSILON
    if predicted_limit(a, eps, r) == target:
        return eps, r
    eps = Fraction(1, 128)
    while eps >= MIN_EPSILON:
        if predicted_limit(a, eps, r) == target:
            return eps, r
        eps /= 2
    raise InternalInvariantError(f"no epsilon >= 2^-64 reaches ceil(2/a) = {target} for a = {a}, r = {r}")


def index_sets(params: ExtremalParams) -> tuple[list[int], list[int]]:
    """I1 = {i : -x_0 + 1 <= x_i <= -x_{-n+1} - 1}, I2 = {i : -x_n + 1 <= x_i <= -x_1 - 1}, by enumeration."""
    x = params.atom
    n = params.n
    lo1, hi1 = -x(0) + 1, -x(-n + 1) - 1
    lo2, hi2 = -x(n) + 1, -x(1) - 1
    I1 = [i for i in params.indices() if lo1 <= x(i) <= hi1]
    I2 = [i for i in params.indices() if lo2 <= x(i) <= hi2]
    return I1, I2


@dataclass(frozen=True)
class IndexCounts:
    size_I1: int
    size_I2: int
    size_I3: int
    formula_I1: int
    formula_I2: int

    @property
    def clamped(self) -> bool:
        """True when a closed form went negative and was clamped to 0."""
        return self.formula_I1 < 0 or self.formula_I2 < 0


def index_count_formulas(params: ExtremalParams) -> tuple[int, int]:
    lo, hi = _scaled_offsets(params.a, params.epsilon, params.r)
    n = params.n
    size_1 = floor_q(n - 1 - lo) - ceil_q(hi) + 1
    size_2 = floor_q(n - hi) - ceil_q(1 + lo) + 1
    return size_1, size_2


def predicted_index_counts(params: ExtremalParams) -> IndexCounts:
    """Closed-form |I1|, |I2| checked against direct enumeration of the atom list."""
    f1, f2 = index_count_formulas(params)
    I1, I2 = index_sets(params)
    if set(I1) & set(I2):
        raise InternalInvariantError(f"I1 and I2 overlap for {params}")
    if (max(f1, 0), max(f2, 0)) != (len(I1), len(I2)):
        raise InternalInvariantError(
            f"index-count closed forms ({f1}, {f2}) disagree with enumeration "
            f"({len(I1)}, {len(I2)}) for {params}"
        )
    if f1 < 0 or f2 < 0:
        log.warning("index-count closed form negative for %s; clamped to 0", params)
    return IndexCounts(len(I1), len(I2), 2 * params.n - len(I1) - len(I2), f1, f2)


def window_count(params: ExtremalParams, i: int) -> int:
    """Number of atoms in [-x_i - 1, -x_i + 1]."""
    xi = params.atom(i)
    return sum(1 for j in params.indices() if -xi - 1 <= params.atom(j) <= -xi + 1)


def extremal_ratio(params: ExtremalParams, b=ONE) -> Fraction:
    mu = build_extremal(params)
    num = prob_sum_in(mu, NormBall.interval(b))
    den = prob_diff_in(mu, NormBall.interval(params.a))
    return num / den


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    ratio: Fraction
    predicted_limit: int

    @property
    def gap(self) -> Fraction:
        return self.predicted_limit - self.ratio


@dataclass(frozen=True)
class ConvergenceTable:
    a: Fraction
    epsilon: Fraction
    r: Fraction
    predicted_limit: int
    rows: tuple

    @property
    def strict(self) -> bool:
        """Whether the sharp inequality is strict at b = 1 (b > a/2)."""
        return self.a < 2

    @property
    def below_limit(self) -> bool:
        if self.strict:
            return all(row.ratio < self.predicted_limit for row in self.rows)
        return all(row.ratio <= self.predicted_limit for row in self.rows)

    @property
    def n0(self) -> int | None:
        """Smallest tabulated n from which every ratio exceeds limit - 1."""
        n0 = None
        for row in reversed(self.rows):
            if row.ratio > self.predicted_limit - 1:
                n0 = row.n
            else:
                break
        return n0

    @property
    def gaps_nonincreasing(self) -> bool:
        n0 = self.n0
        if n0 is None:
            return False
        tail = [row.gap for row in self.rows if row.n >= n0]
        return all(g1 >= g2 for g1, g2 in zip(tail, tail[1:]))

    @property
    def rate_constant(self) -> float | None:
        """Least-squares C in gap ~ C/n over the table (empirical; no rate is asserted)."""
        pairs = [(1 / row.n, float(row.gap)) for row in self.rows]
        denom = sum(u * u for u, _ in pairs)
        if not denom:
            return None
        return sum(u * g for u, g in pairs) / denom

    @property
    def ok(self) -> bool:
        return self.below_limit and self.gaps_nonincreasing

    def csv_rows(self) -> list[list[str]]:
        header = ["n", "ratio_num", "ratio_den", "ratio_decimal", "predicted_limit", "gap_decimal"]
        body = [
            [
                str(row.n),
                str(row.ratio.numerator),
                str(row.ratio.denominator),
                to_decimal_string(row.ratio),
                str(row.predicted_limit),
                to_decimal_string(row.gap),
            ]
            for row in self.rows
        ]
        return [header, *body]

    def to_json(self) -> dict:
        return {
            "a": format_rational(self.a),
            "epsilon": format_rational(self.epsilon),
            "r": format_rational(self.r),
            "predicted_limit": self.predicted_limit,
            "target_constant": target_constant(self.a),
            "strict": self.strict,
            "n0": self.n0,
            "rate_constant": None if self.rate_constant is None else round(self.rate_constant, 12),
            "ok": self.ok,
            "rows": [
                {
                    "n": row.n,
                    "ratio": format_rational(row.ratio),
                    "ratio_decimal": to_decimal_string(row.ratio),
                    "predicted_limit": row.predicted_limit,
                    "gap": format_rational(row.gap),
                    "gap_decimal": to_decimal_string(row.gap),
                }
                for row in self.rows
            ],
        }


def convergence_table(a, n_values: Iterable[int]) -> ConvergenceTable:
    a = as_rational(a)
    ns = sorted(set(n_values))
    if not ns:
        raise InputError("n_values must be non-empty")
    eps, r = choose_params(a)
    limit = predicted_limit(a, eps, r)
    rows = tuple(ConvergenceRow(n, extremal_ratio(ExtremalParams(n, a, eps, r)), limit) for n in ns)
    return ConvergenceTable(a, eps, r, limit, rows)
