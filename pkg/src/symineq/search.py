"""Checking the symmetrization inequalities on concrete laws.

Every verdict here is decided in exact rational arithmetic. Floating point
appears only inside the Dinkelbach iterations (whose output is rounded to
rationals and re-evaluated exactly) and in Monte Carlo sampling.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .covering import CoveringConstant, covering_constant
from .errors import InputError, TheoremViolation
from .measure import DiscreteDistribution, NormBall, prob_diff_in, prob_sum_in
from .rational import as_rational, ceil_q, format_rational, to_decimal_string

DENOMINATOR_CAP = 2**32
U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class InequalityCheck:
    """Outcome of checking ``lhs <= constant * denominator`` (``<`` when ``strict``)."""

    name: str
    lhs: Fraction
    denominator: Fraction
    constant: int
    strict: bool
    constant_exact: bool = True

    @property
    def rhs(self) -> Fraction:
        return self.constant * self.denominator

    @property
    def slack(self) -> Fraction:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.slack > 0 if self.strict else self.slack >= 0

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "strict": self.strict,
            "constant": self.constant,
            "constant_exact": self.constant_exact,
            "lhs": format_rational(self.lhs),
            "rhs": format_rational(self.rhs),
            "slack": format_rational(self.slack),
            "slack_decimal": to_decimal_string(self.slack),
        }


def _positive(name, value) -> Fraction:
    value = as_rational(value)
    if value <= 0:
        raise InputError(f"{name} must be > 0, got {value}")
    return value


def _require_1d(mu: DiscreteDistribution):
    if mu.dimension != 1:
        raise InputError(f"expected a 1-d distribution, got dimension {mu.dimension}")


def verify_theorem2(mu: DiscreteDistribution, b, a) -> InequalityCheck:
    """P(|X+Y| <= b) < ceil(2b/a) P(|X-Y| <= a), strict when b > a/2 and non-strict otherwise."""
    _require_1d(mu)
    b, a = _positive("b", b), _positive("a", a)
    return InequalityCheck(
        "theorem2",
        prob_sum_in(mu, NormBall.interval(b)),
        prob_diff_in(mu, NormBall.interval(a)),
        ceil_q(2 * b / a),
        strict=2 * b > a,
    )


def verify_theorem1(mu: DiscreteDistribution, F: NormBall, K: NormBall, mode: str = "sum") -> InequalityCheck:
    """P(X +/- Y in F) <= C * P(X - Y in K) with C a covering constant for the pair (F, K).

    ``mode="sum"`` uses N(F, K, 1/2); ``mode="diff"`` uses N(F minus K, K, 1/2) + 1.
    Where no closed form exists the constant is a certificate size, which is
    still a valid (larger) constant.
    """
    const: CoveringConstant = covering_constant(F, K, mode)
    lhs = prob_sum_in(mu, F) if mode == "sum" else prob_diff_in(mu, F)
    return InequalityCheck(
        f"theorem1_{mode}", lhs, prob_diff_in(mu, K), const.value, strict=False, constant_exact=const.exact
    )


def verify_corollary2(mu: DiscreteDistribution, b, a, mode: str = "sum") -> InequalityCheck:
    """l_inf bounds for laws with independent coordinates.

    ``mode="sum"``: P(||X+Y|| <= b) vs ceil(2b/a)^d, strict when b > a/2.
    ``mode="diff"``: P(||X-Y|| <= b) vs (2 ceil(b/a) - 1)^d, strict when b > a.
    The caller is responsible for ``mu`` having independent coordinates.
    """
    b, a = _positive("b", b), _positive("a", a)
    d = mu.dimension
    F, K = NormBall(d, math.inf, b), NormBall(d, math.inf, a)
    den = prob_diff_in(mu, K)
    if mode == "sum":
        return InequalityCheck("corollary2_sum", prob_sum_in(mu, F), den, ceil_q(2 * b / a) ** d, strict=2 * b > a)
    if mode == "diff":
        return InequalityCheck(
            "corollary2_diff", prob_diff_in(mu, F), den, (2 * ceil_q(b / a) - 1) ** d, strict=b > a
        )
    raise InputError(f"mode must be 'sum' or 'diff', got {mode!r}")


@dataclass(frozen=True)
class WitnessReport:
    witness_atoms: tuple
    witness_mass: Fraction
    constant: int

    def to_json(self) -> dict:
        return {
            "witness_atoms": [format_rational(x) for x in self.witness_atoms],
            "witness_mass": format_rational(self.witness_mass),
            "constant": self.constant,
        }


def claim1_witness(mu: DiscreteDistribution, b, a) -> WitnessReport:
    """Atoms x with mu([-x-b, -x+b]) < ceil(2b/a) * mu([x-a, x+a]), and their total mass.

    For b > a/2 the witness set has positive mass for every law; since the
    set is a union of atoms for a discrete law, positive mass is the same as
    containing an atom.
    """
    _require_1d(mu)
    b, a = _positive("b", b), _positive("a", a)
    if not 2 * b > a:
        raise InputError("the witness claim needs b > a/2")
    constant = ceil_q(2 * b / a)
    witnesses, mass = [], Fraction(0)
    for (x,), w in mu.atoms:
        if mu.marginal_mass(-x - b, -x + b) < constant * mu.marginal_mass(x - a, x + a):
            witnesses.append(x)
            mass += w
    report = WitnessReport(tuple(witnesses), mass, constant)
    if mass <= 0:
        raise TheoremViolation(
            "empty witness set", {"distribution": mu.to_json(), "b": str(b), "a": str(a)}
        )
    return report


def random_distribution(
    seed: int,
    d: int = 1,
    max_atoms: int = 12,
    coordinate_box=(-4, 4),
    weight_denominator_bound: int = 60,
    coordinate_denominator_bound: int = 4,
) -> DiscreteDistribution:
    """Deterministic pseudo-random finite law for property tests.

    Atom count is uniform on 1..max_atoms (fewer after merging duplicate
    points), coordinates are rationals with denominator at most
    ``coordinate_denominator_bound`` inside ``coordinate_box``, and weights
    are a uniformly random composition of ``weight_denominator_bound`` (at
    least the atom count) into positive parts.
    """
    if max_atoms < 1:
        raise InputError("max_atoms must be >= 1")
    lo, hi = (as_rational(v) for v in coordinate_box)
    if lo > hi:
        raise InputError("coordinate_box must have lo <= hi")
    rng = random.Random(seed)
    m = rng.randint(1, max_atoms)

    def coordinate():
        q = rng.randint(1, coordinate_denominator_bound)
        return Fraction(rng.randint(ceil_q(lo * q), (hi * q).__floor__()), q)

    points = [tuple(coordinate() for _ in range(d)) for _ in range(m)]
    total = max(weight_denominator_bound, m)
    cuts = sorted(rng.sample(range(1, total), m - 1))
    parts = [hi_ - lo_ for lo_, hi_ in zip([0, *cuts], [*cuts, total])]
    return DiscreteDistribution(d, tuple((p, Fraction(k, total)) for p, k in zip(points, parts)))


@dataclass(frozen=True)
class SearchResult:
    support: tuple
    weights: tuple
    exact_ratio: Fraction
    bound: int
    iterations: int
    restarts: int
    seed: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "bound": self.bound,
            "ratio": format_rational(self.exact_ratio),
            "ratio_decimal": to_decimal_string(self.exact_ratio),
            "weights": [format_rational(w) for w in self.weights],
            "support": [format_rational(s) for s in self.support],
            "converged": self.converged,
            "iterations": self.iterations,
            "restarts": self.restarts,
        }


def _exact_ratio(support, weights, b, a) -> Fraction:
    mu = DiscreteDistribution(1, tuple(((s,), w) for s, w in zip(support, weights) if w > 0))
    return prob_sum_in(mu, NormBall.interval(b)) / prob_diff_in(mu, NormBall.interval(a))


def _rationalize(w: np.ndarray) -> list[Fraction]:
    approx = [Fraction(float(x)).limit_denominator(DENOMINATOR_CAP) if x > 0 else Fraction(0) for x in w]
    total = sum(approx)
    if total == 0:
        return [Fraction(1, len(w))] * len(w)
    return [x / total for x in approx]


def _replicator(M: np.ndarray, w: np.ndarray, steps: int) -> np.ndarray:
    # M has positive entries, so w'Mw increases monotonically along the map.
    for _ in range(steps):
        Mw = M @ w
        new = w * Mw / (w @ Mw)
        if np.abs(new - w).max() < 1e-15:
            return new
        w = new
    return w


def dinkelbach_maximize(
    support: Sequence,
    b,
    a,
    *,
    restarts: int = 32,
    max_iters: int = 200,
    tol: float = 1e-10,
    seed: int = 0,
    inner_steps: int = 500,
) -> SearchResult:
    """Search the simplex for weights maximizing P(|X+Y| <= b) / P(|X-Y| <= a) on a fixed support.

    Dinkelbach iteration on lambda: maximize w'(A - lambda B)w by replicator
    ascent, then set lambda to the ratio at the new w, until lambda moves by
    less than ``tol``. Restart 0 starts from uniform weights, the others from
    seeded Dirichlet(1) draws. Each restart's weights are rounded to
    rationals (denominator <= 2^32) and scored exactly; the exact start point
    is scored too, so the result never falls below the uniform law.
    Returns a lower bound on the maximum, not a certified optimum.
    """
    pts = [as_rational(s[0] if isinstance(s, tuple) else s) for s in support]
    if len(set(pts)) != len(pts):
        raise InputError("support points must be distinct")
    if len(pts) < 2:
        raise InputError("support needs at least 2 points")
    b, a = _positive("b", b), _positive("a", a)
    if not 2 * b > a:
        raise InputError("the search targets the strict regime b > a/2")
    if restarts < 1:
        raise InputError("restarts must be >= 1")
    if not 0 <= seed <= U64_MAX:
        raise InputError("seed must be an unsigned 64-bit integer")
    pts.sort()
    m = len(pts)
    bound = ceil_q(2 * b / a)
    A = np.array([[1.0 if abs(s + t) <= b else 0.0 for t in pts] for s in pts])
    B = np.array([[1.0 if abs(s - t) <= a else 0.0 for t in pts] for s in pts])
    uniform = [Fraction(1, m)] * m

    if B.all():
        # Denominator is identically 1; the best ratio is 1 if some point has |2s| <= b.
        candidates = [uniform] + [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
        scored = [(_exact_ratio(pts, w, b, a), -k, w) for k, w in enumerate(candidates)]
        best_ratio, _, best_w = max(scored, key=lambda t: (t[0], t[1]))
        return SearchResult(tuple(pts), tuple(best_w), best_ratio, bound, 0, 0, seed, True)

    rng = np.random.default_rng(seed)
    starts = [np.full(m, 1.0 / m)] + [rng.dirichlet(np.ones(m)) for _ in range(restarts - 1)]

    def float_ratio(w):
        return (w @ A @ w) / (w @ B @ w)

    best = None
    total_iters = 0
    for index, w in enumerate(starts):
        lam = float_ratio(w)
        converged = False
        for _ in range(max_iters):
            total_iters += 1
            M = A - lam * B + (lam + 1.0)
            w = _replicator(M, w, inner_steps)
            new_lam = float_ratio(w)
            if new_lam - lam < tol:
                lam = max(lam, new_lam)
                converged = True
                break
            lam = new_lam
        exact_w = _rationalize(w)
        options = [(_exact_ratio(pts, exact_w, b, a), exact_w)]
        if index == 0:
            options.append((_exact_ratio(pts, uniform, b, a), uniform))
        ratio_value, weights = max(options, key=lambda t: t[0])
        if best is None or ratio_value > best[0]:
            best = (ratio_value, weights, converged)
    ratio_value, weights, converged = best
    return SearchResult(tuple(pts), tuple(weights), ratio_value, bound, total_iters, restarts, seed, converged)


LAWS = ("normal", "uniform", "exponential")
_Z99 = NormalDist().inv_cdf(0.995)


def _wilson(successes: int, n: int, z: float) -> tuple[float, float]:
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return centre - half, centre + half


@dataclass(frozen=True)
class MonteCarloResult:
    law: str
    samples: int
    seed: int
    constant: int
    p_sum: float
    p_diff: float
    sum_interval: tuple
    diff_interval: tuple

    @property
    def inconclusive(self) -> bool:
        return self.p_diff == 0 or self.diff_interval[0] <= 0

    @property
    def ratio(self) -> float | None:
        return self.p_sum / self.p_diff if self.p_diff else None

    @property
    def ratio_interval(self) -> tuple[float, float] | None:
        if self.inconclusive:
            return None
        return self.sum_interval[0] / self.diff_interval[1], self.sum_interval[1] / self.diff_interval[0]

    @property
    def confidence_radius(self) -> float | None:
        if self.ratio_interval is None:
            return None
        lo, hi = self.ratio_interval
        return max(self.ratio - lo, hi - self.ratio)

    @property
    def flagged(self) -> bool:
        """True only if the whole 99% interval for the ratio sits above the constant."""
        return self.ratio_interval is not None and self.ratio_interval[0] > self.constant

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "samples": self.samples,
            "seed": self.seed,
            "constant": self.constant,
            "p_sum": self.p_sum,
            "p_sum_interval": list(self.sum_interval),
            "p_diff": self.p_diff,
            "p_diff_interval": list(self.diff_interval),
            "ratio": self.ratio,
            "ratio_interval": None if self.ratio_interval is None else list(self.ratio_interval),
            "confidence_radius": self.confidence_radius,
            "inconclusive": self.inconclusive,
            "flagged": self.flagged,
        }


def _draw(rng: np.random.Generator, law: str, size: int) -> np.ndarray:
    if law == "normal":
        return rng.standard_normal(size)
    if law == "uniform":
        return rng.uniform(-1.0, 1.0, size)
    return rng.exponential(1.0, size)


def monte_carlo_check(law: str, b, a, samples: int = 10**6, seed: int = 0) -> MonteCarloResult:
    """Estimate P(|X+Y| <= b) and P(|X-Y| <= a) for a continuous law from i.i.d. pairs.

    Each probability gets a 99% Wilson score interval; the ratio interval is
    their quotient. The run is flagged only when the ratio's lower bound
    exceeds ceil(2b/a).
    """
    if law not in LAWS:
        raise InputError(f"law must be one of {LAWS}, got {law!r}")
    if samples < 10**4:
        raise InputError("samples must be >= 10^4")
    b, a = _positive("b", b), _positive("a", a)
    rng = np.random.default_rng(seed)
    x = _draw(rng, law, samples)
    y = _draw(rng, law, samples)
    hits_sum = int(np.count_nonzero(np.abs(x + y) <= float(b)))
    hits_diff = int(np.count_nonzero(np.abs(x - y) <= float(a)))
    return MonteCarloResult(
        law,
        samples,
        seed,
        ceil_q(2 * b / a),
        hits_sum / samples,
        hits_diff / samples,
        _wilson(hits_sum, samples, _Z99),
        _wilson(hits_diff, samples, _Z99),
    )
