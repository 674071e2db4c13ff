"""Existence of infinite convolutions: three-series test, sufficient and
divergence criteria, and Monte-Carlo sampling of the limit measure.

Each factor ``delta_n`` is the uniform measure on ``B_n / (N_1 ... N_n)``.
All series terms are computed exactly with :class:`fractions.Fraction`.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .conditions import check_dbc, check_rbc
from .core import (
    EVERYTHING,
    DomainError,
    FamilyRule,
    Interleave,
    SequenceSpec,
    Verdict,
    cumulative_scales,
    empirical,
    expand_sequence,
    fails,
    period_scale,
    proved,
    ratio,
    tag_violation,
    unknown,
)
from .transforms import _atoms, rebased_scales

R0_GRID = tuple(2.0**j for j in range(10, -11, -1))
EMPIRICAL_RTOL = 1e-2
SHARD = 1 << 16


# ---------------------------------------------------------------------------
# truncated factors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedAtoms:
    """``delta_n`` with the mass outside ``[-r, r]`` moved to 0."""

    locations: tuple
    weights: tuple
    radius: Fraction
    outside_mass: Fraction

    @property
    def total_mass(self) -> Fraction:
        return sum(self.weights, Fraction(0))


def _inside_slice(digits, bound):
    """Slice of the sorted digits with ``|b| <= bound``."""
    return bisect_left(digits, -bound), bisect_right(digits, bound)


def truncate_factor(digits, scale_product, r) -> TruncatedAtoms:
    """Exact truncation of the uniform measure on ``digits / scale_product``."""
    r = Fraction(r)
    if r <= 0:
        raise DomainError("radius must be positive")
    p = Fraction(scale_product)
    lo, hi = _inside_slice(digits, r * p)
    w = Fraction(1, len(digits))
    locs = [Fraction(b) / p for b in digits[lo:hi]]
    out = Fraction(len(digits) - (hi - lo), len(digits))
    if out:
        locs.append(Fraction(0))
    weights = [w] * (hi - lo) + ([out] if out else [])
    return TruncatedAtoms(tuple(locs), tuple(weights), r, out)


def _moments(digits, p, r: Fraction):
    """``(outside mass, E, V)`` of the truncated factor, exactly."""
    n = len(digits)
    lo, hi = _inside_slice(digits, r * Fraction(p))
    inner = digits[lo:hi]
    s1 = sum(inner)
    s2 = sum(b * b for b in inner)
    p = Fraction(p)
    mean = Fraction(s1) / (n * p)
    var = Fraction(n * s2 - s1 * s1) / (n * n * p * p)
    return Fraction(n - len(inner), n), mean, var


# ---------------------------------------------------------------------------
# three-series test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThreeSeriesReport:
    radius: float
    series_mass: tuple
    series_mean: tuple
    series_var: tuple
    verdicts: dict
    conclusion: str
    exact_totals: tuple = ()

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "seriesMass": list(self.series_mass),
            "seriesMean": list(self.series_mean),
            "seriesVar": list(self.series_var),
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
            "conclusion": self.conclusion,
        }


def _shrinking_period(spec: SequenceSpec):
    """``(start, period, rho)`` when the rule is periodic with ``rho > 1``."""
    ps = period_scale(spec)
    if ps is None or ps[2] <= 1:
        return None
    return ps


def _mass_vanishes_from(spec: SequenceSpec, r: Fraction, n_max: int) -> int | None:
    """An index after which every outside mass is 0, for shrinking periodic rules."""
    ps = _shrinking_period(spec)
    if ps is None:
        return None
    start, period, _ = ps
    pairs = expand_sequence(spec, max(n_max, start + period))
    cums = cumulative_scales(spec, len(pairs))
    run = 0
    for n in range(start, len(pairs) + 1):
        p = pairs[n - 1]
        big = max(abs(p.digits[0]), abs(p.digits[-1]))
        run = run + 1 if Fraction(big) <= r * Fraction(cums[n - 1]) else 0
        if run >= period:
            return n - period + 1
    return None


def _tag_tail_ok(spec: SequenceSpec, n_max: int, r: Fraction) -> bool:
    """Whether a tag controls the tails of all three series beyond ``n_max``."""
    tag = spec.convergence_tag
    if tag is None or tag_violation(spec, n_max) is not None:
        return False
    cums = cumulative_scales(spec, n_max)
    return bool(cums) and r * Fraction(cums[-1]) >= 1


def three_series(spec: SequenceSpec, r=1, n_max: int = 100) -> ThreeSeriesReport:
    """Partial sums of the three series at radius ``r`` and the verdict they support."""
    r = Fraction(r)
    if r <= 0:
        raise DomainError("radius must be positive")
    if n_max <= 0:
        empty = unknown("no terms inspected")
        return ThreeSeriesReport(float(r), (), (), (), {"mass": empty, "mean": empty, "var": empty}, "unknown")
    pairs = expand_sequence(spec, n_max)
    cums = cumulative_scales(spec, n_max)
    mass, mean, var = [], [], []
    tm = te = tv = Fraction(0)
    for p, c in zip(pairs, cums):
        m, e, v = _moments(p.digits, c, r)
        tm, te, tv = tm + m, te + e, tv + v
        mass.append(float(tm))
        mean.append(float(te))
        var.append(float(tv))

    low = _outside_lower_bound(spec, float(r))
    vanish = _mass_vanishes_from(spec, r, n_max)
    tagged = _tag_tail_ok(spec, n_max, r)
    if low is not None:
        first = next((n for n, (p, c) in enumerate(zip(pairs, cums), 1)
                      if _moments(p.digits, c, r)[0] > 0), None)
        v_mass = fails(f"outside mass >= {low!r} infinitely often by rule structure",
                       {"index": first, "lowerBound": low})
    elif vanish is not None:
        v_mass = proved(f"outside mass is 0 from n={vanish} on (shrinking periodic rule)")
    elif tagged:
        v_mass = proved("remainder tag bounds the outside mass beyond the prefix")
    else:
        v_mass = _series_verdict(mass, "mass")
    if _shrinking_period(spec) is not None:
        v_mean = proved("terms decay geometrically along the period")
        v_var = proved("terms decay geometrically along the period")
    elif tagged:
        v_mean = proved("principal atoms decay geometrically; remainder bounded by the tag")
        v_var = proved("bounded by r times the absolute first-moment series")
    else:
        v_mean, v_var = _series_verdict(mean, "mean"), _series_verdict(var, "var")

    vs = {"mass": v_mass, "mean": v_mean, "var": v_var}
    if any(v.value.value == "Fails" for v in vs.values()):
        conclusion = "does_not_exist"
    elif all(v.proved for v in vs.values()):
        conclusion = "exists"
    else:
        conclusion = "unknown"
    return ThreeSeriesReport(float(r), tuple(mass), tuple(mean), tuple(var), vs, conclusion, (tm, te, tv))


def _series_verdict(sums, what) -> Verdict:
    if not sums:
        return unknown("no terms")
    total = sums[-1]
    half = sums[len(sums) // 2 - 1] if len(sums) >= 2 else 0.0
    inc = abs(total - half)
    if inc <= EMPIRICAL_RTOL * max(1.0, abs(total)):
        return empirical(f"{what}: partial sum {total!r}, last-half change {inc!r}")
    return unknown(f"{what}: partial sum {total!r} still moving ({inc!r})")


def _family_bound(rule, sel, quantity, radius):
    if isinstance(rule, FamilyRule):
        return rule.family.lower_bound(quantity, sel, radius)
    if isinstance(rule, Interleave):
        found = [
            _family_bound(rule.sub, sel.restrict(rule.indices), quantity, radius),
            _family_bound(rule.base, sel.restrict(rule.indices, True), quantity, radius),
        ]
        found = [f for f in found if f is not None]
        return max(found) if found else None
    return None


def _outside_lower_bound(spec: SequenceSpec, r0: float) -> float | None:
    """``c > 0`` with ``#{|b| > P_n r0} / #B_n >= c`` infinitely often, or None."""
    fam = _family_bound(spec.rule, EVERYTHING, "outside", r0)
    if fam is not None:
        return fam
    ps = period_scale(spec)
    if ps is None or ps[2] > 1:
        return None
    # rho <= 1: atoms never shrink, so any positive outside mass in one
    # period repeats (at least) in every later period
    start, period, _ = ps
    pairs = expand_sequence(spec, start + period - 1)
    cums = cumulative_scales(spec, start + period - 1)
    best = 0.0
    for n in range(start, start + period):
        m, _, _ = _moments(pairs[n - 1].digits, cums[n - 1], Fraction(r0))
        best = max(best, float(m))
    return best or None


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExistenceVerdict:
    conclusion: str
    criterion: str | None
    strength: str | None
    verdict: Verdict
    reasons: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "conclusion": self.conclusion,
            "criterion": self.criterion,
            "strength": self.strength,
            "verdict": self.verdict.to_dict(),
            "reasons": {k: v.to_dict() for k, v in self.reasons.items()},
        }


def decay_series(spec: SequenceSpec, n_max: int) -> tuple[list[float], Verdict]:
    """Partial sums of ``max |b| / (N_1 ... N_n)`` with a verdict on convergence."""
    pairs = expand_sequence(spec, n_max)
    cums = cumulative_scales(spec, n_max)
    terms = [ratio(p.max_abs_digit(), c) for p, c in zip(pairs, cums)]
    sums = [float(s) for s in np.cumsum(terms)]
    ps = period_scale(spec)
    low = _family_bound(spec.rule, EVERYTHING, "decay", None)
    if low is not None:
        first = next((n for n, t in enumerate(terms, 1) if t >= low), None)
        return sums, fails(f"terms >= {low!r} infinitely often by rule structure",
                           {"index": first, "lowerBound": low})
    if ps is not None:
        start, period, rho = ps
        if rho > 1:
            return sums, proved(f"geometric along the period (ratio 1/{float(rho)!r})")
        return sums, fails("scale product over a period is <= 1", {"rho": float(rho)})
    return sums, _series_verdict(sums, "decay")


def existence_verdict(spec: SequenceSpec, n_max: int = 200) -> ExistenceVerdict:
    """Strongest existence statement from the divergence, decay and RBC criteria."""
    reasons: dict[str, Verdict] = {}
    certified = [r0 for r0 in R0_GRID if _outside_lower_bound(spec, r0) is not None]
    if certified:
        r0 = max(certified)
        v = fails(f"outside mass at r0={r0!r} bounded below infinitely often", {"r0": r0})
        reasons["divergence"] = v
        return ExistenceVerdict("does_not_exist", "divergence", "proved", v, reasons)
    reasons["divergence"] = unknown("no r0 in the probe grid gives structural divergence")

    _, decay = decay_series(spec, n_max)
    reasons["decay"] = decay
    rbc = check_rbc(spec, n_max).verdict if all(p.is_integral for p in expand_sequence(spec, n_max)) \
        else unknown("non-integer pairs")
    reasons["rbc"] = rbc
    for name, v in (("decay", decay), ("rbc", rbc)):
        if v.proved:
            return ExistenceVerdict("exists", name, "proved", v, reasons)
    for name, v in (("decay", decay), ("rbc", rbc)):
        if v.holds:
            return ExistenceVerdict("exists", name, "empirical", v, reasons)
    return ExistenceVerdict("unknown", None, None, unknown("no criterion applies"), reasons)


def mixed_existence(spec: SequenceSpec, n_max: int = 200) -> ExistenceVerdict:
    """Existence from RBC along the declared subsequence and DBC off it."""
    declared = spec.declared_indices()
    if declared is None:
        raise DomainError("the rule declares no subsequence index set")
    rbc = check_rbc(spec, n_max, declared).verdict
    dbc = check_dbc(spec, declared, n_max, complement=True).verdict
    reasons = {"subsequenceRbc": rbc, "complementDbc": dbc}
    if rbc.proved and dbc.proved:
        return ExistenceVerdict("exists", "subsequence-rbc+complement-dbc", "proved",
                                proved("both hypotheses proved by rule structure"), reasons)
    return ExistenceVerdict("unknown", None, None, unknown("hypotheses not both proved"), reasons)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SampleStats:
    count: int
    depth: int
    seed: int
    start: int
    mean: float
    variance: float
    edges: np.ndarray
    counts: np.ndarray
    truncation_bound: float

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.count * np.diff(self.edges))

    def mean_density(self, lo: float, hi: float) -> float:
        """Mean histogram density over bins lying inside ``[lo, hi]``."""
        left, right = self.edges[:-1], self.edges[1:]
        keep = (left >= lo) & (right <= hi)
        if not keep.any():
            raise DomainError(f"no histogram bin lies inside [{lo}, {hi}]")
        return float(self.density[keep].mean())

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "depth": self.depth,
            "seed": self.seed,
            "start": self.start,
            "mean": self.mean,
            "variance": self.variance,
            "truncationBound": self.truncation_bound,
            "bins": len(self.counts),
        }


def displacement_bound(spec: SequenceSpec, depth: int, start: int = 0, pad: int = 32) -> float:
    """``sum_{k > depth} max |B| / (N_{start+1} ... N_{start+k})``, or inf if not closable."""
    hi = depth + pad
    pairs = expand_sequence(spec, start + hi)
    scales = rebased_scales(spec, start, hi)
    explicit = sum(ratio(pairs[start + k - 1].max_abs_digit(), scales[k - 1]) for k in range(depth + 1, hi + 1))
    per = spec.periodicity()
    if per is None:
        return math.inf
    s, period = per
    h = max(hi, s - 1 - start)
    pairs = expand_sequence(spec, start + h + period)
    scales = rebased_scales(spec, start, h + period)
    extra = sum(ratio(pairs[start + k - 1].max_abs_digit(), scales[k - 1]) for k in range(hi + 1, h + 1))
    window = [ratio(pairs[start + k - 1].max_abs_digit(), scales[k - 1]) for k in range(h + 1, h + period + 1)]
    rho = Fraction(scales[-1]) / Fraction(scales[h - 1] if h >= 1 else 1)
    if not any(window):
        return explicit + extra
    if rho <= 1:
        return math.inf
    return explicit + extra + sum(window) * float(rho / (rho - 1))


def _shard(atoms, seed_seq, size):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    x = np.zeros(size)
    for a in atoms:
        x += a[rng.integers(0, a.size, size=size)]
    return x


def sample_points(spec: SequenceSpec, depth: int, count: int, seed: int, start: int = 0,
                  jobs: int = 1) -> np.ndarray:
    """Random points ``sum_k b_k / (N_{start+1} ... N_{start+k})`` with uniform ``b_k``.

    The stream is split into fixed-size shards with spawned seeds, so the
    output does not depend on ``jobs``.
    """
    if depth < 1 or count < 1:
        raise DomainError("depth and count must be positive")
    atoms = _atoms(spec, start, depth)
    sizes = [SHARD] * (count // SHARD) + ([count % SHARD] if count % SHARD else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda a: _shard(atoms, *a), zip(seeds, sizes)))
    else:
        parts = [_shard(atoms, s, n) for s, n in zip(seeds, sizes)]
    return np.concatenate(parts)


def sample_measure(spec: SequenceSpec, depth: int = 40, count: int = 100_000, seed: int = 0,
                   start: int = 0, bins: int = 300, value_range=None, jobs: int = 1) -> SampleStats:
    """Sample the (tail) measure and summarise it.

    The histogram covers the empirical range unless ``value_range`` is given.
    """
    x = sample_points(spec, depth, count, seed, start, jobs)
    rng_ = value_range if value_range is not None else (float(x.min()), float(x.max()))
    counts, edges = np.histogram(x, bins=bins, range=rng_)
    return SampleStats(
        count=count, depth=depth, seed=seed, start=start,
        mean=float(x.mean()), variance=float(x.var()),
        edges=edges, counts=counts,
        truncation_bound=displacement_bound(spec, depth, start),
    )
