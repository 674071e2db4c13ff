"""Admissibility, structural conditions on pair sequences, and classification.

Every condition here quantifies over infinitely many indices, so each checker
returns a :class:`ConditionReport` whose verdict separates what the rule
structure proves from what a finite prefix merely suggests.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, NamedTuple

import numpy as np

from .core import (
    EVERYTHING,
    DomainError,
    GeneratorPair,
    IndexSet,
    ResourceGuardError,
    Selector,
    SequenceSpec,
    Verdict,
    VerdictValue,
    empirical,
    expand_sequence,
    fails,
    proved,
    recurrent_pairs,
    remainder_fraction,
    residues,
    selector_for,
    tag_violation,
    tail_infinitely_often,
    tail_lower_bound,
    tail_unbounded,
    unknown,
)

UNITARY_TOL = 1e-12
ZERO_TOL = 1e-12
SEARCH_GUARD = 10_000
NODE_BUDGET = 2_000_000
EMPIRICAL_RTOL = 1e-2


# ---------------------------------------------------------------------------
# Hadamard triples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HadamardTriple:
    scale: int
    digits: tuple
    spectrum_set: tuple
    residual: float

    @property
    def certified(self) -> bool:
        return self.residual <= UNITARY_TOL

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "digits": list(self.digits),
            "spectrumSet": list(self.spectrum_set),
            "unitarityResidual": self.residual,
            "certified": self.certified,
        }


def _int_set(values, what: str) -> tuple:
    out = []
    for v in values:
        if isinstance(v, bool) or not float(v).is_integer():
            raise DomainError(f"{what} must be integers, got {v!r}")
        out.append(int(v))
    if len(set(out)) != len(out):
        raise DomainError(f"{what} contain duplicates")
    return tuple(sorted(out))


def hadamard_matrix(scale: int, digits, spectrum) -> np.ndarray:
    """``(1/sqrt(#B)) [exp(-2 pi i b l / N)]`` with phases reduced exactly mod ``N``."""
    b = np.asarray(digits, dtype=object)
    l_ = np.asarray(spectrum, dtype=object)
    phase = np.mod(np.multiply.outer(b, l_), scale).astype(float) / scale
    return np.exp(-2j * np.pi * phase) / math.sqrt(len(digits))


def check_unitarity(scale, digits, spectrum) -> HadamardTriple:
    """Unitarity residual ``max |H^* H - I|`` of the Hadamard matrix."""
    b = _int_set(digits, "digits")
    l_ = _int_set(spectrum, "spectrum entries")
    if isinstance(scale, bool) or not float(scale).is_integer() or int(scale) < 2:
        raise DomainError(f"scale must be an integer >= 2, got {scale!r}")
    scale = int(scale)
    if len(b) != len(l_):
        raise DomainError(f"#B = {len(b)} but #L = {len(l_)}")
    if len(b) < 2:
        raise DomainError("need #B >= 2")
    h = hadamard_matrix(scale, b, l_)
    residual = float(np.abs(h.conj().T @ h - np.eye(len(b))).max())
    return HadamardTriple(scale, b, l_, residual)


def zero_differences(scale: int, digits) -> list[int]:
    """``j`` in ``1..N-1`` with ``M_B(j/N) = 0`` (tolerance ``1e-12 #B``)."""
    b = np.asarray(digits, dtype=np.int64)
    j = np.arange(1, scale, dtype=np.int64)
    phase = np.mod(np.multiply.outer(j, b), scale) / scale
    s = np.abs(np.exp(-2j * np.pi * phase).sum(axis=1))
    return [int(v) for v in j[s <= ZERO_TOL * len(b)]]


def find_spectrum_sets(scale, digits, max_results: int = 16) -> list[HadamardTriple]:
    """Spectrum sets ``L`` in ``{0..N-1}`` with ``0 in L`` by clique search.

    Results come out in lexicographic order and each is re-certified.
    """
    b = _int_set(digits, "digits")
    if isinstance(scale, bool) or not float(scale).is_integer() or int(scale) < 2:
        raise DomainError(f"scale must be an integer >= 2, got {scale!r}")
    scale = int(scale)
    if scale > SEARCH_GUARD:
        raise ResourceGuardError(f"scale {scale} exceeds the search guard {SEARCH_GUARD}")
    size = len(b)
    if size > scale or max_results < 1:
        return []
    good = 0
    for j in zero_differences(scale, b):
        good |= 1 << j
    # adj[v]: vertices w > v with (w - v) mod N a zero of the mask
    adj = [0] * scale
    for v in range(scale):
        mask = 0
        for w in range(v + 1, scale):
            if good >> ((w - v) % scale) & 1 and good >> ((v - w) % scale) & 1:
                mask |= 1 << w
        adj[v] = mask

    found: list[tuple] = []
    nodes = 0

    def extend(chosen: list[int], cand: int):
        nonlocal nodes
        nodes += 1
        if nodes > NODE_BUDGET:
            raise ResourceGuardError("clique search exceeded its node budget")
        if len(chosen) == size:
            found.append(tuple(chosen))
            return
        if bin(cand).count("1") < size - len(chosen):
            return
        while cand and len(found) < max_results:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            extend(chosen + [v], cand & adj[v])

    extend([0], adj[0])
    return [check_unitarity(scale, b, l_) for l_ in found[:max_results]]


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    indices: tuple
    per_term: tuple
    aggregate: tuple
    verdict: Verdict
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "indices": list(self.indices),
            "perTerm": list(self.per_term),
            "aggregate": list(self.aggregate),
            "verdict": self.verdict.to_dict(),
            "parameters": self.parameters,
        }


def _require_integral(pairs):
    for n, p in enumerate(pairs, start=1):
        if not p.is_integral:
            raise DomainError(f"term {n} is not an integer pair: {p!r}")


def _summable_verdict(sums: list[float], what: str) -> Verdict:
    """Empirical verdict for a series from its partial sums."""
    if not sums:
        return unknown("no terms inspected")
    total = sums[-1]
    half = sums[len(sums) // 2 - 1] if len(sums) >= 2 else 0.0
    inc = total - half
    if inc <= EMPIRICAL_RTOL * max(1.0, abs(total)):
        return empirical(f"{what}: partial sum {total!r}, last-half increment {inc!r}")
    return unknown(f"{what}: partial sum {total!r} still growing (last-half increment {inc!r})")


def _prefix_on(spec: SequenceSpec, sel: Selector, n_max: int):
    pairs = expand_sequence(spec, n_max)
    idx = [n for n in range(1, n_max + 1) if n in sel]
    return idx, [pairs[n - 1] for n in idx]


def _periodic_scan_end(spec: SequenceSpec, sel: Selector, n_max: int) -> int:
    """An ``n_max`` large enough to see every pair of an eventually periodic rule."""
    per = spec.periodicity()
    if per is None:
        return n_max
    s1, p1 = per
    s2, p2 = sel.periodicity()
    return max(n_max, max(s1, s2) + math.lcm(p1, p2) - 1)


# ---------------------------------------------------------------------------
# RBC
# ---------------------------------------------------------------------------


def check_rbc(spec: SequenceSpec, n_max: int, indices: IndexSet | None = None,
              complement: bool = False) -> ConditionReport:
    """Summability of ``#B_{n,2} / #B_n``, optionally along a subsequence."""
    sel = selector_for(indices, complement)
    idx, pairs = _prefix_on(spec, sel, n_max)
    _require_integral(pairs)
    terms = [remainder_fraction(p) for p in pairs]
    sums = list(np.cumsum(terms)) if terms else []
    sums = [float(s) for s in sums]
    tag = spec.convergence_tag

    low = tail_lower_bound(spec.rule, sel, remainder_fraction, "remainder")
    rec = recurrent_pairs(spec.rule, sel)
    if low is not None and sel.is_infinite():
        first = next((n for n, t in zip(idx, terms) if t >= low), None)
        verdict = fails(
            f"terms are >= {low!r} infinitely often by rule structure, so the series diverges",
            {"index": first, "lowerBound": low},
        )
    elif rec is not None and all(remainder_fraction(p) == 0 for p in rec):
        verdict = proved("every term from the recurrent part of the rule is 0")
    elif tag is not None and (bad := tag_violation(spec, n_max)) is None:
        verdict = proved(
            f"tag {tag.kind} with constant {tag.constant!r}: tail beyond {n_max} <= {tag.tail(n_max)!r}"
        )
    else:
        verdict = _summable_verdict(sums, "RBC")
        if tag is not None:
            verdict = Verdict(verdict.value, verdict.evidence + f"; tag contradicted at n={bad}")
    return ConditionReport("RBC", tuple(idx), tuple(terms), tuple(sums), verdict,
                           {"tag": tag.to_dict() if tag else None})


# ---------------------------------------------------------------------------
# DBC
# ---------------------------------------------------------------------------


def _digit_ratio(p: GeneratorPair) -> float:
    return float(p.max_abs_digit()) / float(p.scale)


def check_dbc(spec: SequenceSpec, indices: IndexSet | None = None, n_max: int = 100,
              complement: bool = False) -> ConditionReport:
    """Bounded digit-to-scale ratio and bounded cardinality on the filtered indices."""
    sel = selector_for(indices, complement)
    idx, pairs = _prefix_on(spec, sel, _periodic_scan_end(spec, sel, n_max))
    ratios = [_digit_ratio(p) for p in pairs]
    sizes = [p.size for p in pairs]
    run_r = [float(v) for v in np.maximum.accumulate(ratios)] if ratios else []
    run_c = [int(v) for v in np.maximum.accumulate(sizes)] if sizes else []
    rec = recurrent_pairs(spec.rule, sel)
    sup_r = run_r[-1] if run_r else 0.0
    sup_c = run_c[-1] if run_c else 0
    if rec is not None:
        sup_r = max([sup_r] + [_digit_ratio(p) for p in rec])
        sup_c = max([sup_c] + [p.size for p in rec])
        verdict = proved(f"finitely many distinct pairs recur: sup ratio {sup_r!r}, sup #B {sup_c}")
    elif tail_unbounded(spec.rule, sel, "ratio"):
        worst = idx[int(np.argmax(ratios))] if ratios else None
        verdict = fails("digit-to-scale ratio is unbounded by rule structure",
                        {"index": worst, "ratio": max(ratios) if ratios else None})
    elif not run_r:
        verdict = unknown("no terms inspected")
    else:
        h = len(run_r) // 2
        stable = run_r[h - 1] == sup_r and run_c[h - 1] == sup_c if h >= 1 else False
        verdict = (empirical if stable else unknown)(
            f"running sup ratio {sup_r!r}, sup #B {sup_c}" + ("" if stable else " still moving")
        )
    agg = tuple(zip(run_r, run_c))
    return ConditionReport(
        "DBC", tuple(idx), tuple(zip(ratios, sizes)), agg, verdict,
        {"supRatio": sup_r, "supCardinality": sup_c},
    )


# ---------------------------------------------------------------------------
# PCC
# ---------------------------------------------------------------------------


class Window(NamedTuple):
    excluded: int
    left: float | None
    right: float | None
    widened: bool


def pcc_window(p: GeneratorPair, l: float) -> Window:
    """Window ``[b1, b2]`` in ``[0, N-1]`` with ``0 < b2 - b1 < l N`` missing fewest digits."""
    n = float(p.scale)
    width = l * n
    d = [float(b) for b in p.digits]
    inside = d[bisect_left(d, 0.0):bisect_right(d, n - 1)]
    if not inside or n - 1 <= 0:
        return Window(len(d), None, None, False)
    best, bi, bj = 0, 0, 0
    j = 0
    for i in range(len(inside)):
        j = max(j, i)
        while j + 1 < len(inside) and inside[j + 1] - inside[i] < width:
            j += 1
        if j - i + 1 > best:
            best, bi, bj = j - i + 1, i, j
    left, right = inside[bi], inside[bj]
    widened = left == right
    if widened:
        gaps = [width, n - 1]
        if bi + 1 < len(inside):
            gaps.append(inside[bi + 1] - left)
        if bi > 0:
            gaps.append(left - inside[bi - 1])
        eps = min(gaps) / 2
        if left + eps <= n - 1:
            right = left + eps
        else:
            left = right - eps
    return Window(len(d) - best, left, right, widened)


def pcc_fraction(p: GeneratorPair, l: float) -> float:
    """Fraction of ``B`` in ``[l N / 2, (1 - l/2) N]``."""
    n = float(p.scale)
    d = [float(b) for b in p.digits]
    lo, hi = l * n / 2, (1 - l / 2) * n
    return (bisect_right(d, hi) - bisect_left(d, lo)) / len(d)


def _check_l(l: float):
    if not 0 < l < 1:
        raise DomainError(f"l must lie in (0, 1), got {l!r}")


def check_pcc(spec: SequenceSpec, l: float, n_max: int, indices: IndexSet | None = None,
              complement: bool = False) -> tuple[ConditionReport, ConditionReport]:
    """Both cases of the concentration condition with parameter ``l``."""
    _check_l(l)
    sel = selector_for(indices, complement)
    idx, pairs = _prefix_on(spec, sel, _periodic_scan_end(spec, sel, n_max))
    rec = recurrent_pairs(spec.rule, sel)

    # case (i)
    windows = [pcc_window(p, l) for p in pairs]
    terms = [w.excluded / p.size for w, p in zip(windows, pairs)]
    sums = [float(s) for s in np.cumsum(terms)] if terms else []
    near = [n for n, w, p in zip(idx, windows, pairs)
            if w.left is not None and (w.right - w.left) >= l * float(p.scale) * (1 - 1e-9)]
    if rec is not None and sel.is_infinite():
        bad = [p for p in rec if pcc_window(p, l).excluded > 0]
        if bad:
            frac = pcc_window(bad[0], l).excluded / bad[0].size
            verdict_i = fails(f"{bad[0]!r} recurs with excluded fraction {frac!r}",
                              {"pair": bad[0].to_dict(), "lowerBound": frac})
        else:
            verdict_i = proved("recurrent pairs fit entirely in a window")
    elif rec is not None:
        verdict_i = proved("finitely many selected terms")
    else:
        verdict_i = _summable_verdict(sums, "PCC-i")
    report_i = ConditionReport(
        "PCC-i", tuple(idx), tuple(terms), tuple(sums), verdict_i,
        {"l": l, "windows": [[w.left, w.right] for w in windows],
         "widened": [n for n, w in zip(idx, windows) if w.widened], "nearBoundary": near},
    )

    # case (ii)
    fr = [pcc_fraction(p, l) for p in pairs]
    run = [float(v) for v in np.minimum.accumulate(fr)] if fr else []
    inf_ = run[-1] if run else 1.0
    zero_at = next((n for n, f in zip(idx, fr) if f == 0), None)
    if zero_at is not None:
        verdict_ii = fails("empty centred window", {"index": zero_at})
    elif rec is not None:
        c = min([inf_] + [pcc_fraction(p, l) for p in rec])
        bad = [p for p in rec if pcc_fraction(p, l) == 0]
        if bad:
            verdict_ii = fails(f"{bad[0]!r} recurs with an empty centred window",
                               {"pair": bad[0].to_dict()})
        else:
            verdict_ii = proved(f"fraction >= {c!r} on every term")
            inf_ = c
    elif not run:
        verdict_ii = unknown("no terms inspected")
    else:
        h = len(run) // 2
        stable = h >= 1 and run[h - 1] == inf_
        verdict_ii = (empirical if stable else unknown)(f"running infimum {inf_!r}")
    lo_fn = [l * float(p.scale) / 2 for p in pairs]
    hi_fn = [(1 - l / 2) * float(p.scale) for p in pairs]
    report_ii = ConditionReport(
        "PCC-ii", tuple(idx), tuple(fr), tuple(run), verdict_ii,
        {"l": l, "c": inf_, "windows": [[a, b] for a, b in zip(lo_fn, hi_fn)],
         "degenerateAllowed": True},
    )
    return report_i, report_ii


# ---------------------------------------------------------------------------
# General consecutive sets and the gcd criterion
# ---------------------------------------------------------------------------


class ConsecutiveCheck(NamedTuple):
    value: bool
    residues: tuple
    collapsed: bool
    size_divides_scale: bool


def is_general_consecutive(p: GeneratorPair) -> ConsecutiveCheck:
    """``B = {0, 1, ..., #B-1} (mod N)`` with no colliding residues."""
    res = residues(p)
    ok = not res.collapsed and res.values == tuple(range(p.size))
    return ConsecutiveCheck(ok, res.values, res.collapsed, p.scale % p.size == 0)


def difference_gcd(p: GeneratorPair) -> int:
    p.require_integral()
    lo = p.digits[0]
    return reduce(math.gcd, (b - lo for b in p.digits), 0)


def gcd_tail(spec: SequenceSpec, k: int, n_max: int) -> tuple[int, Verdict]:
    """``gcd`` over ``k < n <= n_max`` of ``gcd(B_n - B_n)`` and whether it is 1 for the full tail."""
    if k < 0:
        raise DomainError("k must be >= 0")
    pairs = expand_sequence(spec, max(n_max, k + 1))
    g = reduce(math.gcd, (difference_gcd(p) for p in pairs[k:n_max]), 0)
    if g == 1:
        return g, proved(f"running gcd reaches 1 by n={n_max}")
    per = spec.periodicity()
    if per is not None:
        s, period = per
        hi = max(k, s - 1) + period
        full = reduce(math.gcd, (difference_gcd(p) for p in expand_sequence(spec, hi)[k:hi]), 0)
        if full == 1:
            return g, proved("the periodic tail reaches gcd 1")
        return g, fails(f"every tail term has differences divisible by {full}", {"gcd": full})
    return g, unknown(f"gcd {g} on the inspected prefix")


def scale_exceeds_size(spec: SequenceSpec, n_max: int) -> tuple[int, Verdict]:
    """Count ``n <= n_max`` with ``N_n > #B_n`` and whether there are infinitely many."""
    pairs = expand_sequence(spec, n_max)
    flags = [p.scale > p.size for p in pairs]
    count = sum(flags)
    test = lambda p: p.scale > p.size  # noqa: E731
    if tail_infinitely_often(spec.rule, EVERYTHING, "scale_exceeds_size", test):
        return count, proved("a recurrent pair has N > #B")
    rec = recurrent_pairs(spec.rule, EVERYTHING)
    if rec is not None:
        return count, fails("eventually every pair has N = #B", {"recurrent": [p.to_dict() for p in rec]})
    h = len(flags) // 2
    if any(flags[h:]):
        return count, empirical(f"{sum(flags[h:])} occurrences in the last half of the prefix")
    return count, unknown("no recent occurrences")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

PCC_PROBES = (0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class TheoremVerdict:
    conclusion: str
    route: str | None
    strength: str | None
    checks: dict
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "conclusion": self.conclusion,
            "route": self.route,
            "strength": self.strength,
            "checks": {k: v.to_dict() for k, v in self.checks.items()},
            "notes": list(self.notes),
        }


ROUTE_HYPOTHESES = {
    "rbc+general-consecutive": "RBC and infinitely many general consecutive sets",
    "general-consecutive-subsequence+dbc-complement":
        "a general consecutive subsequence satisfying RBC, DBC off the subsequence",
    "rbc+pcc": "RBC and a subsequence satisfying PCC",
    "pcc-rbc-subsequence+dbc-complement": "a subsequence satisfying PCC and RBC, DBC off it",
    "dbc+equipositive-tail": "DBC and (infinitely many N_n > #B_n or tail gcd 1)",
}


def _all_hold(verdicts) -> str | None:
    """``proved``/``empirical`` when every verdict holds, else None."""
    if not all(v.holds for v in verdicts):
        return None
    return "proved" if all(v.proved for v in verdicts) else "empirical"


def _consecutive_often(spec: SequenceSpec, sel: Selector, n_max: int) -> Verdict:
    test = lambda p: p.is_integral and is_general_consecutive(p).value  # noqa: E731
    if tail_infinitely_often(spec.rule, sel, "general_consecutive", test):
        return proved("general consecutive sets recur by rule structure")
    rec = recurrent_pairs(spec.rule, sel)
    if rec is not None:
        return fails("no recurrent pair is general consecutive", {"recurrent": [p.to_dict() for p in rec]})
    idx, pairs = _prefix_on(spec, sel, n_max)
    hits = [n for n, p in zip(idx, pairs) if test(p)]
    if hits and hits[-1] > n_max // 2:
        return empirical(f"general consecutive at {len(hits)} inspected indices, last {hits[-1]}")
    return unknown("no recent general consecutive sets")


def _pcc_somewhere(spec: SequenceSpec, indices: IndexSet | None, n_max: int) -> Verdict:
    """Does some subsequence inside ``indices`` satisfy PCC for some probe ``l``?"""
    rec = recurrent_pairs(spec.rule, selector_for(indices))
    best = None
    for l in PCC_PROBES:
        if rec is not None:
            for p in rec:
                if pcc_fraction(p, l) > 0:
                    return proved(f"{p!r} recurs with a non-empty centred window (l={l})")
                if pcc_window(p, l).excluded == 0:
                    return proved(f"{p!r} recurs and fits a window (l={l})")
        ri, rii = check_pcc(spec, l, n_max, indices)
        for v in (ri.verdict, rii.verdict):
            if v.proved:
                return Verdict(v.value, f"l={l}: {v.evidence}")
            if v.holds and best is None:
                best = Verdict(v.value, f"l={l}: {v.evidence}")
    return best or unknown("no probe l gave a concentrating subsequence")


def classify(spec: SequenceSpec, n_max: int = 200, notes: tuple = ()) -> TheoremVerdict:
    """Strongest conclusion licensed by the sufficient conditions.

    Routes are tried in a fixed order and the first whose hypotheses all
    hold wins.  Subsequence hypotheses use the index set declared by the
    rule; they are not searched for.
    """
    from .existence import existence_verdict

    pairs = expand_sequence(spec, n_max)
    _require_integral(pairs)
    checks: dict[str, Verdict] = {}
    declared = spec.declared_indices()

    rbc = check_rbc(spec, n_max).verdict
    checks["rbc"] = rbc
    checks["generalConsecutiveOften"] = _consecutive_often(spec, EVERYTHING, n_max)

    def conclude(route, vs):
        strength = _all_hold(vs)
        if strength:
            return TheoremVerdict("exists_and_spectral", route, strength, checks, notes)
        return None

    routes = []
    routes.append(("rbc+general-consecutive", lambda: [rbc, checks["generalConsecutiveOften"]]))

    if declared is not None:
        sub, comp = selector_for(declared), selector_for(declared, True)

        def cor():
            checks["subsequenceGeneralConsecutive"] = _consecutive_often(spec, sub, n_max)
            checks["subsequenceRbc"] = check_rbc(spec, n_max, declared).verdict
            checks["complementDbc"] = check_dbc(spec, declared, n_max, complement=True).verdict
            return [checks["subsequenceGeneralConsecutive"], checks["subsequenceRbc"], checks["complementDbc"]]

        routes.append(("general-consecutive-subsequence+dbc-complement", cor))

    def thm23():
        checks["pcc"] = _pcc_somewhere(spec, None, n_max)
        return [rbc, checks["pcc"]]

    routes.append(("rbc+pcc", thm23))

    if declared is not None:
        def thm24():
            checks["subsequencePcc"] = _pcc_somewhere(spec, declared, n_max)
            checks.setdefault("subsequenceRbc", check_rbc(spec, n_max, declared).verdict)
            checks.setdefault("complementDbc", check_dbc(spec, declared, n_max, complement=True).verdict)
            return [checks["subsequencePcc"], checks["subsequenceRbc"], checks["complementDbc"]]

        routes.append(("pcc-rbc-subsequence+dbc-complement", thm24))

    def dbc_route():
        checks["dbc"] = check_dbc(spec, None, n_max).verdict
        per = spec.periodicity()
        k = max(n_max // 2, per[0] - 1) if per else n_max // 2
        _, g = gcd_tail(spec, k, n_max)
        if g.proved and per is None:
            # a prefix only speaks for the inspected k
            g = empirical(g.evidence)
        _, s = scale_exceeds_size(spec, n_max)
        checks["tailGcdOne"], checks["scaleExceedsSizeOften"] = g, s
        ranked = sorted([s, g], key=lambda v: (not v.proved, not v.holds))
        return [checks["dbc"], ranked[0]]

    routes.append(("dbc+equipositive-tail", dbc_route))

    for name, hyp in routes:
        out = conclude(name, hyp())
        if out is not None:
            return out

    ev = existence_verdict(spec, n_max)
    checks["existence"] = ev.verdict
    if ev.conclusion == "does_not_exist":
        return TheoremVerdict("does_not_exist", ev.criterion, ev.strength, checks, notes)
    if ev.conclusion == "exists":
        return TheoremVerdict("exists", ev.criterion, ev.strength, checks, notes)
    return TheoremVerdict("unknown", None, None, checks, notes)
