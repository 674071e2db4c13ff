"""Generator pairs, sequence rules, verdicts and the JSON sequence-spec format.

A sequence of pairs ``(N_n, B_n)`` is infinite, so it is described by a rule
that can be expanded to any finite prefix.  Rules also answer structural
questions about their tails (which pairs recur forever, which quantities are
known to stay bounded away from zero) so that condition checkers can turn a
finite computation into a statement about the whole sequence when that is
honestly possible.
"""
from __future__ import annotations

import json
import math
from bisect import bisect_left
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, NamedTuple, Sequence

SCHEMA_VERSION = "v1"


class SpecificationError(ValueError):
    """Malformed sequence rule or spec document."""


class DomainError(ValueError):
    """Arguments outside the domain of an operation."""


class ResourceGuardError(RuntimeError):
    """A size guard tripped before an expensive computation."""


def _number(x: Any) -> int | float:
    """Exact int when integral, float otherwise."""
    if isinstance(x, bool):
        raise DomainError(f"expected a number, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    try:
        xf = float(x)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"expected a number, got {x!r}") from exc
    if not math.isfinite(xf):
        raise DomainError(f"expected a finite number, got {x!r}")
    return int(xf) if xf.is_integer() else xf


# ---------------------------------------------------------------------------
# Pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorPair:
    """One term ``(N, B)``: a positive scale and a finite digit set.

    Digits are stored sorted.  Passing duplicates is an error because the
    uniform measure on ``B`` is defined on a set.
    """

    scale: int | float
    digits: tuple

    def __post_init__(self):
        scale = _number(self.scale)
        if scale <= 0:
            raise DomainError(f"scale must be positive, got {scale}")
        raw = [_number(b) for b in self.digits]
        if len(set(raw)) != len(raw):
            raise DomainError("digit list contains duplicates")
        if len(raw) < 2:
            raise DomainError("a digit set needs at least two elements")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "digits", tuple(sorted(raw)))

    def __repr__(self):
        d = self.digits
        shown = ", ".join(map(str, d)) if len(d) <= 8 else (
            ", ".join(map(str, d[:4])) + f", ... ({len(d)} digits), " + str(d[-1])
        )
        return f"GeneratorPair({self.scale}, {{{shown}}})"

    @property
    def size(self) -> int:
        return len(self.digits)

    @property
    def is_integral(self) -> bool:
        """Integer scale >= 2 and integer digits."""
        return (
            isinstance(self.scale, int)
            and self.scale >= 2
            and all(isinstance(b, int) for b in self.digits)
        )

    def require_integral(self) -> None:
        if not self.is_integral:
            raise DomainError(
                f"{self!r} needs an integer scale >= 2 and integer digits"
            )

    def max_abs_digit(self):
        return max(abs(self.digits[0]), abs(self.digits[-1]))

    def to_dict(self) -> dict:
        return {"scale": self.scale, "digits": list(self.digits)}


def pair(scale, digits) -> GeneratorPair:
    return GeneratorPair(scale, tuple(digits))


@dataclass(frozen=True)
class DigitSplit:
    principal: tuple
    remainder: tuple


def split_digits(p: GeneratorPair) -> DigitSplit:
    """Split ``B`` into ``B ∩ {0, ..., N-1}`` and the rest."""
    p.require_integral()
    d = p.digits
    lo = bisect_left(d, 0)
    hi = bisect_left(d, p.scale)
    return DigitSplit(principal=d[lo:hi], remainder=d[:lo] + d[hi:])


def remainder_fraction(p: GeneratorPair) -> float:
    """``#B_2 / #B`` where ``B_2`` are the digits outside ``{0, ..., N-1}``."""
    d = p.digits
    inside = bisect_left(d, p.scale) - bisect_left(d, 0)
    return (len(d) - inside) / len(d)


class Residues(NamedTuple):
    values: tuple
    collapsed: bool


def residues(p: GeneratorPair) -> Residues:
    """``B mod N`` as a sorted tuple, with a flag for colliding residues."""
    p.require_integral()
    vals = sorted({b % p.scale for b in p.digits})
    return Residues(tuple(vals), len(vals) < p.size)


# ---------------------------------------------------------------------------
# Index sets and selectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexSet:
    """A set of positive indices: all of them, a finite list, or a progression."""

    kind: str = "all"
    values: tuple = ()
    start: int = 1
    step: int = 1

    def __post_init__(self):
        if self.kind not in ("all", "finite", "arithmetic"):
            raise SpecificationError(f"unknown index-set kind {self.kind!r}")
        if self.kind == "finite":
            vals = tuple(sorted(set(int(v) for v in self.values)))
            if any(v < 1 for v in vals):
                raise SpecificationError("indices start at 1")
            object.__setattr__(self, "values", vals)
        if self.kind == "arithmetic" and (self.start < 1 or self.step < 1):
            raise SpecificationError("arithmetic index set needs start, step >= 1")

    def __contains__(self, n: int) -> bool:
        if self.kind == "all":
            return n >= 1
        if self.kind == "finite":
            return n in self.values
        return n >= self.start and (n - self.start) % self.step == 0

    def is_infinite(self) -> bool:
        return self.kind != "finite"

    def periodicity(self) -> tuple[int, int]:
        """``(start, period)`` such that membership is periodic from ``start``."""
        if self.kind == "all":
            return 1, 1
        if self.kind == "finite":
            return (self.values[-1] + 1 if self.values else 1), 1
        return self.start, self.step

    def members(self, n_max: int) -> list[int]:
        return [n for n in range(1, n_max + 1) if n in self]

    def to_dict(self) -> dict:
        if self.kind == "all":
            return {"type": "all"}
        if self.kind == "finite":
            return {"type": "finite", "values": list(self.values)}
        return {"type": "arithmetic", "start": self.start, "step": self.step}

    @classmethod
    def from_dict(cls, d: dict) -> "IndexSet":
        kind = d.get("type")
        if kind == "all":
            return cls("all")
        if kind == "finite":
            return cls("finite", values=tuple(d.get("values", ())))
        if kind == "arithmetic":
            return cls("arithmetic", start=int(d.get("start", 1)), step=int(d.get("step", 1)))
        raise SpecificationError(f"unknown index-set type {kind!r}")


ALL = IndexSet("all")


@dataclass(frozen=True)
class Selector:
    """Conjunction of (possibly negated) index sets."""

    literals: tuple = ()

    def __contains__(self, n: int) -> bool:
        return all((n in s) != neg for s, neg in self.literals)

    def restrict(self, s: IndexSet, negated: bool = False) -> "Selector":
        return Selector(self.literals + ((s, negated),))

    def periodicity(self) -> tuple[int, int]:
        start, period = 1, 1
        for s, _ in self.literals:
            a, p = s.periodicity()
            start, period = max(start, a), math.lcm(period, p)
        return start, period

    def is_infinite(self) -> bool:
        if any(s.kind == "finite" and not neg for s, neg in self.literals):
            return False
        start, period = self.periodicity()
        return any(n in self for n in range(start, start + period))

    def members(self, n_max: int) -> list[int]:
        return [n for n in range(1, n_max + 1) if n in self]


EVERYTHING = Selector()


def selector_for(indices: IndexSet | None, complement: bool = False) -> Selector:
    if indices is None:
        return EVERYTHING
    return EVERYTHING.restrict(indices, complement)


# ---------------------------------------------------------------------------
# Convergence tags and verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceTag:
    """Assertion ``#B_{n,2}/#B_n <= constant * g(n)`` for every ``n``.

    ``kind`` is ``inverse_square`` (``g = 1/(n+shift)^2``), ``power2``
    (``g = 2^-n``) or ``geometric`` (``g = ratio^n``).  The tag also asserts
    that every scale is an integer >= 2, which is what lets the principal
    digits be bounded geometrically beyond any computed prefix.
    """

    constant: float = 1.0
    kind: str = "inverse_square"
    shift: int = 0
    ratio: float = 0.5

    def __post_init__(self):
        if self.kind not in ("inverse_square", "power2", "geometric"):
            raise SpecificationError(f"unknown convergence tag kind {self.kind!r}")
        if self.constant <= 0:
            raise SpecificationError("tag constant must be positive")
        if self.kind == "geometric" and not 0 < self.ratio < 1:
            raise SpecificationError("geometric tag needs 0 < ratio < 1")
        if self.kind == "inverse_square" and self.shift < 0:
            raise SpecificationError("inverse_square shift must be >= 0")

    def bound(self, n: int) -> float:
        if self.kind == "inverse_square":
            return self.constant / (n + self.shift) ** 2
        if self.kind == "power2":
            return self.constant * 2.0 ** (-n)
        return self.constant * self.ratio**n

    def tail(self, horizon: int) -> float:
        """Upper bound for ``sum_{n > horizon} bound(n)``."""
        if self.kind == "inverse_square":
            return self.constant / (horizon + self.shift) if horizon + self.shift > 0 else math.inf
        if self.kind == "power2":
            return self.constant * 2.0 ** (-horizon)
        return self.constant * self.ratio ** (horizon + 1) / (1 - self.ratio)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "constant": self.constant}
        if self.kind == "inverse_square":
            d["shift"] = self.shift
        if self.kind == "geometric":
            d["ratio"] = self.ratio
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceTag":
        return cls(
            constant=float(d.get("constant", 1.0)),
            kind=d.get("kind", "inverse_square"),
            shift=int(d.get("shift", 0)),
            ratio=float(d.get("ratio", 0.5)),
        )


class VerdictValue(str, Enum):
    PROVED_BY_RULE = "ProvedByRule"
    EMPIRICALLY_HOLDS = "EmpiricallyHolds"
    FAILS = "Fails"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    """Finite-prefix verdict on a condition quantified over all ``n``.

    ``Fails`` always carries a witness: an index, or a description of the
    divergence certificate.
    """

    value: VerdictValue
    evidence: str = ""
    witness: Any = None

    def __post_init__(self):
        if self.value is VerdictValue.FAILS and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.value in (VerdictValue.PROVED_BY_RULE, VerdictValue.EMPIRICALLY_HOLDS)

    @property
    def proved(self) -> bool:
        return self.value is VerdictValue.PROVED_BY_RULE

    def to_dict(self) -> dict:
        return {"value": self.value.value, "evidence": self.evidence, "witness": self.witness}


def proved(evidence: str) -> Verdict:
    return Verdict(VerdictValue.PROVED_BY_RULE, evidence)


def empirical(evidence: str) -> Verdict:
    return Verdict(VerdictValue.EMPIRICALLY_HOLDS, evidence)


def fails(evidence: str, witness: Any) -> Verdict:
    return Verdict(VerdictValue.FAILS, evidence, witness)


def unknown(evidence: str) -> Verdict:
    return Verdict(VerdictValue.UNKNOWN, evidence)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


class Family:
    """Closed-form family of pairs with declared tail facts.

    Subclasses override :meth:`term` and whichever facts they can vouch for.
    The defaults claim nothing.
    """

    name = "family"

    def term(self, n: int, cum: int) -> GeneratorPair:  # pragma: no cover
        raise NotImplementedError

    def indices(self) -> IndexSet | None:
        return None

    def recurrent(self, sel: Selector):
        """Every pair that occurs on ``sel`` (as a tuple), or None if unbounded."""
        return None if sel.is_infinite() else ()

    def lower_bound(self, quantity: str, sel: Selector, radius=None) -> float | None:
        return None

    def unbounded(self, quantity: str, sel: Selector) -> bool:
        return False

    def infinitely_often(self, predicate: str, sel: Selector) -> bool:
        return False

    def spectrum_set(self, n: int) -> tuple | None:
        return None

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class PowerOffsetFamily(Family):
    """``N_n = s`` and ``B_n = {0, s^n + 1}``.

    Every digit set is congruent to ``{0, 1}`` modulo ``s`` but the large
    digit outruns the scales, so the finite convolutions drift off.
    """

    base: int = 2
    name = "power-offset"

    def __post_init__(self):
        if self.base < 2:
            raise SpecificationError("power-offset needs base >= 2")

    def term(self, n, cum):
        return GeneratorPair(self.base, (0, self.base**n + 1))

    def lower_bound(self, quantity, sel, radius=None):
        if not sel.is_infinite():
            return None
        if quantity == "remainder":
            return 0.5
        if quantity == "decay":
            return 1.0
        if quantity == "outside" and radius is not None and radius <= 1:
            # (s^n + 1) / s^n > 1 >= radius
            return 0.5
        return None

    def unbounded(self, quantity, sel):
        return quantity == "ratio" and sel.is_infinite()

    def infinitely_often(self, predicate, sel):
        return predicate == "general_consecutive" and sel.is_infinite()

    def spectrum_set(self, n):
        return (0, 1) if self.base == 2 else None

    def params(self):
        return {"base": self.base}


@dataclass(frozen=True)
class EscapingConsecutiveFamily(Family):
    """Consecutive digit blocks whose last digit escapes to infinity.

    On ``indices``: ``N_n = 2(n+1)^2`` and
    ``B_n = {0, ..., (n+1)^2 - 2, (n+1)^2 - 1 + N_1 ... N_n}``.
    Elsewhere the pair is the fixed ``(9, {0, 1, 5})``.
    """

    index_set: IndexSet = ALL
    name = "escaping-consecutive"

    COMPLEMENT = (9, (0, 1, 5))

    def _complement_pair(self):
        return GeneratorPair(*self.COMPLEMENT)

    def term(self, n, cum):
        if n not in self.index_set:
            return self._complement_pair()
        m = (n + 1) ** 2
        scale = 2 * m
        big = m - 1 + cum * scale
        return GeneratorPair(scale, tuple(range(m - 1)) + (big,))

    def indices(self):
        return self.index_set

    def _sub(self, sel):
        return sel.restrict(self.index_set)

    def recurrent(self, sel):
        if self._sub(sel).is_infinite():
            return None
        if sel.restrict(self.index_set, True).is_infinite():
            return (self._complement_pair(),)
        return ()

    def lower_bound(self, quantity, sel, radius=None):
        if quantity == "decay" and self._sub(sel).is_infinite():
            return 1.0
        return None

    def unbounded(self, quantity, sel):
        return quantity == "ratio" and self._sub(sel).is_infinite()

    def infinitely_often(self, predicate, sel):
        return predicate == "general_consecutive" and self._sub(sel).is_infinite()

    def spectrum_set(self, n):
        if n in self.index_set:
            m = (n + 1) ** 2
            return tuple(range(0, 2 * m, 2))
        return (0, 3, 6)

    def params(self):
        return {"indices": self.index_set.to_dict()}


@dataclass(frozen=True)
class QuadraticDigitFamily(Family):
    """``N_n = n + 1`` and ``B_n = {0, (n+1)^2}``: digit-to-scale ratio grows."""

    name = "quadratic-digit"

    def term(self, n, cum):
        return GeneratorPair(n + 1, (0, (n + 1) ** 2))

    def lower_bound(self, quantity, sel, radius=None):
        if quantity == "remainder" and sel.is_infinite():
            return 0.5
        return None

    def unbounded(self, quantity, sel):
        return quantity == "ratio" and sel.is_infinite()


FAMILIES = {
    "power-offset": lambda p: PowerOffsetFamily(base=int(p.get("base", 2))),
    "escaping-consecutive": lambda p: EscapingConsecutiveFamily(
        index_set=IndexSet.from_dict(p["indices"]) if "indices" in p else ALL
    ),
    "quadratic-digit": lambda p: QuadraticDigitFamily(),
}


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------


def _dedupe(pairs: Iterable[GeneratorPair]) -> tuple:
    seen = []
    for p in pairs:
        if p not in seen:
            seen.append(p)
    return tuple(seen)


def _combine(a: tuple[int, int] | None, b: tuple[int, int] | None):
    if a is None or b is None:
        return None
    return max(a[0], b[0]), math.lcm(a[1], b[1])


@dataclass(frozen=True)
class Cycle:
    """Pairs repeated periodically, indexed by the global position ``n``."""

    pairs: tuple

    def __post_init__(self):
        if not self.pairs:
            raise SpecificationError("cycle must contain at least one pair")

    def term(self, n, cum):
        return self.pairs[(n - 1) % len(self.pairs)]

    def periodicity(self):
        return 1, len(self.pairs)

    def declared_indices(self):
        return None


@dataclass(frozen=True)
class PrefixCycle:
    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise SpecificationError("cycle must contain at least one pair")

    def term(self, n, cum):
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.cycle[(n - len(self.prefix) - 1) % len(self.cycle)]

    def periodicity(self):
        return len(self.prefix) + 1, len(self.cycle)

    def declared_indices(self):
        return None


@dataclass(frozen=True)
class FamilyRule:
    family: Family

    def term(self, n, cum):
        return self.family.term(n, cum)

    def periodicity(self):
        return None

    def declared_indices(self):
        return self.family.indices()


@dataclass(frozen=True)
class Interleave:
    """``sub`` on ``indices`` and ``base`` elsewhere; both see the global ``n``."""

    base: Any
    sub: Any
    indices: IndexSet

    def term(self, n, cum):
        return (self.sub if n in self.indices else self.base).term(n, cum)

    def periodicity(self):
        return _combine(
            _combine(self.base.periodicity(), self.sub.periodicity()),
            self.indices.periodicity(),
        )

    def declared_indices(self):
        return self.indices


def recurrent_pairs(rule, sel: Selector = EVERYTHING):
    """Pairs occurring at indices of ``sel`` from some point on, or None.

    For eventually periodic rules this is exact: one full period window of
    the combined rule/selector periodicity.  Families answer for themselves.
    """
    per = _combine(rule.periodicity(), sel.periodicity())
    if per is not None:
        start, period = per
        return _dedupe(rule.term(n, None) for n in range(start, start + period) if n in sel)
    if isinstance(rule, Interleave):
        a = recurrent_pairs(rule.sub, sel.restrict(rule.indices))
        b = recurrent_pairs(rule.base, sel.restrict(rule.indices, True))
        if a is None or b is None:
            return None
        return _dedupe(a + b)
    if isinstance(rule, FamilyRule):
        return rule.family.recurrent(sel)
    return None


def tail_lower_bound(rule, sel, q, quantity: str, radius=None) -> float | None:
    """A constant ``c > 0`` with ``q(term) >= c`` infinitely often on ``sel``.

    ``q`` maps a pair to a number; ``quantity`` names it for families.  None
    when no structural reason is known.
    """
    rec = recurrent_pairs(rule, sel)
    if rec is not None:
        best = max((q(p) for p in rec), default=0.0)
        return best if best > 0 else None
    if isinstance(rule, Interleave):
        found = [
            tail_lower_bound(rule.sub, sel.restrict(rule.indices), q, quantity, radius),
            tail_lower_bound(rule.base, sel.restrict(rule.indices, True), q, quantity, radius),
        ]
        found = [f for f in found if f is not None]
        return max(found) if found else None
    if isinstance(rule, FamilyRule):
        return rule.family.lower_bound(quantity, sel, radius)
    return None


def tail_unbounded(rule, sel, quantity: str) -> bool:
    if isinstance(rule, Interleave):
        return tail_unbounded(rule.sub, sel.restrict(rule.indices), quantity) or tail_unbounded(
            rule.base, sel.restrict(rule.indices, True), quantity
        )
    if isinstance(rule, FamilyRule):
        return rule.family.unbounded(quantity, sel)
    return False


def tail_infinitely_often(rule, sel, predicate: str, test) -> bool:
    """Whether ``test(term)`` holds for infinitely many indices of ``sel``."""
    rec = recurrent_pairs(rule, sel)
    if rec is not None:
        return any(test(p) for p in rec)
    if isinstance(rule, Interleave):
        return tail_infinitely_often(
            rule.sub, sel.restrict(rule.indices), predicate, test
        ) or tail_infinitely_often(rule.base, sel.restrict(rule.indices, True), predicate, test)
    if isinstance(rule, FamilyRule):
        return rule.family.infinitely_often(predicate, sel)
    return False


# ---------------------------------------------------------------------------
# Sequence specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumSets:
    """Where the spectrum sets ``L_n`` come from.

    ``kind`` is ``constant`` (``values`` is one set), ``explicit``
    (``values`` maps index -> set, ``default`` covers the rest), ``family``
    (ask the family rule) or ``search`` (first set found by clique search).
    """

    kind: str = "search"
    values: Any = None
    default: tuple | None = None

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"type": "constant", "set": list(self.values)}
        if self.kind == "explicit":
            d = {"type": "explicit", "sets": {str(k): list(v) for k, v in self.values}}
            if self.default is not None:
                d["default"] = list(self.default)
            return d
        return {"type": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumSets":
        if not isinstance(d, dict):
            raise SpecificationError("spectrum_sets must be an object")
        if "type" not in d and d and all(str(k).isdigit() for k in d):
            # bare map index -> set
            d = {"type": "explicit", "sets": d}
        kind = d.get("type")
        if kind == "constant":
            return cls("constant", tuple(int(v) for v in d["set"]))
        if kind == "explicit":
            sets = tuple(sorted((int(k), tuple(int(v) for v in vs)) for k, vs in d["sets"].items()))
            default = tuple(int(v) for v in d["default"]) if "default" in d else None
            return cls("explicit", sets, default)
        if kind in ("family", "search"):
            return cls(kind)
        raise SpecificationError(f"unknown spectrum_sets type {kind!r}")


@dataclass(frozen=True)
class SequenceSpec:
    rule: Any
    convergence_tag: ConvergenceTag | None = None
    spectrum_sets: SpectrumSets | None = None
    name: str = field(default="", compare=False)

    def periodicity(self):
        return self.rule.periodicity()

    def declared_indices(self) -> IndexSet | None:
        return self.rule.declared_indices()


_PREFIXES: "OrderedDict[SequenceSpec, tuple[list, list]]" = OrderedDict()
_PREFIX_CACHE_SIZE = 8


def _prefix(spec: SequenceSpec, n_max: int):
    pairs, cums = _PREFIXES.pop(spec, ([], []))
    cum = cums[-1] if cums else 1
    for n in range(len(pairs) + 1, n_max + 1):
        p = spec.rule.term(n, cum)
        if not isinstance(p, GeneratorPair):
            raise SpecificationError(f"rule produced {p!r} at n={n}")
        cum = cum * (p.scale if isinstance(p.scale, int) else Fraction(p.scale))
        pairs.append(p)
        cums.append(cum)
    _PREFIXES[spec] = (pairs, cums)
    while len(_PREFIXES) > _PREFIX_CACHE_SIZE:
        _PREFIXES.popitem(last=False)
    return pairs, cums


def expand_sequence(spec: SequenceSpec, n_max: int) -> list[GeneratorPair]:
    """The first ``n_max`` pairs of the sequence."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    return list(_prefix(spec, n_max)[0][:n_max])


def cumulative_scales(spec: SequenceSpec, n_max: int) -> list:
    """``N_1, N_1 N_2, ..., N_1 ... N_{n_max}`` as exact ints or Fractions."""
    if n_max < 1:
        return []
    return list(_prefix(spec, n_max)[1][:n_max])


def period_scale(spec: SequenceSpec):
    """``(start, period, rho)`` with ``rho`` the product of scales over a period.

    None when the rule is not eventually periodic.
    """
    per = spec.periodicity()
    if per is None:
        return None
    start, period = per
    cums = cumulative_scales(spec, start + period - 1)
    before = cums[start - 2] if start >= 2 else 1
    return start, period, Fraction(cums[start + period - 2]) / Fraction(before)


# ---------------------------------------------------------------------------
# JSON format
# ---------------------------------------------------------------------------


def _pairs_from(items) -> tuple:
    try:
        return tuple(GeneratorPair(it["scale"], tuple(it["digits"])) for it in items)
    except (KeyError, TypeError) as exc:
        raise SpecificationError(f"malformed pair list: {exc}") from exc


def rule_from_dict(d: dict):
    if not isinstance(d, dict):
        raise SpecificationError("rule must be an object")
    kind = d.get("type")
    if kind == "cycle":
        return Cycle(_pairs_from(d.get("pairs", ())))
    if kind == "prefix_cycle":
        return PrefixCycle(_pairs_from(d.get("prefix", ())), _pairs_from(d.get("cycle", ())))
    if kind == "family":
        name = d.get("name")
        if name not in FAMILIES:
            raise SpecificationError(f"unknown family {name!r}")
        return FamilyRule(FAMILIES[name](d.get("params", {})))
    if kind == "interleave":
        try:
            return Interleave(
                rule_from_dict(d["base"]), rule_from_dict(d["sub"]), IndexSet.from_dict(d["indices"])
            )
        except KeyError as exc:
            raise SpecificationError(f"interleave needs {exc}") from exc
    raise SpecificationError(f"unknown rule type {kind!r}")


def rule_to_dict(rule) -> dict:
    if isinstance(rule, Cycle):
        return {"type": "cycle", "pairs": [p.to_dict() for p in rule.pairs]}
    if isinstance(rule, PrefixCycle):
        return {
            "type": "prefix_cycle",
            "prefix": [p.to_dict() for p in rule.prefix],
            "cycle": [p.to_dict() for p in rule.cycle],
        }
    if isinstance(rule, FamilyRule):
        return {"type": "family", "name": rule.family.name, "params": rule.family.params()}
    if isinstance(rule, Interleave):
        return {
            "type": "interleave",
            "base": rule_to_dict(rule.base),
            "sub": rule_to_dict(rule.sub),
            "indices": rule.indices.to_dict(),
        }
    raise SpecificationError(f"cannot serialise {rule!r}")


def spec_from_dict(d: dict) -> SequenceSpec:
    if not isinstance(d, dict):
        raise SpecificationError("spec document must be a JSON object")
    if d.get("version") != SCHEMA_VERSION:
        raise SpecificationError(f"spec document needs \"version\": \"{SCHEMA_VERSION}\"")
    if "rule" not in d:
        raise SpecificationError("spec document needs a rule")
    tag = d.get("convergence_tag")
    sets = d.get("spectrum_sets")
    try:
        return SequenceSpec(
            rule=rule_from_dict(d["rule"]),
            convergence_tag=ConvergenceTag.from_dict(tag) if tag else None,
            spectrum_sets=SpectrumSets.from_dict(sets) if sets else None,
            name=str(d.get("name", "")),
        )
    except SpecificationError:
        raise
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise SpecificationError(f"malformed spec document: {exc}") from exc


def spec_to_dict(spec: SequenceSpec) -> dict:
    d: dict = {"version": SCHEMA_VERSION, "rule": rule_to_dict(spec.rule)}
    if spec.name:
        d["name"] = spec.name
    if spec.convergence_tag is not None:
        d["convergence_tag"] = spec.convergence_tag.to_dict()
    if spec.spectrum_sets is not None:
        d["spectrum_sets"] = spec.spectrum_sets.to_dict()
    return d


def load_spec(path) -> SequenceSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecificationError(f"{path}: not valid JSON ({exc})") from exc
    return spec_from_dict(doc)


def constant_spec(scale, digits, spectrum: Sequence[int] | None = None, name="") -> SequenceSpec:
    """All terms equal to ``(scale, digits)``."""
    sets = SpectrumSets("constant", tuple(spectrum)) if spectrum is not None else None
    return SequenceSpec(Cycle((pair(scale, digits),)), spectrum_sets=sets, name=name)


def tag_violation(spec: SequenceSpec, n_max: int) -> int | None:
    """First index ``n <= n_max`` contradicting the convergence tag, if any.

    A tag asserts integer scales >= 2 and ``#B_{n,2}/#B_n <= bound(n)``.
    """
    tag = spec.convergence_tag
    if tag is None or n_max < 1:
        return None
    for n, p in enumerate(expand_sequence(spec, n_max), start=1):
        if not p.is_integral or remainder_fraction(p) > tag.bound(n) * (1 + 1e-12):
            return n
    return None


def ratio(a, b) -> float:
    """``a / b`` as a float, safe for huge integers."""
    try:
        return float(a / b)
    except OverflowError:
        return float(Fraction(a) / Fraction(b))
