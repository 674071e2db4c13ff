"""Candidate spectra, finite-level verification and equi-positivity scans.

For Hadamard triples ``(N_k, B_k, L_k)`` the candidate spectrum at level
``n`` is

    Lambda(n) = { l_1 + N_1 l_2 + ... + N_1 ... N_{n-1} l_n : l_k in L_k },

which is an exact spectrum of the finite convolution ``mu_n``.  Whether it
extends to a spectrum of the limit is probed numerically through
orthogonality, the completeness function ``Q(xi) = sum |mu_hat(xi + l)|^2``
and equi-positivity of tail measures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .conditions import HadamardTriple, check_unitarity, find_spectrum_sets
from .core import (
    DomainError,
    FamilyRule,
    Interleave,
    ResourceGuardError,
    SequenceSpec,
    expand_sequence,
    ratio,
)
from .existence import displacement_bound
from .transforms import rebased_scales, tail_bound, transform_values

GRAM_GUARD = 4096
ROUNDOFF_PER_FACTOR = 1e-12


class CollisionError(ValueError):
    """Two index tuples produced the same frequency or atom."""

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first, self.second = first, second


# ---------------------------------------------------------------------------
# spectrum sets and candidates
# ---------------------------------------------------------------------------


def _family_set(rule, n):
    if isinstance(rule, FamilyRule):
        return rule.family.spectrum_set(n)
    if isinstance(rule, Interleave):
        return _family_set(rule.sub if n in rule.indices else rule.base, n)
    return None


def spectrum_sets_for(spec: SequenceSpec, level: int) -> list[tuple]:
    """``L_1, ..., L_level`` from the sequence's spectrum-set source (clique search by default)."""
    pairs = expand_sequence(spec, level)
    src = spec.spectrum_sets
    kind = src.kind if src is not None else "search"
    out = []
    for n, p in enumerate(pairs, start=1):
        if kind == "constant":
            s = src.values
        elif kind == "explicit":
            s = dict(src.values).get(n, src.default)
        elif kind == "family":
            s = _family_set(spec.rule, n)
        else:
            p.require_integral()
            found = find_spectrum_sets(p.scale, p.digits, 1)
            s = found[0].spectrum_set if found else None
        if s is None:
            raise DomainError(f"no spectrum set available for term {n}")
        out.append(tuple(s))
    return out


def spectrum_triples(spec: SequenceSpec, level: int, sets=None) -> list[HadamardTriple]:
    sets = spectrum_sets_for(spec, level) if sets is None else [tuple(s) for s in sets]
    if len(sets) < level:
        raise DomainError(f"need {level} spectrum sets, got {len(sets)}")
    pairs = expand_sequence(spec, level)
    return [check_unitarity(p.scale, p.digits, s) for p, s in zip(pairs, sets[:level])]


@dataclass(frozen=True)
class SpectrumCandidate:
    level: int
    spectrum_sets: tuple
    points: tuple

    @property
    def cardinality(self) -> int:
        return len(self.points)


def candidate_spectrum(triples, require_certified: bool = True) -> SpectrumCandidate:
    """Enumerate ``Lambda(n)``; colliding frequencies raise :class:`CollisionError`."""
    if require_certified:
        bad = [i + 1 for i, t in enumerate(triples) if not t.certified]
        if bad:
            raise DomainError(f"triples at levels {bad} are not certified")
    pts = {0: ()}
    weight = 1
    for t in triples:
        nxt = {}
        for lam, idx in pts.items():
            for l_ in t.spectrum_set:
                v = lam + weight * l_
                if v in nxt:
                    raise CollisionError(f"frequency {v} arises twice", nxt[v], idx + (l_,))
                nxt[v] = idx + (l_,)
        pts = nxt
        weight *= t.scale
    return SpectrumCandidate(len(triples), tuple(t.spectrum_set for t in triples), tuple(sorted(pts)))


@dataclass(frozen=True)
class GramResult:
    residual: float
    size: int

    @property
    def certified(self) -> bool:
        return self.residual <= 1e-10


def finite_level_gram(triples) -> GramResult:
    """Gram residual of ``{e_lambda}`` in ``L^2(mu_n)`` over the exact atoms of ``mu_n``."""
    size = math.prod(len(t.digits) for t in triples)
    if size > GRAM_GUARD:
        raise ResourceGuardError(f"level needs a {size}x{size} matrix (guard {GRAM_GUARD})")
    lam = candidate_spectrum(triples, require_certified=False).points
    # atoms as integers over the common denominator P = N_1 ... N_n
    total = math.prod(t.scale for t in triples)
    atoms = [0]
    p = 1
    for t in triples:
        p *= t.scale
        atoms = [a + b * (total // p) for a in atoms for b in t.digits]
    if len(set(atoms)) != len(atoms):
        seen = {}
        for i, a in enumerate(atoms):
            if a in seen:
                raise CollisionError(f"atoms {seen[a]} and {i} coincide at {a}/{total}", seen[a], i)
            seen[a] = i
    a = np.asarray(atoms, dtype=object)
    l_ = np.asarray(lam, dtype=object)
    phase = np.mod(np.multiply.outer(a, l_), total).astype(float) / total
    g = np.exp(-2j * np.pi * phase) / math.sqrt(size)
    residual = float(np.abs(g.conj().T @ g - np.eye(len(lam))).max())
    return GramResult(residual, size)


# ---------------------------------------------------------------------------
# orthogonality and completeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrthogonalityReport:
    level: int
    depth: int
    pairs_checked: int
    max_modulus: float
    worst_pair: tuple | None
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_modulus <= self.tol

    def to_dict(self) -> dict:
        return {
            "level": self.level, "depth": self.depth, "pairsChecked": self.pairs_checked,
            "maxModulus": self.max_modulus,
            "worstPair": list(self.worst_pair) if self.worst_pair else None,
            "tol": self.tol, "passed": self.passed,
        }


def orthogonality_check(spec: SequenceSpec, sets=None, level: int = 3, depth: int = 40,
                        tol: float = 1e-8) -> OrthogonalityReport:
    """Max of ``|mu_hat(l - l')|`` over distinct points of ``Lambda(level)``."""
    lam = candidate_spectrum(spectrum_triples(spec, level, sets)).points
    diffs = {}
    for a, b in combinations(lam, 2):
        diffs.setdefault(b - a, (a, b))
    if not diffs:
        return OrthogonalityReport(level, depth, 0, 0.0, None, tol)
    keys = sorted(diffs)
    vals = np.abs(transform_values(spec, np.asarray(keys, dtype=float), depth))
    i = int(np.argmax(vals))
    return OrthogonalityReport(level, depth, len(lam) * (len(lam) - 1) // 2,
                               float(vals[i]), diffs[keys[i]], tol)


@dataclass(frozen=True)
class CompletenessScan:
    level: int
    depth: int
    xi: np.ndarray
    q: np.ndarray
    slack: np.ndarray

    @property
    def q_min(self) -> float:
        return float(self.q.min())

    @property
    def q_max(self) -> float:
        return float(self.q.max())

    @property
    def interval(self) -> tuple[float, float]:
        """``[min(Q - slack), max(Q + slack)]`` over the grid."""
        return float((self.q - self.slack).min()), float((self.q + self.slack).max())

    def to_dict(self) -> dict:
        lo, hi = self.interval
        return {
            "level": self.level, "depth": self.depth, "points": len(self.xi),
            "qMin": self.q_min, "qMax": self.q_max, "interval": [lo, hi],
            "xi": self.xi.tolist(), "q": self.q.tolist(), "slack": self.slack.tolist(),
        }


def completeness_scan(spec: SequenceSpec, sets=None, level: int = 8, xi=None,
                      depth: int = 40) -> CompletenessScan:
    """``Q(xi)`` restricted to ``Lambda(level)`` with a truncation slack per point."""
    lam = np.asarray(candidate_spectrum(spectrum_triples(spec, level, sets)).points, dtype=float)
    x = np.linspace(0, 1, 128, endpoint=False) if xi is None else np.asarray(xi, dtype=float)
    args = np.add.outer(x, lam)
    vals = transform_values(spec, args.ravel(), depth).reshape(args.shape)
    q = (np.abs(vals) ** 2).sum(axis=1)
    u = np.asarray(tail_bound(spec, args.ravel(), depth)).reshape(args.shape)
    slack = (2 * u + u * u).sum(axis=1) + 2 * depth * ROUNDOFF_PER_FACTOR * len(lam)
    return CompletenessScan(level, depth, x, q, slack)


# ---------------------------------------------------------------------------
# equi-positivity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquiPositivityResult:
    indices: tuple
    grid: np.ndarray
    shift_map: dict
    min_moduli: dict
    epsilon: float
    delta: float
    margin: float
    depth: int
    failure: tuple | None

    @property
    def witness(self) -> bool:
        return self.failure is None

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "gridResolution": len(self.grid),
            "depth": self.depth,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "certifiedMargin": self.margin,
            "witness": self.witness,
            "failure": None if self.failure is None else {"x": self.failure[0], "tail": self.failure[1]},
            "shiftMap": {str(n): [int(k) for k in v] for n, v in self.shift_map.items()},
            "minModulus": {str(n): [float(m) for m in v] for n, v in self.min_moduli.items()},
        }


def first_moment_bound(spec: SequenceSpec, start: int, depth: int) -> float:
    """Upper bound for ``E|X|`` under the tail measure ``nu_{>start}``."""
    pairs = expand_sequence(spec, start + depth)[start:]
    scales = rebased_scales(spec, start, depth)
    head = sum(ratio(sum(abs(b) for b in p.digits), s) / p.size for p, s in zip(pairs, scales))
    return head + displacement_bound(spec, depth, start)


def _best_shift(vals: np.ndarray, x: float, ks: np.ndarray) -> int:
    top = vals.max()
    tied = [i for i in range(len(ks)) if vals[i] >= top - 1e-12]
    # prefer x + k in [-1/2, 1/2), then the smallest |k|
    return min(tied, key=lambda i: (not (-0.5 <= x + ks[i] < 0.5), abs(ks[i])))


def equipositivity_scan(spec: SequenceSpec, tail_indices, grid: int = 256, shifts: int = 3,
                        depth: int = 40, delta: float = 1 / 64) -> EquiPositivityResult:
    """Grid scan for an equi-positive family ``{nu_{>n} : n in tail_indices}``.

    For each grid point ``x`` and tail ``n`` the shift ``k`` in
    ``[-shifts, shifts]`` maximising ``min_y |nu_hat(x + y + k)|`` over
    ``y in {-delta, 0, delta}`` is recorded (``k = 0`` at ``x = 0``).  The scan
    succeeds when the smallest such value still exceeds the Lipschitz and
    truncation allowance, so no zero can hide between the probes.
    """
    if grid < 1 or shifts < 0 or delta <= 0:
        raise DomainError("grid >= 1, shifts >= 0 and delta > 0 are required")
    xs = np.arange(grid) / grid
    ks = np.arange(-shifts, shifts + 1)
    ys = np.array([-delta, 0.0, delta])
    shift_map, minima = {}, {}
    eps, margin, failure = math.inf, math.inf, None
    for n in tail_indices:
        pts = xs[:, None, None] + ks[None, :, None] + ys[None, None, :]
        mod = np.abs(transform_values(spec, pts.ravel(), depth, start=n)).reshape(pts.shape)
        worst = mod.min(axis=2)
        # truncating the digit expansion moves each point by at most the
        # displacement bound, which moves the transform by 2 pi |xi| times it
        u = 2 * math.pi * float(np.abs(pts).max()) * displacement_bound(spec, depth, n)
        lip = 2 * math.pi * first_moment_bound(spec, n, depth)
        allowance = lip * delta / 2 + u
        chosen, best = [], []
        for i, x in enumerate(xs):
            j = int(np.where(ks == 0)[0][0]) if x == 0 else _best_shift(worst[i], x, ks)
            chosen.append(int(ks[j]))
            best.append(float(worst[i, j]))
        shift_map[n], minima[n] = chosen, best
        i_min = int(np.argmin(best))
        if best[i_min] < eps:
            eps = best[i_min]
        m = best[i_min] - allowance
        if m < margin:
            margin = m
        if m <= 0 and failure is None:
            failure = (float(xs[i_min]), n)
    return EquiPositivityResult(tuple(tail_indices), xs, shift_map, minima, eps, delta, margin, depth, failure)


# ---------------------------------------------------------------------------
# angle bounds
# ---------------------------------------------------------------------------


def r_theta(theta: float) -> float:
    """``cos(theta/2)``: lower bound for ``|mean exp(-i x_j)|`` with all ``x_j`` in ``[0, theta]``."""
    if not 0 < theta < math.pi:
        raise DomainError(f"theta must lie in (0, pi), got {theta!r}")
    return math.cos(theta / 2)


def widen_theta(theta: float, c: float) -> tuple[float, float]:
    """``(theta', Delta)`` with ``r(theta') = c r(theta)`` and ``Delta = theta'/theta - 1``."""
    r = r_theta(theta)
    if not 0 < c < 1:
        raise DomainError(f"c must lie in (0, 1), got {c!r}")
    wide = min(2 * math.acos(c * r), math.nextafter(math.pi, 0))
    return wide, wide / theta - 1


def mean_resultant(x) -> float:
    """``|(1/m) sum exp(-i x_j)|``."""
    x = np.asarray(x, dtype=float)
    return float(np.abs(np.exp(-1j * x).mean()))
