"""Masks, truncated Fourier transforms of infinite convolutions, and tail bounds.

The transform of the infinite convolution is the product of masks

    mu_hat(xi) = prod_n M_{B_n}(xi / (N_1 ... N_n)),

and the tail measure ``nu_{>n}`` uses the same product re-based at ``n+1``.
Truncating after ``depth`` factors leaves an error controlled by the factor-wise
estimate

    |M_{B_n}(xi / P_n) - 1| <= 2 pi |xi| max(B_{n,1}) / P_n + 2 #B_{n,2} / #B_n,

summed over the omitted factors ``S``; the product then moves by at most
``exp(S) - 1``.  Beyond the explicit horizon the sum is closed either exactly
(eventually periodic rules, geometric tails) or by a convergence tag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import numpy as np

from .core import (
    DomainError,
    GeneratorPair,
    SequenceSpec,
    cumulative_scales,
    expand_sequence,
    ratio,
    remainder_fraction,
    split_digits,
    tag_violation,
)

UNBOUNDED = math.inf
DEFAULT_TOL = 1e-8
DEPTH_CAP = 200
HORIZON_PAD = 32


def mask_eval(digits, xi):
    """``M_B(xi) = (1/#B) sum_b exp(-2 pi i b xi)``; vectorised over ``xi``."""
    b = np.asarray([float(d) for d in digits])
    if b.size < 2:
        raise DomainError("mask needs at least two digits")
    x = np.asarray(xi, dtype=float)
    out = np.exp(-2j * np.pi * np.multiply.outer(x, b)).mean(axis=-1)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TruncatedTransform:
    xi: float
    depth: int
    start: int
    cumulative_scales: tuple
    value: complex
    tail_error_bound: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.tail_error_bound)


# ---------------------------------------------------------------------------
# per-term data
# ---------------------------------------------------------------------------


def rebased_scales(spec: SequenceSpec, start: int, depth: int) -> list:
    """``N_{start+1} ... N_{start+k}`` for ``k = 1..depth`` (exact)."""
    cums = cumulative_scales(spec, start + depth)
    base = cums[start - 1] if start >= 1 else 1
    if start == 0:
        return cums[:depth]
    out = []
    for c in cums[start:start + depth]:
        if isinstance(c, int) and isinstance(base, int):
            out.append(c // base)
        else:
            out.append(Fraction(c) / Fraction(base))
    return out


@lru_cache(maxsize=16)
def _atoms(spec: SequenceSpec, start: int, depth: int) -> tuple:
    """Scaled digit arrays ``B_{start+k} / (N_{start+1} ... N_{start+k})``."""
    pairs = expand_sequence(spec, start + depth)[start:]
    scales = rebased_scales(spec, start, depth)
    out = []
    for p, s in zip(pairs, scales):
        if isinstance(s, int) and s < 2**53 and all(isinstance(b, int) and abs(b) < 2**53 for b in p.digits):
            arr = np.asarray(p.digits, dtype=float) / float(s)
        else:
            arr = np.asarray([ratio(b, s) for b in p.digits])
        arr.setflags(write=False)
        out.append(arr)
    return tuple(out)


def _principal_max(p: GeneratorPair) -> float:
    if p.is_integral:
        principal = split_digits(p).principal
        return principal[-1] if principal else 0
    return p.max_abs_digit()


def _coefficients(spec: SequenceSpec, start: int, lo: int, hi: int):
    """Per-factor coefficients ``(a_k, r_k)`` for ``k = lo..hi`` (rebased)."""
    if hi < lo:
        return np.zeros(0), np.zeros(0)
    pairs = expand_sequence(spec, start + hi)
    scales = rebased_scales(spec, start, hi)
    a = np.empty(hi - lo + 1)
    r = np.empty(hi - lo + 1)
    for i, k in enumerate(range(lo, hi + 1)):
        p = pairs[start + k - 1]
        a[i] = ratio(_principal_max(p), scales[k - 1])
        r[i] = remainder_fraction(p) if p.is_integral else 0.0
    return a, r


def _periodic_extension(spec: SequenceSpec, start: int, horizon: int):
    """Exact ``(sum a_k, sum r_k)`` over ``k > horizon`` for periodic rules.

    Returns ``(inf, inf)`` components when a series diverges and None when
    the rule is not eventually periodic.
    """
    per = spec.periodicity()
    if per is None:
        return None
    s, period = per
    horizon = max(horizon, s - 1 - start)
    a, r = _coefficients(spec, start, horizon + 1, horizon + period)
    # product of scales across one period (same for every period)
    scales = rebased_scales(spec, start, horizon + period)
    before = scales[horizon - 1] if horizon >= 1 else 1
    rho = Fraction(scales[-1]) / Fraction(before)
    if a.any():
        a_tail = float(a.sum()) * float(rho / (rho - 1)) if rho > 1 else math.inf
    else:
        a_tail = 0.0
    r_tail = math.inf if r.any() else 0.0
    return horizon, a_tail, r_tail


def _tag_extension(spec: SequenceSpec, start: int, horizon: int):
    tag = spec.convergence_tag
    if tag is None or tag_violation(spec, start + horizon) is not None:
        return None
    scales = rebased_scales(spec, start, horizon) if horizon >= 1 else [1]
    p_h = scales[-1] if horizon >= 1 else 1
    return ratio(2, p_h), tag.tail(start + horizon)


def tail_coefficients(spec: SequenceSpec, from_depth: int, horizon: int | None = None, start: int = 0):
    """``(A, R)`` with omitted-factor sum ``S(xi) = 2 pi |xi| A + 2 R``.

    Infinite components mean the estimate does not close.
    """
    if from_depth < 0:
        raise DomainError("from_depth must be >= 0")
    if horizon is None:
        horizon = from_depth + HORIZON_PAD
    if horizon <= from_depth:
        raise DomainError("horizon must exceed from_depth")
    options = []
    per = _periodic_extension(spec, start, horizon)
    if per is not None:
        h, a_ext, r_ext = per
        a, r = _coefficients(spec, start, from_depth + 1, h)
        options.append((float(a.sum()) + a_ext, float(r.sum()) + r_ext))
    tag = _tag_extension(spec, start, horizon)
    if tag is not None:
        a, r = _coefficients(spec, start, from_depth + 1, horizon)
        options.append((float(a.sum()) + tag[0], float(r.sum()) + tag[1]))
    if not options:
        return math.inf, math.inf
    return min(options, key=lambda o: (o[1], o[0]))


def _bound_from(a_sum: float, r_sum: float, xi) -> np.ndarray:
    x = np.abs(np.asarray(xi, dtype=float))
    if not (math.isfinite(a_sum) and math.isfinite(r_sum)):
        return np.full(x.shape, math.inf)
    with np.errstate(invalid="ignore"):
        s = 2 * np.pi * x * a_sum + 2 * r_sum
    return np.where(s < 1, np.expm1(s), math.inf)


def tail_bound(spec: SequenceSpec, xi, from_depth: int, horizon: int | None = None, start: int = 0):
    """Bound on ``|full product - first from_depth factors|`` at ``xi``.

    Returns ``math.inf`` ("unbounded") when the omitted-factor sum reaches 1
    or nothing covers the tail beyond the horizon.
    """
    a_sum, r_sum = tail_coefficients(spec, from_depth, horizon, start)
    out = _bound_from(a_sum, r_sum, xi)
    return float(out) if out.ndim == 0 else out


def adaptive_depth(spec: SequenceSpec, xi_abs_max: float, start: int = 0,
                   tol: float = DEFAULT_TOL, cap: int = DEPTH_CAP) -> int:
    """Smallest depth whose tail bound at ``xi_abs_max`` is below ``tol``.

    When the cap binds the cap is returned and callers carry the achieved
    (possibly infinite) bound.
    """
    for d in range(1, cap + 1):
        if float(tail_bound(spec, xi_abs_max, d, start=start)) < tol:
            return d
    return cap


def transform_values(spec: SequenceSpec, xi, depth: int, start: int = 0) -> np.ndarray:
    """Product of the first ``depth`` re-based mask factors on an ``xi`` array."""
    if depth < 1:
        raise DomainError("depth must be >= 1")
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.ones(x.shape, dtype=complex)
    for atoms in _atoms(spec, start, depth):
        out *= np.exp(-2j * np.pi * np.multiply.outer(x, atoms)).mean(axis=-1)
    return out


def transform_grid(spec: SequenceSpec, xi, depth: int | None = None, start: int = 0,
                   horizon: int | None = None):
    """``(depth, values, bounds)`` over an ``xi`` grid."""
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    if depth is None:
        depth = adaptive_depth(spec, float(np.abs(x).max(initial=0.0)), start)
    values = transform_values(spec, x, depth, start)
    bounds = np.atleast_1d(tail_bound(spec, x, depth, horizon, start))
    return depth, values, bounds


def transform_eval(spec: SequenceSpec, xi: float, depth: int | None = None,
                   horizon: int | None = None) -> TruncatedTransform:
    """Truncated transform of the infinite convolution at one frequency."""
    return tail_transform_eval(spec, 0, xi, depth, horizon)


def tail_transform_eval(spec: SequenceSpec, start: int, xi: float, depth: int | None = None,
                        horizon: int | None = None) -> TruncatedTransform:
    """Truncated transform of the tail measure ``nu_{>start}``."""
    if start < 0:
        raise DomainError("start index must be >= 0")
    d, values, bounds = transform_grid(spec, [xi], depth, start, horizon)
    return TruncatedTransform(
        xi=float(xi),
        depth=d,
        start=start,
        cumulative_scales=tuple(rebased_scales(spec, start, d)),
        value=complex(values[0]),
        tail_error_bound=float(bounds[0]),
    )
