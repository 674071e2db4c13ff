"""Acceptance suite: one check per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` or directly with
``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import oracles  # noqa: E402
from infconv.conditions import (  # noqa: E402
    check_rbc,
    check_unitarity,
    classify,
    find_spectrum_sets,
    is_general_consecutive,
    pcc_window,
)
from infconv.core import Cycle, SequenceSpec, cumulative_scales, expand_sequence, pair  # noqa: E402
from infconv.existence import sample_measure, three_series  # noqa: E402
from infconv.presets import get_preset  # noqa: E402
from infconv.spectra import (  # noqa: E402
    candidate_spectrum,
    completeness_scan,
    equipositivity_scan,
    finite_level_gram,
    mean_resultant,
    orthogonality_check,
    r_theta,
    spectrum_triples,
)
from infconv.transforms import transform_eval  # noqa: E402

GOLDEN = Path(__file__).resolve().parent / "golden"


def hadamard_certification():
    good = [(4, (0, 2), (0, 1)), (2, (0, 1), (0, 1)), (9, (0, 1, 5), (0, 3, 6))]
    res = [check_unitarity(*t) for t in good]
    bad = check_unitarity(4, (0, 2), (0, 2))
    ok = all(t.certified and t.residual <= 1e-12 for t in res) and not bad.certified
    return ok, f"residuals {[f'{t.residual:.1e}' for t in res]}, rejected residual {bad.residual:.2f}"


def power_offset_divergence():
    spec = get_preset("example-6.1").spec
    r = three_series(spec, 1, 40)
    c = classify(spec)
    ok = r.exact_totals[0] == 20 and r.series_mass[-1] == 20 and r.conclusion == "does_not_exist" \
        and c.conclusion == "does_not_exist"
    return ok, f"mass total {r.exact_totals[0]}, three-series {r.conclusion}, classify {c.conclusion}"


def escaping_spectral():
    spec = get_preset("example-6.3").spec
    rbc = check_rbc(spec, 200)
    below = max(rbc.aggregate) < math.pi**2 / 6 - 1 + 1e-9
    pairs = expand_sequence(spec, 200)
    sub = spec.declared_indices().members(200)
    consecutive = all(is_general_consecutive(pairs[n - 1]).value for n in sub)
    v = classify(spec)
    cums = cumulative_scales(spec, 200)
    total, growth = 0.0, True
    for k, n in enumerate(sub, start=1):
        big, p_n = max(pairs[n - 1].digits), cums[n - 1]
        # each term is 1 + tiny, so compare exactly before rounding
        total += big / p_n
        growth &= big > p_n and total > k - 1
    ok = below and rbc.verdict.proved and consecutive and growth \
        and v.conclusion == "exists_and_spectral" and v.route == "rbc+general-consecutive"
    return ok, (f"rbc max {max(rbc.aggregate):.6f} ({rbc.verdict.value.value}), "
                f"classify {v.conclusion} via {v.route}, indicator {total:.1f} over {len(sub)} terms")


def quarter_cantor_spectrum():
    spec = get_preset("jp").spec
    lam = candidate_spectrum(spectrum_triples(spec, 3)).points
    gram = finite_level_gram(spectrum_triples(spec, 3))
    orth = orthogonality_check(spec, level=3, depth=40)
    comp = completeness_scan(spec, level=8, depth=40)
    lo, hi = comp.interval
    ok = list(lam) == [0, 1, 4, 5, 16, 17, 20, 21] and gram.residual <= 1e-10 \
        and orth.max_modulus <= 1e-8 and comp.q_min >= 0.95 and lo <= 1 <= hi and len(comp.xi) == 128
    return ok, (f"gram {gram.residual:.1e}, orthogonality {orth.max_modulus:.1e}, "
                f"min Q {comp.q_min:.5f}, interval [{lo:.5f}, {hi:.5f}]")


def density_ratio(variant):
    spec = get_preset("example-6.2", variant).spec
    s = sample_measure(spec, depth=40, count=1_000_000, seed=20240601, start=0, bins=300)
    return s.mean_density(0.6, 1.4) / s.mean_density(0.1, 0.4)


def binary_density_discrimination():
    bumped, flat = density_ratio("finite-ones"), density_ratio("no-ones")
    ok = 1.9 <= bumped <= 2.1 and 0.95 <= flat <= 1.05
    return ok, f"ratio {bumped:.4f} (one {{0,1}} first), {flat:.4f} (all {{0,3}})"


def mean_resultant_bound():
    rng = np.random.default_rng(7)
    worst = math.inf
    for _ in range(10_000):
        theta = rng.uniform(0, math.pi)
        if theta == 0:
            continue
        m = int(rng.integers(1, 21))
        x = rng.uniform(0, theta, size=m)
        worst = min(worst, mean_resultant(x) - r_theta(theta))
    theta = 2.0
    tight = abs(mean_resultant([0, theta]) - r_theta(theta))
    ok = worst >= -1e-12 and tight <= 1e-12
    return ok, f"smallest margin {worst:.2e}, equality gap {tight:.1e}"


def equipositivity():
    spec = get_preset("jp").spec
    golden = json.loads((GOLDEN / "jp.json").read_text())["equipositiveEpsilon4096"]
    r = equipositivity_scan(spec, [0, 1, 2], grid=256, shifts=2, depth=40, delta=1 / 64)
    expected = [0 if x < 0.5 else -1 for x in r.grid]
    shifts_ok = all(
        set(i for i, (k, e) in enumerate(zip(r.shift_map[n], expected)) if k != e) <= {127, 128}
        for n in r.indices
    )
    bad = equipositivity_scan(get_preset("example-6.2-latter").spec, [1], grid=256, shifts=2, depth=40)
    ok = r.witness and r.epsilon > 0 and r.epsilon >= golden - 1e-9 and shifts_ok \
        and not bad.witness and bad.failure is not None
    return ok, (f"epsilon {r.epsilon:.4f} (fine-grid golden {golden:.4f}), shift map ok {shifts_ok}, "
                f"escaping tail fails at x={bad.failure[0] if bad.failure else None}")


def oracle_equivalences():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(40):
        pairs = [(int(rng.integers(2, 6)), tuple(sorted(rng.choice(np.arange(-4, 9), size=int(rng.integers(2, 4)),
                                                                    replace=False).tolist())))
                 for _ in range(4)]
        spec = SequenceSpec(Cycle(tuple(pair(n, b) for n, b in pairs)))
        for depth in range(1, 5):
            for xi in rng.uniform(-3, 3, size=3):
                got = transform_eval(spec, float(xi), depth=depth).value
                worst = max(worst, abs(got - oracles.brute_force_transform(pairs[:depth], float(xi))))
    cliques = 0
    for n in range(2, 13):
        for size in (2, 3):
            for rest in itertools.combinations(range(1, n + 2), size - 1):
                b = (0,) + rest
                got = [t.spectrum_set for t in find_spectrum_sets(n, b, max_results=10**6)]
                if got != oracles.exhaustive_spectrum_sets(n, b):
                    return False, f"clique search differs at N={n}, B={b}"
                cliques += 1
    windows = 0
    for _ in range(300):
        n = int(rng.integers(2, 30))
        b = sorted(rng.choice(np.arange(-5, 40), size=int(rng.integers(2, 9)), replace=False).tolist())
        l = float(rng.uniform(0.01, 1))
        if pcc_window(pair(n, b), l).excluded != oracles.brute_force_window(n, b, l):
            return False, f"window differs at N={n}, B={b}, l={l}"
        windows += 1
    ok = worst <= 1e-12
    return ok, f"transform gap {worst:.1e}, {cliques} digit sets, {windows} windows"


CRITERIA = [
    (1, "Hadamard certification", hadamard_certification, 1),
    (2, "Non-existence by divergent mass", power_offset_divergence, 1),
    (3, "Escaping digits stay spectral", escaping_spectral, 5),
    (4, "Quarter Cantor spectrum", quarter_cantor_spectrum, 30),
    (5, "Density discrimination", binary_density_discrimination, 30),
    (6, "Mean resultant bound", mean_resultant_bound, 1),
    (7, "Equi-positivity", equipositivity, 60),
    (8, "Oracle equivalences", oracle_equivalences, 10),
]


def run_criterion(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


def report(number, title, ok, detail, elapsed, limit):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    return f"[{status}] criterion {number}: {title} ({elapsed:.2f}s, limit {limit}s): {detail}"


@pytest.mark.parametrize("number,title,fn,limit", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, title, fn, limit, capsys):
    ok, detail, elapsed = run_criterion(fn)
    with capsys.disabled():
        print("\n" + report(number, title, ok, detail, elapsed, limit))
    assert ok, detail
    assert elapsed < limit, f"took {elapsed:.2f}s"


if __name__ == "__main__":
    failed = 0
    for number, title, fn, limit in CRITERIA:
        ok, detail, elapsed = run_criterion(fn)
        line = report(number, title, ok, detail, elapsed, limit)
        failed += line.startswith("[FAIL")
        print(line)
    sys.exit(1 if failed else 0)
