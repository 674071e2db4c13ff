import math

import numpy as np
import pytest

import oracles
from infconv.core import (
    ConvergenceTag,
    Cycle,
    DomainError,
    IndexSet,
    PrefixCycle,
    SequenceSpec,
    VerdictValue,
    constant_spec,
    pair,
    tag_violation,
)
from infconv.conditions import (
    check_dbc,
    check_pcc,
    check_rbc,
    check_unitarity,
    classify,
    difference_gcd,
    find_spectrum_sets,
    gcd_tail,
    hadamard_matrix,
    is_general_consecutive,
    pcc_fraction,
    pcc_window,
    scale_exceeds_size,
    zero_differences,
)
from infconv.presets import get_preset

P = VerdictValue.PROVED_BY_RULE
E = VerdictValue.EMPIRICALLY_HOLDS
F = VerdictValue.FAILS


@pytest.mark.parametrize("n,b,l", [(4, (0, 2), (0, 1)), (2, (0, 1), (0, 1)), (9, (0, 1, 5), (0, 3, 6))])
def test_known_triples_certify(n, b, l):
    t = check_unitarity(n, b, l)
    assert t.certified and t.residual <= 1e-12


def test_non_spectrum_set_is_rejected():
    t = check_unitarity(4, (0, 2), (0, 2))
    assert not t.certified
    assert t.residual == pytest.approx(1.0)


def test_unitarity_input_errors():
    with pytest.raises(DomainError):
        check_unitarity(4, (0, 2), (0, 1, 2))
    with pytest.raises(DomainError):
        check_unitarity(4, (0, 0.5), (0, 1))


def test_hadamard_matrix_entries():
    h = hadamard_matrix(4, (0, 2), (0, 1))
    assert np.allclose(h * math.sqrt(2), [[1, 1], [1, -1]])


def test_zero_differences():
    # M_{0,2}(j/4) vanishes exactly at odd j
    assert zero_differences(4, (0, 2)) == [1, 3]


def test_find_spectrum_sets_lexicographic():
    found = find_spectrum_sets(4, (0, 2))
    assert [t.spectrum_set for t in found] == [(0, 1), (0, 3)]
    found = find_spectrum_sets(9, (0, 1, 5))
    assert (0, 3, 6) in [t.spectrum_set for t in found]
    assert all(t.certified for t in found)


def test_find_spectrum_sets_matches_exhaustive():
    for n, b in [(6, (0, 1, 2)), (8, (0, 2, 5)), (12, (0, 4, 8)), (10, (0, 1))]:
        got = [t.spectrum_set for t in find_spectrum_sets(n, b, max_results=10**6)]
        assert got == oracles.exhaustive_spectrum_sets(n, b)


def test_non_admissible_pair_has_no_sets():
    assert find_spectrum_sets(5, (0, 1, 2)) == []


def test_rbc_fails_for_escaping_cycle():
    r = check_rbc(constant_spec(2, [0, 3]), 50)
    assert r.verdict.value is F
    assert r.aggregate[-1] == pytest.approx(25)


def test_rbc_proved_for_principal_cycle():
    r = check_rbc(get_preset("jp").spec, 50)
    assert r.verdict.value is P and r.aggregate[-1] == 0


def test_rbc_under_tag():
    r = check_rbc(get_preset("example-6.3").spec, 200)
    assert r.verdict.value is P
    assert max(r.aggregate) < math.pi**2 / 6 - 1 + 1e-9


def test_rbc_without_tag_is_empirical_at_best():
    spec = SequenceSpec(PrefixCycle((pair(2, [0, 3]),) * 3, (pair(2, [0, 1]),)))
    r = check_rbc(spec, 40)
    assert r.verdict.value is P  # eventually periodic with no remainder digits
    escaping = get_preset("example-6.3").spec
    untagged = SequenceSpec(escaping.rule, None, escaping.spectrum_sets)
    assert check_rbc(untagged, 200).verdict.value in (E, VerdictValue.UNKNOWN)


def test_rbc_on_subsequence_and_complement():
    spec = get_preset("example-6.2", "infinite-ones").spec
    odd = IndexSet("arithmetic", start=1, step=2)
    assert check_rbc(spec, 40, odd).verdict.value is P
    assert check_rbc(spec, 40, odd, complement=True).verdict.value is F


def test_dbc():
    assert check_dbc(get_preset("jp").spec).verdict.value is P
    assert check_dbc(get_preset("example-6.1").spec).verdict.value is F
    spec = get_preset("example-6.3").spec
    odd = IndexSet("arithmetic", start=1, step=2)
    assert check_dbc(spec, odd, complement=True).verdict.value is P


def test_pcc_window_examples():
    w = pcc_window(pair(4, (0, 2)), 0.75)
    assert w.excluded == 0 and (w.left, w.right) == (0, 2)
    w = pcc_window(pair(4, (0, 2)), 0.5)
    assert w.excluded == 1 and w.widened
    assert 0 < w.right - w.left < 0.5 * 4
    w = pcc_window(pair(8, (0, 1, 2, 11)), 0.5)
    assert w.excluded == 1


def test_pcc_window_matches_brute_force():
    cases = [(10, (0, 1, 3, 7, 9, 12)), (7, (-2, 0, 2, 3, 6)), (16, (0, 1, 2, 3, 8, 9, 15, 40))]
    for n, b in cases:
        for l in (0.1, 0.3, 0.5, 0.9):
            assert pcc_window(pair(n, b), l).excluded == oracles.brute_force_window(n, b, l)


def test_pcc_fraction():
    assert pcc_fraction(pair(4, (0, 2)), 0.5) == 0.5
    assert pcc_fraction(pair(10, (0, 3, 5, 9)), 0.4) == 0.5


def test_check_pcc_for_quarter_cantor():
    case_i, case_ii = check_pcc(get_preset("jp").spec, 0.75, 30)
    assert case_i.verdict.value is P
    assert case_ii.verdict.holds
    with pytest.raises(DomainError):
        check_pcc(get_preset("jp").spec, 1.5, 10)


def test_general_consecutive():
    assert is_general_consecutive(pair(8, (0, 1, 2, 11))).value
    assert is_general_consecutive(pair(4, (0, 5))).value
    assert not is_general_consecutive(pair(4, (0, 2))).value
    c = is_general_consecutive(pair(4, (0, 4)))
    assert not c.value and c.collapsed


def test_escaping_terms_are_general_consecutive_on_their_indices():
    from infconv.core import expand_sequence

    pairs = expand_sequence(get_preset("example-6.3").spec, 30)
    for n in range(1, 31, 2):
        c = is_general_consecutive(pairs[n - 1])
        assert c.value and c.size_divides_scale


def test_difference_gcd_and_tail():
    assert difference_gcd(pair(2, (0, 3))) == 3
    g, v = gcd_tail(constant_spec(2, [0, 3]), 0, 20)
    assert g == 3 and v.value is F
    g, v = gcd_tail(get_preset("jp").spec, 0, 20)
    assert g == 2 and v.value is F
    g, v = gcd_tail(constant_spec(3, [0, 1, 5]), 0, 5)
    assert g == 1 and v.value is P


def test_scale_exceeds_size():
    count, v = scale_exceeds_size(get_preset("jp").spec, 10)
    assert count == 10 and v.value is P
    count, v = scale_exceeds_size(constant_spec(2, [0, 3]), 10)
    assert count == 0 and v.value is F


@pytest.mark.parametrize(
    "name,variant,conclusion,route",
    [
        ("jp", None, "exists_and_spectral", "rbc+pcc"),
        ("example-6.1", None, "does_not_exist", "divergence"),
        ("example-6.2", "finite-ones", "exists", "decay"),
        ("example-6.2", "no-ones", "exists", "decay"),
        ("example-6.2", "infinite-ones", "exists_and_spectral", "general-consecutive-subsequence+dbc-complement"),
        ("example-6.3", None, "exists_and_spectral", "rbc+general-consecutive"),
    ],
)
def test_classify_presets(name, variant, conclusion, route):
    v = classify(get_preset(name, variant).spec)
    assert v.conclusion == conclusion
    assert v.route == route


def test_classify_dbc_route():
    v = classify(constant_spec(3, [0, 1, 5]), n_max=40)
    assert v.conclusion == "exists_and_spectral"


def test_classify_result_serialises():
    d = classify(get_preset("jp").spec, n_max=30).to_dict()
    assert d["checks"]["rbc"]["value"] == "ProvedByRule"


def test_classify_rejects_real_scales():
    with pytest.raises(DomainError):
        classify(constant_spec(2.5, [0, 1]), n_max=5)


def test_tag_is_needed_for_general_rbc_proof():
    spec = SequenceSpec(Cycle((pair(4, (0, 2)),)), convergence_tag=ConvergenceTag(1.0, "power2"))
    assert check_rbc(spec, 10).verdict.value is P


def test_contradicted_tag_gives_no_proof():
    escaping = get_preset("example-6.3").spec
    wrong = SequenceSpec(escaping.rule, ConvergenceTag(1.0, "power2"), escaping.spectrum_sets)
    v = check_rbc(wrong, 100).verdict
    assert not v.proved
    bad = tag_violation(wrong, 100)
    assert bad is not None and f"contradicted at n={bad}" in v.evidence
