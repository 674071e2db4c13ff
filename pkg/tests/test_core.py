import json
from fractions import Fraction

import pytest

from infconv.core import (
    ALL,
    ConvergenceTag,
    Cycle,
    DomainError,
    GeneratorPair,
    IndexSet,
    Interleave,
    PrefixCycle,
    SequenceSpec,
    SpecificationError,
    SpectrumSets,
    Verdict,
    VerdictValue,
    constant_spec,
    cumulative_scales,
    expand_sequence,
    fails,
    load_spec,
    pair,
    period_scale,
    ratio,
    remainder_fraction,
    residues,
    selector_for,
    spec_from_dict,
    spec_to_dict,
    split_digits,
    tag_violation,
)
from infconv.presets import BINARY_VARIANTS, PRESET_NAMES, get_preset


def test_pair_sorts_digits_and_keeps_ints():
    p = pair(4, [2, 0])
    assert p.digits == (0, 2)
    assert isinstance(p.scale, int)
    assert p.is_integral


def test_integral_floats_are_normalised():
    p = pair(4.0, [0.0, 2.0])
    assert isinstance(p.scale, int) and p.digits == (0, 2)


def test_pair_rejects_duplicates_and_singletons():
    with pytest.raises(DomainError):
        pair(4, [0, 0, 2])
    with pytest.raises(DomainError):
        pair(4, [0])
    with pytest.raises(DomainError):
        pair(0, [0, 1])


def test_real_scale_is_not_integral():
    p = pair(2.5, [0, 1])
    assert not p.is_integral
    with pytest.raises(DomainError):
        split_digits(p)


def test_split_digits_examples():
    s = split_digits(pair(8, [0, 1, 2, 11]))
    assert s.principal == (0, 1, 2) and s.remainder == (11,)
    s = split_digits(pair(4, [-1, 0, 2, 4]))
    assert s.principal == (0, 2) and s.remainder == (-1, 4)


def test_remainder_fraction():
    assert remainder_fraction(pair(2, [0, 3])) == 0.5
    assert remainder_fraction(pair(4, [0, 2])) == 0.0


def test_residues_handles_negative_digits_and_collisions():
    r = residues(pair(4, [-1, 0, 2]))
    assert r.values == (0, 2, 3) and not r.collapsed
    r = residues(pair(4, [0, 4]))
    assert r.values == (0,) and r.collapsed


def test_general_consecutive_residues_of_first_escaping_term():
    assert residues(pair(8, [0, 1, 2, 11])).values == (0, 1, 2, 3)


def test_index_sets():
    odd = IndexSet("arithmetic", start=1, step=2)
    assert 1 in odd and 3 in odd and 2 not in odd
    assert odd.members(6) == [1, 3, 5]
    fin = IndexSet("finite", values=(3, 1, 3))
    assert fin.values == (1, 3) and not fin.is_infinite()
    assert IndexSet.from_dict(odd.to_dict()) == odd
    with pytest.raises(SpecificationError):
        IndexSet("finite", values=(0,))
    with pytest.raises(SpecificationError):
        IndexSet("weird")


def test_selector_complement():
    odd = IndexSet("arithmetic", start=1, step=2)
    even = selector_for(odd, complement=True)
    assert even.members(6) == [2, 4, 6]
    assert even.is_infinite()
    assert not selector_for(IndexSet("finite", values=(2,))).is_infinite()
    assert 5 in selector_for(None) and 5 in selector_for(ALL)


def test_convergence_tag_bounds_and_tails():
    tag = ConvergenceTag(1.0, "inverse_square", shift=1)
    assert tag.bound(1) == 0.25
    # sum_{n > H} 1/(n+1)^2 <= 1/(H+1)
    assert sum(tag.bound(n) for n in range(11, 100_000)) <= tag.tail(10)
    geo = ConvergenceTag(2.0, "geometric", ratio=0.5)
    assert abs(sum(geo.bound(n) for n in range(6, 200)) - geo.tail(5)) < 1e-12
    with pytest.raises(SpecificationError):
        ConvergenceTag(1.0, "geometric", ratio=1.5)
    with pytest.raises(SpecificationError):
        ConvergenceTag(1.0, "sideways")


def test_failing_verdict_needs_witness():
    with pytest.raises(ValueError):
        Verdict(VerdictValue.FAILS, "no witness")
    v = fails("diverges", 3)
    assert not v.holds and v.to_dict()["witness"] == 3


def test_expand_cycle_and_prefix_cycle():
    spec = SequenceSpec(PrefixCycle((pair(2, [0, 1]),), (pair(3, [0, 1]), pair(5, [0, 2]))))
    scales = [p.scale for p in expand_sequence(spec, 5)]
    assert scales == [2, 3, 5, 3, 5]
    assert cumulative_scales(spec, 3) == [2, 6, 30]
    start, period, rho = period_scale(spec)
    assert (start, period, rho) == (2, 2, 15)


def test_expand_interleave():
    odd = IndexSet("arithmetic", start=1, step=2)
    spec = SequenceSpec(Interleave(Cycle((pair(2, [0, 3]),)), Cycle((pair(2, [0, 1]),)), odd))
    digits = [p.digits for p in expand_sequence(spec, 4)]
    assert digits == [(0, 1), (0, 3), (0, 1), (0, 3)]


def test_expand_rejects_bad_length():
    with pytest.raises(DomainError):
        expand_sequence(constant_spec(4, [0, 2]), 0)


def test_real_scales_accumulate_exactly():
    spec = constant_spec(2.5, [0, 1])
    assert cumulative_scales(spec, 2) == [Fraction(5, 2), Fraction(25, 4)]


def test_huge_cumulative_products_stay_exact():
    spec = get_preset("example-6.3").spec
    pairs = expand_sequence(spec, 40)
    cums = cumulative_scales(spec, 40)
    assert all(isinstance(c, int) for c in cums)
    assert max(pairs[-2].digits) > 10**60
    assert 0 < ratio(max(pairs[-2].digits), cums[-2]) < 2


def test_json_round_trip_for_presets():
    for name in PRESET_NAMES:
        variants = BINARY_VARIANTS if name == "example-6.2" else (None,)
        for v in variants:
            spec = get_preset(name, v).spec
            back = spec_from_dict(json.loads(json.dumps(spec_to_dict(spec))))
            assert back == spec
            assert expand_sequence(back, 6) == expand_sequence(spec, 6)


def test_spec_document_errors():
    with pytest.raises(SpecificationError):
        spec_from_dict({"rule": {"type": "cycle", "pairs": []}})
    with pytest.raises(SpecificationError):
        spec_from_dict({"version": "v1", "rule": {"type": "spiral"}})
    with pytest.raises(SpecificationError):
        spec_from_dict({"version": "v1", "rule": {"type": "cycle", "pairs": [{"scale": 4}]}})
    with pytest.raises(SpecificationError):
        spec_from_dict({"version": "v1", "rule": {"type": "cycle", "pairs": [{"scale": 4, "digits": [0, 0]}]}})


def test_bare_spectrum_set_map():
    sets = SpectrumSets.from_dict({"1": [0, 1], "2": [0, 3]})
    assert sets.kind == "explicit" and dict(sets.values)[2] == (0, 3)


def test_load_spec(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({
        "version": "v1",
        "rule": {"type": "cycle", "pairs": [{"scale": 4, "digits": [0, 2]}]},
        "spectrum_sets": {"type": "constant", "set": [0, 1]},
    }))
    spec = load_spec(path)
    assert expand_sequence(spec, 1)[0] == GeneratorPair(4, (0, 2))
    path.write_text("{nope")
    with pytest.raises(SpecificationError):
        load_spec(path)


def test_tag_violation_detects_contradiction():
    spec = SequenceSpec(Cycle((pair(2, [0, 3]),)), convergence_tag=ConvergenceTag(1.0, "power2"))
    assert tag_violation(spec, 5) == 2  # 1/2 <= 2^-1 holds at n = 1
    assert tag_violation(get_preset("example-6.3").spec, 60) is None


def test_presets_match_golden(golden):
    want = golden("presets.json")
    for key, terms in want.items():
        name, _, variant = key.partition("/")
        spec = get_preset(name, variant or None).spec
        got = [[p.scale, list(p.digits)] for p in expand_sequence(spec, len(terms))]
        assert got == terms, key


def test_first_escaping_term_golden(golden):
    g = golden("example_6_3.json")
    first = expand_sequence(get_preset("example-6.3").spec, 1)[0]
    assert [first.scale, list(first.digits)] == g["firstTerm"]


def test_unknown_preset():
    with pytest.raises((KeyError, SpecificationError, DomainError)):
        get_preset("nope")
