"""Built-in sequences used throughout the documentation and tests."""
from __future__ import annotations

from dataclasses import dataclass

from .core import (
    ConvergenceTag,
    Cycle,
    EscapingConsecutiveFamily,
    FamilyRule,
    IndexSet,
    Interleave,
    PowerOffsetFamily,
    PrefixCycle,
    SequenceSpec,
    SpectrumSets,
    pair,
)


@dataclass(frozen=True)
class Preset:
    name: str
    spec: SequenceSpec
    description: str
    notes: tuple = ()


def _jp():
    return Preset(
        "jp",
        SequenceSpec(Cycle((pair(4, (0, 2)),)), spectrum_sets=SpectrumSets("constant", (0, 1)), name="jp"),
        "quarter Cantor measure: N = 4, B = {0, 2}, L = {0, 1}",
    )


def _power_offset():
    return Preset(
        "example-6.1",
        SequenceSpec(FamilyRule(PowerOffsetFamily(2)), spectrum_sets=SpectrumSets("constant", (0, 1)),
                     name="example-6.1"),
        "N = 2, B_n = {0, 2^n + 1}: general consecutive sets whose convolutions do not converge",
    )


ONES, THREES = pair(2, (0, 1)), pair(2, (0, 3))
_BINARY_SETS = SpectrumSets("constant", (0, 1))


def _binary(variant: str):
    if variant == "finite-ones":
        return Preset(
            "example-6.2",
            SequenceSpec(PrefixCycle((ONES,), (THREES,)), spectrum_sets=_BINARY_SETS,
                         name="example-6.2/finite-ones"),
            "N = 2, B_1 = {0, 1}, then B_n = {0, 3}",
            ("The limit has density 1/3 on [0, 2] plus 1/3 on [1/2, 3/2]. "
             "It is absolutely continuous but not uniform on its support, "
             "so it is not spectral.",),
        )
    if variant == "infinite-ones":
        return Preset(
            "example-6.2",
            SequenceSpec(Interleave(Cycle((THREES,)), Cycle((ONES,)), IndexSet("arithmetic", start=1, step=2)),
                         spectrum_sets=_BINARY_SETS, name="example-6.2/infinite-ones"),
            "N = 2, B_n = {0, 1} for odd n and {0, 3} for even n",
        )
    if variant == "no-ones":
        return Preset(
            "example-6.2",
            SequenceSpec(Cycle((THREES,)), spectrum_sets=_BINARY_SETS, name="example-6.2/no-ones"),
            "N = 2, B_n = {0, 3}: the uniform measure on [0, 3]",
        )
    raise KeyError(f"unknown example-6.2 variant {variant!r}")


ESCAPING_INDICES = IndexSet("arithmetic", start=1, step=2)


def _escaping():
    return Preset(
        "example-6.3",
        SequenceSpec(
            FamilyRule(EscapingConsecutiveFamily(ESCAPING_INDICES)),
            convergence_tag=ConvergenceTag(constant=1.0, kind="inverse_square", shift=1),
            spectrum_sets=SpectrumSets("family"),
            name="example-6.3",
        ),
        "N_n = 2(n+1)^2 with consecutive digits and one escaping digit on odd n, (9, {0, 1, 5}) otherwise",
    )


BINARY_VARIANTS = ("finite-ones", "infinite-ones", "no-ones")
PRESET_NAMES = ("jp", "example-6.1", "example-6.2", "example-6.2-latter", "example-6.3")


def get_preset(name: str, variant: str | None = None) -> Preset:
    if name == "jp":
        return _jp()
    if name == "example-6.1":
        return _power_offset()
    if name == "example-6.2":
        return _binary(variant or "finite-ones")
    if name == "example-6.2-latter":
        p = _binary("finite-ones")
        return Preset("example-6.2-latter", p.spec, p.description, p.notes)
    if name == "example-6.3":
        return _escaping()
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
