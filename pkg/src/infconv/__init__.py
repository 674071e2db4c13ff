"""Infinite convolutions generated by sequences of admissible pairs.

Submodules: :mod:`core` (pairs, rules, verdicts), :mod:`transforms`,
:mod:`conditions`, :mod:`existence`, :mod:`spectra`, :mod:`presets` and
:mod:`cli`.
"""
from .core import (
    ConvergenceTag,
    DomainError,
    GeneratorPair,
    ResourceGuardError,
    SequenceSpec,
    SpecificationError,
    Verdict,
    VerdictValue,
    constant_spec,
    expand_sequence,
    load_spec,
    pair,
)

__version__ = "0.1.0"
