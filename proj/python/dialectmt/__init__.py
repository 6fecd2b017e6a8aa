"""Dialect-to-dialect phrase translation toolkit."""

from dialectmt._core import (
    BleuReport,
    DataError,
    LanguageModel,
    Lexicon,
    SystemScore,
    Translator,
    align,
    bleu,
    build_system,
    config_hash,
    detokenize,
    generate_toy,
    measure_consistency,
    normalize,
    run_experiment,
)

__all__ = [
    "BleuReport",
    "DataError",
    "LanguageModel",
    "Lexicon",
    "SystemScore",
    "Translator",
    "align",
    "bleu",
    "build_system",
    "config_hash",
    "detokenize",
    "generate_toy",
    "measure_consistency",
    "normalize",
    "run_experiment",
]
