"""Arithmetization of learnability statements."""

from .emit import EMIT_KINDS, build_pac, build_scpac, build_vc_lt, build_vc_lt_coded, emit, for_all_members
from .evaluate import decode_sample, eval_bounded, stage_members, strong_index_members
from .formula import *  # noqa: F401,F403
from .formula import __all__ as _formula_all
from .hierarchy import DELTA0, Level, classify, pi, prenex, sigma

__all__ = [
    *_formula_all,
    "EMIT_KINDS", "build_pac", "build_scpac", "build_vc_lt", "build_vc_lt_coded", "emit", "for_all_members",
    "decode_sample", "eval_bounded", "stage_members", "strong_index_members",
    "DELTA0", "Level", "classify", "pi", "prenex", "sigma",
]
