"""Executable semantics for PLC programs in IL, LD and SFC.

Includes an LD to IL compiler checked by exhaustive translation validation,
a scan-cycle simulator and an explicit-state safety checker.
"""

from .core import Environment, VarDecl, VarKind, VarType, init_env
from .errors import PlcError
from .il import ILProgram, format_il, parse_il, run_il, step_il
from .ld import LdProgram, eval_ld, format_ld, parse_ld
from .ld2il import check_equivalence, compile_ld
from .sfc import SfcModel, evolve, format_sfc, load_sfc

__all__ = [
    "Environment",
    "ILProgram",
    "LdProgram",
    "PlcError",
    "SfcModel",
    "VarDecl",
    "VarKind",
    "VarType",
    "check_equivalence",
    "compile_ld",
    "eval_ld",
    "evolve",
    "format_il",
    "format_ld",
    "format_sfc",
    "init_env",
    "load_sfc",
    "parse_il",
    "parse_ld",
    "run_il",
    "step_il",
]
