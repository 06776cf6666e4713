"""Compile C-finite recurrences into succession rules and enumerate generating trees."""
from .compiler import (
    A1NotPositive,
    CoreNotPositive,
    InvalidQ,
    OrdinaryCompilation,
    PositivityWitness,
    PrefixNotEliminable,
    QRDecomposition,
    compile_generic,
    eliminate_jumps,
    positivity_check,
    qr_for,
    to_extended_rule,
    to_ordinary_rule,
    verify,
)
from .dsl import RuleSyntaxError, load_rule, parse_parametric, parse_rule, print_parametric, print_rule
from .numseq import RationalGF, Recurrence, eval_sequence, generating_function, series_of_gf
from .parametric import (
    ParametricRule,
    expand_parametric,
    holonomic_terms,
    holonomic_to_level_indexed,
)
from .rulecore import (
    Label,
    Production,
    RuleKind,
    SuccessionRule,
    classify,
    is_consistent,
)
from .treeengine import LevelProfile, expand, export_dot, production_matrix, totals

__version__ = "0.1.0"
