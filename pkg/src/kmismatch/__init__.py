"""Detect Kconfig options whose selection has no effect on the built product.

The pipeline parses a Kconfig tree into a propositional variability model,
derives presence conditions for source files (Kbuild) and ``#ifdef`` blocks
(C preprocessor), computes each option's feature effect and asks a SAT
solver whether the option can be selected while its effect is false.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DescentCycleError, Diagnostic, EmptyPresenceConditionsError, EnumerationExplosionError,
    FormulaSyntaxError, KconfigError, KconfigSyntaxError, KmismatchError, OracleLimitError,
    ResourceLimitError, UnboundAtomError, UnbalancedDirectiveError, UnknownOptionError,
)
from .logic import (  # noqa: E402
    FALSE, TRUE, And, Const, Formula, Implies, Not, Or, Var, Xor, atoms_of, conj, disj,
    evaluate, iff, parse_formula, simplify, substitute, to_text, truth_table,
)
from .cnf import CnfBuilder, CnfInstance, parse_dimacs, to_cnf, to_dimacs  # noqa: E402
from .sat import SatResult, Solver, SolverBudget, enumerate_models, is_satisfiable  # noqa: E402
from .kconfig import ChoiceGroup, ConfigOption, KconfigModel, parse_kconfig, parse_kconfig_text  # noqa: E402
from .vm import PropositionalVM, compile_vm  # noqa: E402
from .kbuild import BuildRule, FilePresence, compose_file_presence, extract_build_rules  # noqa: E402
from .cpp import (  # noqa: E402
    CodeBlock, ConditionTranslator, UnreliableVarSet, combine_presence, extract_blocks,
    scan_unreliable,
)
from .effects import (  # noqa: E402
    Caps, EffectAnalysis, FeatureEffect, Mismatch, PresenceCondition, analyze_effects,
    feature_effect, find_mismatches, minimal_partial_configs,
)
from .triage import StatsSummary, TriagedMismatch, classify, summarize  # noqa: E402
from .oracle import brute_force_oracle, oracle_disagreements, oracle_verdicts  # noqa: E402
from .report import AnalysisReport, emit_report, read_report  # noqa: E402
from .pipeline import RunConfig, run_analysis, run_pipeline  # noqa: E402
from .corpus import generate_corpus  # noqa: E402

__all__ = [
    "__version__", "DescentCycleError", "Diagnostic", "EmptyPresenceConditionsError",
    "EnumerationExplosionError", "FormulaSyntaxError", "KconfigError", "KconfigSyntaxError",
    "KmismatchError", "OracleLimitError", "ResourceLimitError", "UnboundAtomError",
    "UnbalancedDirectiveError", "UnknownOptionError", "FALSE", "TRUE", "And", "Const",
    "Formula", "Implies", "Not", "Or", "Var", "Xor", "atoms_of", "conj", "disj", "evaluate",
    "iff", "parse_formula", "simplify", "substitute", "to_text", "truth_table", "CnfBuilder",
    "CnfInstance", "parse_dimacs", "to_cnf", "to_dimacs", "SatResult", "Solver", "SolverBudget",
    "enumerate_models", "is_satisfiable", "ChoiceGroup", "ConfigOption", "KconfigModel",
    "parse_kconfig", "parse_kconfig_text", "PropositionalVM", "compile_vm", "BuildRule",
    "FilePresence", "compose_file_presence", "extract_build_rules", "CodeBlock",
    "ConditionTranslator", "UnreliableVarSet", "combine_presence", "extract_blocks",
    "scan_unreliable", "Caps", "EffectAnalysis", "FeatureEffect", "Mismatch",
    "PresenceCondition", "analyze_effects", "feature_effect", "find_mismatches",
    "minimal_partial_configs", "StatsSummary", "TriagedMismatch", "classify", "summarize",
    "brute_force_oracle", "oracle_disagreements", "oracle_verdicts", "AnalysisReport",
    "emit_report", "read_report", "RunConfig", "run_analysis", "run_pipeline", "generate_corpus",
]
