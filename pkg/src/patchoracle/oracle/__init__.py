from .builder import ComparisonProgram, build_comparison_program, load_definitions
from .model import (
    AppendAssertion,
    Assertion,
    AssertionKind,
    AssertionTarget,
    OracleEdit,
    PatchOracle,
    RemoveAssertion,
    ReplaceTemplate,
    apply_oracle_edits,
    check_placeholders,
    classify_assertion_target,
    parse_template_assertions,
)

__all__ = [
    "AppendAssertion",
    "Assertion",
    "AssertionKind",
    "AssertionTarget",
    "ComparisonProgram",
    "OracleEdit",
    "PatchOracle",
    "RemoveAssertion",
    "ReplaceTemplate",
    "apply_oracle_edits",
    "build_comparison_program",
    "check_placeholders",
    "classify_assertion_target",
    "load_definitions",
    "parse_template_assertions",
]
