"""Native mutant generation for the patched function.

Five operator families cover the standard sufficient set: arithmetic
operator swap, comparison flip, boolean negation, constant perturbation,
and statement deletion. One mutant is produced per applicable site,
deduplicated by mutated source, ordered by (line, column, operator) so a
mutant set is a deterministic function of its input.

Docstrings are never mutated: perturbing them cannot change behavior and
would only produce unkillable mutants.
"""

from __future__ import annotations

import ast
import copy
from dataclasses import dataclass
from enum import Enum
from itertools import count

from ..errors import SnapshotParseError


class MutationOperator(Enum):
    ARITH_SWAP = "ArithSwap"
    COMPARE_FLIP = "CompareFlip"
    BOOL_NEGATE = "BoolNegate"
    CONST_PERTURB = "ConstPerturb"
    STMT_DELETE = "StmtDelete"


@dataclass(frozen=True)
class Mutant:
    id: int
    operator: MutationOperator
    line: int
    col: int
    mutated_source: str


_ARITH_SWAP = {
    ast.Add: ast.Sub,
    ast.Sub: ast.Add,
    ast.Mult: ast.Div,
    ast.Div: ast.Mult,
    ast.FloorDiv: ast.Mod,
    ast.Mod: ast.FloorDiv,
    ast.Pow: ast.Mult,
}

_COMPARE_FLIP = {
    ast.Eq: ast.NotEq,
    ast.NotEq: ast.Eq,
    ast.Lt: ast.GtE,
    ast.GtE: ast.Lt,
    ast.Gt: ast.LtE,
    ast.LtE: ast.Gt,
    ast.Is: ast.IsNot,
    ast.IsNot: ast.Is,
    ast.In: ast.NotIn,
    ast.NotIn: ast.In,
}

_DELETABLE = (ast.Assign, ast.AugAssign, ast.AnnAssign, ast.Expr, ast.Return, ast.Raise)


def _docstring_exprs(tree: ast.AST) -> set[int]:
    """ids of Expr/Constant nodes that are docstrings, at any nesting level."""
    found: set[int] = set()
    for node in ast.walk(tree):
        if isinstance(node, (ast.Module, ast.ClassDef, ast.FunctionDef, ast.AsyncFunctionDef)):
            body = node.body
            if (
                body
                and isinstance(body[0], ast.Expr)
                and isinstance(body[0].value, ast.Constant)
                and isinstance(body[0].value.value, str)
            ):
                found.add(id(body[0]))
                found.add(id(body[0].value))
    return found


class _Mutator(ast.NodeTransformer):
    """Applies the ``ordinal``-th site of one operator; the ordinal space is
    defined by this transformer's own traversal order, so counting and
    applying can never drift apart."""

    def __init__(self, operator: MutationOperator, ordinal: int, docstrings: set[int]):
        self.operator = operator
        self.ordinal = ordinal
        self.docstrings = docstrings
        self.counter = 0
        self.applied = False
        self.position: tuple[int, int] = (0, 0)

    def _hit(self, op: MutationOperator, node: ast.AST) -> bool:
        if op is not self.operator:
            return False
        match = self.counter == self.ordinal
        self.counter += 1
        if match:
            self.applied = True
            self.position = (getattr(node, "lineno", 0), getattr(node, "col_offset", 0))
        return match

    def visit_BinOp(self, node: ast.BinOp):
        self.generic_visit(node)
        if type(node.op) in _ARITH_SWAP and self._hit(MutationOperator.ARITH_SWAP, node):
            node.op = _ARITH_SWAP[type(node.op)]()
        return node

    def visit_AugAssign(self, node: ast.AugAssign):
        self.generic_visit(node)
        if type(node.op) in _ARITH_SWAP and self._hit(MutationOperator.ARITH_SWAP, node):
            node.op = _ARITH_SWAP[type(node.op)]()
        return node

    def visit_Compare(self, node: ast.Compare):
        self.generic_visit(node)
        for i, op in enumerate(node.ops):
            if type(op) in _COMPARE_FLIP and self._hit(MutationOperator.COMPARE_FLIP, node):
                node.ops[i] = _COMPARE_FLIP[type(op)]()
        return node

    def _negate_test(self, node):
        self.generic_visit(node)
        if self._hit(MutationOperator.BOOL_NEGATE, node):
            node.test = ast.UnaryOp(op=ast.Not(), operand=node.test)
        return node

    def visit_If(self, node: ast.If):
        return self._negate_test(node)

    def visit_While(self, node: ast.While):
        return self._negate_test(node)

    def visit_BoolOp(self, node: ast.BoolOp):
        self.generic_visit(node)
        if self._hit(MutationOperator.BOOL_NEGATE, node):
            node.op = ast.Or() if isinstance(node.op, ast.And) else ast.And()
        return node

    def visit_Constant(self, node: ast.Constant):
        if id(node) in self.docstrings or not isinstance(node.value, (bool, int, float, str)):
            return node
        if self._hit(MutationOperator.CONST_PERTURB, node):
            if isinstance(node.value, bool):
                node.value = not node.value
            elif isinstance(node.value, (int, float)):
                node.value = node.value + 1
            else:
                node.value = node.value + "x"
        return node


def _delete_statement(
    tree: ast.Module, ordinal: int, docstrings: set[int]
) -> tuple[int, int] | None:
    """Delete the ordinal-th deletable statement; emptied bodies get a
    ``pass``. Returns the deleted statement's position, or None if the
    ordinal is out of range."""
    counter = 0
    for node in ast.walk(tree):
        for field_name in ("body", "orelse", "finalbody"):
            body = getattr(node, field_name, None)
            if not isinstance(body, list):
                continue
            for i, stmt in enumerate(body):
                if isinstance(stmt, _DELETABLE) and id(stmt) not in docstrings:
                    if counter == ordinal:
                        position = (stmt.lineno, stmt.col_offset)
                        del body[i]
                        if field_name == "body" and not body:
                            body.append(ast.Pass())
                        return position
                    counter += 1
    return None


def generate_mutants(fn_source: str) -> list[Mutant]:
    """All single-site mutants of a function, deduplicated and ordered."""
    try:
        base_tree = ast.parse(fn_source)
    except SyntaxError as exc:
        raise SnapshotParseError("<function>", f"line {exc.lineno}: {exc.msg}") from exc
    if len(base_tree.body) != 1 or not isinstance(
        base_tree.body[0], (ast.FunctionDef, ast.AsyncFunctionDef)
    ):
        raise SnapshotParseError("<function>", "expected a single function definition")

    original = ast.unparse(base_tree)
    raw: list[tuple[int, int, str, str]] = []  # (line, col, operator value, source)

    for operator in MutationOperator:
        for ordinal in count():
            tree = copy.deepcopy(base_tree)
            docstrings = _docstring_exprs(tree)
            if operator is MutationOperator.STMT_DELETE:
                position = _delete_statement(tree, ordinal, docstrings)
                if position is None:
                    break
            else:
                mutator = _Mutator(operator, ordinal, docstrings)
                tree = mutator.visit(tree)
                if not mutator.applied:
                    break
                position = mutator.position
            ast.fix_missing_locations(tree)
            try:
                source = ast.unparse(tree)
                ast.parse(source)
            except (SyntaxError, ValueError):
                continue
            if source != original:
                raw.append((position[0], position[1], operator.value, source))

    raw.sort(key=lambda r: (r[0], r[1], r[2]))
    mutants: list[Mutant] = []
    seen: set[str] = set()
    for line, col, op_value, source in raw:
        if source in seen:
            continue
        seen.add(source)
        mutants.append(
            Mutant(
                id=len(mutants),
                operator=MutationOperator(op_value),
                line=line,
                col=col,
                mutated_source=source,
            )
        )
    return mutants
