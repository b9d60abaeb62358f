"""Tiny arithmetic-expression compiler for scenario files.

Scenario JSON carries metric entries, potentials, and reduction profiles as
plain text expressions (e.g. ``"1 / (u1 - u2)"``).  This module turns such a
string into a numpy-aware closure over a fixed tuple of variable names.  Only
a whitelist of arithmetic is accepted -- there is no attribute access, no
subscripting, no name lookup outside the declared variables and constants --
so scenario files stay data, not code.
"""

from __future__ import annotations

import ast
from typing import Callable, Sequence

import numpy as np

from .errors import ExpressionParseError

__all__ = ["ALLOWED_FUNCTIONS", "compile_expression"]


ALLOWED_FUNCTIONS = {
    "exp": np.exp,
    "ln": np.log,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
    "pow": np.power,
}

_CONSTANTS = {"pi": np.pi, "e": np.e}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}

_UNARY = {ast.UAdd: lambda x: x, ast.USub: np.negative}


def _evaluate(node: ast.AST, env: dict) -> object:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, env)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        raise ExpressionParseError(f"non-numeric literal {node.value!r}")
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        if node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        allowed = ", ".join(list(env) + list(_CONSTANTS))
        raise ExpressionParseError(f"unknown symbol {node.id!r} (allowed: {allowed})")
    if isinstance(node, ast.BinOp):
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ExpressionParseError(
                f"operator {type(node.op).__name__} is not supported"
            )
        return op(_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.UnaryOp):
        op = _UNARY.get(type(node.op))
        if op is None:
            raise ExpressionParseError(
                f"unary operator {type(node.op).__name__} is not supported"
            )
        return op(_evaluate(node.operand, env))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name):
            raise ExpressionParseError("only plain function names may be called")
        fn = ALLOWED_FUNCTIONS.get(node.func.id)
        if fn is None:
            raise ExpressionParseError(
                f"unknown function {node.func.id!r} "
                f"(allowed: {', '.join(sorted(ALLOWED_FUNCTIONS))})"
            )
        if node.keywords:
            raise ExpressionParseError("keyword arguments are not supported")
        args = [_evaluate(a, env) for a in node.args]
        try:
            return fn(*args)
        except TypeError as exc:
            raise ExpressionParseError(
                f"bad call to {node.func.id!r}: {exc}"
            ) from None
    raise ExpressionParseError(f"disallowed syntax: {type(node).__name__}")


def compile_expression(
    text: str, variables: Sequence[str]
) -> Callable[..., np.ndarray]:
    """Compile ``text`` into a closure over the named ``variables``.

    The closure takes one positional argument per variable (scalars or
    broadcastable arrays) and returns the evaluated expression.  Syntax or
    vocabulary outside the whitelist raises :class:`ExpressionParseError` at
    compile time; numeric trouble (``ln`` of a negative, division by zero)
    surfaces at call time through numpy's usual behaviour.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionParseError("expression must be a non-empty string")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionParseError(f"could not parse {text!r}: {exc.msg}") from None

    names = tuple(variables)
    # walk once now so bad vocabulary fails at compile time, not first call;
    # numeric junk from the probe point (log of zero etc.) is not our concern
    probe = {name: 1.0 for name in names}
    with np.errstate(all="ignore"):
        _evaluate(tree, probe)

    def fn(*args):
        if len(args) != len(names):
            raise TypeError(f"expected {len(names)} argument(s), got {len(args)}")
        env = dict(zip(names, args))
        return _evaluate(tree, env)

    fn.__doc__ = f"compiled expression: {text!r} over {names}"
    return fn
