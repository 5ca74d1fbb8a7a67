# problem_parser.py
"""
Problem and substitution files.

Problem lines are ``s = t`` or ``s =d t`` with general terms over + and *;
``#`` starts a comment. A file is either all symmetric or all asymmetric.
Substitution files hold ``X -> term`` or ``X -> [slp:Ni] * Y`` bindings,
optionally followed by an ``SLP:`` section of productions.
"""
import logging
import re
from pathlib import Path as FilePath
from typing import Iterator, Optional, Union

import slp
from errors import MixedOrientationError, ProblemParseError, SignatureError, SlpRangeError
from terms import FRESH_PREFIX, Path, StandardSystem, Substitution, Term, app, decompose, Op, var

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*|" + re.escape(FRESH_PREFIX) + r"[0-9]+)"
    r"|(?P<op>[+*])|(?P<open>\()|(?P<close>\))|(?P<bad>\S))"
)
_PRECEDENCE = {Op.PLUS: 1, Op.TIMES: 2}
_EQUATION = re.compile(r"=d(?![A-Za-z0-9_])|=")
_BINDING = re.compile(r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*->\s*(?P<rhs>.+?)\s*$")
_LATERAL = re.compile(r"^\[slp:N(?P<id>[0-9]+)\]\s*\*\s*(?P<tail>[A-Za-z_][A-Za-z0-9_]*)$")


def _tokens(text: str, fresh_ok: bool) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            break
        kind = match.lastgroup
        value = match.group(kind)
        start = match.start(kind)
        pos = match.end()
        if kind == "ident" and value.startswith(FRESH_PREFIX) and not fresh_ok:
            raise SignatureError(f"column {start + 1}: identifier {value} uses the reserved prefix {FRESH_PREFIX}")
        if kind == "bad":
            if value.isdigit():
                raise SignatureError(f"column {start + 1}: numerals and constants are not part of the signature")
            if value == "_":
                raise ValueError(f"column {start + 1}: identifiers start with a letter")
            raise SignatureError(f"column {start + 1}: operator {value!r} is not + or *")
        yield kind, value, start


def parse_term(text: str, *, fresh_ok: bool = False) -> Term:
    """
    Infix term over + and *; * binds tighter, both associate to the left.

    Raises:
        SignatureError: function application, numerals, foreign operators
        ValueError: unbalanced parentheses or a missing operand
    """
    operands: list[Term] = []
    operators: list[Union[Op, str]] = []
    expect_operand = True
    last = None

    def reduce():
        op = operators.pop()
        right = operands.pop()
        left = operands.pop()
        operands.append(app(op, left, right))

    for kind, value, start in _tokens(text, fresh_ok):
        if kind == "ident":
            if not expect_operand:
                raise ValueError(f"column {start + 1}: missing operator before {value}")
            operands.append(var(value))
            expect_operand = False
        elif kind == "open":
            if not expect_operand:
                if last == "ident":
                    raise SignatureError(f"column {start + 1}: function application is not part of the signature")
                raise ValueError(f"column {start + 1}: missing operator before '('")
            operators.append("(")
        elif kind == "close":
            if expect_operand:
                raise ValueError(f"column {start + 1}: missing operand before ')'")
            while operators and operators[-1] != "(":
                reduce()
            if not operators:
                raise ValueError(f"column {start + 1}: unbalanced ')'")
            operators.pop()
        else:
            if expect_operand:
                raise ValueError(f"column {start + 1}: missing operand before '{value}'")
            op = Op(value)
            while operators and operators[-1] != "(" and _PRECEDENCE[operators[-1]] >= _PRECEDENCE[op]:
                reduce()
            operators.append(op)
            expect_operand = True
        last = kind
    if expect_operand:
        raise ValueError("term ends where an operand is expected")
    while operators:
        if operators[-1] == "(":
            raise ValueError("unbalanced '('")
        reduce()
    return operands[0]


def _split_equation(line: str, lineno: int) -> tuple[str, str, bool, int]:
    found = list(_EQUATION.finditer(line))
    if not found:
        raise ProblemParseError("expected '=' or '=d'", lineno, 1)
    if len(found) > 1:
        raise ProblemParseError("more than one '=' on the line", lineno, found[1].start() + 1)
    match = found[0]
    return line[: match.start()], line[match.end():], match.group() == "=d", match.end()


def _term_at(text: str, lineno: int, offset: int) -> Term:
    try:
        return parse_term(text)
    except (SignatureError, ValueError) as e:
        column = offset + 1
        message = str(e)
        hit = re.match(r"column (\d+): (.*)", message)
        if hit:
            column, message = offset + int(hit.group(1)), hit.group(2)
        if isinstance(e, SignatureError):
            raise SignatureError(f"line {lineno}, column {column}: {message}") from None
        raise ProblemParseError(message, lineno, column) from None


def parse_problem_text(text: str) -> StandardSystem:
    """
    Parse and decompose a problem.

    Returns:
        StandardSystem: asymmetric iff the lines use '=d'

    Raises:
        ProblemParseError: bad line, with its line and column
        MixedOrientationError: '=' and '=d' lines in one file
        SignatureError: symbols outside {+, *}
    """
    pairs: list[tuple[Term, Term]] = []
    orientation: Optional[bool] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        lhs, rhs, asymmetric, rhs_offset = _split_equation(line, lineno)
        if orientation is None:
            orientation = asymmetric
        elif orientation != asymmetric:
            column = len(lhs) + 1
            raise MixedOrientationError("symmetric and asymmetric equations cannot be mixed", lineno, column)
        if not lhs.strip():
            raise ProblemParseError("missing left-hand side", lineno, 1)
        if not rhs.strip():
            raise ProblemParseError("missing right-hand side", lineno, rhs_offset + 1)
        pairs.append((_term_at(lhs, lineno, 0), _term_at(rhs, lineno, rhs_offset)))
    system = decompose(pairs, asymmetric=bool(orientation))
    logger.debug("parsed %d lines into %d equations", len(pairs), len(system))
    return system


def parse_problem(path: Union[str, FilePath]) -> StandardSystem:
    return parse_problem_text(FilePath(path).read_text(encoding="utf-8"))


def parse_substitution_text(text: str) -> Substitution:
    """Bindings plus an optional SLP section, as written by formatter.format_substitution."""
    lines = text.splitlines()
    productions: list[str] = []
    for index, raw in enumerate(lines):
        if raw.strip() == "SLP:":
            productions = lines[index + 1:]
            lines = lines[:index]
            break
    try:
        programs = slp.load(productions)
    except SlpRangeError as e:
        raise ProblemParseError(str(e), len(lines) + 1, 1) from None

    bindings: dict[str, Term] = {}
    lateral: dict[str, Path] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        match = _BINDING.match(line)
        if match is None:
            raise ProblemParseError("expected 'X -> term'", lineno, 1)
        name, rhs = match.group("name"), match.group("rhs")
        if name in bindings or name in lateral:
            raise ProblemParseError(f"{name} is bound twice", lineno, 1)
        path = _LATERAL.match(rhs)
        if path is not None:
            program = programs.get(int(path.group("id")))
            if program is None:
                raise ProblemParseError(f"N{path.group('id')} is not in the SLP section", lineno, match.start("rhs") + 1)
            lateral[name] = Path(program, path.group("tail"))
            continue
        try:
            bindings[name] = parse_term(rhs, fresh_ok=True)
        except (SignatureError, ValueError) as e:
            raise ProblemParseError(str(e), lineno, match.start("rhs") + 1) from None
    return Substitution(bindings, lateral)


def parse_substitution(path: Union[str, FilePath]) -> Substitution:
    return parse_substitution_text(FilePath(path).read_text(encoding="utf-8"))
