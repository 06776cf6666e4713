"""Text format for succession rules.

One item per line, ``#`` starts a comment::

    axiom (3)
    (3) -> (5) (3)^2          # jump-1 production
    (3) =3=> (~3)             # jump-3 son, marked
    (3:1) -> (6) (3)^2        # tagged label (3)_1

Parametric rules use ``k`` for the parent value, runs ``(lo..hi)`` and
guards::

    axiom (1)
    (k) -> (k-1)^{k-1} (k+1)
    (k) =2=> (k) when k>=2
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .parametric import Affine, Guard, ParametricRule, Schema, Successor
from .rulecore import Label, Production, RuleError, SuccessionRule


class RuleSyntaxError(RuleError):
    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<jarrow>=(?P<jump>\d+)=>)
  | (?P<label>\((?P<body>[^()]*)\))
  | (?P<power>\^(?:\{(?P<pbody>[^{}]*)\}|(?P<pint>[+-]?\d+)))
  | (?P<word>[A-Za-z][A-Za-z_-]*)
    """,
    re.VERBOSE,
)

_FINITE_BODY = re.compile(r"\s*(~)?\s*(-?\d+)\s*(?::\s*(\d+))?\s*")
_PARAM_BODY = re.compile(r"\s*(~)?\s*([^.~]+?)\s*(?:\.\.\s*([^.]+?)\s*)?")
_AFFINE_TERM = re.compile(r"([+-]?)(\d*)\*?(k)|([+-]?)(\d+)")
_GUARD = re.compile(r"\s*(.+?)\s*(>=|<=|==|!=|>|<)\s*(.+?)\s*")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int
    m: re.Match


def _tokenize(line: str, lineno: int) -> tuple[list[_Tok], str | None, int]:
    """Split a line into tokens; a trailing ``when ...`` clause is returned raw."""
    toks: list[_Tok] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise RuleSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind == "word" and m.group() == "when":
            return toks, line[m.end():], m.end() + 1
        # lastgroup reports the innermost named group; map back to the outer one
        for outer in ("arrow", "jarrow", "label", "power", "word"):
            if m.group(outer) is not None:
                kind = outer
                break
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos + 1, m))
        pos = m.end()
    return toks, None, 0


def parse_affine(text: str, lineno: int = 0, col: int = 0) -> Affine:
    s = text.replace(" ", "")
    if not s:
        raise RuleSyntaxError("empty expression", lineno, col)
    coef = const = 0
    pos = 0
    while pos < len(s):
        m = _AFFINE_TERM.match(s, pos)
        if m is None or m.end() == pos or (pos > 0 and not (m.group(1) or m.group(4))):
            raise RuleSyntaxError(f"cannot read {text!r} as an affine expression in k", lineno, col)
        if m.group(3):
            c = int(m.group(2)) if m.group(2) else 1
            coef += -c if m.group(1) == "-" else c
        else:
            c = int(m.group(5))
            const += -c if m.group(4) == "-" else c
        pos = m.end()
    return Affine(coef, const)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _split_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if line.strip():
            yield lineno, line


def _arrow_jump(tok: _Tok, lineno: int) -> int:
    if tok.kind == "arrow":
        return 1
    if tok.kind == "jarrow":
        j = int(tok.m.group("jump"))
        if j < 1:
            raise RuleSyntaxError("jump must be at least 1", lineno, tok.col)
        return j
    raise RuleSyntaxError(f"expected '->' or '=J=>', found {tok.text!r}", lineno, tok.col)


# finite rules


def _finite_label(tok: _Tok, lineno: int) -> Label:
    if tok.kind != "label":
        raise RuleSyntaxError(f"expected a label, found {tok.text!r}", lineno, tok.col)
    m = _FINITE_BODY.fullmatch(tok.m.group("body"))
    if m is None:
        raise RuleSyntaxError(f"bad label {tok.text!r}", lineno, tok.col)
    return Label(int(m.group(2)), bool(m.group(1)), int(m.group(3) or 0))


def parse_rule(text: str) -> SuccessionRule:
    axiom: Label | None = None
    table: dict[Label, list] = {}
    refs: list[tuple[Label, int, int]] = []
    for lineno, line in _split_lines(text):
        toks, guard, gcol = _tokenize(line, lineno)
        if guard is not None:
            raise RuleSyntaxError("guards are only allowed in parametric rules", lineno, gcol)
        head = toks[0]
        if head.kind == "word" and head.text == "axiom":
            if len(toks) != 2:
                raise RuleSyntaxError("expected 'axiom (V)'", lineno, head.col)
            if axiom is not None:
                raise RuleSyntaxError("axiom given twice", lineno, head.col)
            axiom = _finite_label(toks[1], lineno)
            refs.append((axiom, lineno, toks[1].col))
            continue
        parent = _finite_label(head, lineno)
        if parent.marked:
            raise RuleSyntaxError("a production parent cannot be marked", lineno, head.col)
        if len(toks) < 2:
            raise RuleSyntaxError("expected '->' or '=J=>' after the parent label", lineno, len(line) + 1)
        jump = _arrow_jump(toks[1], lineno)
        branches = table.setdefault(parent, [])
        i = 2
        while i < len(toks):
            succ = _finite_label(toks[i], lineno)
            refs.append((succ, lineno, toks[i].col))
            mult = 1
            if i + 1 < len(toks) and toks[i + 1].kind == "power":
                p = toks[i + 1]
                body = p.m.group("pint") or p.m.group("pbody")
                try:
                    mult = int(body)
                except ValueError:
                    raise RuleSyntaxError(f"exponent {body!r} is not an integer", lineno, p.col) from None
                if mult == 0:
                    raise RuleSyntaxError("exponent must be nonzero", lineno, p.col)
                i += 1
            branches.append((jump, succ, mult))
            i += 1
    if axiom is None:
        raise RuleSyntaxError("missing 'axiom' line", 1, 1)
    for label, lineno, col in refs:
        base = label.unmarked()
        if base not in table and base.value != 0:
            raise RuleSyntaxError(f"label {base} has no production", lineno, col)
    return SuccessionRule(axiom, {p: Production(p, tuple(b)) for p, b in table.items()})


def _branch_text(label: Label, mult: int) -> str:
    return str(label) if mult == 1 else f"{label}^{mult}"


def print_rule(rule: SuccessionRule) -> str:
    lines = [f"axiom {rule.axiom}"]
    for parent, prod in rule.productions.items():
        if not prod.branches:
            lines.append(f"{parent} ->")
            continue
        for jump in prod.jumps:
            body = " ".join(_branch_text(b.successor, b.multiplicity) for b in prod.branches if b.jump == jump)
            arrow = "->" if jump == 1 else f"={jump}=>"
            lines.append(f"{parent} {arrow} {body}")
    return "\n".join(lines) + "\n"


# parametric rules


def _param_successor(tok: _Tok, lineno: int) -> Successor:
    if tok.kind != "label":
        raise RuleSyntaxError(f"expected a label, found {tok.text!r}", lineno, tok.col)
    m = _PARAM_BODY.fullmatch(tok.m.group("body"))
    if m is None:
        raise RuleSyntaxError(f"bad label {tok.text!r}", lineno, tok.col)
    lo = parse_affine(m.group(2), lineno, tok.col)
    hi = parse_affine(m.group(3), lineno, tok.col) if m.group(3) else None
    return Successor(lo, hi=hi, marked=bool(m.group(1)))


def _parse_guards(text: str, lineno: int, col: int) -> tuple[Guard, ...]:
    out = []
    for part in re.split(r",|\band\b", text):
        m = _GUARD.fullmatch(part)
        if m is None:
            raise RuleSyntaxError(f"bad guard {part.strip()!r}", lineno, col)
        out.append(Guard(parse_affine(m.group(1), lineno, col), m.group(2), parse_affine(m.group(3), lineno, col)))
    return tuple(out)


def parse_parametric(text: str) -> ParametricRule:
    axiom: int | None = None
    level_indexed = False
    schemas: list[Schema] = []
    for lineno, line in _split_lines(text):
        toks, guard_text, gcol = _tokenize(line, lineno)
        head = toks[0] if toks else None
        if head is None:
            raise RuleSyntaxError("guard without a production", lineno, 1)
        if head.kind == "word" and head.text == "axiom":
            if len(toks) != 2 or toks[1].kind != "label":
                raise RuleSyntaxError("expected 'axiom (V)'", lineno, head.col)
            try:
                axiom = int(toks[1].m.group("body"))
            except ValueError:
                raise RuleSyntaxError("axiom must be an integer label", lineno, toks[1].col) from None
            continue
        if head.kind == "word" and head.text == "level-indexed":
            level_indexed = True
            continue
        if head.kind != "label" or head.m.group("body").strip() != "k":
            raise RuleSyntaxError("parametric productions start with '(k)'", lineno, head.col)
        if len(toks) < 2:
            raise RuleSyntaxError("expected '->' or '=J=>' after '(k)'", lineno, len(line) + 1)
        jump = _arrow_jump(toks[1], lineno)
        succs: list[Successor] = []
        i = 2
        while i < len(toks):
            succ = _param_successor(toks[i], lineno)
            if i + 1 < len(toks) and toks[i + 1].kind == "power":
                p = toks[i + 1]
                body = p.m.group("pint") or p.m.group("pbody")
                succ = Successor(succ.lo, parse_affine(body, lineno, p.col), succ.hi, succ.marked)
                i += 1
            succs.append(succ)
            i += 1
        guards = _parse_guards(guard_text, lineno, gcol) if guard_text is not None else ()
        schemas.append(Schema(jump, tuple(succs), guards))
    if axiom is None:
        raise RuleSyntaxError("missing 'axiom' line", 1, 1)
    return ParametricRule(axiom, tuple(schemas), level_indexed)


def _succ_text(s: Successor) -> str:
    body = str(s.lo) if s.hi is None else f"{s.lo}..{s.hi}"
    out = f"({'~' if s.marked else ''}{body})"
    if s.multiplicity == Affine(0, 1):
        return out
    if s.multiplicity.is_constant:
        return f"{out}^{s.multiplicity.const}"
    return f"{out}^{{{s.multiplicity}}}"


def print_parametric(rule: ParametricRule) -> str:
    lines = [f"axiom ({rule.axiom})"]
    if rule.level_indexed:
        lines.append("level-indexed")
    for s in rule.schemas:
        arrow = "->" if s.jump == 1 else f"={s.jump}=>"
        line = f"(k) {arrow} " + " ".join(_succ_text(x) for x in s.successors)
        if s.guards:
            line += " when " + ", ".join(str(g) for g in s.guards)
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"


_HAS_K = re.compile(r"\([^()]*k[^()]*\)")


def is_parametric_text(text: str) -> bool:
    return any(_HAS_K.search(line) for _, line in _split_lines(text))


def load_rule(text: str) -> Union[SuccessionRule, ParametricRule]:
    return parse_parametric(text) if is_parametric_text(text) else parse_rule(text)


def dump_rule(rule: Union[SuccessionRule, ParametricRule]) -> str:
    if isinstance(rule, ParametricRule):
        return print_parametric(rule)
    return print_rule(rule)
