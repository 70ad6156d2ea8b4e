"""Concrete syntax for formulae and the JSON structure document.

Formula syntax (ASCII; the Unicode operators ``¬ ∧ ∃ ∀ τ`` are accepted as
aliases)::

    state  ::= "true" | ident | "!" state | state "&" state | "E" path | "A" path
             | "(" state ")"
    path   ::= state | "!" path | path "&" path | "X" path | "X_" ident path
             | "[" path "U" path "]" | "[" path "W" path "]"
             | "X_{" act "}" state | "[" state "{" act "}U{" act "}" state "]"
             | "[" state "{" act "}W{" act "}" state "]" | "(" path ")"
    act    ::= "tau" | ident | "!" act | act "&" act | "(" act ")"
    upml   ::= ident | "!" upml | upml "&" upml | "AX" upml | "AX_" ident upml

In star logics ``!`` and ``&`` inside a path are path connectives; a compound
state formula in path position is written ``{ state }``. In the non-star
logics the operands of the path operators are state formulae.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

import jsonschema

from .formulas import (
    AX, AXact, Act, And, AndA, AndP, Embed, Exists, Logic, Not, NotA, NotP, Prop,
    StateFormula, Tau, TRUE, TrueF, U, Uchi, W, Wchi, X, Xact, Xchi, conforms, forall,
)
from .structures import KINDS, Structure, Truth3, validate

__all__ = [
    "ParseError", "FormulaError", "SchemaError", "InvariantError", "parse_formula",
    "render_formula", "render_action", "load_structure", "save_structure",
    "structure_from_dict", "structure_to_dict", "is_token",
]


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} at {span.start}..{span.end}")
        self.span = span


class FormulaError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class SchemaError(ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class InvariantError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


# -- tokens ------------------------------------------------------------------

KEYWORDS = {"true", "tau", "E", "A", "X", "U", "W", "AX"}
_ALIASES = {"¬": "!", "∧": "&", "∃": "E", "∀": "A", "τ": "tau"}
_IDENT = r"[A-Za-z][A-Za-z0-9_]*"
_TOKEN = re.compile(
    rf"(?P<ws>\s+)|(?P<xchi>X_\{{)|(?P<axact>AX_(?P<axid>{_IDENT}))|"
    rf"(?P<xact>X_(?P<xid>{_IDENT}))|(?P<word>{_IDENT})|(?P<sym>[!&()\[\]{{}}¬∧∃∀τ])"
)


def is_token(name: str) -> bool:
    """Whether ``name`` can be used as a proposition/action in formula text."""
    return (re.fullmatch(_IDENT, name) is not None and name not in KEYWORDS
            and not name.startswith(("X_", "AX_")))


@dataclass(frozen=True)
class _Tok:
    kind: str   # "word", "ident", "xact", "axact", or the symbol/keyword itself
    value: str
    start: int
    end: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1))
        start, end = m.span()
        if m.group("xchi"):
            out.append(_Tok("X_{", "X_{", start, end))
        elif m.group("axact"):
            out.append(_Tok("axact", m.group("axid"), start, end))
        elif m.group("xact"):
            out.append(_Tok("xact", m.group("xid"), start, end))
        elif m.group("word"):
            w = m.group("word")
            out.append(_Tok(w if w in KEYWORDS else "ident", w, start, end))
        elif m.group("sym"):
            s = _ALIASES.get(m.group("sym"), m.group("sym"))
            out.append(_Tok(s, s, start, end))
        pos = end
    out.append(_Tok("eof", "", len(text), len(text)))
    return out


class _Parser:
    def __init__(self, text: str, logic: Logic):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.logic = logic
        self.star = logic.is_star

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        if self.tok.kind != kind:
            self.fail(f"expected {kind!r}")
        return self.take()

    def fail(self, msg: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.value)
        raise ParseError(f"{msg}, found {found}", SourceSpan(t.start, max(t.end, t.start)))

    # state level
    def state(self) -> StateFormula:
        left = self.state_unary()
        while self.tok.kind == "&":
            self.take()
            left = And(left, self.state_unary())
        return left

    def state_unary(self) -> StateFormula:
        k = self.tok.kind
        if k == "!":
            self.take()
            return Not(self.state_unary())
        if k == "(":
            self.take()
            f = self.state()
            self.expect(")")
            return f
        if k == "AX":
            self.take()
            if self.logic is Logic.UPML:
                return AX(self.state_unary())
            return forall(X(self.operand()))
        if k == "axact":
            a = self.take().value
            if self.logic is Logic.UPML:
                return AXact(a, self.state_unary())
            return forall(Xact(a, self.operand()))
        return self.state_atom()

    def state_atom(self) -> StateFormula:
        k = self.tok.kind
        if k == "true":
            self.take()
            return TRUE
        if k == "ident":
            return Prop(self.take().value)
        if k in ("E", "A"):
            self.take()
            pi = self.path_unary()
            return Exists(pi) if k == "E" else forall(pi)
        self.fail("expected a state formula")

    # path level
    def path(self):
        left = self.path_unary()
        while self.star and self.tok.kind == "&":
            self.take()
            left = AndP(left, self.path_unary())
        return left

    def operand(self):
        """Operand of a prefix temporal operator."""
        return self.path_unary() if self.star else self.state_unary()

    def binary_operand(self):
        return self.path() if self.star else self.state()

    def path_unary(self):
        k = self.tok.kind
        if k == "!":
            self.take()
            return NotP(self.path_unary())
        if k == "X":
            self.take()
            return X(self.operand())
        if k == "xact":
            a = self.take().value
            return Xact(a, self.operand())
        if k == "X_{":
            self.take()
            chi = self.act()
            self.expect("}")
            return Xchi(chi, self.operand())
        if k == "[":
            self.take()
            left = self.binary_operand()
            if self.tok.kind in ("U", "W"):
                op = self.take().kind
                right = self.binary_operand()
                self.expect("]")
                return U(left, right) if op == "U" else W(left, right)
            if self.tok.kind == "{":
                self.take()
                chi = self.act()
                self.expect("}")
                if self.tok.kind not in ("U", "W"):
                    self.fail("expected 'U' or 'W'")
                op = self.take().kind
                self.expect("{")
                chi2 = self.act()
                self.expect("}")
                right = self.binary_operand()
                self.expect("]")
                cls = Uchi if op == "U" else Wchi
                return cls(left, chi, chi2, right)
            self.fail("expected 'U', 'W' or '{'")
        if k == "(":
            self.take()
            p = self.path()
            self.expect(")")
            return p
        if self.star:
            if k == "{":
                self.take()
                s = self.state()
                self.expect("}")
                return Embed(s)
            return Embed(self.state_atom())
        self.fail("expected a path operator")

    # action formulae
    def act(self):
        left = self.act_unary()
        while self.tok.kind == "&":
            self.take()
            left = AndA(left, self.act_unary())
        return left

    def act_unary(self):
        k = self.tok.kind
        if k == "!":
            self.take()
            return NotA(self.act_unary())
        if k == "(":
            self.take()
            a = self.act()
            self.expect(")")
            return a
        if k == "tau":
            self.take()
            return Tau()
        if k == "ident":
            return Act(self.take().value)
        self.fail("expected an action formula")


def parse_formula(text: str, logic: Logic | str, check: bool = True) -> StateFormula:
    """Parse ``text`` as a state formula of ``logic``.

    Raises :class:`ParseError` on syntax errors and :class:`FormulaError` when
    the tree does not conform to the logic's grammar.
    """
    if isinstance(logic, str):
        logic = Logic.parse(logic)
    p = _Parser(text, logic)
    f = p.state()
    if p.tok.kind != "eof":
        p.fail("trailing input")
    if check:
        bad = conforms(f, logic)
        if bad:
            raise FormulaError(bad)
    return f


def parse_path(text: str, logic: Logic | str) -> object:
    """Parse a path formula (used for path-level checks)."""
    if isinstance(logic, str):
        logic = Logic.parse(logic)
    p = _Parser(text, logic)
    f = p.path()
    if p.tok.kind != "eof":
        p.fail("trailing input")
    return f


# -- rendering ---------------------------------------------------------------

def render_action(chi) -> str:
    if isinstance(chi, Tau):
        return "tau"
    if isinstance(chi, Act):
        return chi.name
    if isinstance(chi, NotA):
        return "!" + render_action(chi.operand)
    if isinstance(chi, AndA):
        return f"({render_action(chi.left)} & {render_action(chi.right)})"
    raise TypeError(f"not an action formula: {chi!r}")


def _is_forall(f) -> bool:
    return isinstance(f, Not) and isinstance(f.operand, Exists) and isinstance(f.operand.path, NotP)


def _quant(q: str, body: str) -> str:
    return q + ("" if body.startswith("[") else " ") + body


def _rs(f, star: bool) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Prop):
        return f.name
    if _is_forall(f):
        return _quant("A", _rp(f.operand.path.operand, star))
    if isinstance(f, Not):
        return "!" + _rs(f.operand, star)
    if isinstance(f, And):
        return f"({_rs(f.left, star)} & {_rs(f.right, star)})"
    if isinstance(f, Exists):
        return _quant("E", _rp(f.path, star))
    if isinstance(f, AX):
        return "AX " + _rs(f.operand, star)
    if isinstance(f, AXact):
        return f"AX_{f.action} " + _rs(f.operand, star)
    raise TypeError(f"not a state formula: {f!r}")


def _ro(f, star: bool) -> str:
    return _rp(f, star) if star else _rs(f, star)


def _rp(p, star: bool) -> str:
    if isinstance(p, Embed):
        s = p.state
        if isinstance(s, (TrueF, Prop, Exists)) or _is_forall(s):
            return _rs(s, star)
        return "{" + _rs(s, star) + "}"
    if isinstance(p, NotP):
        return "!" + _rp(p.operand, star)
    if isinstance(p, AndP):
        return f"({_rp(p.left, star)} & {_rp(p.right, star)})"
    if isinstance(p, X):
        return "X " + _ro(p.operand, star)
    if isinstance(p, Xact):
        return f"X_{p.action} " + _ro(p.operand, star)
    if isinstance(p, Xchi):
        return "X_{" + render_action(p.chi) + "} " + _ro(p.operand, star)
    if isinstance(p, (U, W)):
        op = "U" if isinstance(p, U) else "W"
        return f"[{_ro(p.left, star)} {op} {_ro(p.right, star)}]"
    if isinstance(p, (Uchi, Wchi)):
        op = "U" if isinstance(p, Uchi) else "W"
        return (f"[{_ro(p.left, star)} {{{render_action(p.chi)}}}{op}"
                f"{{{render_action(p.chi2)}}} {_ro(p.right, star)}]")
    raise TypeError(f"not a path formula: {p!r}")


def render_formula(ast, logic: Logic | str, check: bool = True) -> str:
    if isinstance(logic, str):
        logic = Logic.parse(logic)
    if check:
        bad = conforms(ast, logic)
        if bad:
            raise ValueError("; ".join(bad))
    return _rs(ast, logic.is_star)


def render_path(pi, logic: Logic | str) -> str:
    if isinstance(logic, str):
        logic = Logic.parse(logic)
    return _rp(pi, logic.is_star)


# -- JSON structure documents ------------------------------------------------

_NAMES = {"type": "array", "items": {"type": "string", "minLength": 1}}
STRUCTURE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "states"],
    "properties": {
        "kind": {"enum": ["ks", "lts", "kts", "kmts"]},
        "states": {**_NAMES, "minItems": 1, "uniqueItems": True},
        "actions": {**_NAMES, "uniqueItems": True},
        "props": {**_NAMES, "uniqueItems": True},
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["src", "dst"],
                "properties": {
                    "src": {"type": "string"},
                    "dst": {"type": "string"},
                    "labels": _NAMES,
                },
            },
        },
        "labeling": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": {"enum": ["true", "false", "bot"]},
            },
        },
    },
}


def structure_from_dict(doc: dict) -> Structure:
    try:
        jsonschema.validate(doc, STRUCTURE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message, exc.json_path) from None
    cls = KINDS[doc["kind"]]
    trans = [(t["src"], t.get("labels", []), t["dst"]) for t in doc.get("transitions", [])]
    try:
        st = cls.build(doc["states"], trans, doc.get("actions", []), doc.get("props", []),
                       doc.get("labeling", {}))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    bad = validate(st)
    if bad:
        raise InvariantError(bad)
    return st


def load_structure(document: str) -> Structure:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    return structure_from_dict(doc)


def _value(v) -> str:
    if isinstance(v, Truth3):
        return str(v)
    return "true" if v else "false"


def structure_to_dict(st: Structure) -> dict:
    names = st.names
    doc = {"kind": st.kind, "states": list(names)}
    if st.has_actions:
        doc["actions"] = sorted(str(a) for a in st.actions)
    if st.has_props:
        doc["props"] = list(st.props)
    doc["transitions"] = [
        {"src": names[t.src], "dst": names[t.dst], "labels": sorted(str(a) for a in t.labels)}
        for t in st.transitions
    ]
    if st.has_props:
        doc["labeling"] = {
            names[s]: {p: _value(st.labeling[s][p]) for p in st.props} for s in st.states
        }
    return doc


def save_structure(st: Structure) -> str:
    return json.dumps(structure_to_dict(st), indent=2)

