"""Syntax trees for state, path, action and UPML formulae.

Non-star logics (CTL, ACTL, UCTL) put state formulae directly under their
path operators; star logics wrap state formulae in :class:`Embed`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce
from itertools import combinations

__all__ = [
    "Logic", "StateFormula", "PathFormula", "ActionFormula", "TrueF", "TRUE", "Prop",
    "Not", "And", "Exists", "Embed", "NotP", "AndP", "X", "Xact", "U", "W", "Xchi",
    "Uchi", "Wchi", "Tau", "Act", "NotA", "AndA", "AX", "AXact", "or_", "implies",
    "or_p", "forall", "eval_action", "expand_xchi", "expand_uchi_star",
    "expand_wchi_star", "ex_upml", "derive_ex_upml", "closure_size", "conforms",
    "depth", "props_of", "actions_of", "FALSE_P", "action_true",
]


class Logic(enum.Enum):
    CTL = "CTL"
    CTLSTAR = "CTL*"
    ACTL = "ACTL"
    ACTLSTAR = "ACTL*"
    UCTL = "UCTL"
    UCTLSTAR = "UCTL*"
    UPML = "UPML"

    @property
    def is_star(self) -> bool:
        return self in (Logic.CTLSTAR, Logic.ACTLSTAR, Logic.UCTLSTAR)

    @property
    def has_props(self) -> bool:
        return self not in (Logic.ACTL, Logic.ACTLSTAR)

    @property
    def has_actions(self) -> bool:
        return self not in (Logic.CTL, Logic.CTLSTAR)

    @classmethod
    def parse(cls, text: str) -> "Logic":
        key = text.strip().upper().replace("STAR", "*")
        for lg in cls:
            if lg.value == key:
                return lg
        raise ValueError(f"unknown logic {text!r}")

    def __str__(self) -> str:
        return self.value


class StateFormula:
    __slots__ = ()


class PathFormula:
    __slots__ = ()


class ActionFormula:
    __slots__ = ()


# -- state formulae (Prop/Not/And are shared with UPML) ----------------------

@dataclass(frozen=True)
class TrueF(StateFormula):
    pass


TRUE = TrueF()


@dataclass(frozen=True)
class Prop(StateFormula):
    name: str


@dataclass(frozen=True)
class Not(StateFormula):
    operand: StateFormula


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Exists(StateFormula):
    path: PathFormula


@dataclass(frozen=True)
class AX(StateFormula):
    operand: StateFormula


@dataclass(frozen=True)
class AXact(StateFormula):
    action: str
    operand: StateFormula


# -- path formulae -----------------------------------------------------------

@dataclass(frozen=True)
class Embed(PathFormula):
    state: StateFormula


@dataclass(frozen=True)
class NotP(PathFormula):
    operand: PathFormula


@dataclass(frozen=True)
class AndP(PathFormula):
    left: PathFormula
    right: PathFormula


@dataclass(frozen=True)
class X(PathFormula):
    operand: object  # PathFormula (star) or StateFormula (non-star)


@dataclass(frozen=True)
class Xact(PathFormula):
    action: str
    operand: object


@dataclass(frozen=True)
class U(PathFormula):
    left: object
    right: object


@dataclass(frozen=True)
class W(PathFormula):
    left: object
    right: object


@dataclass(frozen=True)
class Xchi(PathFormula):
    chi: ActionFormula
    operand: object


@dataclass(frozen=True)
class Uchi(PathFormula):
    left: object
    chi: ActionFormula
    chi2: ActionFormula
    right: object


@dataclass(frozen=True)
class Wchi(PathFormula):
    left: object
    chi: ActionFormula
    chi2: ActionFormula
    right: object


# -- action formulae ---------------------------------------------------------

@dataclass(frozen=True)
class Tau(ActionFormula):
    pass


@dataclass(frozen=True)
class Act(ActionFormula):
    name: str


@dataclass(frozen=True)
class NotA(ActionFormula):
    operand: ActionFormula


@dataclass(frozen=True)
class AndA(ActionFormula):
    left: ActionFormula
    right: ActionFormula


# -- sugar -------------------------------------------------------------------

def or_(a: StateFormula, b: StateFormula) -> StateFormula:
    return Not(And(Not(a), Not(b)))


def implies(a: StateFormula, b: StateFormula) -> StateFormula:
    return Not(And(a, Not(b)))


def or_p(a: PathFormula, b: PathFormula) -> PathFormula:
    return NotP(AndP(NotP(a), NotP(b)))


def forall(pi: PathFormula) -> StateFormula:
    return Not(Exists(NotP(pi)))


FALSE_P = Embed(Not(TRUE))


def action_true() -> ActionFormula:
    """An action formula satisfied by every label set."""
    return NotA(AndA(Tau(), NotA(Tau())))


def eval_action(labels, chi: ActionFormula) -> bool:
    if isinstance(chi, Tau):
        return not labels
    if isinstance(chi, Act):
        return chi.name in labels
    if isinstance(chi, NotA):
        return not eval_action(labels, chi.operand)
    if isinstance(chi, AndA):
        return eval_action(labels, chi.left) and eval_action(labels, chi.right)
    raise TypeError(f"not an action formula: {chi!r}")


# -- derived operators for the star logics -----------------------------------

def _subsets(alphabet):
    items = sorted(alphabet)
    for k in range(len(items) + 1):
        for combo in combinations(items, k):
            yield frozenset(combo)


def expand_xchi(chi: ActionFormula, pi: PathFormula, alphabet) -> PathFormula:
    """Disjunction over every label set satisfying ``chi`` of the conjunction of
    its ``X_a pi``; the empty label set contributes a plain ``X pi``."""
    disjuncts = []
    for alpha in _subsets(alphabet):
        if not eval_action(alpha, chi):
            continue
        if not alpha:
            disjuncts.append(X(pi))
        else:
            disjuncts.append(reduce(AndP, [Xact(a, pi) for a in sorted(alpha)]))
    if not disjuncts:
        return FALSE_P
    return reduce(or_p, disjuncts)


def expand_uchi_star(pi, chi, chi2, pi2, alphabet) -> PathFormula:
    return U(AndP(pi, expand_xchi(chi, Embed(TRUE), alphabet)),
             AndP(pi, expand_xchi(chi2, pi2, alphabet)))


def expand_wchi_star(pi, chi, chi2, pi2, alphabet) -> PathFormula:
    # second disjunct: globally (pi and a chi-step, unless the path has ended)
    step = or_p(expand_xchi(chi, Embed(TRUE), alphabet), NotP(X(Embed(TRUE))))
    globally = NotP(U(Embed(TRUE), NotP(AndP(pi, step))))
    return or_p(expand_uchi_star(pi, chi, chi2, pi2, alphabet), globally)


# -- UPML --------------------------------------------------------------------

def ex_upml(phi: StateFormula, action: str | None = None) -> StateFormula:
    """``EX phi`` as ``!AX!phi`` (or the action-indexed variant)."""
    if action is None:
        return Not(AX(Not(phi)))
    return Not(AXact(action, Not(phi)))


derive_ex_upml = ex_upml


# -- measures ----------------------------------------------------------------

_TEMPORAL = (X, Xact, U, W, Xchi, Uchi, Wchi)


def _path_children(node):
    if isinstance(node, (NotP, X, Xact, Xchi)):
        return [node.operand]
    if isinstance(node, (AndP, U, W, Uchi, Wchi)):
        return [node.left, node.right]
    return []


def closure_size(pi: PathFormula) -> int:
    """Number of distinct temporal subterms of ``pi`` (not entering embedded state formulae)."""
    seen = set()
    stack = [pi]
    while stack:
        node = stack.pop()
        if isinstance(node, _TEMPORAL):
            seen.add(node)
        stack.extend(c for c in _path_children(node) if isinstance(c, PathFormula))
    return len(seen)


def children(node) -> list:
    if isinstance(node, (Not, NotP, X, Xact, Xchi, AX, AXact, NotA)):
        return [node.operand]
    if isinstance(node, (And, AndP, U, W, Uchi, Wchi, AndA)):
        return [node.left, node.right]
    if isinstance(node, Exists):
        return [node.path]
    if isinstance(node, Embed):
        return [node.state]
    return []


def depth(node) -> int:
    """Operator nesting height; atoms have depth 0 and Embed is transparent."""
    if isinstance(node, Embed):
        return depth(node.state)
    kids = children(node)
    if not kids:
        return 0
    return 1 + max(depth(k) for k in kids)


def _walk(node):
    yield node
    for k in children(node):
        yield from _walk(k)
    if isinstance(node, (Xchi, Uchi, Wchi)):
        for chi in (node.chi,) if isinstance(node, Xchi) else (node.chi, node.chi2):
            yield from _walk(chi)


def props_of(node) -> set:
    return {n.name for n in _walk(node) if isinstance(n, Prop)}


def actions_of(node) -> set:
    out = set()
    for n in _walk(node):
        if isinstance(n, Act):
            out.add(n.name)
        elif isinstance(n, (Xact, AXact)):
            out.add(n.action)
    return out


# -- grammar conformance -----------------------------------------------------

_NONSTAR_ACTION_PATHS = (Xchi, Uchi, Wchi, X, Xact, U, W)


def conforms(formula, logic: Logic) -> list[str]:
    """Grammar violations of ``formula`` as a state formula of ``logic``."""
    out: list[str] = []
    if logic is Logic.UPML:
        _upml(formula, out)
    else:
        _state(formula, logic, out)
    return out


def _upml(f, out):
    if isinstance(f, Prop):
        return
    if isinstance(f, (Not, AX, AXact)):
        _upml(f.operand, out)
    elif isinstance(f, And):
        _upml(f.left, out)
        _upml(f.right, out)
    else:
        out.append(f"UPML: {type(f).__name__} is not a UPML production (p | !f | f & f | AX f | AX_a f)")


def _state(f, logic, out):
    if isinstance(f, TrueF):
        return
    if isinstance(f, Prop):
        if not logic.has_props:
            out.append(f"{logic}: atomic proposition {f.name!r} not allowed "
                       "(state grammar is true | !phi | phi & phi | E pi)")
        return
    if isinstance(f, Not):
        _state(f.operand, logic, out)
    elif isinstance(f, And):
        _state(f.left, logic, out)
        _state(f.right, logic, out)
    elif isinstance(f, Exists):
        if logic.is_star:
            _path_star(f.path, logic, out)
        else:
            _path_nonstar(f.path, logic, out)
    else:
        out.append(f"{logic}: {type(f).__name__} is not a state formula")


def _action(chi, out, logic):
    if isinstance(chi, (Tau, Act)):
        return
    if isinstance(chi, NotA):
        _action(chi.operand, out, logic)
    elif isinstance(chi, AndA):
        _action(chi.left, out, logic)
        _action(chi.right, out, logic)
    else:
        out.append(f"{logic}: {type(chi).__name__} is not an action formula")


def _expect_state(f, logic, out, where):
    if isinstance(f, StateFormula):
        _state(f, logic, out)
    else:
        out.append(f"{logic}: operand of {where} must be a state formula, got {type(f).__name__}")


def _path_nonstar(p, logic, out):
    if isinstance(p, NotP):
        _path_nonstar(p.operand, logic, out)
        return
    if logic is Logic.CTL:
        allowed = (X, U, W)
        grammar = "!pi | X phi | phi U phi | phi W phi"
    else:
        allowed = _NONSTAR_ACTION_PATHS
        grammar = "!pi | X_chi phi | phi _chi U_chi phi | phi _chi W_chi phi"
    if not isinstance(p, allowed):
        out.append(f"{logic}: path production {type(p).__name__} not allowed (pi ::= {grammar})")
        return
    name = type(p).__name__
    if isinstance(p, (X, Xact, Xchi)):
        _expect_state(p.operand, logic, out, name)
    else:
        _expect_state(p.left, logic, out, name)
        _expect_state(p.right, logic, out, name)
    if isinstance(p, Xchi):
        _action(p.chi, out, logic)
    elif isinstance(p, (Uchi, Wchi)):
        _action(p.chi, out, logic)
        _action(p.chi2, out, logic)


def _path_star(p, logic, out):
    if isinstance(p, Embed):
        _state(p.state, logic, out)
    elif isinstance(p, (NotP, X)):
        _expect_path(p.operand, logic, out, type(p).__name__)
    elif isinstance(p, Xact) and logic is not Logic.CTLSTAR:
        _expect_path(p.operand, logic, out, "Xact")
    elif isinstance(p, (AndP, U)):
        _expect_path(p.left, logic, out, type(p).__name__)
        _expect_path(p.right, logic, out, type(p).__name__)
    else:
        acts = " | X_a pi" if logic is not Logic.CTLSTAR else ""
        out.append(f"{logic}: path production {type(p).__name__} not allowed "
                   f"(pi ::= phi | !pi | pi & pi | X pi{acts} | pi U pi)")


def _expect_path(p, logic, out, where):
    if isinstance(p, PathFormula):
        _path_star(p, logic, out)
    else:
        out.append(f"{logic}: operand of {where} must be a path formula "
                   f"(embed state formulae), got {type(p).__name__}")
