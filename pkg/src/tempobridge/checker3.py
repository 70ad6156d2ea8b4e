"""Three-valued UPML evaluation over KMTS (Kleene logic)."""
from __future__ import annotations

from .formulas import AX, AXact, And, Not, Prop, TrueF, actions_of, props_of
from .structures import Kmts, ModAction, Truth3

__all__ = ["kleene_not", "kleene_and", "kleene_or", "eval_upml", "eval_ex_upml"]

T, B, F = Truth3.TRUE, Truth3.BOT, Truth3.FALSE


def kleene_not(x: Truth3) -> Truth3:
    return {T: F, F: T, B: B}[x]


def kleene_and(x: Truth3, y: Truth3) -> Truth3:
    # with FALSE < BOT < TRUE, conjunction is the minimum
    return min(x, y, key=lambda v: v.value)


def kleene_or(x: Truth3, y: Truth3) -> Truth3:
    return max(x, y, key=lambda v: v.value)


def _must(a: str):
    return ModAction(a, "!")


def _may(a: str):
    return ModAction(a, "?")


def _precheck(kmts: Kmts, s: int, phi) -> None:
    if not isinstance(kmts, Kmts):
        raise ValueError(f"UPML is interpreted over KMTS, not {kmts.kind.upper()}")
    if s not in kmts.states:
        raise ValueError(f"unknown state {s!r}")
    unknown = props_of(phi) - set(kmts.props)
    if unknown:
        raise ValueError(f"unknown propositions {sorted(unknown)}")
    alphabet = kmts.underlying_actions | {m.action for t in kmts.transitions for m in t.labels}
    unknown = actions_of(phi) - alphabet
    if unknown:
        raise ValueError(f"unknown actions {sorted(unknown)}")


def eval_upml(kmts: Kmts, s: int, phi) -> Truth3:
    _precheck(kmts, s, phi)
    return _Eval(kmts)(s, phi)


def eval_ex_upml(kmts: Kmts, s: int, a: str, phi) -> Truth3:
    """The existential action modality, evaluated from its own three-case table."""
    _precheck(kmts, s, phi)
    if a not in kmts.underlying_actions | {m.action for t in kmts.transitions for m in t.labels}:
        raise ValueError(f"unknown action {a!r}")
    ev = _Eval(kmts)
    relevant = [t for t in kmts.succ(s) if _must(a) in t.labels or _may(a) in t.labels]
    if any(_must(a) in t.labels and ev(t.dst, phi) is T for t in relevant):
        return T
    if all(ev(t.dst, phi) is F for t in relevant):
        return F
    return B


class _Eval:
    def __init__(self, kmts: Kmts):
        self.kmts = kmts
        self.memo: dict = {}

    def __call__(self, s: int, phi) -> Truth3:
        key = (s, phi)
        if key in self.memo:
            return self.memo[key]
        k = self.kmts
        if isinstance(phi, TrueF):
            v = T
        elif isinstance(phi, Prop):
            v = k.label(s, phi.name)
        elif isinstance(phi, Not):
            v = kleene_not(self(s, phi.operand))
        elif isinstance(phi, And):
            v = kleene_and(self(s, phi.left), self(s, phi.right))
        elif isinstance(phi, AX):
            # every transition counts, whatever its labels
            vals = [self(t.dst, phi.operand) for t in k.succ(s)]
            v = T if all(x is T for x in vals) else F if F in vals else B
        elif isinstance(phi, AXact):
            a = phi.action
            rel = [t for t in k.succ(s) if _must(a) in t.labels or _may(a) in t.labels]
            if all(self(t.dst, phi.operand) is T for t in rel):
                v = T
            elif any(_must(a) in t.labels and self(t.dst, phi.operand) is F for t in rel):
                v = F
            else:
                v = B
        else:
            raise ValueError(f"not a UPML formula: {type(phi).__name__}")
        self.memo[key] = v
        return v
