"""Two-valued satisfaction for CTL, CTL*, ACTL, ACTL*, UCTL and UCTL*.

Three engines share one state-formula evaluator:

* ``check_path`` evaluates a path formula exactly on a lasso (the oracle);
* non-star ``E``/``A`` formulae are decided by fixpoints over the state set;
* star formulae are decided by an exact product construction, or, in
  ``enumerate`` mode, by searching the lassos of ``mu_paths`` up to a bound.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

from . import _tableau
from .formulas import (
    And, AndP, Embed, Exists, Logic, Not, NotP, PathFormula, Prop, StateFormula,
    TrueF, U, Uchi, W, Wchi, X, Xact, Xchi, closure_size, conforms, eval_action,
    expand_uchi_star, expand_wchi_star, expand_xchi,
)
from .structures import Kmts, Ks, Kts, Lasso, Lts, Structure, mu_paths

__all__ = [
    "CheckConfig", "Checker", "CARRIERS", "check_path", "check_state",
    "check_state_star", "check", "DEFAULT_CEILING",
]

DEFAULT_CEILING = 4096

CARRIERS = {
    Logic.CTL: Ks, Logic.CTLSTAR: Ks,
    Logic.ACTL: Lts, Logic.ACTLSTAR: Lts,
    Logic.UCTL: Kts, Logic.UCTLSTAR: Kts,
    Logic.UPML: Kmts,
}


@dataclass(frozen=True)
class CheckConfig:
    lasso_bound_override: int | None = None
    ceiling: int = DEFAULT_CEILING

    @classmethod
    def from_env(cls, override: int | None = None) -> "CheckConfig":
        ceiling = int(os.environ.get("TEMPOBRIDGE_CEILING", DEFAULT_CEILING))
        return cls(override, ceiling)

    def rule(self, n_states: int, pi: PathFormula) -> int:
        return n_states * 2 ** closure_size(pi)

    def bound(self, n_states: int, pi: PathFormula) -> tuple[int, bool]:
        """Effective lasso bound and whether it falls short of the witness rule."""
        rule = self.rule(n_states, pi)
        b = self.lasso_bound_override if self.lasso_bound_override else min(rule, self.ceiling)
        return b, b < rule


def _is_state(f) -> bool:
    return isinstance(f, StateFormula)


def _nonstar_base(p) -> bool:
    if isinstance(p, (X, Xact, Xchi)):
        return _is_state(p.operand)
    if isinstance(p, (U, W, Uchi, Wchi)):
        return _is_state(p.left) and _is_state(p.right)
    return False


class Checker:
    """Evaluates formulae over one structure, memoising state-formula sets.

    ``engine`` selects how star ``E`` formulae are decided: ``"tableau"``
    (exact) or ``"enumerate"`` (bounded lasso search). ``oracle=True`` also
    routes the non-star ``E`` formulae through lasso enumeration.
    """

    def __init__(self, structure: Structure, config: CheckConfig | None = None,
                 engine: str = "tableau", oracle: bool = False):
        if engine not in ("tableau", "enumerate"):
            raise ValueError(f"unknown engine {engine!r}")
        self.structure = structure
        self.config = config or CheckConfig()
        self.engine = "enumerate" if oracle else engine
        self.oracle = oracle
        self.bounded = False
        self._sat: dict = {}
        self.alphabet = frozenset(structure.underlying_actions)

    # -- state formulae -------------------------------------------------------

    def holds(self, s: int, phi: StateFormula) -> bool:
        return s in self.sat(phi)

    def sat(self, phi: StateFormula) -> frozenset:
        hit = self._sat.get(phi)
        if hit is not None:
            return hit
        st = self.structure
        everything = frozenset(st.states)
        if isinstance(phi, TrueF):
            out = everything
        elif isinstance(phi, Prop):
            out = frozenset(s for s in st.states if st.label(s, phi.name) is True)
        elif isinstance(phi, Not):
            out = everything - self.sat(phi.operand)
        elif isinstance(phi, And):
            out = self.sat(phi.left) & self.sat(phi.right)
        elif isinstance(phi, Exists):
            out = self._exists(phi.path)
        else:
            raise ValueError(f"cannot evaluate {type(phi).__name__} two-valued")
        self._sat[phi] = out
        return out

    def _exists(self, pi) -> frozenset:
        base, neg = pi, False
        while isinstance(base, NotP):
            base, neg = base.operand, not neg
        if not self.oracle and _nonstar_base(base):
            if neg:
                return frozenset(self.structure.states) - self._forall_base(base)
            return self._exists_base(base)
        if self.engine == "tableau":
            return _tableau.exists_states(self.structure, pi, self.sat, self.alphabet)
        bound, short = self.config.bound(self.structure.n_states, pi)
        self.bounded |= short
        return frozenset(
            s for s in self.structure.states
            if any(self.check_path(sigma, pi) for sigma in mu_paths(self.structure, s, bound))
        )

    # -- fixpoints for the non-star operators ---------------------------------

    def _exists_base(self, p) -> frozenset:
        st = self.structure
        states = list(st.states)
        dead = {s for s in states if st.is_deadlocked(s)}
        if isinstance(p, (X, Xact, Xchi)):
            target = self.sat(p.operand)
            step = self._step(p)
            return frozenset(s for s in states
                             if any(step(t) and t.dst in target for t in st.succ(s)))
        left, right = self.sat(p.left), self.sat(p.right)
        if isinstance(p, U):
            # lfp Z = R | (L & EX Z); at a deadlock only the empty path, so R
            return _lfp(states, lambda s, z: s in right or (
                s in left and any(t.dst in z for t in st.succ(s))))
        if isinstance(p, W):
            return _gfp(states, lambda s, z: s in right or (
                s in left and (s in dead or any(t.dst in z for t in st.succ(s)))))
        chi, chi2 = p.chi, p.chi2
        done = lambda t: eval_action(t.labels, chi2) and t.dst in right  # noqa: E731
        if isinstance(p, Uchi):
            return _lfp(states, lambda s, z: s in left and any(
                done(t) or (eval_action(t.labels, chi) and t.dst in z) for t in st.succ(s)))
        # Wchi: the empty suffix at a deadlock only asks for the state condition
        return _gfp(states, lambda s, z: s in left and (s in dead or any(
            done(t) or (eval_action(t.labels, chi) and t.dst in z) for t in st.succ(s))))

    def _forall_base(self, p) -> frozenset:
        st = self.structure
        states = list(st.states)
        dead = {s for s in states if st.is_deadlocked(s)}
        if isinstance(p, (X, Xact, Xchi)):
            # the empty path at a deadlock has no next step, so A X fails there
            target = self.sat(p.operand)
            step = self._step(p)
            return frozenset(s for s in states if s not in dead and all(
                step(t) and t.dst in target for t in st.succ(s)))
        left, right = self.sat(p.left), self.sat(p.right)
        if isinstance(p, U):
            return _lfp(states, lambda s, z: s in right or (
                s in left and s not in dead and all(t.dst in z for t in st.succ(s))))
        if isinstance(p, W):
            return _gfp(states, lambda s, z: s in right or (
                s in left and all(t.dst in z for t in st.succ(s))))
        chi, chi2 = p.chi, p.chi2
        done = lambda t: eval_action(t.labels, chi2) and t.dst in right  # noqa: E731
        if isinstance(p, Uchi):
            return _lfp(states, lambda s, z: s in left and s not in dead and all(
                done(t) or (eval_action(t.labels, chi) and t.dst in z) for t in st.succ(s)))
        return _gfp(states, lambda s, z: s in left and all(
            done(t) or (eval_action(t.labels, chi) and t.dst in z) for t in st.succ(s)))

    @staticmethod
    def _step(p):
        if isinstance(p, X):
            return lambda t: True
        if isinstance(p, Xact):
            return lambda t: p.action in t.labels
        return lambda t: eval_action(t.labels, p.chi)

    # -- lassos -----------------------------------------------------------------

    def check_path(self, sigma: Lasso, pi) -> bool:
        if not sigma.is_maximal(self.structure):
            raise ValueError("path is not maximal in the structure")
        return self.path_values(sigma, pi)[0]

    def path_values(self, sigma: Lasso, pi) -> list[bool]:
        """Truth of ``pi`` at every distinct suffix position of ``sigma``."""
        pos = sigma.positions()
        walks = [_walk(pos, i) for i in range(len(pos))]
        memo: dict = {}

        def ev(p) -> list[bool]:
            if p in memo:
                return memo[p]
            if isinstance(p, StateFormula):
                sat = self.sat(p)
                v = [q in sat for q, _, _ in pos]
            elif isinstance(p, Embed):
                v = ev(p.state)
            elif isinstance(p, NotP):
                v = [not b for b in ev(p.operand)]
            elif isinstance(p, AndP):
                a, b = ev(p.left), ev(p.right)
                v = [x and y for x, y in zip(a, b)]
            elif isinstance(p, (X, Xact)):
                inner = ev(p.operand)
                v = [t is not None and inner[nx] and (isinstance(p, X) or p.action in t.labels)
                     for _, t, nx in pos]
            elif isinstance(p, Xchi):
                if isinstance(p.operand, PathFormula):
                    v = ev(expand_xchi(p.chi, p.operand, self.alphabet))
                else:
                    inner = ev(p.operand)
                    v = [t is not None and eval_action(t.labels, p.chi) and inner[nx]
                         for _, t, nx in pos]
            elif isinstance(p, (U, W)):
                a, b = ev(p.left), ev(p.right)
                weak = isinstance(p, W)
                v = [_until(walks[i], a, b, weak) for i in range(len(pos))]
            elif isinstance(p, (Uchi, Wchi)):
                if isinstance(p.left, PathFormula):
                    expand = expand_uchi_star if isinstance(p, Uchi) else expand_wchi_star
                    v = ev(expand(p.left, p.chi, p.chi2, p.right, self.alphabet))
                else:
                    a, b = ev(p.left), ev(p.right)
                    weak = isinstance(p, Wchi)
                    v = [_action_until(pos, walks[i], a, b, p.chi, p.chi2, weak)
                         for i in range(len(pos))]
            else:
                raise TypeError(f"not a path formula: {p!r}")
            memo[p] = v
            return v

        return ev(pi)


def _walk(pos, i) -> list[int]:
    out = []
    seen = set()
    while i is not None and i not in seen:
        seen.add(i)
        out.append(i)
        i = pos[i][2]
    return out


def _until(walk, a, b, weak) -> bool:
    for j in walk:
        if b[j]:
            return True
        if not a[j]:
            return False
    return weak


def _action_until(pos, walk, a, b, chi, chi2, weak) -> bool:
    for j in walk:
        if not a[j]:
            return False
        _, t, nx = pos[j]
        if t is None:
            return weak  # the empty suffix: no step is required of it
        if eval_action(t.labels, chi2) and b[nx]:
            return True
        if not eval_action(t.labels, chi):
            return False
    return weak


def _lfp(states, step) -> frozenset:
    z: frozenset = frozenset()
    while True:
        nz = frozenset(s for s in states if step(s, z))
        if nz == z:
            return z
        z = nz


def _gfp(states, step) -> frozenset:
    z = frozenset(states)
    while True:
        nz = frozenset(s for s in states if step(s, z))
        if nz == z:
            return z
        z = nz


# -- functional front door ------------------------------------------------------

def _require(structure, phi, logic: Logic, star: bool | None):
    if logic is Logic.UPML:
        raise ValueError("UPML is three-valued; use checker3.eval_upml")
    if star is not None and logic.is_star != star:
        raise ValueError(f"{logic} is {'a star' if logic.is_star else 'a non-star'} logic")
    carrier = CARRIERS[logic]
    if type(structure) is not carrier:
        raise ValueError(f"{logic} is interpreted over {carrier.kind.upper()}, "
                         f"not {structure.kind.upper()}")
    if phi is not None:
        bad = conforms(phi, logic)
        if bad:
            raise ValueError("; ".join(bad))


def check_path(structure: Structure, sigma: Lasso, pi, logic: Logic) -> bool:
    _require(structure, None, logic, None)
    return Checker(structure).check_path(sigma, pi)


def check_state(structure: Structure, s: int, phi: StateFormula, logic: Logic) -> bool:
    _require(structure, phi, logic, star=False)
    return Checker(structure).holds(s, phi)


def check_state_star(structure: Structure, s: int, phi: StateFormula, logic: Logic,
                     config: CheckConfig | None = None, engine: str = "tableau") -> bool:
    _require(structure, phi, logic, star=True)
    return Checker(structure, config, engine=engine).holds(s, phi)


def check(structure: Structure, s: int, phi: StateFormula, logic: Logic,
          config: CheckConfig | None = None) -> bool:
    if logic.is_star:
        return check_state_star(structure, s, phi, logic, config)
    return check_state(structure, s, phi, logic)
