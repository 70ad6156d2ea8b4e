"""Carrier structures (KS, LTS, KTS, KMTS), label transformations and paths.

States are dense integers ``0..n-1``; the human readable names live in
``Structure.names`` and are only used for I/O.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

__all__ = [
    "Truth3", "ModAction", "Transition", "Structure", "Ks", "Lts", "Kts", "Kmts",
    "Lasso", "EmptyPathError", "validate", "alpha_prime", "omega_prime",
    "alpha_prime_3", "omega_prime_3", "mu_paths", "suffixes", "first_state",
    "first_target", "first_labels",
]


class Truth3(enum.Enum):
    """Kleene truth values. Ordering is for display only."""

    FALSE = 0
    BOT = 1
    TRUE = 2

    def __str__(self) -> str:
        return {Truth3.FALSE: "false", Truth3.BOT: "bot", Truth3.TRUE: "true"}[self]

    def __lt__(self, other: "Truth3") -> bool:
        return self.value < other.value

    @classmethod
    def of(cls, value) -> "Truth3":
        if isinstance(value, Truth3):
            return value
        if isinstance(value, bool):
            return cls.TRUE if value else cls.FALSE
        try:
            return {"true": cls.TRUE, "false": cls.FALSE, "bot": cls.BOT, "⊥": cls.BOT}[value]
        except (KeyError, TypeError):
            raise ValueError(f"not a truth value: {value!r}") from None


@dataclass(frozen=True, order=True)
class ModAction:
    """An action carrying a must (``!``) or may (``?``) modifier."""

    action: str
    modifier: str  # "!" or "?"

    def __post_init__(self):
        if self.modifier not in ("!", "?"):
            raise ValueError(f"bad modifier {self.modifier!r}")

    def __str__(self) -> str:
        return f"{self.action}{self.modifier}"

    @classmethod
    def parse(cls, text: str) -> "ModAction":
        if len(text) < 2 or text[-1] not in "!?":
            raise ValueError(f"modified action must end in '!' or '?': {text!r}")
        return cls(text[:-1], text[-1])


@dataclass(frozen=True, eq=False)
class Transition:
    src: int
    labels: frozenset
    dst: int

    def key(self):
        return (self.src, self.dst, tuple(sorted(map(str, self.labels))))

    def __eq__(self, other):
        return isinstance(other, Transition) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return self.key() < other.key()


@dataclass(frozen=True)
class Structure:
    """Common carrier. Subclasses fix which components are meaningful."""

    names: tuple
    transitions: tuple = ()
    actions: frozenset = frozenset()
    props: tuple = ()
    labeling: Mapping = field(default_factory=dict)  # state -> {prop -> bool | Truth3}

    kind = "structure"
    has_actions = False
    has_props = False

    @property
    def n_states(self) -> int:
        return len(self.names)

    @property
    def states(self) -> range:
        return range(len(self.names))

    @cached_property
    def _succ(self) -> tuple:
        out = [[] for _ in self.names]
        for t in self.transitions:
            if 0 <= t.src < len(out):
                out[t.src].append(t)
        return tuple(tuple(sorted(ts)) for ts in out)

    @cached_property
    def _index(self) -> dict:
        return {n: i for i, n in enumerate(self.names)}

    def succ(self, s: int) -> tuple:
        return self._succ[s]

    def is_deadlocked(self, s: int) -> bool:
        return not self._succ[s]

    def state(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown state {name!r}") from None

    def label(self, s: int, p: str):
        try:
            return self.labeling[s][p]
        except KeyError:
            raise ValueError(f"no labeling for ({self.names[s]!r}, {p!r})") from None

    def transition(self, src: int, dst: int) -> Transition:
        for t in self._succ[src]:
            if t.dst == dst:
                return t
        raise ValueError(f"no transition {self.names[src]} -> {self.names[dst]}")

    @property
    def underlying_actions(self) -> frozenset:
        return frozenset(self.actions)

    @classmethod
    def build(cls, states, transitions=(), actions=(), props=(), labeling=None):
        """Build from state names; transitions are ``(src, labels, dst)`` or ``(src, dst)``."""
        names = tuple(states)
        index = {n: i for i, n in enumerate(names)}
        if len(index) != len(names):
            raise ValueError("duplicate state names")
        trans = []
        for t in transitions:
            if len(t) == 2:
                src, dst, labels = t[0], t[1], ()
            else:
                src, labels, dst = t
            try:
                trans.append(Transition(index[src], frozenset(_norm_label(cls, x) for x in labels), index[dst]))
            except KeyError as exc:
                raise ValueError(f"unknown state {exc.args[0]!r}") from None
        lab = {}
        for name, vals in (labeling or {}).items():
            if name not in index:
                raise ValueError(f"unknown state {name!r}")
            lab[index[name]] = {p: _norm_value(cls, v) for p, v in vals.items()}
        acts = frozenset(_norm_label(cls, a) for a in actions)
        return cls(names=names, transitions=tuple(sorted(trans)), actions=acts,
                   props=tuple(props), labeling=lab)


def _norm_label(cls, x):
    if cls is Kmts and not isinstance(x, ModAction):
        return ModAction.parse(x)
    return x


def _norm_value(cls, v):
    if cls is Kmts:
        return Truth3.of(v)
    if isinstance(v, str):
        t = Truth3.of(v)
        if t is Truth3.BOT:
            raise ValueError("bot is not a 2-valued truth value")
        return t is Truth3.TRUE
    return bool(v)


class Ks(Structure):
    kind = "ks"
    has_props = True


class Lts(Structure):
    kind = "lts"
    has_actions = True


class Kts(Structure):
    kind = "kts"
    has_actions = True
    has_props = True


class Kmts(Structure):
    kind = "kmts"
    has_actions = True
    has_props = True

    @property
    def underlying_actions(self) -> frozenset:
        return frozenset(m.action for m in self.actions)


KINDS = {"ks": Ks, "lts": Lts, "kts": Kts, "kmts": Kmts}


def validate(structure: Structure) -> list[str]:
    """Return the list of invariant violations (empty iff the structure is well formed)."""
    out = []
    st = structure
    n = st.n_states
    names = st.names
    if len(set(names)) != n:
        out.append("duplicate state names")
    if len(set(st.props)) != len(st.props):
        out.append("duplicate propositions")
    if not st.has_props and (st.props or any(st.labeling.get(s) for s in st.states)):
        out.append(f"{st.kind} carries no propositions")
    if not st.has_actions:
        if st.actions:
            out.append(f"{st.kind} carries no actions")
        for t in st.transitions:
            if t.labels:
                out.append(f"{st.kind} transition {_tname(st, t)} carries labels")
    if isinstance(st, Kmts):
        for a in st.actions:
            if not isinstance(a, ModAction):
                out.append(f"action {a!r} lacks a modifier")
        for a in sorted(st.underlying_actions):
            if ModAction(a, "!") in st.actions and ModAction(a, "?") in st.actions:
                out.append(f"modified actions {a}! and {a}? both present (mutual exclusion)")
    seen = {}
    for t in st.transitions:
        if not (0 <= t.src < n and 0 <= t.dst < n):
            out.append(f"transition {t.src}->{t.dst} references an unknown state")
            continue
        if (t.src, t.dst) in seen:
            out.append(f"more than one transition {names[t.src]} -> {names[t.dst]} "
                       f"({_fmt_labels(seen[t.src, t.dst])} and {_fmt_labels(t.labels)})")
        seen[t.src, t.dst] = t.labels
        extra = set(t.labels) - set(st.actions)
        if extra and st.has_actions:
            out.append(f"transition {_tname(st, t)} uses labels outside the alphabet: "
                       f"{_fmt_labels(extra)}")
    if st.has_props:
        for s in st.states:
            row = st.labeling.get(s, {})
            for p in st.props:
                if p not in row:
                    out.append(f"labeling undefined for ({names[s]}, {p})")
                    continue
                v = row[p]
                if isinstance(st, Kmts):
                    if not isinstance(v, Truth3):
                        out.append(f"labeling ({names[s]}, {p}) is not a Kleene value")
                elif not isinstance(v, bool):
                    out.append(f"labeling ({names[s]}, {p}) is not true/false")
            for p in row:
                if p not in st.props:
                    out.append(f"labeling of {names[s]} mentions unknown proposition {p}")
        for s in st.labeling:
            if not (isinstance(s, int) and 0 <= s < n):
                out.append(f"labeling for unknown state {s!r}")
    return out


def _fmt_labels(labels) -> str:
    return "{" + ",".join(sorted(map(str, labels))) + "}"


def _tname(st: Structure, t: Transition) -> str:
    return f"({st.names[t.src]},{_fmt_labels(t.labels)},{st.names[t.dst]})"


# -- label transformations ---------------------------------------------------

def alpha_prime(labels, alphabet) -> dict:
    labels = set(labels)
    if not labels <= set(alphabet):
        raise ValueError(f"labels outside alphabet: {sorted(labels - set(alphabet))}")
    return {a: a in labels for a in alphabet}


def omega_prime(valuation: Mapping) -> set:
    return {p for p, v in valuation.items() if v is True or v is Truth3.TRUE}


def alpha_prime_3(labels, alphabet) -> dict:
    labels = set(labels)
    alphabet = set(alphabet)
    unknown = {m.action for m in labels} - alphabet
    if unknown:
        raise ValueError(f"labels outside alphabet: {sorted(unknown)}")
    out = {}
    for a in alphabet:
        if ModAction(a, "!") in labels:
            out[a] = Truth3.TRUE
        elif ModAction(a, "?") in labels:
            out[a] = Truth3.BOT
        else:
            out[a] = Truth3.FALSE
    return out


def omega_prime_3(valuation: Mapping) -> set:
    out = set()
    for p, v in valuation.items():
        v = Truth3.of(v)
        if v is Truth3.TRUE:
            out.add(ModAction(p, "!"))
        elif v is Truth3.BOT:
            out.add(ModAction(p, "?"))
    return out


# -- paths -------------------------------------------------------------------

class EmptyPathError(ValueError):
    pass


@dataclass(frozen=True)
class Lasso:
    """A maximal (or finite) path ``stem . cycle^omega`` from ``start``."""

    start: int
    stem: tuple = ()
    cycle: tuple = ()

    def __post_init__(self):
        prev = self.start
        for t in self.stem + self.cycle:
            if t.src != prev:
                raise ValueError("lasso transitions are not adjacent")
            prev = t.dst
        if self.cycle and self.cycle[-1].dst != self.cycle[0].src:
            raise ValueError("lasso cycle does not close")

    @property
    def is_finite(self) -> bool:
        return not self.cycle

    @property
    def is_empty(self) -> bool:
        return not self.stem and not self.cycle

    @property
    def last_state(self) -> int:
        """Final state of a finite path."""
        return self.stem[-1].dst if self.stem else self.start

    def __len__(self) -> int:
        return len(self.stem) + len(self.cycle)

    def is_maximal(self, structure: Structure) -> bool:
        return bool(self.cycle) or structure.is_deadlocked(self.last_state)

    def positions(self):
        """Distinct suffix positions as ``(state, transition-or-None, next-index)``."""
        trans = self.stem + self.cycle
        m = len(self.stem)
        out = []
        for i, t in enumerate(trans):
            nxt = i + 1 if i + 1 < len(trans) else (m if self.cycle else i + 1)
            out.append((t.src, t, nxt))
        if not self.cycle:
            out.append((self.last_state, None, None))
        return out

    def render(self, structure: Structure) -> str:
        def tr(t):
            src, dst = structure.names[t.src], structure.names[t.dst]
            if not structure.has_actions:
                return f"{src} -> {dst}"
            lab = _fmt_labels(t.labels) if t.labels else "tau"
            return f"{src} -{lab}-> {dst}"
        stem = ", ".join(tr(t) for t in self.stem) or structure.names[self.start]
        cyc = ", ".join(tr(t) for t in self.cycle)
        return f"{stem} | {cyc}"


def mu_paths(structure: Structure, s: int, length_bound: int) -> Iterator[Lasso]:
    """Enumerate maximal paths from ``s`` with at most ``length_bound`` transitions.

    Finite maximal paths end in a deadlocked state; infinite ones are yielded
    as lassos in canonical form (stem not shortenable, cycle primitive), so
    every ultimately periodic path appears at most once.
    """
    if not (isinstance(s, int) and 0 <= s < structure.n_states):
        raise ValueError(f"unknown state {s!r}")
    if length_bound < 0:
        raise ValueError("length_bound must be non-negative")
    path: list[Transition] = []
    visited: list[int] = [s]  # visited[i] = state at position i

    def rec():
        cur = visited[-1]
        if structure.is_deadlocked(cur):
            yield Lasso(s, tuple(path), ())
            return
        if len(path) >= length_bound:
            return
        for t in structure.succ(cur):
            path.append(t)
            for i, q in enumerate(visited):
                if q != t.dst:
                    continue
                stem, cyc = tuple(path[:i]), tuple(path[i:])
                if stem and stem[-1] == cyc[-1]:
                    continue
                if not _primitive(cyc):
                    continue
                yield Lasso(s, stem, cyc)
            visited.append(t.dst)
            yield from rec()
            visited.pop()
            path.pop()

    yield from rec()


def _primitive(cyc: tuple) -> bool:
    n = len(cyc)
    for d in range(1, n):
        if n % d == 0 and all(cyc[i] == cyc[i % d] for i in range(n)):
            return False
    return True


def suffixes(sigma: Lasso) -> list[tuple[Lasso, bool]]:
    out = []
    for i in range(len(sigma.stem)):
        out.append((Lasso(sigma.stem[i].src, sigma.stem[i:], sigma.cycle), i > 0))
    if sigma.cycle:
        k = len(sigma.cycle)
        for r in range(k):
            rot = sigma.cycle[r:] + sigma.cycle[:r]
            proper = bool(sigma.stem) or r > 0
            out.append((Lasso(rot[0].src, (), rot), proper))
    else:
        out.append((Lasso(sigma.last_state, (), ()), bool(sigma.stem)))
    return out


def first_state(sigma: Lasso) -> int:
    return sigma.start


def _first(sigma: Lasso) -> Transition:
    if sigma.stem:
        return sigma.stem[0]
    if sigma.cycle:
        return sigma.cycle[0]
    raise EmptyPathError("the empty path has no first transition")


def first_target(sigma: Lasso) -> int:
    return _first(sigma).dst


def first_labels(sigma: Lasso) -> frozenset:
    return _first(sigma).labels
