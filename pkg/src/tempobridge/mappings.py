"""Truth-preserving translations between structures, paths and formulae.

Each mapping is a translator object with one method per grammar production,
so a single clause can be overridden (see ``MUTANTS``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .formulas import (
    TRUE, Act, And, AndA, AndP, Embed, Exists, Logic, Not, NotA, NotP, Prop,
    StateFormula, Tau, TrueF, U, Uchi, W, Wchi, X, Xact, Xchi, conforms, implies, or_,
)
from .structures import Ks, Kts, Lasso, Lts, Structure, Transition, validate

__all__ = [
    "FRESH", "MappingBundle", "MAPPINGS", "MUTANTS", "chi_to_prop",
    "map_structure", "translator", "bundle", "map_path",
    "map_ks", "map_lts", "map_ks2", "map_lts2",
    "ks_formula", "lts_formula", "ks2_formula", "lts2_formula",
    "ks_prime_formula", "lts_prime_formula", "ks2_prime_formula", "lts2_prime_formula",
]

FRESH = "F"


# -- action formulae read as propositions ------------------------------------

def chi_to_prop(chi, alphabet) -> StateFormula:
    """Read an action formula over the action-propositions of a split structure."""
    alphabet = sorted(alphabet)
    if isinstance(chi, Act):
        if chi.name not in alphabet:
            raise ValueError(f"action {chi.name!r} outside alphabet {alphabet}")
        return Prop(chi.name)
    if isinstance(chi, Tau):
        if not alphabet:
            return TRUE
        out = Not(Prop(alphabet[0]))
        for a in alphabet[1:]:
            out = And(out, Not(Prop(a)))
        return out
    if isinstance(chi, NotA):
        return Not(chi_to_prop(chi.operand, alphabet))
    if isinstance(chi, AndA):
        return And(chi_to_prop(chi.left, alphabet), chi_to_prop(chi.right, alphabet))
    raise TypeError(f"not an action formula: {chi!r}")


# -- structures ---------------------------------------------------------------

def _fresh_name(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def _check_source(src: Structure, kind, also_props: bool):
    if type(src) is not kind:
        raise ValueError(f"expected a {kind.kind.upper()} source, got {src.kind.upper()}")
    bad = validate(src)
    if bad:
        raise ValueError("invalid source structure: " + "; ".join(bad))
    if FRESH in src.actions or FRESH in src.props:
        raise ValueError(f"the fresh proposition {FRESH!r} already occurs in the source")
    if also_props:
        clash = set(src.actions) & set(src.props)
        if clash:
            raise ValueError(f"propositions and actions overlap: {sorted(clash)}")


def _split(src: Structure, with_props: bool):
    """Split every transition through an intermediate state (the ks constructions)."""
    acts = sorted(src.actions)
    props = sorted(src.props) if with_props else []
    ap = sorted(set(acts) | set(props) | {FRESH})
    taken = set(src.names)
    names = list(src.names)
    prov = {s: ("state", s) for s in src.states}
    labeling = {}
    for s in src.states:
        row = {p: False for p in ap}
        row[FRESH] = True
        for p in props:
            row[p] = src.label(s, p)
        labeling[s] = row
    trans = []
    for t in src.transitions:
        mid = len(names)
        names.append(_fresh_name(f"({src.names[t.src]},{src.names[t.dst]})", taken))
        prov[mid] = ("transition", (t.src, t.dst))
        row = {p: False for p in ap}
        for a in t.labels:
            row[a] = True
        labeling[mid] = row
        trans += [Transition(t.src, frozenset(), mid), Transition(mid, frozenset(), t.dst)]
    target = Ks(names=tuple(names), transitions=tuple(sorted(trans)), props=tuple(ap),
                labeling=labeling)
    return target, prov


def _detour(src: Structure, keep_labels: bool):
    """Add an underlined copy per state with detour ``s -{F}-> _s -L(s)'-> s`` (the lts constructions)."""
    props = sorted(src.props)
    acts = sorted(set(src.actions) | set(props) | {FRESH})
    taken = set(src.names)
    names = list(src.names)
    prov = {s: ("state", s) for s in src.states}
    trans = [Transition(t.src, t.labels if keep_labels else frozenset(), t.dst)
             for t in src.transitions]
    for s in src.states:
        copy = len(names)
        names.append(_fresh_name("_" + src.names[s], taken))
        prov[copy] = ("copy", s)
        up = frozenset(p for p in props if src.label(s, p) is True)
        trans += [Transition(s, frozenset({FRESH}), copy), Transition(copy, up, s)]
    target = Lts(names=tuple(names), transitions=tuple(sorted(trans)),
                 actions=frozenset(acts))
    return target, prov


def map_ks(lts: Lts):
    _check_source(lts, Lts, False)
    return _split(lts, with_props=False)


def map_ks2(kts: Kts):
    _check_source(kts, Kts, True)
    return _split(kts, with_props=True)


def map_lts(ks: Ks):
    _check_source(ks, Ks, False)
    return _detour(ks, keep_labels=False)


def map_lts2(kts: Kts):
    _check_source(kts, Kts, True)
    return _detour(kts, keep_labels=True)


# -- formulae -----------------------------------------------------------------

F_ = Prop(FRESH)


class Translator:
    """Structural recursion over a formula; one overridable method per production."""

    name = "?"
    source: Logic
    target: Logic

    def __init__(self, alphabet=()):
        self.alphabet = frozenset(alphabet)

    def __call__(self, phi: StateFormula) -> StateFormula:
        bad = conforms(phi, self.source)
        if bad:
            raise ValueError("; ".join(bad))
        return self.state(phi)

    def state(self, f):
        if isinstance(f, TrueF):
            return TRUE
        if isinstance(f, Prop):
            return self.prop(f)
        if isinstance(f, Not):
            return Not(self.state(f.operand))
        if isinstance(f, And):
            return And(self.state(f.left), self.state(f.right))
        if isinstance(f, Exists):
            return Exists(self.path(f.path))
        raise ValueError(f"{self.name}: no clause for {type(f).__name__}")

    def path(self, p):
        if isinstance(p, NotP):
            return NotP(self.path(p.operand))
        method = getattr(self, "p_" + type(p).__name__.lower(), None)
        if method is None:
            raise ValueError(f"{self.name}: no clause for {type(p).__name__}")
        return method(p)

    def prop(self, f):
        raise ValueError(f"{self.name}: no clause for atomic propositions")


class _Star(Translator):
    def p_embed(self, p):
        return Embed(self.state(p.state))

    def p_andp(self, p):
        return AndP(self.path(p.left), self.path(p.right))


class KsTranslator(_Star):
    """ACTL* to CTL* over the split structure."""

    name, source, target = "ks", Logic.ACTLSTAR, Logic.CTLSTAR

    def p_x(self, p):
        return X(X(self.path(p.operand)))

    def p_xact(self, p):
        return AndP(X(Embed(Prop(p.action))), X(X(self.path(p.operand))))

    def p_u(self, p):
        return U(self.guard_left(self.path(p.left)), self.guard_right(self.path(p.right)))

    # F marks the images of source states
    def guard_left(self, q):
        return _implies_p(Embed(F_), q)

    def guard_right(self, q):
        return AndP(Embed(F_), q)


class Ks2Translator(KsTranslator):
    name, source, target = "ks2", Logic.UCTLSTAR, Logic.CTLSTAR

    def prop(self, f):
        return f


def _ex_f(star: bool) -> StateFormula:
    return Exists(Xact(FRESH, Embed(TRUE) if star else TRUE))


class LtsTranslator(_Star):
    """CTL* to ACTL* over the detour structure."""

    name, source, target = "lts", Logic.CTLSTAR, Logic.ACTLSTAR

    def prop(self, f):
        return Exists(Xact(FRESH, Xact(f.name, Embed(TRUE))))

    def guard(self, q):
        return AndP(Embed(_ex_f(True)), q)

    def p_x(self, p):
        return X(self.guard(self.path(p.operand)))

    def p_u(self, p):
        return U(self.guard(self.path(p.left)), self.guard(self.path(p.right)))


class Lts2Translator(LtsTranslator):
    name, source, target = "lts2", Logic.UCTLSTAR, Logic.ACTLSTAR

    def p_xact(self, p):
        return Xact(p.action, self.path(p.operand))


class KsPrimeTranslator(Translator):
    """ACTL to CTL over the split structure; action formulae become propositions."""

    name, source, target = "ks'", Logic.ACTL, Logic.CTL

    def chi(self, chi):
        return chi_to_prop(chi, self.alphabet)

    def step(self, chi, phi):
        # X(!F & chi & E X(F & phi)): one transition state, then a source state
        return X(And(And(Not(F_), chi), Exists(X(And(F_, self.state(phi))))))

    def p_xchi(self, p):
        return self.step(self.chi(p.chi), p.operand)

    def p_xact(self, p):
        return self.step(Prop(p.action), p.operand)

    def p_x(self, p):
        return self.step(TRUE, p.operand)

    def left(self, p):
        return or_(And(F_, self.state(p.left)), And(Not(F_), self.chi(p.chi)))

    def right(self, p):
        inner = U(And(Not(F_), self.chi(p.chi2)), And(F_, self.state(p.right)))
        return And(Not(F_), Exists(inner))

    def p_uchi(self, p):
        return U(self.left(p), self.right(p))

    def p_wchi(self, p):
        return W(self.left(p), self.right(p))

    # plain until over state operands: transition states are skipped
    def p_u(self, p):
        return U(implies(F_, self.state(p.left)), And(F_, self.state(p.right)))

    def p_w(self, p):
        return W(implies(F_, self.state(p.left)), And(F_, self.state(p.right)))


class Ks2PrimeTranslator(KsPrimeTranslator):
    name, source, target = "ks2'", Logic.UCTL, Logic.CTL

    def prop(self, f):
        return f


class LtsPrimeTranslator(Translator):
    """CTL to ACTL over the detour structure."""

    name, source, target = "lts'", Logic.CTL, Logic.ACTL

    def prop(self, f):
        return Exists(Xact(FRESH, Exists(Xact(f.name, TRUE))))

    def guard(self, phi):
        return And(_ex_f(False), self.state(phi))

    def p_x(self, p):
        return X(self.state(p.operand))

    def p_u(self, p):
        return U(self.guard(p.left), self.guard(p.right))

    def p_w(self, p):
        return W(self.guard(p.left), self.guard(p.right))


class Lts2PrimeTranslator(LtsPrimeTranslator):
    name, source, target = "lts2'", Logic.UCTL, Logic.ACTL

    def p_xchi(self, p):
        return Xchi(p.chi, self.guard(p.operand))

    def p_x(self, p):
        return X(self.guard(p.operand))

    def p_xact(self, p):
        return Xact(p.action, self.guard(p.operand))

    def p_uchi(self, p):
        return Uchi(self.guard(p.left), p.chi, p.chi2, self.guard(p.right))

    def p_wchi(self, p):
        return Wchi(self.guard(p.left), p.chi, p.chi2, self.guard(p.right))


def _implies_p(a, b):
    return NotP(AndP(a, NotP(b)))


# -- documented single-clause mutations ----------------------------------------

class KsSingleStep(KsTranslator):
    """X clause that takes one step of the split structure instead of two."""

    def p_x(self, p):
        return X(self.path(p.operand))


class Ks2DropRightF(Ks2Translator):
    """U clause without the F conjunct on the right."""

    def guard_right(self, q):
        return q


class LtsUnguardedRight(LtsTranslator):
    """U clause without the detour guard on the right operand."""

    def p_u(self, p):
        return U(self.guard(self.path(p.left)), self.path(p.right))


class Lts2PlainX(Lts2Translator):
    """X_a clause that forgets the action."""

    def p_xact(self, p):
        return X(self.path(p.operand))


class KsPrimeLeftNoF(KsPrimeTranslator):
    """Left disjunct of the U clause without its F conjunct."""

    def left(self, p):
        return or_(self.state(p.left), And(Not(F_), self.chi(p.chi)))


class Ks2PrimeInnerNoF(Ks2PrimeTranslator):
    """Inner until of the U clause without the F conjunct on the right."""

    def right(self, p):
        inner = U(And(Not(F_), self.chi(p.chi2)), self.state(p.right))
        return And(Not(F_), Exists(inner))


class LtsPrimeNoDetour(LtsPrimeTranslator):
    """Atomic propositions read without the F step."""

    def prop(self, f):
        return Exists(Xact(f.name, TRUE))


class Lts2PrimeDropChi(Lts2PrimeTranslator):
    """X_chi clause that forgets the action formula."""

    def p_xchi(self, p):
        return X(self.guard(p.operand))


# -- paths ----------------------------------------------------------------------

def _split_path(src: Structure, target: Structure, prov, sigma: Lasso) -> Lasso:
    mid = {v[1]: k for k, v in prov.items() if v[0] == "transition"}

    def image(ts):
        out = []
        for t in ts:
            m = mid[t.src, t.dst]
            out += [Transition(t.src, frozenset(), m), Transition(m, frozenset(), t.dst)]
        return tuple(out)

    return Lasso(sigma.start, image(sigma.stem), image(sigma.cycle))


def _direct_path(keep_labels: bool, sigma: Lasso) -> Lasso:
    def image(ts):
        return tuple(Transition(t.src, t.labels if keep_labels else frozenset(), t.dst)
                     for t in ts)

    return Lasso(sigma.start, image(sigma.stem), image(sigma.cycle))


# -- bundles --------------------------------------------------------------------

@dataclass(frozen=True)
class MappingSpec:
    name: str
    source_kind: type
    source_logic: Logic
    target_logic: Logic
    structure_map: Callable
    translator: type
    mutant: type
    split: bool  # transitions split in two (ks family) vs. detour copies (lts family)


MAPPINGS: Mapping[str, MappingSpec] = {
    "ks": MappingSpec("ks", Lts, Logic.ACTLSTAR, Logic.CTLSTAR, map_ks, KsTranslator,
                      KsSingleStep, True),
    "lts": MappingSpec("lts", Ks, Logic.CTLSTAR, Logic.ACTLSTAR, map_lts, LtsTranslator,
                       LtsUnguardedRight, False),
    "ks2": MappingSpec("ks2", Kts, Logic.UCTLSTAR, Logic.CTLSTAR, map_ks2, Ks2Translator,
                       Ks2DropRightF, True),
    "lts2": MappingSpec("lts2", Kts, Logic.UCTLSTAR, Logic.ACTLSTAR, map_lts2, Lts2Translator,
                        Lts2PlainX, False),
    "ks'": MappingSpec("ks'", Lts, Logic.ACTL, Logic.CTL, map_ks, KsPrimeTranslator,
                       KsPrimeLeftNoF, True),
    "lts'": MappingSpec("lts'", Ks, Logic.CTL, Logic.ACTL, map_lts, LtsPrimeTranslator,
                        LtsPrimeNoDetour, False),
    "ks2'": MappingSpec("ks2'", Kts, Logic.UCTL, Logic.CTL, map_ks2, Ks2PrimeTranslator,
                        Ks2PrimeInnerNoF, True),
    "lts2'": MappingSpec("lts2'", Kts, Logic.UCTL, Logic.ACTL, map_lts2, Lts2PrimeTranslator,
                         Lts2PrimeDropChi, False),
}

MUTANTS = {name: spec.mutant for name, spec in MAPPINGS.items()}


def _spec(mapping: str) -> MappingSpec:
    try:
        return MAPPINGS[mapping.replace("′", "'").replace("2p", "2'").lower()]
    except KeyError:
        raise ValueError(f"unknown mapping {mapping!r}; choose from {sorted(MAPPINGS)}") from None


@dataclass(frozen=True)
class MappingBundle:
    mapping: str
    source: Structure
    target: Structure
    formula: Callable[[StateFormula], StateFormula]
    provenance: Mapping = field(default_factory=dict)
    split: bool = True

    def path(self, sigma: Lasso) -> Lasso:
        return map_path(self, sigma)

    def origin(self, target_state: int) -> str:
        """Human-readable source of a target state."""
        kind, what = self.provenance[target_state]
        n = self.source.names
        if kind == "state":
            return n[what]
        if kind == "transition":
            return f"transition {n[what[0]]} -> {n[what[1]]}"
        return f"detour copy of {n[what]}"


def map_structure(mapping: str, source: Structure):
    spec = _spec(mapping)
    return spec.structure_map(source)


def translator(mapping: str, source: Structure | None = None, mutant: bool = False) -> Translator:
    spec = _spec(mapping)
    alphabet = source.actions if source is not None else ()
    return (spec.mutant if mutant else spec.translator)(alphabet)


def bundle(mapping: str, source: Structure, mutant: bool = False) -> MappingBundle:
    spec = _spec(mapping)
    target, prov = spec.structure_map(source)
    return MappingBundle(spec.name, source, target, translator(mapping, source, mutant),
                         prov, spec.split)


def map_path(b: MappingBundle, sigma: Lasso) -> Lasso:
    src = b.source
    ok = 0 <= sigma.start < src.n_states and all(
        0 <= t.src < src.n_states and t in src.succ(t.src) for t in sigma.stem + sigma.cycle)
    if not ok:
        raise ValueError("path is not a path of the source structure")
    if b.split:
        return _split_path(b.source, b.target, b.provenance, sigma)
    keep = _spec(b.mapping).source_kind is Kts
    return _direct_path(keep, sigma)


# convenience names for the four structure maps' formula halves

def ks_formula(phi, alphabet=()):
    return KsTranslator(alphabet)(phi)


def lts_formula(phi, alphabet=()):
    return LtsTranslator(alphabet)(phi)


def ks2_formula(phi, alphabet=()):
    return Ks2Translator(alphabet)(phi)


def lts2_formula(phi, alphabet=()):
    return Lts2Translator(alphabet)(phi)


def ks_prime_formula(phi, alphabet=()):
    return KsPrimeTranslator(alphabet)(phi)


def lts_prime_formula(phi, alphabet=()):
    return LtsPrimeTranslator(alphabet)(phi)


def ks2_prime_formula(phi, alphabet=()):
    return Ks2PrimeTranslator(alphabet)(phi)


def lts2_prime_formula(phi, alphabet=()):
    return Lts2PrimeTranslator(alphabet)(phi)
