"""Random structures and formulae, the differential harness, and a shrinker."""
from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field, replace

from .checker2 import CARRIERS, Checker
from .formulas import (
    TRUE, AX, Act, And, AndA, AndP, AXact, Embed, Exists, Logic, Not, NotA, NotP,
    PathFormula, Prop, StateFormula, Tau, TrueF, U, Uchi, W, Wchi, X, Xact, Xchi,
    children, conforms,
)
from .mappings import MAPPINGS, bundle, map_path
from .parser import render_formula, render_path, structure_to_dict
from .structures import KINDS, Kmts, Lasso, ModAction, Structure, Transition, Truth3

__all__ = [
    "GenParams", "XCheckReport", "WEIGHTS", "gen_structure", "gen_formula",
    "gen_path_formula", "gen_lasso", "xcheck", "oracle_vs_fixpoint", "shrink",
]

PROP_NAMES = ("p", "q", "r", "s", "t")
ACTION_NAMES = ("a", "b", "c", "d", "e")

# relative weights of the productions at each node (atoms always win at depth 0)
WEIGHTS = {
    "state": {"atom": 2, "not": 2, "and": 2, "exists": 4},
    "upml": {"atom": 2, "not": 2, "and": 2, "ax": 2, "axact": 2},
    "path_star": {"embed": 3, "not": 2, "and": 2, "x": 2, "xact": 2, "u": 3},
    "path_ctl": {"x": 1, "u": 1, "w": 1},
    "path_action": {"xchi": 1, "uchi": 1, "wchi": 1},
    "action": {"tau": 2, "act": 4, "not": 1, "and": 1},
    "negate_path": 0.3,
}


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    max_states: int = 5
    max_actions: int = 3
    max_props: int = 3
    max_formula_depth: int = 3
    trials: int = 100

    def __post_init__(self):
        for name in ("max_states", "max_actions", "max_props", "max_formula_depth"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")


def _rng(params: GenParams, *salt) -> random.Random:
    return random.Random(":".join(map(str, (params.seed,) + salt)))


def _pick(rng: random.Random, weights: dict) -> str:
    keys = list(weights)
    return rng.choices(keys, [weights[k] for k in keys])[0]


# -- structures ---------------------------------------------------------------

def gen_structure(kind: str, params: GenParams, rng: random.Random | None = None) -> Structure:
    """A valid structure of ``kind`` within the bounds of ``params``."""
    rng = rng or _rng(params, "structure", kind)
    cls = KINDS[kind]
    n = rng.randint(1, params.max_states)
    names = [f"s{i}" for i in range(n)]
    acts = list(ACTION_NAMES[: rng.randint(1, params.max_actions)]) if cls.has_actions else []
    props = list(PROP_NAMES[: rng.randint(1, params.max_props)]) if cls.has_props else []
    mods = {a: rng.choice("!?") for a in acts} if cls is Kmts else {}

    transitions = []
    for i in range(n):
        # deadlocks are common so the empty maximal path is exercised
        k = 0 if rng.random() < 0.25 else rng.choices((1, 2, 3), (5, 3, 1))[0]
        for j in sorted(rng.sample(range(n), min(k, n))):
            if cls is Kmts:
                labels = [f"{a}{mods[a]}" for a in acts if rng.random() < 0.5]
            elif cls.has_actions:
                labels = [a for a in acts if rng.random() < 0.4]
            else:
                labels = []
            transitions.append((names[i], labels, names[j]))

    labeling = {}
    for name in names:
        if cls is Kmts:
            labeling[name] = {p: rng.choice((Truth3.TRUE, Truth3.FALSE, Truth3.BOT)) for p in props}
        elif props:
            labeling[name] = {p: rng.random() < 0.5 for p in props}
    actions = [f"{a}{mods[a]}" for a in acts] if cls is Kmts else acts
    return cls.build(names, transitions, actions, props, labeling)


def gen_lasso(structure: Structure, s: int, rng: random.Random) -> Lasso:
    """A random maximal path from ``s``: walk until a deadlock or the first revisit."""
    visited = [s]
    path: list[Transition] = []
    while True:
        succ = structure.succ(visited[-1])
        if not succ:
            return Lasso(s, tuple(path), ())
        t = rng.choice(succ)
        path.append(t)
        if t.dst in visited:
            i = visited.index(t.dst)
            return Lasso(s, tuple(path[:i]), tuple(path[i:]))
        visited.append(t.dst)


# -- formulae -----------------------------------------------------------------

class _FormulaGen:
    def __init__(self, logic: Logic, rng: random.Random, props, actions):
        self.logic = logic
        self.rng = rng
        self.props = sorted(props)
        self.actions = sorted(actions)

    def atom(self):
        if self.logic is Logic.UPML or (self.logic.has_props and self.props and self.rng.random() < 0.7):
            if not self.props:
                raise ValueError("UPML formulae need at least one proposition")
            return Prop(self.rng.choice(self.props))
        return TRUE

    def state(self, d: int):
        if self.logic is Logic.UPML:
            w = dict(WEIGHTS["upml"])
            if not self.actions:
                w.pop("axact")
        else:
            w = dict(WEIGHTS["state"])
            if d < 2 and not self.logic.is_star:
                w.pop("exists")  # non-star E needs a temporal layer between it and its operands
        if d == 0:
            return self.atom()
        kind = _pick(self.rng, w)
        if kind == "atom":
            return self.atom()
        if kind == "not":
            return Not(self.state(d - 1))
        if kind == "and":
            return And(self.state(d - 1), self.state(d - 1))
        if kind == "ax":
            return AX(self.state(d - 1))
        if kind == "axact":
            return AXact(self.rng.choice(self.actions), self.state(d - 1))
        if self.logic.is_star:
            return Exists(self.path_star(d - 1))
        return Exists(self.path_nonstar(d - 1))

    def chi(self, d: int = 1):
        w = dict(WEIGHTS["action"])
        if d == 0:
            w.pop("not"), w.pop("and")
        kind = _pick(self.rng, w)
        if kind == "tau" or not self.actions:
            return Tau()
        if kind == "act":
            return Act(self.rng.choice(self.actions))
        if kind == "not":
            return NotA(self.chi(d - 1))
        return AndA(self.chi(d - 1), self.chi(d - 1))

    def path_nonstar(self, d: int):
        if d >= 2 and self.rng.random() < WEIGHTS["negate_path"]:
            return NotP(self.path_nonstar(d - 1))
        d = max(d, 1)
        if self.logic is Logic.CTL:
            kind = _pick(self.rng, WEIGHTS["path_ctl"])
        else:
            kind = _pick(self.rng, WEIGHTS["path_action"])
        s = lambda: self.state(d - 1)  # noqa: E731
        if kind == "x":
            return X(s())
        if kind == "u":
            return U(s(), s())
        if kind == "w":
            return W(s(), s())
        if kind == "xchi":
            return Xchi(self.chi(), s())
        cls = Uchi if kind == "uchi" else Wchi
        return cls(s(), self.chi(), self.chi(), s())

    def path_star(self, d: int):
        w = dict(WEIGHTS["path_star"])
        if self.logic is Logic.CTLSTAR or not self.actions:
            w.pop("xact")
        if d == 0:
            return Embed(self.atom())
        kind = _pick(self.rng, w)
        if kind == "embed":
            return Embed(self.state(d))
        if kind == "not":
            return NotP(self.path_star(d - 1))
        if kind == "and":
            return AndP(self.path_star(d - 1), self.path_star(d - 1))
        if kind == "x":
            return X(self.path_star(d - 1))
        if kind == "xact":
            return Xact(self.rng.choice(self.actions), self.path_star(d - 1))
        return U(self.path_star(d - 1), self.path_star(d - 1))


def _alphabets(logic, params, props, actions):
    if props is None:
        props = PROP_NAMES[: params.max_props] if logic.has_props or logic is Logic.UPML else ()
    if actions is None:
        actions = ACTION_NAMES[: params.max_actions] if logic.has_actions or logic is Logic.UPML else ()
    return props, actions


def gen_formula(logic: Logic, params: GenParams, rng: random.Random | None = None,
                props=None, actions=None) -> StateFormula:
    """A conforming state formula of depth at most ``params.max_formula_depth``."""
    rng = rng or _rng(params, "formula", logic.value)
    props, actions = _alphabets(logic, params, props, actions)
    return _FormulaGen(logic, rng, props, actions).state(params.max_formula_depth)


def gen_path_formula(logic: Logic, params: GenParams, rng: random.Random | None = None,
                     props=None, actions=None) -> PathFormula:
    """A path formula ``pi`` such that ``E pi`` conforms to ``logic``."""
    rng = rng or _rng(params, "path", logic.value)
    props, actions = _alphabets(logic, params, props, actions)
    g = _FormulaGen(logic, rng, props, actions)
    d = max(params.max_formula_depth - 1, 1)
    return g.path_star(d) if logic.is_star else g.path_nonstar(d)


# -- the harness ----------------------------------------------------------------

@dataclass(frozen=True)
class Trial:
    """One instance: a source structure and either an anchor state or a path."""

    mapping: str
    level: str  # "state" or "path"
    source: Structure
    formula: object
    state: int = 0
    path: Lasso | None = None


def _verdicts(trial: Trial, mutant: bool = False):
    b = bundle(trial.mapping, trial.source, mutant=mutant)
    src, tgt = Checker(trial.source), Checker(b.target)
    if trial.level == "state":
        return (src.holds(trial.state, trial.formula),
                tgt.holds(trial.state, b.formula(trial.formula)))
    # path level: translate E pi and peel the quantifier off again
    image = b.formula(Exists(trial.formula)).path
    # the image of a finite path need not be maximal in a detour target, so the
    # target side is evaluated on the image as given
    return (src.check_path(trial.path, trial.formula),
            tgt.path_values(map_path(b, trial.path), image)[0])


def _detects(trial: Trial, mutant: bool) -> bool:
    s, t = _verdicts(trial)
    if not mutant:
        return s != t
    return s == t and _verdicts(trial, mutant=True)[1] != s


@dataclass
class XCheckReport:
    mapping: str
    trials: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)
    bounded: int = 0
    mutant: bool = False
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self, with_time: bool = True) -> str:
        doc = asdict(self)
        if not with_time:
            doc.pop("elapsed")
        return json.dumps(doc, indent=2, sort_keys=True)


def _describe(trial: Trial, source_verdict, target_verdict) -> dict:
    spec = MAPPINGS[trial.mapping] if trial.mapping in MAPPINGS else None
    logic = spec.source_logic if spec else None
    st = trial.source
    if trial.level == "path":
        text = render_path(trial.formula, logic) if logic else repr(trial.formula)
        where = trial.path.render(st)
    else:
        text = render_formula(trial.formula, logic, check=False) if logic else repr(trial.formula)
        where = st.names[trial.state]
    return {
        "level": trial.level,
        "structure": structure_to_dict(st),
        "formula": text,
        "at": where,
        "source": source_verdict,
        "target": target_verdict,
    }


def _trials(mapping: str, params: GenParams, i: int):
    spec = MAPPINGS[mapping]
    rng = _rng(params, "xcheck", mapping, i)
    src = gen_structure(spec.source_kind.kind, params, rng)
    logic = spec.source_logic
    props, acts = src.props, sorted(src.actions)
    phi = gen_formula(logic, params, rng, props=props, actions=acts)
    s = rng.randrange(src.n_states)
    yield Trial(mapping, "state", src, phi, state=s)
    pi = gen_path_formula(logic, params, rng, props=props, actions=acts)
    yield Trial(mapping, "path", src, pi, path=gen_lasso(src, s, rng))


def xcheck(mapping: str, params: GenParams, mutant: bool = False, shrink_limit: int = 3) -> XCheckReport:
    """Compare source and target verdicts on generated instances.

    With ``mutant=True`` the deliberately broken translator is run instead and a
    failure is an instance where the faithful translator agrees with the source
    but the mutant does not.
    """
    if mapping not in MAPPINGS:
        raise ValueError(f"unknown mapping {mapping!r}")
    start = time.perf_counter()
    report = XCheckReport(mapping, mutant=mutant)
    for i in range(params.trials):
        report.trials += 1
        for trial in _trials(mapping, params, i):
            report.checks += 1
            if not _detects(trial, mutant):
                continue
            if len(report.failures) < shrink_limit:
                trial = shrink(trial, lambda t: _detects(t, mutant))
            s, t = _verdicts(trial, mutant=mutant)
            report.failures.append(_describe(trial, s, t))
    report.failures.sort(key=lambda f: json.dumps(f, sort_keys=True))
    report.elapsed = time.perf_counter() - start
    return report


def _deadlock_corpus():
    out = []
    for cls in (KINDS["ks"], KINDS["lts"], KINDS["kts"]):
        props = ["p"] if cls.has_props else []
        actions = ["a"] if cls.has_actions else []
        for v in (False, True):
            lab = {"s0": {"p": v}} if props else {}
            out.append(cls.build(["s0"], [], actions, props, lab))
    return out


def oracle_vs_fixpoint(params: GenParams, logics=(Logic.CTL, Logic.ACTL, Logic.UCTL)) -> XCheckReport:
    """Fixpoint labeling against lasso enumeration for the non-star logics."""
    start = time.perf_counter()
    report = XCheckReport("oracle")
    for logic in logics:
        carrier = CARRIERS[logic]
        corpus = [st for st in _deadlock_corpus() if type(st) is carrier]
        for i in range(params.trials + len(corpus)):
            rng = _rng(params, "oracle", logic.value, i)
            st = corpus[i] if i < len(corpus) else gen_structure(carrier.kind, params, rng)
            phi = gen_formula(logic, params, rng, props=st.props, actions=sorted(st.actions))
            report.trials += 1
            fast, slow = Checker(st), Checker(st, oracle=True)
            for s in st.states:
                report.checks += 1
                a, b = fast.holds(s, phi), slow.holds(s, phi)
                if a != b:
                    report.failures.append({
                        "logic": logic.value,
                        "structure": structure_to_dict(st),
                        "formula": render_formula(phi, logic),
                        "at": st.names[s],
                        "fixpoint": a,
                        "oracle": b,
                    })
            report.bounded += slow.bounded
    report.failures.sort(key=lambda f: json.dumps(f, sort_keys=True))
    report.elapsed = time.perf_counter() - start
    return report


# -- shrinking ------------------------------------------------------------------

def _subterms(f):
    """Smaller candidates for ``f`` of the same sort (state or path)."""
    out = []
    if not isinstance(f, Embed):
        sort = StateFormula if isinstance(f, StateFormula) else PathFormula
        out = [k for k in children(f) if isinstance(k, sort)]
    if isinstance(f, StateFormula) and not isinstance(f, TrueF):
        out.append(TRUE)
    if isinstance(f, Embed):
        out += [Embed(c) for c in _subterms(f.state)]
    return out


def _variants(f):
    """All formulae obtained by shrinking exactly one node of ``f``."""
    yield from _subterms(f)
    names = [n for n in ("operand", "left", "right", "path", "state") if hasattr(f, n)]
    for n in names:
        for v in _variants(getattr(f, n)):
            yield replace(f, **{n: v})


def _rebuild(st: Structure, keep_states, keep_trans) -> Structure:
    order = [s for s in st.states if s in keep_states]
    index = {s: i for i, s in enumerate(order)}
    trans = tuple(sorted(Transition(index[t.src], t.labels, index[t.dst])
                         for t in keep_trans if t.src in index and t.dst in index))
    lab = {index[s]: dict(st.labeling[s]) for s in order if s in st.labeling}
    return type(st)(names=tuple(st.names[s] for s in order), transitions=trans,
                    actions=st.actions, props=st.props, labeling=lab), index


def _move_path(sigma: Lasso, index) -> Lasso:
    tr = lambda ts: tuple(Transition(index[t.src], t.labels, index[t.dst]) for t in ts)  # noqa: E731
    return Lasso(index[sigma.start], tr(sigma.stem), tr(sigma.cycle))


def _structure_variants(trial: Trial):
    st = trial.source
    pinned = set()
    on_path = set()
    if trial.level == "path":
        sigma = trial.path
        on_path = set(sigma.stem + sigma.cycle)
        pinned = {sigma.start} | {t.dst for t in on_path}
    else:
        pinned = {trial.state}
    for t in st.transitions:
        if t in on_path:
            continue
        new, index = _rebuild(st, set(st.states), [u for u in st.transitions if u != t])
        if trial.level == "path":
            moved = _move_path(trial.path, index)
            if not moved.is_maximal(new):
                continue
            yield replace(trial, source=new, path=moved)
        else:
            yield replace(trial, source=new)
    for s in st.states:
        if s in pinned:
            continue
        new, index = _rebuild(st, set(st.states) - {s}, st.transitions)
        if trial.level == "path":
            yield replace(trial, source=new, path=_move_path(trial.path, index))
        else:
            yield replace(trial, source=new, state=index[trial.state])


def shrink(trial: Trial, still_fails, budget: int = 2000) -> Trial:
    """Greedy local minimisation; ``still_fails`` must hold of the input."""
    logic = MAPPINGS[trial.mapping].source_logic
    spent = 0
    improved = True
    while improved and spent < budget:
        improved = False
        candidates = list(_structure_variants(trial))
        for f in _variants(trial.formula):
            whole = Exists(f) if trial.level == "path" else f
            if not conforms(whole, logic):
                candidates.append(replace(trial, formula=f))
        for cand in candidates:
            spent += 1
            try:
                ok = still_fails(cand)
            except ValueError:
                ok = False
            if ok:
                trial = cand
                improved = True
                break
            if spent >= budget:
                break
    return trial
