"""Acceptance criteria 1-9, each run at its stated size and tolerance.

Every test prints one ``criterion N: PASS|FAIL ...`` line to the terminal
(bypassing capture) before asserting.
"""
import time
from itertools import product

import pytest

from test_checker3 import TABLE, definite, two_valued
from tempobridge.checker2 import Checker
from tempobridge.checker3 import eval_ex_upml, eval_upml, kleene_and, kleene_not, kleene_or
from tempobridge.formulas import AX, TRUE, AXact, Logic, Not, Prop, children
from tempobridge.mappings import MAPPINGS, bundle
from tempobridge.parser import parse_formula, render_formula
from tempobridge.structures import Kmts, Ks, Truth3
from tempobridge.testkit import GenParams, gen_formula, gen_structure, oracle_vs_fixpoint, xcheck

SEED = 7
BOUNDS = dict(max_states=5, max_actions=3, max_props=3, max_formula_depth=3)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return emit


def _xcheck_all(names, trials, mutant=False):
    out = {}
    for name in names:
        out[name] = xcheck(name, GenParams(seed=SEED, trials=trials, **BOUNDS), mutant=mutant)
    return out


def _summary(reports, key=lambda r: len(r.failures)):
    return ", ".join(f"{n}={key(r)}" for n, r in reports.items())


def test_criterion_1_non_star_truth_preservation(report):
    start = time.perf_counter()
    reports = _xcheck_all(["ks'", "lts'", "ks2'", "lts2'"], 500)
    elapsed = time.perf_counter() - start
    ok = all(r.ok for r in reports.values()) and elapsed < 300
    report(1, ok, f"failures: {_summary(reports)}; {elapsed:.1f}s")
    assert ok, {n: r.failures[:1] for n, r in reports.items() if r.failures}


def test_criterion_2_star_truth_preservation(report):
    reports = _xcheck_all(["ks", "lts", "ks2", "lts2"], 300)
    levels = {n: {f["level"] for f in r.failures} for n, r in reports.items()}
    bounded = sum(r.bounded for r in reports.values())
    ok = all(r.ok for r in reports.values()) and bounded == 0
    report(2, ok, f"failures: {_summary(reports)}; bounded={bounded}; levels={levels}")
    assert ok, {n: r.failures[:1] for n, r in reports.items() if r.failures}


def test_criterion_3_oracle_agreement(report):
    reports = {logic.value: oracle_vs_fixpoint(GenParams(seed=SEED, trials=1000, **BOUNDS), (logic,))
               for logic in (Logic.CTL, Logic.ACTL, Logic.UCTL)}
    ok = all(r.ok and r.bounded == 0 for r in reports.values())
    report(3, ok, f"disagreements: {_summary(reports)}")
    assert ok


def test_criterion_4_kleene_core(report):
    bad = [(x, y) for x, y, conj, disj in TABLE
           if kleene_and(x, y) is not conj or kleene_or(x, y) is not disj]
    t = Truth3
    spot = (kleene_and(t.BOT, t.FALSE) is t.FALSE and kleene_or(t.BOT, t.FALSE) is t.BOT
            and kleene_and(t.TRUE, t.BOT) is t.BOT and kleene_or(t.TRUE, t.BOT) is t.TRUE)
    de_morgan = [(x, y) for x, y in product(Truth3, repeat=2)
                 if kleene_or(x, y) is not kleene_not(kleene_and(kleene_not(x), kleene_not(y)))
                 or kleene_and(x, y) is not kleene_not(kleene_or(kleene_not(x), kleene_not(y)))]
    ok = len(TABLE) == 9 and not bad and spot and not de_morgan
    report(4, ok, f"table mismatches={len(bad)}, De Morgan mismatches={len(de_morgan)}")
    assert ok


def test_criterion_5_upml(report):
    dual_bad = red_bad = 0
    for i in range(500):
        params = GenParams(seed=SEED * 100_000 + i, **BOUNDS)
        k = gen_structure("kmts", params)
        f = gen_formula(Logic.UPML, params, props=k.props, actions=sorted(k.underlying_actions))
        acts = sorted(k.underlying_actions) or ["a"]
        for s in k.states:
            for a in acts if k.underlying_actions else []:
                dual_bad += eval_ex_upml(k, s, a, f) is not kleene_not(eval_upml(k, s, AXact(a, Not(f))))
        d = definite(k)
        for s in d.states:
            v = eval_upml(d, s, f)
            red_bad += v is Truth3.BOT or (v is Truth3.TRUE) != two_valued(d, s, f)
    ok = dual_bad == 0 and red_bad == 0
    report(5, ok, f"duality mismatches={dual_bad}, reduction mismatches={red_bad} over 500 + 500")
    assert ok


def test_criterion_6_mutation_sensitivity(report):
    reports = _xcheck_all(sorted(MAPPINGS), 500, mutant=True)
    ok = all(not r.ok for r in reports.values())
    report(6, ok, f"detections: {_summary(reports)}")
    assert ok


def test_criterion_7_size_laws(report):
    bad = {}
    for name, spec in MAPPINGS.items():
        bad[name] = 0
        for i in range(200):
            src = gen_structure(spec.source_kind.kind, GenParams(seed=SEED * 1000 + i, **BOUNDS))
            tgt = bundle(name, src).target
            n, m = src.n_states, len(src.transitions)
            want = (n + m, 2 * m) if spec.split else (2 * n, m + 2 * n)
            bad[name] += (tgt.n_states, len(tgt.transitions)) != want
    ok = not any(bad.values())
    report(7, ok, f"violations: {bad}")
    assert ok


def _has_prop(f):
    return isinstance(f, Prop) or any(_has_prop(k) for k in children(f))


def test_criterion_8_parser_round_trip(report):
    bad = {}
    for logic in Logic:
        bad[logic.value] = 0
        for i in range(1000):
            f = gen_formula(logic, GenParams(seed=SEED * 10_000 + i, **BOUNDS))
            bad[logic.value] += parse_formula(render_formula(f, logic), logic) != f
    props_in_actl = sum(_has_prop(gen_formula(Logic.ACTL, GenParams(seed=i, **BOUNDS)))
                        for i in range(1000))
    ok = not any(bad.values()) and props_in_actl == 0
    report(8, ok, f"round-trip mismatches: {bad}; ACTL props={props_in_actl}")
    assert ok


def test_criterion_9_deadlock_suite(report):
    ks = Ks.build(["s"], [], props=["p"], labeling={"s": {"p": True}})
    kmts = Kmts.build(["s"], [], actions=["a!"], props=["p"], labeling={"s": {"p": "false"}})
    got = {
        "E X true": Checker(ks).holds(0, parse_formula("E X true", Logic.CTL)),
        "A X p": Checker(ks).holds(0, parse_formula("A X p", Logic.CTL)),
        "UPML AX p": eval_upml(kmts, 0, AX(Prop("p"))),
        "UPML AX true": eval_upml(kmts, 0, AX(TRUE)),
        "EX_a p": eval_ex_upml(kmts, 0, "a", Prop("p")),
    }
    want = {"E X true": False, "A X p": False, "UPML AX p": Truth3.TRUE,
            "UPML AX true": Truth3.TRUE, "EX_a p": Truth3.FALSE}
    ok = got == want
    report(9, ok, ", ".join(f"{k}={v}" for k, v in got.items()))
    assert ok
