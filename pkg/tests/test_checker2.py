import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tempobridge.checker2 import CARRIERS, CheckConfig, Checker, check, check_path, check_state, check_state_star
from tempobridge.formulas import (
    TRUE, Act, And, Embed, Exists, Logic, Not, NotA, NotP, Prop, Tau, U, Uchi, W, Wchi, X, Xact,
    Xchi, action_true, children, forall, or_,
)
from tempobridge.parser import parse_formula, parse_path
from tempobridge.structures import Ks, Kts, Lasso, Lts, mu_paths
from tempobridge.testkit import GenParams, gen_formula, gen_path_formula, gen_structure, oracle_vs_fixpoint

p = Prop("p")


def _lasso(structure, s, bound=4):
    (sigma,) = mu_paths(structure, s, bound)
    return sigma


class TestCheckPath:
    def test_until_on_k0(self, k0):
        sigma = _lasso(k0, 0)
        assert check_path(k0, sigma, U(Not(p), p), Logic.CTL)

    def test_next_on_empty_path(self, dead_ks):
        sigma = _lasso(dead_ks, 0)
        assert not check_path(dead_ks, sigma, X(Embed(TRUE)), Logic.CTLSTAR)
        assert check_path(dead_ks, sigma, NotP(X(Embed(TRUE))), Logic.CTLSTAR)

    def test_action_next(self, l0):
        sigma = _lasso(l0, 0)
        assert check_path(l0, sigma, Xact("a", TRUE), Logic.ACTL)
        assert not check_path(l0, sigma, Xact("b", TRUE), Logic.ACTL)

    def test_non_maximal(self, l0):
        with pytest.raises(ValueError):
            check_path(l0, Lasso(0, (l0.transition(0, 1),), ()), X(TRUE), Logic.ACTL)

    def test_until_on_cycle(self):
        # a b a b ... : p never holds, so until fails everywhere on the cycle
        k = Kts.build(["x", "y"], [("x", ["a"], "y"), ("y", [], "x")], actions=["a"], props=["p"],
                      labeling={"x": {"p": False}, "y": {"p": False}})
        sigma = _lasso(k, 0)
        c = Checker(k)
        assert c.path_values(sigma, U(Embed(TRUE), Embed(p))) == [False, False]
        assert c.path_values(sigma, W(TRUE, p)) == [True, True]

    def test_uchi_first_step_may_be_the_final_one(self):
        # s0 -a-> s1 (deadlock): the chi' step is the very first transition
        k = Lts.build(["s0", "s1"], [("s0", ["a"], "s1")], actions=["a"])
        sigma = _lasso(k, 0)
        assert check_path(k, sigma, Uchi(TRUE, Tau(), Act("a"), TRUE), Logic.ACTL)

    def test_wchi_finite_end(self):
        k = Lts.build(["s0", "s1"], [("s0", ["a"], "s1")], actions=["a"])
        sigma = _lasso(k, 0)
        impossible = NotA(action_true())
        assert check_path(k, sigma, Wchi(TRUE, Act("a"), impossible, TRUE), Logic.ACTL)
        assert not check_path(k, sigma, Wchi(TRUE, Tau(), impossible, TRUE), Logic.ACTL)


class TestCheckState:
    def test_k0(self, k0):
        assert check_state(k0, 0, parse_formula("E[!p U p]", "CTL"), Logic.CTL)

    def test_deadlock_next(self, dead_ks):
        assert not check_state(dead_ks, 0, parse_formula("E X true", "CTL"), Logic.CTL)

    def test_action_until(self, l0):
        assert check_state(l0, 0, parse_formula("E[true {a}U{tau} true]", "ACTL"), Logic.ACTL)

    def test_carrier_mismatch(self, l0):
        with pytest.raises(ValueError):
            check_state(l0, 0, p, Logic.CTL)

    def test_non_conforming(self, k0):
        with pytest.raises(ValueError):
            check_state(k0, 0, Exists(U(Embed(p), Embed(p))), Logic.CTL)

    def test_upml_is_refused(self, m0):
        with pytest.raises(ValueError):
            check(m0, 0, p, Logic.UPML)

    def test_dispatch(self, k0):
        f = parse_formula("E[true U p]", "CTL*")
        assert check(k0, 0, f, Logic.CTLSTAR)
        assert check(k0, 0, parse_formula("E X p", "CTL"), Logic.CTL)


class TestDeadlocks:
    """Every E/A base case at a deadlocked state, where the only maximal path is empty."""

    @pytest.fixture
    def dead(self):
        return Kts.build(["s"], [], actions=["a"], props=["p"], labeling={"s": {"p": True}})

    @pytest.mark.parametrize("text,want", [
        ("E X true", False), ("A X true", False), ("E X_{tau} true", False),
        ("A X_{a} p", False), ("E X_a true", False), ("A X_a true", False),
        ("E[p U p]", True), ("A[p U p]", True), ("E[true U !p]", False), ("A[true U !p]", False),
        ("E[p W !p]", True), ("A[p W !p]", True), ("E[!p W p]", True), ("E[!p W !p]", False),
        ("E[p {a}U{a} p]", False), ("A[p {a}U{a} p]", False),
        ("E[p {a}W{a} !p]", True), ("A[p {a}W{a} !p]", True), ("E[!p {a}W{a} p]", False),
        ("!E !X true", False), ("E !X p", True),
    ])
    def test_verdicts(self, dead, text, want):
        f = parse_formula(text, "UCTL")
        assert Checker(dead).holds(0, f) == want
        assert Checker(dead, oracle=True).holds(0, f) == want

    def test_star_forall_next(self, dead_ks):
        assert not check_state_star(dead_ks, 0, parse_formula("A X p", "CTL*"), Logic.CTLSTAR)


class TestStar:
    def test_eventually(self, k0):
        assert check_state_star(k0, 0, parse_formula("E[true U p]", "CTL*"), Logic.CTLSTAR)

    def test_next_next(self, k0):
        assert not check_state_star(k0, 0, parse_formula("E X X !p", "CTL*"), Logic.CTLSTAR)

    def test_fairness_needs_the_cycle(self):
        # G F p: only the cycle through z visits p
        k = Ks.build(["x", "y", "z"], [("x", "y"), ("x", "z"), ("y", "y"), ("z", "z")], props=["p"],
                     labeling={"x": {"p": True}, "y": {"p": False}, "z": {"p": True}})
        gf = "![true U ![true U p]]"
        assert Checker(k).sat(parse_formula("E " + gf, "CTL*")) == {0, 2}
        assert Checker(k).sat(parse_formula("A " + gf, "CTL*")) == {2}

    def test_bounded_flag(self, k0):
        f = parse_formula("E[true U p]", "CTL*")
        c = Checker(k0, CheckConfig(lasso_bound_override=1), engine="enumerate")
        c.holds(0, f)
        assert c.bounded
        c = Checker(k0, engine="enumerate")
        c.holds(0, f)
        assert not c.bounded

    def test_config_bound(self):
        cfg = CheckConfig(ceiling=10)
        assert cfg.bound(4, X(Embed(TRUE))) == (8, False)
        assert cfg.bound(4, X(X(Embed(TRUE)))) == (10, True)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.sampled_from([Logic.CTLSTAR, Logic.ACTLSTAR, Logic.UCTLSTAR]))
    def test_tableau_matches_enumeration(self, seed, logic):
        params = GenParams(seed=seed, max_states=3, max_actions=2, max_props=2)
        k = gen_structure(CARRIERS[logic].kind, params)
        f = gen_formula(logic, params, props=k.props, actions=sorted(k.actions))
        assert Checker(k).sat(f) == Checker(k, engine="enumerate").sat(f)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_monotone_bound(self, seed):
        params = GenParams(seed=seed, max_states=4)
        k = gen_structure("kts", params)
        f = Exists(gen_path_formula(Logic.UCTLSTAR, params, props=k.props, actions=sorted(k.actions)))
        assume(_positive(f))
        previous = frozenset()
        for b in (1, 2, 4, 8):
            got = Checker(k, CheckConfig(lasso_bound_override=b), engine="enumerate").sat(f)
            assert previous <= got
            previous = got


def _positive(f) -> bool:
    """No Exists under a negation, so bounded search can only under-approximate."""

    def ok(node, neg):
        if isinstance(node, Exists) and neg:
            return False
        flip = isinstance(node, (Not, NotP))
        return all(ok(k, neg ^ flip) for k in children(node))
    return ok(f, False)


class TestLaws:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.sampled_from([Logic.CTL, Logic.ACTL, Logic.UCTL]))
    def test_duality(self, seed, logic):
        params = GenParams(seed=seed)
        k = gen_structure(CARRIERS[logic].kind, params)
        pi = gen_path_formula(logic, params, props=k.props, actions=sorted(k.actions))
        c = Checker(k)
        assert c.sat(Exists(NotP(pi))) == frozenset(k.states) - c.sat(forall(pi))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_until_expansion(self, seed):
        params = GenParams(seed=seed)
        k = gen_structure("ks", params)
        phi = gen_formula(Logic.CTL, GenParams(seed=seed, max_formula_depth=1), props=k.props)
        psi = gen_formula(Logic.CTL, GenParams(seed=seed + 1, max_formula_depth=1), props=k.props)
        c = Checker(k)
        lhs = c.sat(Exists(U(phi, psi)))
        rhs = c.sat(or_(psi, And(phi, Exists(X(Exists(U(phi, psi)))))))
        assert lhs == rhs

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.sampled_from([Logic.ACTL, Logic.UCTL]))
    def test_weak_until_clause(self, seed, logic):
        params = GenParams(seed=seed)
        k = gen_structure(CARRIERS[logic].kind, params)
        g = gen_path_formula(logic, params, props=k.props, actions=sorted(k.actions))
        while isinstance(g, NotP):
            g = g.operand
        if not isinstance(g, (Uchi, Wchi)):
            return
        phi, chi, chi2, psi = g.left, g.chi, g.chi2, g.right
        c = Checker(k)
        never = NotA(action_true())
        weak = c.sat(Exists(Wchi(phi, chi, chi2, psi)))
        strong = c.sat(Exists(Uchi(phi, chi, chi2, psi)))
        globally = c.sat(Exists(Wchi(phi, chi, never, TRUE)))
        assert weak == strong | globally

    def test_oracle_agreement_sample(self):
        report = oracle_vs_fixpoint(GenParams(seed=11, trials=150))
        assert report.failures == [] and report.bounded == 0


class TestPathLevelParse:
    def test_parse_and_check(self, k0):
        sigma = _lasso(k0, 0)
        assert Checker(k0).check_path(sigma, parse_path("X p", "CTL*"))
        assert not Checker(k0).check_path(sigma, parse_path("p", "CTL*"))
