from itertools import chain, combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tempobridge.checker2 import Checker
from tempobridge.formulas import (
    AX, TRUE, Act, And, AndA, AndP, AXact, Embed, Exists, FALSE_P, Logic, Not, NotA, NotP,
    Prop, Tau, U, Uchi, W, Wchi, X, Xact, Xchi, closure_size, conforms, depth,
    derive_ex_upml, eval_action, expand_uchi_star, expand_wchi_star, expand_xchi,
    forall, or_p,
)
from tempobridge.structures import Kts, mu_paths
from tempobridge.testkit import GenParams, gen_formula, gen_structure


def _sets(alphabet):
    items = sorted(alphabet)
    return [frozenset(c) for c in chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))]


def _actions(alphabet, d):
    """Every action formula over ``alphabet`` up to nesting ``d``."""
    out = [Tau()] + [Act(a) for a in sorted(alphabet)]
    for _ in range(d):
        out = out + [NotA(x) for x in out] + [AndA(x, y) for x in out[:4] for y in out[:4]]
    return out


class TestConforms:
    def test_prop_not_in_actl(self):
        assert conforms(Prop("p"), Logic.ACTL)

    def test_ctl_path_operands_are_state_formulae(self):
        assert conforms(Exists(U(Embed(TRUE), Embed(TRUE))), Logic.CTL)
        assert conforms(Exists(U(TRUE, TRUE)), Logic.CTL) == []

    def test_uctl_uchi(self):
        assert conforms(Exists(Uchi(TRUE, Act("a"), Act("b"), TRUE)), Logic.UCTL) == []

    def test_star_grammar_rejects_action_until(self):
        assert conforms(Exists(Uchi(Embed(TRUE), Act("a"), Act("b"), Embed(TRUE))), Logic.UCTLSTAR)

    def test_ctl_star_has_no_xact(self):
        assert conforms(Exists(Xact("a", Embed(TRUE))), Logic.CTLSTAR)
        assert conforms(Exists(Xact("a", Embed(TRUE))), Logic.ACTLSTAR) == []

    def test_upml(self):
        assert conforms(AXact("a", Not(Prop("p"))), Logic.UPML) == []
        assert conforms(Exists(X(TRUE)), Logic.UPML)

    @pytest.mark.parametrize("logic", list(Logic))
    def test_generated_formulae_conform(self, logic):
        for seed in range(100):
            f = gen_formula(logic, GenParams(seed=seed))
            assert conforms(f, logic) == []
            assert depth(f) <= 3


class TestSugar:
    def test_forall(self):
        assert forall(X(Embed(TRUE))) == Not(Exists(NotP(X(Embed(TRUE)))))
        pi = NotP(X(Embed(TRUE)))
        assert forall(pi) == Not(Exists(NotP(pi)))
        assert forall(U(TRUE, TRUE)) == Not(Exists(NotP(U(TRUE, TRUE))))

    def test_derive_ex_upml(self):
        p = Prop("p")
        assert derive_ex_upml(p) == Not(AX(Not(p)))
        assert derive_ex_upml(p, "a") == Not(AXact("a", Not(p)))
        assert derive_ex_upml(Not(p), "a") == Not(AXact("a", Not(Not(p))))


class TestEvalAction:
    def test_tau(self):
        assert eval_action(frozenset(), Tau())
        assert not eval_action({"a"}, Tau())

    def test_compound(self):
        assert eval_action({"a", "b"}, AndA(Act("a"), NotA(Act("c"))))
        assert not eval_action(set(), NotA(Tau()))

    def test_de_morgan_exhaustive(self):
        alphabet = {"a", "b", "c"}
        chis = _actions(alphabet, 1)
        for alpha in _sets(alphabet):
            for x, y in product(chis, chis):
                lhs = eval_action(alpha, NotA(AndA(NotA(x), NotA(y))))
                assert lhs == (eval_action(alpha, x) or eval_action(alpha, y))


class TestExpansions:
    pi = Embed(Prop("p"))

    def test_single(self):
        assert expand_xchi(Act("a"), self.pi, {"a"}) == Xact("a", self.pi)

    def test_two_actions(self):
        want = or_p(Xact("a", self.pi), AndP(Xact("a", self.pi), Xact("b", self.pi)))
        assert expand_xchi(Act("a"), self.pi, {"a", "b"}) == want

    def test_unsatisfiable(self):
        assert expand_xchi(AndA(Act("a"), NotA(Act("a"))), self.pi, {"a"}) == FALSE_P

    def test_empty_label_set_is_plain_next(self):
        assert expand_xchi(Tau(), self.pi, {"a"}) == X(self.pi)

    def test_uchi(self):
        t = Embed(TRUE)
        got = expand_uchi_star(t, Act("a"), Act("b"), t, {"a", "b"})
        assert got == U(AndP(t, expand_xchi(Act("a"), t, {"a", "b"})),
                        AndP(t, expand_xchi(Act("b"), t, {"a", "b"})))

    def test_unsatisfiable_right(self):
        never = AndA(Act("a"), NotA(Act("a")))
        got = expand_uchi_star(Embed(TRUE), Act("a"), never, Embed(TRUE), {"a"})
        assert got.right.right == FALSE_P

    def test_wchi_without_steps_is_globally(self):
        never = AndA(Act("a"), NotA(Act("a")))
        got = expand_wchi_star(Embed(TRUE), never, never, Embed(TRUE), {"a"})
        # the U disjunct cannot hold, so only the globally disjunct matters
        k = Kts.build(["s"], [], actions=["a"], props=["p"], labeling={"s": {"p": True}})
        assert Checker(k).holds(0, Exists(got))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_xchi_expansion_matches_inclusion_reading(self, seed):
        k = gen_structure("kts", GenParams(seed=seed, max_states=3))
        alphabet = k.actions
        c = Checker(k)
        pi = Embed(Prop(k.props[0]))
        sat = c.sat(Prop(k.props[0]))
        for chi in _actions(alphabet, 1)[:12]:
            expanded = expand_xchi(chi, pi, alphabet)
            for s in k.states:
                for sigma in mu_paths(k, s, 4):
                    pos = sigma.positions()
                    _, t, nx = pos[0]
                    direct = t is not None and pos[nx][0] in sat and any(
                        eval_action(alpha, chi) and alpha <= t.labels for alpha in _sets(alphabet))
                    assert c.check_path(sigma, expanded) == direct


class TestClosure:
    def test_examples(self):
        assert closure_size(X(Embed(TRUE))) == 1
        a, b = Embed(Prop("a")), Embed(Prop("b"))
        assert closure_size(U(X(a), X(b))) == 3
        assert closure_size(Embed(TRUE)) == 0

    def test_shared_subterms_count_once(self):
        x = X(Embed(TRUE))
        assert closure_size(AndP(x, x)) == 1

    def test_does_not_enter_embedded_state_formulae(self):
        assert closure_size(Embed(Exists(X(Embed(TRUE))))) == 0

    def test_depth(self):
        assert depth(Exists(U(Not(Prop("p")), Prop("p")))) == 3
        assert depth(Embed(Prop("p"))) == 0
        assert depth(Exists(Wchi(TRUE, Tau(), Tau(), TRUE))) == 2
        assert depth(And(TRUE, Exists(Xchi(Tau(), TRUE)))) == 3
        assert depth(Exists(W(TRUE, TRUE))) == 2
