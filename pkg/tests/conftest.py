import pytest

from tempobridge.structures import Kmts, Ks, Kts, Lts, Truth3


@pytest.fixture
def k0():
    # t0 (p false) -> t1 (p true), t1 loops
    return Ks.build(["t0", "t1"], [("t0", "t1"), ("t1", "t1")], props=["p"],
                    labeling={"t0": {"p": False}, "t1": {"p": True}})


@pytest.fixture
def l0():
    return Lts.build(["s0", "s1"], [("s0", ["a"], "s1"), ("s1", [], "s1")], actions=["a", "b"])


@pytest.fixture
def t0():
    return Kts.build(["s0", "s1"], [("s0", ["a"], "s1")], actions=["a"], props=["p"],
                     labeling={"s0": {"p": False}, "s1": {"p": True}})


@pytest.fixture
def m0():
    return Kmts.build(["u0", "u1"], [("u0", ["a!"], "u1"), ("u0", ["b?"], "u0")],
                      actions=["a!", "b?"], props=["p"],
                      labeling={"u0": {"p": Truth3.BOT}, "u1": {"p": Truth3.TRUE}})


@pytest.fixture
def dead_ks():
    return Ks.build(["s"], [], props=["p"], labeling={"s": {"p": True}})


@pytest.fixture
def dead_kmts():
    return Kmts.build(["s"], [], actions=["a!"], props=["p"], labeling={"s": {"p": "false"}})
