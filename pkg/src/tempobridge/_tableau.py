"""Exact existential path checking for star-logic path formulae.

Builds the product of the structure with the assignments to the formula's
next-time obligations (one bit per ``X``/``X_a`` subterm and one per ``U``
subterm's "next" unfolding) and looks for a consistent maximal path: either
one that reaches a deadlocked state with no pending obligation, or one that
ends in a strongly connected component fulfilling every pending until.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .formulas import (
    TRUE, AndP, Embed, NotP, PathFormula, StateFormula, U, Uchi, W, Wchi, X, Xact,
    Xchi, expand_uchi_star, expand_wchi_star, expand_xchi,
)


def desugar(p, alphabet):
    """Rewrite derived operators into Embed/NotP/AndP/X/Xact/U."""
    if isinstance(p, StateFormula):
        return Embed(p)
    if isinstance(p, Embed):
        return p
    if isinstance(p, NotP):
        return NotP(desugar(p.operand, alphabet))
    if isinstance(p, AndP):
        return AndP(desugar(p.left, alphabet), desugar(p.right, alphabet))
    if isinstance(p, X):
        return X(desugar(p.operand, alphabet))
    if isinstance(p, Xact):
        return Xact(p.action, desugar(p.operand, alphabet))
    if isinstance(p, U):
        return U(desugar(p.left, alphabet), desugar(p.right, alphabet))
    if isinstance(p, W):
        left, right = desugar(p.left, alphabet), desugar(p.right, alphabet)
        globally = NotP(U(Embed(TRUE), NotP(left)))
        return NotP(AndP(NotP(U(left, right)), NotP(globally)))
    if isinstance(p, Xchi):
        return desugar(expand_xchi(p.chi, desugar(p.operand, alphabet), alphabet), alphabet)
    if isinstance(p, Uchi):
        return desugar(expand_uchi_star(desugar(p.left, alphabet), p.chi, p.chi2,
                                        desugar(p.right, alphabet), alphabet), alphabet)
    if isinstance(p, Wchi):
        return desugar(expand_wchi_star(desugar(p.left, alphabet), p.chi, p.chi2,
                                        desugar(p.right, alphabet), alphabet), alphabet)
    raise TypeError(f"not a path formula: {p!r}")


def exists_states(structure, pi: PathFormula, state_sat, alphabet) -> frozenset:
    """States from which some maximal path satisfies ``pi``.

    ``state_sat`` maps an embedded state formula to its set of states.
    """
    pi = desugar(pi, alphabet)
    n = structure.n_states

    # number the obligations
    elem: dict = {}
    order: list = []

    def collect(p):
        if isinstance(p, Embed):
            return
        if isinstance(p, (X, Xact)):
            collect(p.operand)
        elif isinstance(p, NotP):
            collect(p.operand)
        elif isinstance(p, (AndP, U)):
            collect(p.left)
            collect(p.right)
        if isinstance(p, (X, Xact, U)) and p not in elem:
            elem[p] = len(order)
            order.append(p)

    collect(pi)
    k = len(order)
    size = 1 << k
    assign = np.arange(size, dtype=np.int64)
    bits = [((assign >> i) & 1).astype(bool) for i in range(k)]

    vals: dict = {}

    def val(p) -> np.ndarray:
        # boolean array of shape (n, size)
        if p in vals:
            return vals[p]
        if isinstance(p, Embed):
            sat = state_sat(p.state)
            col = np.array([s in sat for s in range(n)], dtype=bool)
            v = np.broadcast_to(col[:, None], (n, size))
        elif isinstance(p, NotP):
            v = ~val(p.operand)
        elif isinstance(p, AndP):
            v = val(p.left) & val(p.right)
        elif isinstance(p, (X, Xact)):
            v = np.broadcast_to(bits[elem[p]][None, :], (n, size))
        elif isinstance(p, U):
            v = val(p.right) | (val(p.left) & bits[elem[p]][None, :])
        else:
            raise TypeError(f"unexpected node {p!r}")
        vals[p] = v
        return v

    top = val(pi)

    # what each successor node (t, A') demands of its predecessor's assignment
    sig = np.zeros((n, size), dtype=np.int64)
    xact_bits: dict = {}
    for p, i in elem.items():
        inner = val(p) if isinstance(p, U) else val(p.operand)
        sig |= inner.astype(np.int64) << i
        if isinstance(p, Xact):
            xact_bits.setdefault(p.action, 0)
            xact_bits[p.action] |= 1 << i
    full = size - 1
    all_xact = 0
    for m in xact_bits.values():
        all_xact |= m

    srcs, dsts = [], []
    for t in structure.transitions:
        mask = full & ~all_xact
        for a, m in xact_bits.items():
            if a in t.labels:
                mask |= m
        srcs.append(t.src * size + (sig[t.dst] & mask))
        dsts.append(t.dst * size + assign)
    total = n * size
    if srcs:
        src = np.concatenate(srcs)
        dst = np.concatenate(dsts)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
    graph = csr_matrix((np.ones(len(src), dtype=np.int32), (src, dst)), shape=(total, total))

    good = np.zeros(total, dtype=bool)
    for s in structure.states:
        if structure.is_deadlocked(s):
            good[s * size] = True  # empty path: every next obligation false

    if len(src):
        ncomp, comp = connected_components(graph, directed=True, connection="strong")
        comp_size = np.bincount(comp, minlength=ncomp)
        nontrivial = comp_size > 1
        loops = src[src == dst]
        nontrivial[comp[loops]] = True
        fair = nontrivial.copy()
        for p in order:
            if not isinstance(p, U):
                continue
            u_any = np.bincount(comp, weights=val(p).ravel(), minlength=ncomp) > 0
            r_any = np.bincount(comp, weights=val(p.right).ravel(), minlength=ncomp) > 0
            fair &= ~u_any | r_any
        good |= fair[comp]

    # backward reachability from the good nodes through a virtual source
    targets = np.flatnonzero(good)
    rev_src = np.concatenate([dst, np.full(len(targets), total)])
    rev_dst = np.concatenate([src, targets])
    rev = csr_matrix((np.ones(len(rev_src), dtype=np.int32), (rev_src, rev_dst)),
                     shape=(total + 1, total + 1))
    reach = breadth_first_order(rev, total, directed=True, return_predecessors=False)
    ok = np.zeros(total + 1, dtype=bool)
    ok[reach] = True
    ok = ok[:total].reshape(n, size)
    hit = (top & ok).any(axis=1)
    return frozenset(int(s) for s in np.flatnonzero(hit))
