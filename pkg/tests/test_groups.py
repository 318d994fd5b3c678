import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pxmaps.dihedral import aut_orbit, class_from_signature, enumerate_irr
from pxmaps.errors import BudgetExceededError
from pxmaps.groups import (
    automorphism_count,
    build_group,
    count_orbits_on_pairs,
    enumerate_rotary_pairs,
    enumerate_rotary_pairs_bfs,
    extend_assignment,
    pair_count_formula,
    structural_aut_order,
)


def group_of(sigs, p, r, **kw):
    return build_group([class_from_signature(s, p, r) for s in sigs], p, r, **kw)


def naive_pairs(group):
    """Rotary pairs from element-level arithmetic and set closure only."""
    elems = [group.decode(c) for c in range(group.order)]
    ident = group.identity()

    def order(g):
        k, h = 1, g
        while h != ident:
            h = group.multiply(h, g)
            k += 1
        return k

    def closure(g, h):
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for y in (group.multiply(x, g), group.multiply(x, h)):
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return len(seen)

    orders = [order(g) for g in elems]
    taus = [g for g, o in zip(elems, orders) if o == 2]
    out = set()
    for g, o in zip(elems, orders):
        if o not in (2, 2 * group.p):
            continue
        for t in taus:
            if closure(g, t) == group.order:
                out.add((group.code(g), group.code(t)))
    return out


TINY = [
    (["L(+,+)"], 3, 4),
    (["L(-,-)"], 3, 4),
    (["L(+,-)"], 3, 4),
    (["L(+,+)"], 5, 3),
    (["L(-,-)"], 5, 3),
    (["L(+,+)", "L(-,-)"], 3, 4),
    (["L(+,+)", "L(+,-)"], 3, 4),
    (["L(+,+)", "L(+,+)"], 3, 4),
    (["R{1,3}"], 3, 4),
]


@pytest.mark.parametrize("sigs,p,r", TINY)
def test_relator_enumeration_matches_naive_closure(sigs, p, r):
    g = group_of(sigs, p, r)
    fast = enumerate_rotary_pairs(g)
    assert set(zip(fast.rho.tolist(), fast.tau.tolist())) == naive_pairs(g)


@pytest.mark.parametrize("sigs,p,r", [
    (["R{1,2}"], 5, 3), (["L(+,+)", "R{1,3}"], 3, 4), (["L(-,-)", "L(+,-)"], 3, 4),
    (["P{1}"], 7, 3), (["R{1,2,3,4}"], 3, 5),
])
def test_relator_enumeration_matches_bfs(sigs, p, r):
    g = group_of(sigs, p, r)
    a, b = enumerate_rotary_pairs(g), enumerate_rotary_pairs_bfs(g)
    assert np.array_equal(a.rho, b.rho) and np.array_equal(a.tau, b.tau)
    assert a.rho_order == b.rho_order


@pytest.mark.parametrize("p,r", [(3, 4), (5, 3), (3, 5), (7, 3), (3, 7), (5, 4), (11, 5)])
def test_single_class_pair_counts_match_closed_forms(p, r):
    for cls in enumerate_irr(p, r):
        g = build_group([cls], p, r)
        if g.order > 60_000:
            continue
        assert len(enumerate_rotary_pairs(g)) == pair_count_formula(g)


@pytest.mark.parametrize("p,r", [(3, 4), (5, 3), (3, 5), (7, 3), (5, 4), (11, 5)])
def test_orbit_counts_and_structural_aut_order(p, r):
    for cls in enumerate_irr(p, r):
        g = build_group([cls], p, r)
        if g.order > 60_000:
            continue
        rep = automorphism_count(g)
        assert rep.semiregular
        assert rep.spot_checked == min(10, rep.pair_count)
        assert rep.aut_order == structural_aut_order(g)
        expect = 1 if cls.degree == 1 else len(aut_orbit(cls, p, r))
        assert rep.orbit_count == expect


@pytest.mark.parametrize("sigs,p,r", [
    (["L(+,+)", "L(-,-)"], 3, 4), (["L(+,+)", "L(+,-)"], 3, 4), (["L(+,+)", "R{1,3}"], 3, 4),
    (["L(+,+)", "L(-,-)", "L(+,-)"], 3, 4), (["L(+,+)", "R{1,2}"], 5, 3),
])
def test_reducible_aut_order_matches_structure(sigs, p, r):
    g = group_of(sigs, p, r)
    rep = automorphism_count(g)
    assert rep.aut_order == structural_aut_order(g)
    assert rep.pair_count == rep.aut_order * rep.orbit_count


@pytest.mark.parametrize("sigs", [["L(+,+)", "L(+,+)"], ["L(+,-)", "L(-,+)"], ["R{1,3}", "R{1,3}"]])
def test_repeated_or_twin_constituents_have_no_pairs(sigs):
    g = group_of(sigs, 3, 4)
    assert len(enumerate_rotary_pairs(g)) == 0
    assert count_orbits_on_pairs(g) == 0


def test_budget_guard():
    g = group_of(["R{1,2,3,4}"], 3, 5, max_order=100)
    with pytest.raises(BudgetExceededError):
        enumerate_rotary_pairs(g)


group_cells = st.sampled_from([(["L(+,+)", "R{1,3}"], 3, 4), (["P{1}"], 7, 3), (["R{1,2}"], 5, 3),
                               (["L(-,-)", "L(+,-)"], 5, 4)])


@settings(max_examples=40, deadline=None)
@given(group_cells, st.data())
def test_group_axioms(cell, data):
    g = group_of(*cell)
    code = st.integers(0, g.order - 1)
    x, y, z = (g.decode(data.draw(code)) for _ in range(3))
    assert g.multiply(g.multiply(x, y), z) == g.multiply(x, g.multiply(y, z))
    assert g.multiply(x, g.inverse(x)) == g.identity()
    assert g.decode(g.code(x)) == x
    k = g.element_order(x)
    assert g.power(x, k) == g.identity()
    assert all(g.power(x, j) != g.identity() for j in range(1, k))
    g._require_tables()
    assert g.mul_codes(np.array([g.code(x)]), np.array([g.code(y)]))[0] == g.code(g.multiply(x, y))


@settings(max_examples=25, deadline=None)
@given(group_cells, st.data())
def test_fast_generation_agrees_with_closure(cell, data):
    g = group_of(*cell)
    code = st.integers(0, g.order - 1)
    x, y = g.decode(data.draw(code)), g.decode(data.draw(code))
    assert g.generates_fast(x, y) == g.generates(x, y)


def test_extension_yields_automorphism_table():
    g = group_of(["L(+,+)", "R{1,3}"], 3, 4)
    pairs = enumerate_rotary_pairs(g)
    rho, tau = pairs.pair(0)
    rho2, tau2 = pairs.pair(len(pairs) - 1)
    table = extend_assignment(g, rho, tau, g, rho2, tau2)
    if table is not None:
        assert sorted(table.tolist()) == list(range(g.order))
        a, b = g.code(rho), g.code(tau)
        prod = g.mul_codes(np.array([a]), np.array([b]))[0]
        assert table[prod] == g.mul_codes(np.array([table[a]]), np.array([table[b]]))[0]
