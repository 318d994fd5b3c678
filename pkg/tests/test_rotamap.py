import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pxmaps import linalg
from pxmaps.census import formula_counts
from pxmaps.dihedral import A, B, MatrixRep, class_from_signature, direct_sum, enumerate_irr, realize
from pxmaps.errors import StructuralError
from pxmaps.groups import build_group, enumerate_rotary_pairs
from pxmaps.pxgraph import PXParams, build_px, isomorphic
from pxmaps.rotamap import (
    RotaryPair,
    build_from_classes,
    build_map,
    canonical_group,
    construct_rotary,
    decompose,
    decompose_module,
    direct_product,
    euler_characteristic,
    identify_classes,
    map_counts,
    map_from_json,
    map_to_json,
    maps_isomorphic,
    normalize,
    quotient_map,
    underlying_graph,
)

SMALL = [(3, 4), (3, 5), (5, 3), (7, 3), (5, 4), (11, 5)]


def classes(sigs, p, r):
    return [class_from_signature(s, p, r) for s in sigs]


def random_conjugate(rep, rng):
    p, n = rep.p, rep.degree
    while True:
        x = rng.integers(0, p, (n, n))
        if linalg.rank(x, p) == n:
            break
    xi = linalg.inverse(x, p)
    return MatrixRep(p, rep.r, x @ rep.mat_c @ xi % p, x @ rep.mat_b @ xi % p)


@pytest.mark.parametrize("p,r", SMALL)
def test_construct_rotary_for_every_irreducible(p, r):
    for cls in enumerate_irr(p, r):
        g = canonical_group((cls,), p, r)
        if cls.kind == "L" and cls.signs == (-1, 1):
            with pytest.raises(StructuralError):
                construct_rotary(g)
            pair = construct_rotary(g, x=B, y=A)
        else:
            pair = construct_rotary(g)
        expect = 2 if (cls.kind == "L" and cls.signs == (-1, -1)) else 2 * p
        assert g.element_order(pair.rho) == expect
        assert g.generates(pair.rho, pair.tau)


@pytest.mark.parametrize("p,r", [(3, 4), (5, 3), (7, 3)])
def test_normal_form(p, r):
    for cls in enumerate_irr(p, r):
        g = canonical_group((cls,), p, r)
        if g.order > 5000:
            continue
        pairs = enumerate_rotary_pairs(g)
        for idx in range(0, len(pairs), max(1, len(pairs) // 5)):
            pair = RotaryPair(g, *pairs.pair(idx))
            nf = normalize(pair)
            assert nf.rho.d == A and nf.tau.d == B and not any(nf.tau.v)
            assert maps_isomorphic(pair, nf)[0]
            assert maps_isomorphic(nf, normalize(nf))[0]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL), st.data(), st.integers(0, 2**32 - 1))
def test_identify_and_decompose_conjugated_modules(cell, data, seed):
    p, r = cell
    irr = list(enumerate_irr(p, r))
    sub = data.draw(st.lists(st.sampled_from(irr), min_size=1, max_size=3))
    if sum(c.degree for c in sub) > 8:
        return
    rep = random_conjugate(direct_sum([realize(c, p, r) for c in sub], p, r), np.random.default_rng(seed))
    assert identify_classes(rep) == tuple(sorted(sub))
    parts = decompose_module(rep)
    assert sorted(c for c, _ in parts) == sorted(sub)
    stacked = np.vstack([u for _, u in parts])
    assert linalg.rank(stacked, p) == rep.degree


@pytest.mark.parametrize("p,r,s", [(3, 4, 1), (3, 4, 2), (5, 3, 1), (5, 3, 2), (3, 5, 3), (7, 3, 1), (3, 8, 1)])
def test_map_counts_three_ways(p, r, s):
    from pxmaps.dihedral import multiplicity_free_reps

    for sub in multiplicity_free_reps(p, r, s + 1):
        pair = build_from_classes(sub, p, r)
        cmap = build_map(pair)
        assert cmap.counts == map_counts(pair) == formula_counts(sub, p, r)
        euler_characteristic(cmap)


@pytest.mark.parametrize("sigs,p,r,s", [
    (["L(+,+)", "L(+,-)"], 3, 4, 1), (["R{1,3}"], 3, 4, 1), (["R{1,2}"], 5, 3, 1),
    (["R{1,2,3,4}"], 3, 5, 3), (["L(+,+)", "R{1,3}"], 3, 4, 2), (["P{1}"], 7, 3, 1),
])
def test_underlying_graph_is_px(sigs, p, r, s):
    graph = underlying_graph(build_map(build_from_classes(classes(sigs, p, r), p, r)))
    assert graph.is_simple()
    assert isomorphic(graph, build_px(PXParams(p, r, s)))


@pytest.mark.parametrize("sig,delta", [("L(+,+)", 1), ("L(-,-)", -1), ("L(+,-)", 1)])
def test_augmented_graphs(sig, delta):
    graph = underlying_graph(build_map(build_from_classes(classes([sig], 3, 4), 3, 4)))
    assert isomorphic(graph, build_px(PXParams(3, 4, 0, delta)))


@pytest.mark.parametrize("p,r", [(3, 4), (5, 3), (3, 5), (7, 3)])
def test_reversal_constituent_forces_central_rho_square(p, r):
    # every reflection acts as -1 on L(-,-), so rho^2 has no component there;
    # with L(+,+) beside it rho^2 is central and edges come in p-fold bundles
    g = build_group(classes(["L(+,+)", "L(-,-)"], p, r), p, r)
    pairs = enumerate_rotary_pairs(g)
    assert len(pairs) > 0
    for idx in range(0, len(pairs), max(1, len(pairs) // 25)):
        rho, tau = pairs.pair(idx)
        sq = g.multiply(rho, rho)
        assert sq.d == (0, 0) and sq.v[1] == 0 and sq.v[0] != 0
        graph = underlying_graph(build_map(RotaryPair(g, rho, tau)))
        assert set(graph.edges.values()) == {p}
        assert isomorphic(graph, build_px(PXParams(p, p * r, 0)))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(3, 4), (5, 3), (3, 5), (7, 3)]), st.data())
def test_direct_product_round_trip(cell, data):
    p, r = cell
    irr = [c for c in enumerate_irr(p, r) if not (c.kind == "L" and c.signs == (-1, 1))]
    sub = sorted(data.draw(st.lists(st.sampled_from(irr), min_size=2, max_size=3, unique=True)))
    if 2 * r * p ** sum(c.degree for c in sub) > 60_000:
        return
    parts = [construct_rotary(canonical_group((c,), p, r)) for c in sub]
    prod = direct_product(parts)
    assert [f.cls for f in decompose(prod)] == sub
    assert maps_isomorphic(prod, build_from_classes(sub, p, r))[0]


def test_quotients_by_distinct_submodules_differ():
    p, r = 3, 4
    pair = build_from_classes(classes(["L(+,+)", "L(+,-)", "R{1,3}"], p, r), p, r)
    parts = decompose_module(pair.group.rep)
    quotients = []
    for k in (1, 2):
        for combo in itertools.combinations(range(len(parts)), k):
            sub = np.vstack([parts[i][1] for i in combo])
            quotients.append(quotient_map(pair, sub))
    for q1, q2 in itertools.combinations(quotients, 2):
        assert not maps_isomorphic(q1, q2)[0]


def test_entries_pairwise_non_isomorphic():
    from pxmaps.dihedral import multiplicity_free_reps

    pairs = [build_from_classes(sub, 13, 7) for sub in multiplicity_free_reps(13, 7, 2)]
    for a, b in itertools.combinations(pairs, 2):
        assert not maps_isomorphic(a, b)[0]


def test_json_round_trip_and_iso_witness():
    pair = build_from_classes(classes(["L(+,+)", "R{1,3}"], 3, 4), 3, 4)
    back = map_from_json(map_to_json(pair))
    same, witness = maps_isomorphic(pair, back)
    assert same
    assert sorted(witness.bijection.tolist()) == list(range(pair.group.order))


def test_rotary_pair_validation():
    g = canonical_group(tuple(classes(["R{1,3}"], 3, 4)), 3, 4)
    with pytest.raises(StructuralError):
        RotaryPair(g, g.identity(), g.elem([0, 0], *B))
    with pytest.raises(StructuralError):
        RotaryPair(g, g.elem([0, 0], *A), g.elem([0, 0], 1, 0))
