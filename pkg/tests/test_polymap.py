import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayley_ci.connection import ConnectionSet, all_blocks, inverse_closure
from cayley_ci.graph import CayleyGraph
from cayley_ci.group import GroupSpec
from cayley_ci.polymap import PolynomialMap, Term, block_translation, is_bijection, verify_isomorphism

MONOMIALS = {  # (exponents of w1, w2, w3) -> v-generator receiving the monomial
    (1, 2, 0): "v1",
    (1, 0, 2): "v2",
    (0, 2, 1): "v3",
    (0, 1, 2): "v4",
    (1, 1, 1): "v5",
}


def hand_translation(spec, w):
    """The translation on block w, evaluated term by term with plain ints."""
    out = [0] * 8
    for exps, name in MONOMIALS.items():
        value = 1
        for x, e in zip(w, exps):
            value *= x**e
        out[spec.names.index(name)] += value
    return spec.element([x % 3 for x in out])


def test_psi_matches_hand_evaluation(psi, spec):
    for w in all_blocks(spec):
        assert psi.translation_at(w) == hand_translation(spec, w)
        assert block_translation(psi, w) == hand_translation(spec, w)


@pytest.mark.parametrize(
    "vertex, image",
    [
        ("w1+w2", "w1+w2+v1"),
        ("w1+w2+w3", "w1+w2+w3+v1+v2+v3+v4+v5"),
        ("w2+w3+v2", "w2+w3+v2+v3+v4"),
        ("v1-v5", "v1-v5"),
        ("w1", "w1"),
    ],
)
def test_psi_values(psi, spec, vertex, image):
    assert psi(spec.parse(vertex)) == spec.parse(image)


def test_psi_fixes_base_block_and_axes(psi, spec):
    for w in all_blocks(spec):
        if sum(1 for x in w if x) <= 1:
            assert psi.translation_at(w).is_identity()


def test_psi_is_bijection(psi):
    assert is_bijection(psi)
    assert sorted(psi.table.tolist()) == list(range(6561))


def test_psi_isomorphism(psi, gamma1, gamma2):
    rep = verify_isomorphism(psi, gamma1, gamma2)
    assert rep.checked == 6561 * 1522
    assert rep.mismatch_count == 0
    assert rep.is_isomorphism and rep.status == "iso"


def test_psi_digraph_isomorphism(psi, preset):
    rep = verify_isomorphism(psi, preset.graph("dgamma1"), preset.graph("dgamma2"))
    assert rep.checked == 6561 * 760
    assert rep.is_isomorphism


def test_threaded_matches_serial(psi, gamma1, gamma2, preset):
    ident = preset.polymap("identity")
    a = verify_isomorphism(ident, gamma1, gamma2, threads=1, keep=20)
    b = verify_isomorphism(ident, gamma1, gamma2, threads=3, keep=20)
    assert a.mismatch_count == b.mismatch_count > 0
    assert a.mismatches == b.mismatches
    assert a.status == "not-iso"


@pytest.mark.parametrize(
    "replacement",
    [
        None,  # drop the x2^2 x3 term altogether
        Term((0, 1, 2), "v3"),
        Term((0, 2, 1), "v4"),
        Term((0, 2, 2), "v3"),
        Term((0, 1, 1), "v3"),
    ],
)
def test_other_readings_of_third_term_fail(spec, gamma1, gamma2, replacement):
    terms = []
    for exps, name in MONOMIALS.items():
        if exps == (0, 2, 1):
            if replacement is not None:
                terms.append(Term(replacement.exp, spec.gen(replacement.target)))
        else:
            terms.append(Term(exps, spec.gen(name)))
    rep = verify_isomorphism(PolynomialMap(spec, tuple(terms)), gamma1, gamma2, keep=1)
    assert rep.mismatch_count > 0


def test_counts_are_transported(psi, gamma1, gamma2, spec):
    rng = random.Random(11)
    for _ in range(40):
        x, y = spec.from_code(rng.randrange(6561)), spec.from_code(rng.randrange(6561))
        assert gamma1.mutual_neighbour_count(x, y) == gamma2.mutual_neighbour_count(psi(x), psi(y))


def test_psi_does_not_map_gamma1_to_itself(psi, gamma1):
    assert not verify_isomorphism(psi, gamma1, gamma1, keep=1).is_isomorphism
    assert verify_isomorphism(PolynomialMap.identity(gamma1.spec), gamma1, gamma1).is_isomorphism


def test_mixed_directedness_rejected(psi, gamma1, preset):
    with pytest.raises(ValueError):
        verify_isomorphism(psi, gamma1, preset.graph("dgamma2"))


def test_bad_terms_rejected(spec):
    with pytest.raises(ValueError):
        PolynomialMap(spec, (Term((3, 0, 0), spec.gen("v1")),))
    with pytest.raises(ValueError):
        PolynomialMap(spec, (Term((1, 0, 0), spec.gen("w2")),))
    with pytest.raises(ValueError):
        PolynomialMap(spec, (Term((1, 0), spec.gen("v1")),))


def test_json_roundtrip(psi, spec):
    again = PolynomialMap.from_json(spec, psi.to_json())
    assert again == psi
    assert np.array_equal(again.table, psi.table)


TOY = GroupSpec(3, 3, 1, 2)


@st.composite
def toy_maps(draw):
    terms = []
    for e in range(3):
        if draw(st.booleans()):
            target = TOY.element([0, draw(st.integers(0, 2)), draw(st.integers(0, 2))])
            terms.append(Term((e,), target))
    return PolynomialMap(TOY, tuple(terms))


@settings(max_examples=50, deadline=None)
@given(toy_maps(), st.sets(st.integers(1, 26), max_size=10), st.sets(st.integers(1, 26), max_size=10))
def test_verdict_matches_dense_check(psi, a, b):
    g1 = CayleyGraph(inverse_closure(ConnectionSet(TOY, frozenset(a))))
    g2 = CayleyGraph(inverse_closure(ConnectionSet(TOY, frozenset(b))))
    perm = psi.table
    a1, a2 = g1.adjacency_matrix(), g2.adjacency_matrix()
    dense = bool((a2[np.ix_(perm, perm)] == a1).all())
    assert verify_isomorphism(psi, g1, g2).is_isomorphism == dense
    # block translation oracle: psi(g) - g depends only on the block
    for g in itertools.islice((TOY.from_code(c) for c in range(27)), 0, 27):
        assert psi(g) - g == psi.translation_at(g.block)
