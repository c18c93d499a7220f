import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayley_ci.connection import ConnectionSet, inverse_closure
from cayley_ci.errors import CapacityError, CheckpointError, SpecMismatchError
from cayley_ci.graph import CayleyGraph
from cayley_ci.group import GroupSpec
from cayley_ci.search import (
    LinearAutomorphism,
    SearchFamily,
    apply_to_set,
    compose,
    det_mod_p,
    general_search_with_pruning,
    search_constrained,
)

from oracles import automorphisms_mapping, det3, matvec

TOYS = [GroupSpec(3, 2, 1, 1), GroupSpec(3, 3, 1, 2), GroupSpec(3, 3, 2, 1)]


def as_key(a):
    return tuple(tuple(r) for r in a.matrix)


@st.composite
def toy_problem(draw, closed=True):
    spec = draw(st.sampled_from(TOYS))
    codes = st.sets(st.integers(1, spec.order - 1), max_size=6)
    src = ConnectionSet(spec, frozenset(draw(codes)))
    if draw(st.booleans()):
        # plant a target in the orbit of the source
        m = draw(st.sampled_from(_gl(spec.n)))
        tgt = apply_to_set(LinearAutomorphism(spec, m), src)
    else:
        tgt = ConnectionSet(spec, frozenset(draw(codes)))
    if closed:
        src, tgt = inverse_closure(src), inverse_closure(tgt)
    return spec, src, tgt


def _gl(n):
    from oracles import general_linear_group

    return general_linear_group(n, 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=9, max_size=9))
def test_det_matches_cofactor_oracle(entries):
    m = [entries[0:3], entries[3:6], entries[6:9]]
    assert det_mod_p(m, 3) == det3(m, 3)


def test_singular_rejected():
    spec = TOYS[1]
    with pytest.raises(ValueError):
        LinearAutomorphism(spec, ((1, 1, 0), (1, 1, 0), (0, 0, 1)))


@settings(max_examples=40, deadline=None)
@given(toy_problem(closed=False))
def test_search_everything_matches_gl_bruteforce(problem):
    spec, src, tgt = problem
    res = search_constrained(SearchFamily.everything(spec), src, tgt)
    oracle = automorphisms_mapping([g.coords for g in src], [g.coords for g in tgt], spec.n, 3)
    assert res.complete
    assert {as_key(a) for a in res.solutions} == set(oracle)


@settings(max_examples=40, deadline=None)
@given(toy_problem(closed=False))
def test_block_preserving_family_matches_filtered_bruteforce(problem):
    spec, src, tgt = problem
    res = search_constrained(SearchFamily.block_preserving(spec), src, tgt)
    w = spec.w_count

    def in_family(m):
        for j in range(spec.n):
            col = [m[i][j] for i in range(spec.n)]
            unit = [int(i == j) for i in range(spec.n)]
            if j >= w and col != unit:
                return False
            if j < w and col[:w] != unit[:w]:
                return False
        return True

    oracle = [m for m in automorphisms_mapping([g.coords for g in src], [g.coords for g in tgt], spec.n, 3) if in_family(m)]
    assert {as_key(a) for a in res.solutions} == set(oracle)


@settings(max_examples=30, deadline=None)
@given(toy_problem(closed=True))
def test_general_search_matches_gl_bruteforce(problem):
    spec, src, tgt = problem
    res = general_search_with_pruning(CayleyGraph(src), CayleyGraph(tgt))
    oracle = automorphisms_mapping([g.coords for g in src], [g.coords for g in tgt], spec.n, 3)
    assert res.complete
    assert {as_key(a) for a in res.solutions} == set(oracle)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(_gl(3)), st.sampled_from(_gl(3)), st.integers(0, 26))
def test_compose_and_apply(m1, m2, code):
    spec = TOYS[1]
    a, b = LinearAutomorphism(spec, m1), LinearAutomorphism(spec, m2)
    g = spec.from_code(code)
    assert compose(a, b)(g) == b(a(g))
    assert a(g).coords == matvec(m1, g.coords, 3)
    assert int(a.apply_codes(np.array([code]))[0]) == a(g).code


def test_inversions(preset, spec):
    sigma = LinearAutomorphism.negation(spec)
    sigma_w = LinearAutomorphism.negate_w(spec)
    ident = LinearAutomorphism.identity(spec)
    assert compose(sigma, sigma) == ident
    assert compose(sigma_w, sigma_w) == ident
    assert sigma(spec.parse("w1+v2")) == spec.parse("-w1-v2")
    assert sigma_w(spec.parse("w1+v2")) == spec.parse("-w1+v2")
    for graph in ("gamma1", "gamma2"):
        closed = preset.connection(graph)
        assert sigma.apply_to_set(closed).same_elements(closed)
    # sigma_W is only ever composed on the source side
    source, target = preset.connection("gamma1"), preset.connection("gamma2")
    assert sigma_w.apply_to_set(source).same_elements(source)
    assert not sigma_w.apply_to_set(target).same_elements(target)


def test_sigma_w_sends_families_to_inverses(preset, spec):
    """sigma_W fixes S_{0,0,0} and maps every other family of S into S^-1."""
    sigma_w = LinearAutomorphism.negate_w(spec)
    s_sets = preset.family_sets("S")
    for block, fam in s_sets.items():
        image = sigma_w.apply_to_set(fam)
        if block == (0, 0, 0):
            assert image.same_elements(fam)
        else:
            negated = ConnectionSet(spec, frozenset(spec.neg_codes(fam.array).tolist()))
            assert image.same_elements(negated)


def test_family_shape(spec):
    fam = SearchFamily.block_preserving(spec)
    assert fam.size == 3**15 == 14_348_907
    assert fam.digits == 15
    assert np.array_equal(fam.candidate(0), np.eye(8, dtype=np.int64))
    last = fam.candidate(fam.size - 1)
    assert (last[3:, :3] == 2).all() and (last[:3, :3] == np.eye(3)).all()


def test_family_json_roundtrip(preset, spec):
    fam = SearchFamily.from_json(spec, preset.chain["search_family"])
    assert fam == SearchFamily.block_preserving(spec)
    assert SearchFamily.from_json(spec, fam.to_json()) == fam


def test_capacity_error(spec, preset):
    c = preset.connection("gamma1")
    with pytest.raises(CapacityError):
        search_constrained(SearchFamily.block_preserving(spec), c, c, budget=10**6)


def test_spec_mismatch():
    a, b = TOYS[1], TOYS[2]
    with pytest.raises(SpecMismatchError):
        search_constrained(SearchFamily.everything(a), ConnectionSet(a, frozenset()), ConnectionSet(b, frozenset()))


def test_checkpoint_resume(tmp_path):
    spec = TOYS[1]
    rng = random.Random(5)
    src = inverse_closure(ConnectionSet(spec, frozenset(rng.sample(range(1, 27), 4))))
    fam = SearchFamily.everything(spec)
    full = search_constrained(fam, src, src, chunk=1000)
    ck = tmp_path / "ck.json"
    part = search_constrained(fam, src, src, chunk=1000, checkpoint=ck, preset_hash="h", stop_at=7000)
    assert not part.complete and part.enumerated == 7000
    assert json.loads(ck.read_text())["index"] == 7000
    rest = search_constrained(fam, src, src, chunk=1000, checkpoint=ck, preset_hash="h")
    assert rest.complete and rest.resumed_from == 7000
    assert {as_key(a) for a in rest.solutions} == {as_key(a) for a in full.solutions}
    with pytest.raises(CheckpointError):
        search_constrained(fam, src, src, checkpoint=ck, preset_hash="other")
    other = inverse_closure(ConnectionSet(spec, frozenset(c for c in range(1, 27) if c not in src.codes)))
    other = ConnectionSet(spec, frozenset(sorted(other.codes)[: len(src)]))
    assert len(other) == len(src) and not other.same_elements(src)
    with pytest.raises(CheckpointError):
        search_constrained(fam, src, other, checkpoint=ck, preset_hash="h")


def test_planted_automorphism_found(preset, spec):
    """A block-preserving beta applied to S u S^-1 is recovered by the search."""
    src = preset.connection("gamma1")
    beta = LinearAutomorphism.from_images(
        spec,
        [spec.parse("w1+v2"), spec.parse("w2-v5"), spec.parse("w3+v1+v3")] + [spec.gen(f"v{i}") for i in range(1, 6)],
    )
    tgt = beta.apply_to_set(src)
    res = search_constrained(SearchFamily.block_preserving(spec), src, tgt)
    assert res.complete
    assert beta in res.solutions
    # the solutions form a coset of the stabiliser of the source
    assert len(res.solutions) == 729
    for a in res.solutions[:20]:
        assert a.apply_to_set(src).same_elements(tgt)


def test_general_search_partial_on_paper(gamma1, gamma2):
    res = general_search_with_pruning(gamma1, gamma2, budget=2000)
    assert not res.complete
    assert not res.to_json()["certificate"]
    assert res.class_sizes["v5"] == 2


def test_worker_pool_matches_serial():
    spec = TOYS[1]
    src = inverse_closure(ConnectionSet(spec, frozenset([1, 5, 13])))
    fam = SearchFamily.everything(spec)
    serial = search_constrained(fam, src, src, chunk=2000)
    pooled = search_constrained(fam, src, src, chunk=2000, threads=2)
    assert [as_key(a) for a in pooled.solutions] == [as_key(a) for a in serial.solutions]
    assert pooled.rejections_by_depth == serial.rejections_by_depth
