import numpy as np
import pytest

from cayley_ci import fingerprints as fp
from cayley_ci.errors import TableDeviationError

from oracles import common_neighbours, counts_from_identity_nd

TABLE = [
    ("v1-v5", 865),
    ("v2+v3-v4+v5", 163),
    ("v3-v4+v5", 487),
    ("v4+v5", 811),
    ("v5", 703),
    ("v2+v5", 702),
    ("v4", 650),
    ("v5-v4", 812),
    ("v1", 380),
    ("-v1-v5", 704),
    ("v3+v4+v5", 486),
    ("-v3-v5", 810),
    ("v2-v3-v4+v5", 648),
    ("-v2+v4-v5", 486),
]


@pytest.fixture(scope="module")
def oracle_counts(gamma1, gamma2):
    return [counts_from_identity_nd([c.coords for c in g.conn], 3, 8).ravel() for g in (gamma1, gamma2)]


def test_table_matches_shipped_preset(preset):
    assert [(r["vertex"], r["count"]) for r in preset.expected["mutual_counts"]] == TABLE


def test_mutual_table(gamma1, gamma2, spec):
    rows = fp.mutual_table([gamma1, gamma2], TABLE)
    assert all(r.ok for r in rows)
    for r, (_, want) in zip(rows, TABLE):
        assert r.counts == (want, want)
    # spot-check against direct set intersection
    conn = [c.coords for c in gamma1.conn]
    for v, want in TABLE[:3]:
        assert common_neighbours(conn, spec.zero.coords, spec.parse(v).coords, 3) == want


def test_table_deviation_reported(gamma1, gamma2):
    bad = [("v1-v5", 866), ("v5", 703)]
    with pytest.raises(TableDeviationError) as info:
        fp.mutual_table([gamma1, gamma2], bad)
    assert info.value.deviations == [("v1-v5", 866, (865, 865))]
    rows = fp.mutual_table([gamma1, gamma2], bad, strict=False)
    assert [r.ok for r in rows] == [False, True]


def test_counts_match_oracle(gamma1, gamma2, oracle_counts):
    assert np.array_equal(gamma1.mutual_counts_from_identity, oracle_counts[0])
    assert np.array_equal(gamma2.mutual_counts_from_identity, oracle_counts[1])


def test_outside_bound(gamma1, gamma2, spec, oracle_counts):
    for g, oracle in zip((gamma1, gamma2), oracle_counts):
        value, witness = fp.max_mutual_outside_b0(g)
        assert value == int(oracle[243:].max()) == 503
        assert value <= 587
        assert witness.block != (0, 0, 0)
        assert g.mutual_count_with_identity(witness) == value
    assert fp.max_mutual_outside_b0(gamma1)[1] == spec.parse("w1+w2+w3")
    assert fp.max_mutual_outside_b0(gamma2)[1] == spec.parse("w1+w2+w3+v5")


def test_base_block_equality(gamma1, gamma2, oracle_counts):
    ok, witness = fp.verify_b0_count_equality(gamma1, gamma2)
    assert ok and witness is None
    assert np.array_equal(oracle_counts[0][:243], oracle_counts[1][:243])
    # the graphs do differ elsewhere
    assert not np.array_equal(oracle_counts[0], oracle_counts[1])
    ok, witness = fp.verify_b0_count_equality(gamma1, gamma2, (1, 1, 1))
    assert not ok and witness.block == (1, 1, 1)


def test_above_bound_vertices(preset, gamma1, gamma2, spec):
    for g in (gamma1, gamma2):
        for v in preset.chain["above_bound"]:
            assert g.mutual_count_with_identity(spec.parse(v)) > 587
        high = np.nonzero(g.mutual_counts_from_identity > 587)[0]
        assert all(spec.from_code(int(c)).block == (0, 0, 0) for c in high)


def test_base_pairs_have_distinct_counts(preset, gamma1):
    base = preset.family((0, 0, 0)).expand()
    counts = [gamma1.mutual_count_with_identity(g) for g in base]
    assert len(set(counts)) == 5


def test_fixing_steps(preset, gamma1, gamma2, spec):
    for step in preset.chain["fixing_steps"]:
        pivot = spec.parse(step["pivot"])
        a, b = (spec.parse(x) for x in step["pair"])
        assert a == -b
        for g in (gamma1, gamma2):
            assert g.mutual_neighbour_count(pivot, a) != g.mutual_neighbour_count(pivot, b)


def test_span_codes(spec):
    h = fp.span_codes(spec, [spec.gen("v1"), spec.gen("v3"), spec.parse("v1+v3")])
    assert len(h) == 9
    assert 0 in h


def test_distinguishers(preset, gamma1, gamma2):
    claims = [fp.DistinguisherClaim.from_json(c) for c in preset.chain["distinguishers"]]
    results = {r.name: r for r in fp.block_distinguishers([gamma1, gamma2], claims)}
    for name in ("a", "b", "c", "d'"):
        assert results[name].holds, name
        assert results[name].gating
    # the literal fourth claim, stated for translations by v1..v4, picks out no block
    assert not results["d"].holds
    assert not results["d"].gating
    assert results["d"].qualifying == [[], []]


def test_s111_stabiliser(preset, spec):
    s111 = preset.family_sets("S")[(1, 1, 1)]
    t111 = preset.family_sets("T")[(1, 1, 1)]
    assert not s111.same_elements(t111)
    for name in ("v1", "v2", "v3", "v4"):
        assert not s111.shifted(spec.gen(name)).same_elements(s111)
    for expr in ("v1-v5", "v2-v5", "v3+v5", "v4+v5"):
        assert s111.shifted(spec.parse(expr)).same_elements(s111)
        assert t111.shifted(spec.parse(expr)).same_elements(t111)


def test_vacuous_blocks_excluded(gamma1, spec):
    # e has no neighbours in B_{1,2,0}, which would otherwise qualify for any H
    assert (1, 2, 0) not in fp.blocks_translation_closed(gamma1, [spec.gen("v1")])
