import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import pair_tableau, vectors
from equiprob.fixtures import HARMONY_MAPPINGS, finnish_mappings, load_fixture
from equiprob.geometry import check_certificate
from equiprob.grammar import me_probability_from_diffvecs
from equiprob.tableau import MappingId, difference_vectors, diffvecs, make_tableau
from equiprob.typology import (hg_equivalent, hg_possible, me_equiprobable, me_uniform_leq_necessary,
                               shg_equiprobable, shg_uniform_leq, torder)

M = MappingId


def single(losers, n=None):
    t, a, _ = pair_tableau(losers, [], n)
    return t, a


def pairs_of_sides(n_max=3, max_losers=4):
    return st.integers(1, n_max).flatmap(
        lambda n: st.tuples(st.just(n), vectors(n, min_size=0, max_size=max_losers),
                            vectors(n, min_size=0, max_size=max_losers)))


class TestHGPossible:
    def test_no_losers(self):
        t, a = single([], 2)
        p = hg_possible(t, a)
        assert p.possible and p.witness == (0, 0)

    def test_single_loser(self):
        t, a = single([(1, -1)])
        p = hg_possible(t, a)
        assert p.possible and sum(w * c for w, c in zip(p.witness, (1, -1))) >= 1

    def test_zero_loser(self):
        t, a = single([(0, 0), (1, 0)])
        p = hg_possible(t, a)
        assert not p.possible and p.farkas == (1, 0)

    @given(st.integers(1, 3).flatmap(lambda n: vectors(n, min_size=1, max_size=4)))
    def test_certificates(self, losers):
        t, a = single(losers)
        p = hg_possible(t, a)
        if p.possible:
            assert all(x >= 0 for x in p.witness)
            assert all(sum(w * c for w, c in zip(p.witness, v)) >= 1 for v in losers)
        else:
            y = p.farkas
            assert all(x >= 0 for x in y) and sum(y) > 0
            combo = [sum(yi * v[k] for yi, v in zip(y, losers)) for k in range(len(losers[0]))]
            assert all(x <= 0 for x in combo)


class TestSHGUniform:
    def test_reflexive(self):
        t, a, _ = pair_tableau([(1, -1), (-1, 2)], [])
        v = shg_uniform_leq(t, a, a)
        assert v.holds and all(c.member for c in v.certificates.values())

    def test_b_without_losers(self):
        t, a, b = pair_tableau([(1, -1)], [], 2)
        v = shg_uniform_leq(t, a, b)
        assert v.holds and v.vacuous and not v.certificates

    def test_impossible_a(self):
        t, a, b = pair_tableau([(0, 0)], [(1, -1)])
        v = shg_uniform_leq(t, a, b)
        assert v.holds and v.vacuous

    def test_finnish_chain(self, finnish):
        j = M("j", "(kon.sul)(taa.ti.o)ja")
        c = M("c", "(sym.po)(si.u.me)ja")
        up = shg_uniform_leq(finnish, j, c)
        assert up.holds and up.exact
        for sr, cert in up.certificates.items():
            target = dict(difference_vectors(finnish, c))[sr]
            assert check_certificate(cert, target, diffvecs(finnish, j))
        down = shg_uniform_leq(finnish, c, j)
        assert not down.holds
        assert any(not cert.member for cert in down.certificates.values())

    @settings(deadline=None)
    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(*[vectors(n, min_size=0, max_size=3)] * 3)))
    def test_transitive(self, sides):
        assume(any(sides))
        n = len((sides[0] or sides[1] or sides[2])[0])
        rows = {}
        for name, losers in zip("ABC", sides):
            vecs = list(losers)
            base = [max([0] + [-v[k] for v in vecs]) for k in range(n)]
            rows[name] = [("w", tuple(base))] + [(f"z{i}", tuple(b + d for b, d in zip(base, v)))
                                                  for i, v in enumerate(vecs)]
        t = make_tableau([f"C{k}" for k in range(n)], rows)
        a, b, c = (M(x, "w") for x in "ABC")
        if shg_uniform_leq(t, a, b).holds and shg_uniform_leq(t, b, c).holds:
            assert shg_uniform_leq(t, a, c).holds


class TestMEUniform:
    def test_reflexive(self):
        t, a, _ = pair_tableau([(1, -1), (0, 3)], [])
        assert me_uniform_leq_necessary(t, a, a).holds

    def test_hull_refutes(self):
        t, a, b = pair_tableau([(2, 0), (0, 2)], [(2, 0), (0, 2), (0, 0)])
        v = me_uniform_leq_necessary(t, a, b)
        assert not v.holds and v.exact
        assert not v.certificates["z2"].member
        # at w = 0 the refutation is visible: 1/3 against 1/4
        gap = me_probability_from_diffvecs((0, 0), diffvecs(t, a)) - \
            me_probability_from_diffvecs((0, 0), diffvecs(t, b))
        assert abs(gap - 1 / 12) < 1e-15

    @pytest.mark.parametrize("la, lb, holds", [([], [], True), ([], [(1, 0)], False)])
    def test_no_losers(self, la, lb, holds):
        t, a, b = pair_tableau(la, lb, 2)
        v = me_uniform_leq_necessary(t, a, b)
        assert v.holds is holds

    def test_necessary_only_flag(self):
        t, a, b = pair_tableau([(1, 1)], [(2, 2)])
        v = me_uniform_leq_necessary(t, a, b)
        assert v.holds and not v.exact and "necessary" in v.note


class TestMEEquiprobable:
    def test_mab_bam(self):
        t = make_tableau(["*VoicedObs", "Ident"], {
            "mab": [("map", (0, 1)), ("mab", (1, 0))],
            "bam": [("pam", (0, 1)), ("bam", (1, 0))],
        })
        assert me_equiprobable(t, M("mab", "map"), M("bam", "pam")).equal

    def test_unequal_evidence(self):
        t, a, b = pair_tableau([(1, -1)], [(1, 0)])
        v = me_equiprobable(t, a, b)
        assert not v.equal
        assert v.evidence["only_a"] == [(1, -1)] and v.evidence["only_b"] == [(1, 0)]

    def test_multiplicity_matters(self):
        t, a, b = pair_tableau([(1, 0)], [(1, 0), (1, 0)])
        assert not me_equiprobable(t, a, b).equal
        assert abs(me_probability_from_diffvecs((0, 0), [(1, 0)]) - 0.5) < 1e-15
        assert abs(me_probability_from_diffvecs((0, 0), [(1, 0), (1, 0)]) - 1 / 3) < 1e-15

    def test_self(self):
        t, a, _ = pair_tableau([(2, -1)], [])
        assert me_equiprobable(t, a, a).equal

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4).flatmap(lambda n: vectors(n, min_size=0, max_size=5)), st.randoms())
    def test_equal_means_equal_probabilities(self, losers, rnd):
        shuffled = list(losers)
        rnd.shuffle(shuffled)
        n = len(losers[0]) if losers else 2
        t, a, b = pair_tableau(losers, shuffled, n)
        assert me_equiprobable(t, a, b).equal
        rng = np.random.default_rng(rnd.getrandbits(32))
        for w in rng.uniform(0, 10, size=(1000, n)):
            assert abs(me_probability_from_diffvecs(w, diffvecs(t, a))
                       - me_probability_from_diffvecs(w, diffvecs(t, b))) <= 1e-12


class TestSHGEquiprobable:
    def test_rescaled(self):
        t, a, b = pair_tableau([(-2, 5)], [(-4, 10)])
        v = shg_equiprobable(t, a, b)
        assert v.equal and v.evidence["matched"] == [(0, 0)]

    def test_harmony_fixture(self, harmony_tableau):
        assert shg_equiprobable(harmony_tableau, *HARMONY_MAPPINGS).equal

    def test_all_bounded(self):
        t, a, b = pair_tableau([(0, 3)], [(1, 1), (2, 0)])
        v = shg_equiprobable(t, a, b)
        assert v.equal and v.evidence["rays_a"] == [] == v.evidence["rays_b"]

    def test_zero_loser_flagged(self):
        t, a, b = pair_tableau([(0, 0)], [(1, -1)])
        v = shg_equiprobable(t, a, b)
        assert not v.equal and v.evidence["zero_losers_a"] == [0]

    def test_both_impossible(self):
        t, a, b = pair_tableau([(0, 0)], [(-1, -1)])
        assert shg_equiprobable(t, a, b).equal

    def test_hg_tag(self):
        t, a, b = pair_tableau([(-2, 5)], [(-4, 10)])
        v = hg_equivalent(t, a, b)
        assert v.framework == "hg" and v.equal

    @settings(deadline=None)
    @given(pairs_of_sides())
    def test_agrees_with_mutual_uniform_leq(self, data):
        n, la, lb = data
        t, a, b = pair_tableau(la, lb, n)
        assume(hg_possible(t, a) and hg_possible(t, b))
        mutual = shg_uniform_leq(t, a, b).holds and shg_uniform_leq(t, b, a).holds
        assert shg_equiprobable(t, a, b).equal == mutual

    @settings(deadline=None)
    @given(pairs_of_sides(), st.integers(2, 4))
    def test_scaling_robust(self, data, k):
        n, la, lb = data
        t, a, b = pair_tableau(la, lb, n)
        ts, as_, bs = pair_tableau([tuple(k * x for x in v) for v in la],
                                   [tuple(k * x for x in v) for v in lb], n)
        assert shg_equiprobable(t, a, b).equal == shg_equiprobable(ts, as_, bs).equal
        assert me_equiprobable(t, a, b).equal == me_equiprobable(ts, as_, bs).equal


SHG_BLOCKS = [
    ["a -> (ak.va)(rel.lis.te)ja", "b -> (pro.pa)(gan.dis.te)ja"],
    ["a -> (ak.va)(rel.lis)(tei.ta)", "b -> (pro.pa)(gan.dis)(tei.ta)"],
    ["c -> (sym.po)(si.u.me)ja", "d -> (lii.rum)(laa.ru.me)ja", "e -> (po.ly)(a.mi.de)ja",
     "f -> (in.ku)(naa.be.le)ja"],
    ["c -> (sym.po)(si.u)(mei.ta)", "d -> (lii.rum)(laa.ru)(mei.ta)", "e -> (po.ly)(a.mi)(dei.ta)",
     "f -> (in.ku)(naa.be)(lei.ta)"],
    ["g -> (o.pe)(raa.ti.o)ja", "h -> (al.le)(go.ri.o)ja", "i -> (kom.mu)(ni.ke.o)ja",
     "j -> (kon.sul)(taa.ti.o)ja"],
    ["g -> (o.pe)(raa.ti)(oi.ta)", "h -> (al.le)(go.ri)(oi.ta)", "i -> (kom.mu)(ni.ke)(oi.ta)",
     "j -> (kon.sul)(taa.ti)(oi.ta)"],
    ["k -> (ter.mos)(taat.te)ja", "l -> (mar.ga)(rii.ne)ja", "m -> (af.fri)(kaat.to)ja"],
]
# deletion chain g-j <= c-f <= a-b <= k-m, retention chain a-b <= c-f <= g-j <= k-m
SHG_EDGES = {(4, 2), (2, 0), (0, 6), (1, 3), (3, 5), (5, 6)}


def block_sets(graph):
    return {frozenset(map(str, b)) for b in graph.blocks}


def named_edges(graph):
    return {(frozenset(map(str, graph.blocks[i])), frozenset(map(str, graph.blocks[j])))
            for i, j in graph.edges}


class TestTOrder:
    def test_identical_copies(self):
        t = make_tableau(["A", "B"], {u: [("y", (0, 1)), ("z", (1, 0))] for u in "pqr"})
        g = torder(t, "shg", [M(u, "y") for u in "pqr"])
        assert len(g.blocks) == 1 and g.edges == []

    def test_finnish_seven_blocks(self, finnish):
        g = torder(finnish, "shg", finnish_mappings())
        assert block_sets(g) == {frozenset(b) for b in SHG_BLOCKS}
        want = {(frozenset(SHG_BLOCKS[i]), frozenset(SHG_BLOCKS[j])) for i, j in SHG_EDGES}
        assert named_edges(g) == want

    def test_finnish_me_necessary_two_blocks(self, finnish):
        """The two-parse fixture cannot separate c-f under ME: P(retention) = 1 - P(deletion)."""
        g = torder(finnish, "me-necessary", finnish_mappings("cdef"))
        assert block_sets(g) == {frozenset(SHG_BLOCKS[2]), frozenset(SHG_BLOCKS[3])}
        assert g.edges == []

    def test_extra_candidate_fixture_trades_blocks_for_chains(self):
        t = load_fixture("finnish-extra-candidate")
        g = torder(t, "me-necessary", finnish_mappings("cdef"))
        chains = sorted([[str(m)[0] + ("d" if str(m).endswith("ja") else "r") for m in
                          (g.blocks[i][0] for i in ch)] for ch in g.chains()])
        assert chains == [["cd", "ed", "dd", "fd"], ["cr", "er", "dr", "fr"]]
        assert len(torder(t, "shg", finnish_mappings()).blocks) > 7

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3).flatmap(lambda n: st.lists(vectors(n, min_size=0, max_size=3),
                                                        min_size=1, max_size=5)),
           st.sampled_from(["shg", "me-necessary"]))
    def test_partial_order(self, sides, framework):
        n = len(next((v for s in sides for v in s), (0, 0)))
        rows = {}
        for u, vecs in enumerate(sides):
            base = [max([0] + [-v[k] for v in vecs]) for k in range(n)]
            rows[f"u{u}"] = [("w", tuple(base))] + [(f"z{i}", tuple(b + d for b, d in zip(base, v)))
                                                     for i, v in enumerate(vecs)]
        t = make_tableau([f"C{k}" for k in range(n)], rows)
        ms = [M(u, "w") for u in rows]
        g = torder(t, framework, ms)
        flat = [m for b in g.blocks for m in b]
        assert sorted(map(str, flat)) == sorted(map(str, ms))
        for i, j in g.closure:
            assert (j, i) not in g.closure and i != j
            for k in range(len(g.blocks)):
                if (j, k) in g.closure and k != i:
                    assert (i, k) in g.closure
        for i, j in g.edges:
            assert (i, j) in g.closure

    def test_dot(self, finnish):
        g = torder(finnish, "me-necessary", finnish_mappings("cd"))
        dot = g.to_dot()
        assert dot.startswith("digraph torder {") and dot.count("b0 [label=") == 1
        g2 = torder(load_fixture("finnish-extra-candidate"), "me-necessary", finnish_mappings("cdef"))
        assert "style=dashed" in g2.to_dot()

    def test_unknown_framework(self, finnish):
        with pytest.raises(ValueError):
            torder(finnish, "ot")
