import json

import pytest
from hypothesis import given, strategies as st

from equiprob.tableau import (MappingId, MappingLookupError, TableauParseError, TableauSchemaError,
                              diagnose, difference_vectors, make_tableau, parse_tableau, parse_tsv,
                              serialize_tableau, serialize_tsv, validate)


def doc(**over):
    base = {"constraints": ["C"], "inputs": [{"ur": "x", "candidates": [{"sr": "y", "violations": [0]}]}],
            "metadata": {}}
    base.update(over)
    return json.dumps(base)


@st.composite
def tableaux(draw):
    n = draw(st.integers(1, 4))
    names = [f"C{k}" for k in range(n)]
    inputs = {}
    for u in range(draw(st.integers(0, 3))):
        k = draw(st.integers(1, 4))
        inputs[f"u{u}"] = [(f"s{j}", draw(st.lists(st.integers(0, 6), min_size=n, max_size=n)))
                           for j in range(k)]
    return make_tableau(names, inputs, {"note": draw(st.text(max_size=5))})


class TestParsing:
    def test_minimal(self):
        t = parse_tableau(doc())
        assert t.n == 1 and len(t.inputs) == 1

    def test_short_row_names_candidate(self):
        bad = {"ur": "x", "candidates": [{"sr": "yy", "violations": []}]}
        with pytest.raises(TableauSchemaError, match="'yy'"):
            parse_tableau(doc(inputs=[bad]))

    def test_syntax_error_has_position(self):
        with pytest.raises(TableauParseError) as exc:
            parse_tableau('{"constraints": ["C"],\n "inputs": [,]}')
        assert exc.value.line == 2

    def test_duplicate_sr(self):
        bad = {"ur": "x", "candidates": [{"sr": "y", "violations": [0]}, {"sr": "y", "violations": [1]}]}
        with pytest.raises(TableauSchemaError, match="duplicate"):
            parse_tableau(doc(inputs=[bad]))

    def test_duplicate_constraint(self):
        with pytest.raises(TableauSchemaError):
            parse_tableau(doc(constraints=["C", "C"]))

    def test_unknown_key(self):
        with pytest.raises(TableauSchemaError, match="unknown"):
            parse_tableau(doc(extra=1))

    @given(tableaux())
    def test_round_trip(self, t):
        text = serialize_tableau(t)
        again = parse_tableau(text)
        assert again == t and again.metadata == t.metadata
        assert serialize_tableau(again) == text

    @given(tableaux())
    def test_tsv_round_trip(self, t):
        if not t.inputs:
            return
        back = parse_tsv(serialize_tsv(t))  # the TSV layout has no metadata
        assert (back.constraints, back.inputs) == (t.constraints, t.inputs)

    def test_tsv_continuation_and_frequency(self):
        t = parse_tsv("UR\tSR\tA\tB\tfrequency\nx\ty\t0\t1\t3\n\tz\t1\t0\t\n")
        assert [c.sr for c in t.input("x").candidates] == ["y", "z"]
        assert t.input("x").candidates[0].frequency == 3.0

    def test_tsv_bad_integer(self):
        with pytest.raises(TableauParseError) as exc:
            parse_tsv("UR\tSR\tA\nx\ty\tq\n")
        assert (exc.value.line, exc.value.column) == (2, 3)


class TestDifferenceVectors:
    def test_identical_profiles(self):
        t = make_tableau(["A", "B"], {"x": [("y", (1, 2)), ("z", (1, 2))]})
        assert difference_vectors(t, MappingId("x", "y")) == [("z", (0, 0))]

    def test_subtraction(self):
        t = make_tableau(["A", "B"], {"x": [("y", (0, 1)), ("z", (1, 0))]})
        assert difference_vectors(t, MappingId("x", "y")) == [("z", (1, -1))]

    def test_mab_bam(self):
        # constraints (*VoicedObstruent, Ident(voice))
        t = make_tableau(["*VoicedObs", "Ident"], {
            "mab": [("map", (0, 1)), ("mab", (1, 0))],
            "bam": [("pam", (0, 1)), ("bam", (1, 0))],
        })
        assert difference_vectors(t, MappingId("mab", "map")) == [("mab", (1, -1))]
        assert difference_vectors(t, MappingId("bam", "pam")) == [("bam", (1, -1))]

    def test_unresolvable(self):
        t = make_tableau(["A"], {"x": [("y", (0,))]})
        with pytest.raises(MappingLookupError):
            difference_vectors(t, MappingId("x", "q"))
        with pytest.raises(MappingLookupError):
            difference_vectors(t, MappingId("q", "y"))

    @given(tableaux())
    def test_count_and_antisymmetry(self, t):
        for entry in t.inputs:
            for y in entry.candidates:
                vecs = dict(difference_vectors(t, MappingId(entry.ur, y.sr)))
                assert len(vecs) == len(entry.candidates) - 1
                assert all(len(v) == t.n for v in vecs.values())
                for z, v in vecs.items():
                    back = dict(difference_vectors(t, MappingId(entry.ur, z)))[y.sr]
                    assert back == tuple(-x for x in v)


class TestValidate:
    def test_fixture_clean(self, finnish):
        assert validate(finnish) == []
        assert finnish.constraints.names == ("FtBin", "PkProm", "Align-L", "*Rev", "*Flat", "*H.X",
                                             "WSP", "WSP/VV")

    def test_negative(self):
        problems = diagnose(json.loads(doc(inputs=[{"ur": "x", "candidates": [{"sr": "y", "violations": [-1]}]}])))
        assert problems == ["input 'x', candidate 'y', constraint C: violations must be nonnegative"]

    def test_duplicate_label(self):
        raw = json.loads(doc(inputs=[{"ur": "x", "candidates": [
            {"sr": "y", "violations": [0]}, {"sr": "y", "violations": [0]}]}]))
        assert any("duplicate candidate" in p for p in diagnose(raw))


class TestMappingId:
    @pytest.mark.parametrize("text", ["x -> y", "x->y", "  x ->  y ", "x:y"])
    def test_parse(self, text):
        assert MappingId.parse(text) == MappingId("x", "y")

    def test_str(self):
        assert str(MappingId("maa-nä", "maana")) == "maa-nä -> maana"
