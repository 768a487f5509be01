import io
import json
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grank.cli import main
from grank.formats import InputFile, ParseError, corpus_names, emit_input, load_corpus, parse_input
from grank.words import Alphabet, Presentation, Word

CORPUS = resources.files("grank") / "corpus"


def path(name):
    return str(CORPUS / f"{name}.grp")


def test_parse_minimal_file():
    f = parse_input(b"gens a b\nrel abAB\n")
    assert f.presentation.alphabet.names == ("a", "b")
    assert f.presentation.relators == (Word((1, 2, -1, -2)),)


def test_unknown_letter_reports_its_column():
    with pytest.raises(ParseError) as exc:
        parse_input("gens a b\nrel abxA\n")
    assert (exc.value.line, exc.value.column) == (2, 7)


@pytest.mark.parametrize(
    "text",
    ["rel ab\n", "gens a a\n", "gens ab\n", "gens a\nrel 1\n", "gens a\nfoo a\n", "gens a\nsub H a\nsub H a\n", "gens a\ngens b\n"],
)
def test_malformed_files(text):
    with pytest.raises(ParseError):
        parse_input(text)


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_round_trip(name):
    f = load_corpus(name)
    assert parse_input(emit_input(f)) == f


gen_names = st.lists(st.sampled_from("abcdef"), min_size=1, max_size=4, unique=True)


@given(gen_names.flatmap(lambda names: st.tuples(
    st.just(names),
    st.lists(st.lists(st.sampled_from([s * (k + 1) for k in range(len(names)) for s in (1, -1)]), min_size=1, max_size=6), max_size=3),
    st.lists(st.lists(st.sampled_from([s * (k + 1) for k in range(len(names)) for s in (1, -1)]), max_size=5), max_size=3),
)))
def test_emit_parse_is_stable(case):
    names, rels, tup = case
    rels = [Word(r) for r in rels]
    rels = [r for r in rels if r]
    p = Presentation(Alphabet(tuple(names)), tuple(rels), name="G")
    f = InputFile(p, {}, {"T": tuple(Word(w) for w in tup)} if tup else {})
    once = parse_input(emit_input(f))
    assert once == parse_input(emit_input(once))
    assert once.presentation.relators == p.relators


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_cli_rank_json_mirrors_certificate_fields():
    code, text = run("rank", path("genus2"), "--json")
    assert code == 0
    d = json.loads(text)
    assert list(d) == [
        "group_id", "rank", "lower", "upper", "witness", "lower_bound_evidence",
        "upper_bound_evidence", "search_record", "status", "hypotheses",
    ]
    assert d["rank"] == 4 and d["status"] == "certified"


def test_cli_exit_codes(tmp_path):
    trefoil = tmp_path / "trefoil.grp"
    trefoil.write_text("gens a b\nrel aaBBB\n")
    assert run("rank", str(trefoil), "--max-radius", "0")[0] == 2
    assert run("coset", path("f2"), "--sub", "A", "--max-cosets", "50")[0] == 2
    assert run("kb", path("genus2"), "--max-rules", "20")[0] == 2
    assert run("coset", path("f2"), "--sub", "nope")[0] == 1
    assert run("rank", str(tmp_path / "missing.grp"))[0] == 1
    bad = tmp_path / "bad.grp"
    bad.write_text("gens a\nrel ax\n")
    assert run("rank", str(bad))[0] == 1


def test_cli_commands():
    code, text = run("coset", path("a5"), "--sub", "A")
    assert code == 0 and text.startswith("index 30")
    code, text = run("kb", path("z3"))
    assert code == 0 and "confluent" in text
    code, text = run("nielsen", path("f2"), "--tuple", "T")
    assert code == 0 and "reduced (a, b)" in text
    code, text = run("nielsen", path("dinf"), "--tuple", "T")
    assert code == 0 and "generates yes" in text
    code, text = run("classes", path("s3"), "--k", "2")
    assert code == 0 and "classes 1" in text
    code, text = run("vc-rank", path("dinf"), "--z", "Z")
    assert code == 0 and "relative rank 1" in text
    code, text = run("geometry", path("f2"), "--radius", "2", "--u", "A")
    assert code == 0 and "vertices 17" in text and "thinness 0" in text
    code, text = run("constants", "--k", "3", "--delta", "1", "--L", "10", "--c2", "const:5")
    assert code == 0 and "R(3,3) = 170" in text
