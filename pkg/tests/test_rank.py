import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grank.formats import corpus_names, load_corpus
from grank.rank import (
    FiberData,
    RankCertificate,
    RankConfig,
    abelian_image_index,
    emit_report,
    generation_test,
    grushko_rank,
    parse_c2,
    rank,
    verify_certificate,
)
from grank.words import Alphabet, Word, presentation

W = Alphabet.of("abcd").parse
F2 = presentation("ab")
GENUS2 = load_corpus("genus2").presentation
Z2 = load_corpus("z2").presentation


def test_generation_examples():
    yes = generation_test(F2, [W("ab"), W("b")])
    assert yes.verdict == "yes" and yes.index == 1
    no = generation_test(F2, [W("aa"), W("b")])
    assert (no.verdict, no.method, no.index) == ("no", "abelianization", 2)
    no = generation_test(F2, [W("aabAB"), W("b")])  # abelian image is everything
    assert (no.verdict, no.method) == ("no", "folding") and no.obstruction
    assert abelian_image_index(F2, [W("aa"), W("b")]) == 2
    assert generation_test(GENUS2, [W("a"), W("b"), W("c")]).verdict == "no"
    assert abelian_image_index(GENUS2, [W("a"), W("b"), W("c")]) is None


def test_generation_in_finite_groups():
    a5 = load_corpus("a5").presentation
    assert generation_test(a5, [W("a"), W("b")]).verdict == "yes"
    assert generation_test(a5, [W("a")]).verdict == "no"


def test_grushko_examples():
    assert grushko_rank([], 2) == 2
    assert grushko_rank([GENUS2], 1) == 5
    assert grushko_rank([Z2, Z2], 0) == 4


def test_rank_examples():
    cert = rank(F2)
    assert (cert.status, cert.rank, cert.witness) == ("certified", 2, ["a", "b"])
    cert = rank(GENUS2)
    assert (cert.status, cert.rank, cert.witness) == ("certified", 4, ["a", "b", "c", "d"])
    cert = rank(presentation("abc", "abAB"))
    assert (cert.status, cert.rank) == ("certified", 3)
    assert cert.lower_bound_evidence["method"] == "grushko"


@pytest.mark.parametrize(
    "name,expected",
    [("trivial", 0), ("z3", 1), ("z5", 1), ("klein4", 2), ("s3", 2), ("a5", 2), ("dinf", 2), ("z_x_z2", 2), ("z2_free_z", 3)],
)
def test_corpus_ranks(name, expected):
    cert = rank(load_corpus(name).presentation)
    assert cert.status == "certified" and cert.rank == expected
    assert verify_certificate(cert)


def test_certificates_round_trip_through_json():
    cert = rank(GENUS2)
    again = RankCertificate.from_dict(json.loads(emit_report(cert, "json")))
    assert again == cert and verify_certificate(again)


def test_tampered_certificates_fail():
    cert = rank(GENUS2)
    d = cert.to_dict()
    d["witness"] = ["a", "b", "c", "c"]
    assert not verify_certificate(RankCertificate.from_dict(d))
    d = cert.to_dict()
    d["lower"] = d["upper"] = d["rank"] = 5
    with pytest.raises(ValueError):
        RankCertificate.from_dict(d)
    d = cert.to_dict()
    d["lower_bound_evidence"] = {**d["lower_bound_evidence"], "abelianized_rank": 5}
    assert not verify_certificate(RankCertificate.from_dict(d))


def test_search_radius_controls_the_status():
    # trefoil group <a, b | a^2 = b^3>: abelianization Z, rank 2
    p = presentation("ab", "aaBBB")
    cert = rank(p, RankConfig(max_radius=0, split=False))
    assert (cert.status, cert.rank, cert.lower, cert.upper) == ("bounded", None, 1, 2)
    assert cert.search_record["radii"]["1"]["truncated"]
    assert verify_certificate(cert)
    cert = rank(p, RankConfig(max_radius=1, split=False))
    assert (cert.status, cert.rank) == ("certified", 2)
    assert cert.hypotheses == ["torsion-free", "one-ended"]
    assert verify_certificate(cert)


def test_text_report_mentions_status():
    text = emit_report(rank(F2)).decode()
    assert "certified" in text and "(a, b)" in text


def test_config_validation():
    with pytest.raises(ValueError):
        RankConfig(delta=0)
    with pytest.raises(ValueError):
        parse_c2("cubic:1")
    assert parse_c2("linear:1,2,3")(2, 5) == 1 + 4 + 15


@given(st.sampled_from(["f2", "f3", "z2", "klein4", "s3", "dinf"]), st.integers(0, 3), st.integers(200, 4000))
def test_larger_budgets_never_change_certified_values(name, radius, budget):
    p = load_corpus(name).presentation
    base = rank(p)
    cert = rank(p, RankConfig(max_radius=radius, budget=budget))
    if base.status == "certified" and cert.status == "certified":
        assert cert.rank == base.rank


def test_fiber_branch_records_hypotheses():
    # Z^2 with fiber <a> and Z-quotient generated by b: rk(<a>) + rk_<a>(G) = 1 + 1
    cfg = RankConfig(fiber=FiberData((W("a"),), 1, (W("a"),)), split=False)
    cert = rank(Z2, cfg)
    assert cert.rank == 2 and cert.status == "certified"


def test_every_corpus_certificate_verifies():
    for name in corpus_names():
        cert = rank(load_corpus(name).presentation)
        assert cert.status == "certified", name
        assert verify_certificate(cert), name
