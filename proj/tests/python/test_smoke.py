import pytest

import qudparse


def test_version():
    assert qudparse.__version__ == "0.1.0"


def test_validate_and_convert():
    entries = [(2, 1, "Why?"), (3, 2, "What then?")]
    assert qudparse.validate_tree(3, entries) == []
    assert qudparse.to_dep_tree(3, entries) == [0, 1, 2]
    problems = qudparse.validate_tree(3, [(2, 1, "Why?"), (3, 3, "Loop?")])
    assert any("anchor not strictly earlier" in p for p in problems)
    with pytest.raises(ValueError):
        qudparse.to_dep_tree(3, [(2, 1, "Why?")])


def test_chain_and_star_stats():
    chain = qudparse.tree_stats([0, 1, 2, 3, 4])
    assert (chain["height"], chain["norm_arc_len"], chain["prop_leaf"]) == (4.0, 0.2, 0.2)
    assert (chain["avg_depth"], chain["right_branch"]) == (2.0, 0.8)
    star = qudparse.tree_stats([0, 1, 1, 1, 1])
    assert (star["height"], star["norm_arc_len"], star["prop_leaf"]) == (1.0, 0.5, 0.8)
    assert qudparse.gap_report([0, 1, 1, 2]) == (1, 1)


def test_attachment():
    assert qudparse.attachment_score([0, 1, 2, 3], [0, 1, 1, 3]) == pytest.approx(2 / 3)
    assert qudparse.attachment_score([0, 1, 2, 3], [0, 1, 1, 3], norm_all=True) == pytest.approx(0.5)


def test_encodings():
    assert (
        qudparse.encode_anchor_query(["Rain fell.", "Streets flooded."], 2)
        == "[CLS] Streets flooded. [SEP] [sos] 1 Rain fell. [sos] 2 Streets flooded."
    )
    prompt = qudparse.encode_generation_prompt(
        ["Rain fell.", "Streets flooded.", "Hugo hit Carolina"], 3, 1, [(0, 0, "PER")], "Who?"
    )
    assert prompt == "[A_START] Rain fell. [A_END] Streets flooded. [SEP] Rain fell. [SEP] PER hit Carolina [SEP] Who?"
    assert qudparse.mask_entities("Hurricane Hugo hit Carolina", [(0, 1, "MISC")]) == "MISC MISC hit Carolina"
    with pytest.raises(ValueError):
        qudparse.mask_entities("a b c", [(0, 1, "X"), (1, 2, "Y")])


def test_mock_parse_is_a_chain():
    entries = qudparse.parse_mock(["One.", "Two.", "Three."], seed=1)
    assert [(a, b) for a, b, _ in entries] == [(2, 1), (3, 2)]
    assert entries == qudparse.parse_mock(["One.", "Two.", "Three."], seed=1)


def test_rst():
    assert qudparse.rst_to_dep("(1-3 span Root (1-2 span N (1 background S) (2 span N)) (3 elab S))") == [2, 0, 2]
    with pytest.raises(ValueError):
        qudparse.rst_to_dep("(1-2 span Root (1 elab S) (2 elab S))")


def test_agreement_helpers():
    assert qudparse.krippendorff_alpha([["a", "b"], ["b", "a"]]) == pytest.approx(-0.5)
    assert qudparse.krippendorff_alpha([["a", "a"], ["b", None], ["b", "b"]]) == 1.0
    assert qudparse.masi_distance({"elab", "cause"}, {"elab"}) == pytest.approx(2 / 3)
    assert qudparse.krippendorff_alpha([[{"x", "y"}, {"x"}], [{"z"}, {"z"}]], distance="masi") < 1.0
    assert qudparse.rerank_percentile([(1, 11), (6, 11)]) == 25.0
    assert len(qudparse.synth_negatives(["a", "b", "c", "d", "e"], 2, 4, "Why?")) == 8
