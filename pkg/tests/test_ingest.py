import io
import json

import pytest
from hypothesis import given, strategies as st

from cogsimp import AlignmentKind, OperationSet, OperationToken as Op
from cogsimp.ingest import (
    IngestError,
    attach_parses,
    format_conllu,
    load_coref,
    load_corpus,
    load_frequency_table,
    load_gold_labels,
    load_paraphrase_db,
    load_parse_sidecars,
    load_tagged,
    parse_conllu,
)


def jsonl(*records):
    return io.StringIO("".join(json.dumps(r) + "\n" for r in records))


def rec(i, src, tgt, **extra):
    return {"id": i, "source_sentences": src, "target_sentences": tgt, **extra}


class TestCorpus:
    def test_one_to_two(self):
        [si] = load_corpus(jsonl(rec("a", ["x y."], ["x.", "y."])))
        assert si.alignment.kind is AlignmentKind.ONE_TO_N and si.alignment.n == 2

    def test_full_deletion_dropped_when_filtering(self):
        assert load_corpus(jsonl(rec("a", ["gone."], []))) == []

    def test_insertion_kept_without_filter(self):
        [si] = load_corpus(jsonl(rec("a", [], ["new."])), filter_degenerate=False)
        assert si.alignment.kind is AlignmentKind.ZERO_TO_N and si.alignment.n == 1

    def test_errors_carry_line_numbers(self):
        with pytest.raises(IngestError, match="line 2"):
            load_corpus(io.StringIO(json.dumps(rec("a", ["x"], ["y"])) + "\n{broken\n"))
        with pytest.raises(IngestError, match="line 1"):
            load_corpus(jsonl(rec("a", [], [])))
        with pytest.raises(IngestError, match="line 1"):
            load_corpus(jsonl({"id": "a", "source_sentences": ["x"]}))
        with pytest.raises(IngestError, match="duplicate"):
            load_corpus(jsonl(rec("a", ["x"], ["y"]), rec("a", ["x"], ["y"])))

    def test_references_and_positions(self):
        [si] = load_corpus(jsonl(rec("a", ["x"], ["y"], references=[["y"], ["z", "w"]],
                                     doc_id="d", source_position=3, target_position=1)))
        assert si.references == (("y",), ("z", "w"))
        assert (si.doc_id, si.source_position, si.target_position) == ("d", 3, 1)

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda t: t != (0, 0)),
                    max_size=12))
    def test_filtered_subset_of_unfiltered(self, shapes):
        records = [rec(f"i{k}", ["s."] * m, ["t."] * n) for k, (m, n) in enumerate(shapes)]
        on = load_corpus(jsonl(*records))
        off = load_corpus(jsonl(*records), filter_degenerate=False)
        on_ids = {si.id for si in on}
        assert on_ids <= {si.id for si in off}
        assert all(si.alignment.degenerate for si in off if si.id not in on_ids)
        assert not any(si.alignment.degenerate for si in on)


CONLLU = """# sent_id = a:source:0
# text = He runs
1\tHe\the\tPRON\t_\tPerson=3|PronType=Prs\t2\tnsubj\t_\t_
2\truns\trun\tVERB\t_\tPerson=3|Tense=Pres\t0\troot\t_\t_

# sent_id = a:target:0
1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_
1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_
2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_
2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_
3\trun\trun\tVERB\t_\t_\t0\troot\t_\t_
"""


class TestConllu:
    def test_minimal_tree(self):
        first, second = parse_conllu(CONLLU)
        assert first.id == "a:source:0"
        assert [t.head for t in first.tokens] == [2, 0]

    def test_feats(self):
        first = parse_conllu(CONLLU)[0]
        assert dict(first.tokens[1].feats) == {"Person": "3", "Tense": "Pres"}
        assert dict(parse_conllu(CONLLU)[1].tokens[0].feats) == {}

    def test_multiword_and_empty_nodes_skipped(self):
        second = parse_conllu(io.StringIO(CONLLU))[1]
        assert [t.surface for t in second.tokens] == ["do", "n't", "run"]

    def test_round_trip(self):
        sents = parse_conllu(CONLLU)
        again = parse_conllu(format_conllu(sents))
        assert again == sents

    @pytest.mark.parametrize("body", [
        "1\tx\tx\tX\t_\t_\tzero\troot\t_\t_\n",
        "1\tx\tx\tX\t_\t_\t5\troot\t_\t_\n",
        "1\tx\tx\tX\t_\t_\n",
    ])
    def test_errors_name_sentence(self, body):
        with pytest.raises(IngestError, match="bad"):
            parse_conllu("# sent_id = bad\n" + body)

    def test_sidecars_attach_complete_sides_only(self, tmp_path):
        path = tmp_path / "p.conllu"
        path.write_text(CONLLU)
        index = load_parse_sidecars([tmp_path])
        [si] = attach_parses(load_corpus(jsonl(rec("a", ["He runs"], ["do n't run", "Extra."]))), index)
        assert si.source_parses is not None and si.target_parses is None


class TestParaphraseDB:
    def test_rules(self):
        db = load_paraphrase_db(io.StringIO("principal\tmain\t3.0\nprincipal\tmain\nin comparison\tfrom\n"))
        assert db.rules["principal"] == frozenset({"main"})
        assert db.lookup("In Comparison") == frozenset({"from"})
        assert len(db) == 2

    def test_skips_short_long_and_identity_lines(self):
        db = load_paraphrase_db(io.StringIO("lonely\na b c d e\tx\nsame\tsame\nok\tfine\n"), max_phrase_len=4)
        assert db.skipped == 3 and set(db.rules) == {"ok"}

    def test_empty_file(self):
        assert len(load_paraphrase_db(io.StringIO(""))) == 0

    def test_min_score(self):
        db = load_paraphrase_db(io.StringIO("a\tb\t0.5\nc\td\t2\n"), min_score=1.0)
        assert set(db.rules) == {"c"}

    @given(st.text(alphabet="abcXYZ ", min_size=1, max_size=8))
    def test_lookup_case_insensitive(self, w):
        db = load_paraphrase_db(io.StringIO("abc\tx\nxyz\ty\n"))
        assert db.lookup(w) == db.lookup(w.lower())


class TestLabels:
    def test_decode(self):
        labels = load_gold_labels(jsonl({"id": "a", "ops": ["REPHRASE", "DEL"]}, {"id": "b", "ops": []}))
        assert labels == {"a": OperationSet([Op.REPHRASE, Op.DEL]), "b": OperationSet()}

    def test_unknown_and_duplicate(self):
        with pytest.raises(IngestError):
            load_gold_labels(jsonl({"id": "c", "ops": ["FOO"]}))
        with pytest.raises(IngestError, match="duplicate"):
            load_gold_labels(jsonl({"id": "c", "ops": []}, {"id": "c", "ops": []}))

    def test_tagged_round_trip(self):
        [t] = load_tagged(jsonl({"id": "a", "ops": ["DEL"], "evidence": {"DEL": ["why"]}}))
        assert t.id == "a" and t.ops == OperationSet([Op.DEL])


class TestCoref:
    def test_chain(self):
        layers = load_coref(jsonl({"id": "a", "chains": [[
            {"side": "source", "sent": 0, "start": 0, "end": 0, "is_pronoun": True},
            {"side": "target", "sent": 0, "start": 0, "end": 0}]]}))
        [chain] = layers["a"].chains
        assert len(chain) == 2 and chain[0].is_pronoun and not chain[1].is_pronoun

    def test_empty_layer(self):
        assert load_coref(jsonl({"id": "a", "chains": []}))["a"].chains == ()

    def test_errors(self):
        m = {"side": "source", "sent": 0, "start": 0, "end": 0}
        with pytest.raises(IngestError):
            load_coref(jsonl({"id": "a", "chains": [[m]]}))
        with pytest.raises(IngestError):
            load_coref(jsonl({"id": "a", "chains": [[m, {**m, "start": 2, "end": 1}]]}))

    def test_validate_against_instance(self):
        [si] = load_corpus(jsonl(rec("a", ["He left."], ["Tom left."])))
        m = {"side": "target", "sent": 0, "start": 0, "end": 9}
        layer = load_coref(jsonl({"id": "a", "chains": [[{**m, "end": 0}, m]]}))["a"]
        with pytest.raises(IngestError):
            layer.validate(si)


class TestFrequency:
    def test_list_and_pairs(self):
        assert load_frequency_table(io.StringIO("the\nof\n")).ranks == {"the": 1, "of": 2}
        table = load_frequency_table(io.StringIO("cat\t512\n"))
        assert table.rank("Cat") == 512

    def test_unknown_gets_max_plus_one(self):
        table = load_frequency_table(io.StringIO("a\t3\nb\t7\n"))
        assert table.rank("zebra") == 8

    def test_non_positive(self):
        with pytest.raises(IngestError):
            load_frequency_table(io.StringIO("a\t0\n"))
