from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from quizminer.question_bank import (
    BankFormatError,
    Question,
    classify,
    load_bank,
    tokenize,
    tokenize_and_filter,
)
from quizminer.stopwords import STOPWORDS


def _record(qid="q1", level=1, question="What is the capital of France?",
            choices=("Berlin", "Paris", "Rome", "Madrid"), answer=1):
    return {"id": qid, "level": level, "question": question,
            "choices": list(choices), "answer": answer}


def _write(tmp_path, records):
    path = tmp_path / "bank.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


def question(text="What is the capital of France?", level=1):
    return Question(id="q", text=text, choices=("a", "b", "c", "d"),
                    correct_index=0, level=level)


class TestLoadBank:
    def test_round_trip_two_levels(self, tmp_path):
        path = _write(tmp_path, [_record("q1", level=1), _record("q2", level=7)])
        bank = load_bank(path)
        assert len(bank) == 2
        assert bank.by_level[1] == ("q1",)
        assert bank.by_level[7] == ("q2",)
        assert bank.get("q2").level == 7

    def test_empty_file_gives_empty_buckets(self, tmp_path):
        path = tmp_path / "bank.jsonl"
        path.write_text("", encoding="utf-8")
        bank = load_bank(path)
        assert len(bank) == 0
        assert set(bank.by_level) == set(range(1, 8))
        assert all(ids == () for ids in bank.by_level.values())

    def test_three_choices_names_line(self, tmp_path):
        bad = _record("q2")
        bad["choices"] = ["a", "b", "c"]
        path = _write(tmp_path, [_record("q1"), bad])
        with pytest.raises(BankFormatError, match="line 2"):
            load_bank(path)

    def test_answer_out_of_range(self, tmp_path):
        path = _write(tmp_path, [_record(answer=4)])
        with pytest.raises(BankFormatError, match="line 1"):
            load_bank(path)

    def test_level_out_of_range(self, tmp_path):
        path = _write(tmp_path, [_record(level=8)])
        with pytest.raises(BankFormatError, match="level"):
            load_bank(path)

    def test_duplicate_id_names_line(self, tmp_path):
        path = _write(tmp_path, [_record("q1"), _record("q1", level=2)])
        with pytest.raises(BankFormatError, match="line 2.*duplicate"):
            load_bank(path)

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "bank.jsonl"
        path.write_text('{"id": "q1"\n', encoding="utf-8")
        with pytest.raises(BankFormatError, match="line 1"):
            load_bank(path)

    def test_blank_choice_rejected(self, tmp_path):
        bad = _record()
        bad["choices"] = ["a", "  ", "c", "d"]
        path = _write(tmp_path, [bad])
        with pytest.raises(BankFormatError, match="non-empty"):
            load_bank(path)

    def test_bucket_order_preserved(self, tmp_path):
        records = [_record(f"q{i}", level=3) for i in range(5)]
        bank = load_bank(_write(tmp_path, records))
        assert bank.by_level[3] == tuple(f"q{i}" for i in range(5))


class TestClassify:
    def test_not_question_is_inverted(self):
        flags = classify(question("Which of these is not a mammal?"))
        assert flags.inverted and not flags.saying

    def test_according_marks_saying(self):
        flags = classify(question("According to the proverb, all roads lead to where?"))
        assert flags.saying and not flags.inverted

    def test_plain_question(self):
        flags = classify(question("What is the capital of France?"))
        assert not flags.inverted and not flags.saying

    def test_note_does_not_invert(self):
        assert not classify(question("Which note follows do re mi?")).inverted

    def test_according_is_case_sensitive(self):
        assert not classify(question("Winds blow according to pressure?")).saying

    @pytest.mark.parametrize("text", [
        "Who is said to haunt the tower?",
        "Who is SAID TO haunt the tower?",
        "What were travelers asked to carry?",
    ])
    def test_said_to_and_asked_to_fold_case(self, text):
        assert classify(question(text)).saying

    def test_both_flags_can_coexist(self):
        flags = classify(question("According to legend, which gift was not offered?"))
        assert flags.inverted and flags.saying


class TestTokenize:
    def test_answer_text_unfiltered(self):
        assert tokenize_and_filter("The Eiffel Tower", STOPWORDS, False) == \
            ["the", "eiffel", "tower"]

    def test_question_text_filtered(self):
        assert tokenize_and_filter("What is the capital of France?", STOPWORDS, True) == \
            ["capital", "france"]

    def test_empty_text(self):
        assert tokenize_and_filter("", STOPWORDS, True) == []
        assert tokenize_and_filter("", STOPWORDS, False) == []

    def test_possessive_stripped(self):
        assert tokenize("Flash Gordon's archenemy") == ["flash", "gordon", "archenemy"]
        assert tokenize("Fermat’s Last Theorem") == ["fermat", "last", "theorem"]

    def test_digits_kept(self):
        assert tokenize("In 1989 the wall fell") == ["in", "1989", "the", "wall", "fell"]

    def test_split_on_punctuation_runs(self):
        assert tokenize("rock-and-roll, obviously!") == ["rock", "and", "roll", "obviously"]

    @given(st.text(max_size=200))
    def test_filtered_is_subsequence_of_unfiltered(self, text):
        full = tokenize_and_filter(text, STOPWORDS, False)
        filtered = tokenize_and_filter(text, STOPWORDS, True)
        it = iter(full)
        assert all(tok in it for tok in filtered)

    @given(st.text(max_size=200))
    def test_classify_is_pure(self, text):
        q = Question(id="q", text=text, choices=("a", "b", "c", "d"),
                     correct_index=0, level=1)
        assert classify(q) == classify(q)
