from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from quizminer.question_bank import Question, classify, tokenize
from quizminer.retrieval import (
    BackendUnavailableError,
    CorpusFormatError,
    Document,
    LiveSearchAdapter,
    LocalCorpusIndex,
    Query,
    build_pair_plan,
    build_query_plan,
    construct_saying,
    index_corpus,
    read_corpus,
)
from quizminer.stopwords import STOPWORDS

from conftest import make_index


def q(text, choices=("a", "b", "c", "d"), answer=0, level=1):
    return Question(id="q", text=text, choices=tuple(choices),
                    correct_index=answer, level=level)


def plan_for(text, choice, **kwargs):
    question = q(text, choices=(choice, "x1", "x2", "x3"))
    return build_query_plan(question, classify(question), choice, STOPWORDS, **kwargs)


class TestQuery:
    def test_budget_enforced(self):
        with pytest.raises(ValueError, match="budget"):
            Query(terms=tuple(f"t{i}" for i in range(11)))

    def test_empty_phrase_rejected(self):
        with pytest.raises(ValueError, match="phrases"):
            Query(required_phrases=((),))

    def test_distinct_tokens_span_phrases_and_terms(self):
        query = Query(required_phrases=(("a", "b"),), terms=("b", "c"))
        assert query.distinct_tokens() == {"a", "b", "c"}


class TestBuildQueryPlan:
    def test_multiword_answer_quoted_with_terms(self):
        question = q("Who is Flash Gordon's archenemy?",
                     choices=("Ming the Merciless", "a", "b", "c"))
        plan = build_query_plan(question, classify(question), "Ming the Merciless",
                                STOPWORDS)
        first = plan.stages[0]
        assert first.required_phrases == (("ming", "the", "merciless"),)
        assert first.terms == ("flash", "gordon", "archenemy")
        assert first.exclude_extensions == ("pdf",)

    def test_truncation_keeps_earliest_terms(self):
        text = "alpha bravo charlie delta echo foxtrot golf hotel india juliett kilo lima?"
        plan = plan_for(text, "red queen")
        first = plan.stages[0]
        assert first.required_phrases == (("red", "queen"),)
        assert len(first.terms) == 8
        assert first.terms == ("alpha", "bravo", "charlie", "delta",
                               "echo", "foxtrot", "golf", "hotel")

    @pytest.mark.parametrize("choice", ["Paris", "Ming the Merciless", "H2O"])
    def test_final_stage_is_answer_tokens_only(self, choice):
        plan = plan_for("What is the capital of France?", choice)
        last = plan.stages[-1]
        assert last.required_phrases == ()
        assert list(last.terms) == tokenize(choice)

    def test_each_stage_excludes_pdf(self):
        plan = plan_for("What is the capital of France?", "Paris")
        assert all(s.exclude_extensions == ("pdf",) for s in plan.stages)

    def test_empty_question_terms_single_stage(self):
        plan = plan_for("Which of these?", "Paris")
        assert len(plan.stages) == 1
        assert plan.stages[0].terms == ("paris",)

    def test_saying_plan_leads_with_constructed_phrase(self):
        question = q("According to the proverb, all roads lead to where?",
                     choices=("Rome", "Paris", "London", "Athens"))
        plan = build_query_plan(question, classify(question), "Rome", STOPWORDS)
        assert plan.stages[0].required_phrases == (("all", "roads", "lead", "to", "rome"),)
        assert plan.stages[-1].terms == ("rome",)

    def test_stage_clamps_past_end(self):
        plan = plan_for("Which of these?", "Paris")
        assert plan.stage(99) == plan.stages[-1]


class TestConstructSaying:
    def test_wh_slot_in_trailing_clause(self):
        text = "According to the proverb, all roads lead to where?"
        assert tokenize(construct_saying(text, "Rome")) == \
            ["all", "roads", "lead", "to", "rome"]

    def test_wh_slot_without_comma(self):
        text = "What is said to be the ship of the desert?"
        assert tokenize(construct_saying(text, "Camel")) == \
            ["camel", "is", "said", "to", "be", "the", "ship", "of", "the", "desert"]

    def test_blank_substitution(self):
        text = 'Complete the saying: "a stitch in time saves ____"'
        assert tokenize(construct_saying(text, "nine")) == \
            ["a", "stitch", "in", "time", "saves", "nine"]

    def test_undetectable_template(self):
        assert construct_saying("Finish the famous phrase.", "nine") is None


class TestLocalIndex:
    def test_positional_postings(self):
        index = make_index({"d1": "a b a"})
        assert index.postings("a") == {"d1": (0, 2)}
        assert index.postings("b") == {"d1": (1,)}

    def test_empty_corpus_counts_zero(self):
        index = LocalCorpusIndex([])
        assert index.count_results(Query(terms=("anything",))) == 0

    def test_conjunctive_count_on_mini_corpus(self, mini_index):
        assert mini_index.count_results(Query(terms=("capital", "france", "paris"))) == 1

    def test_phrase_requires_consecutive(self):
        index = make_index({"d1": "the tower eiffel stands"})
        assert index.count_results(Query(required_phrases=(("eiffel", "tower"),))) == 0
        index2 = make_index({"d1": "the eiffel tower stands"})
        assert index2.count_results(Query(required_phrases=(("eiffel", "tower"),))) == 1

    def test_top_documents_returns_all_when_k_large(self, mini_index):
        docs = mini_index.top_documents(Query(terms=("paris",)), k=50)
        assert [d.id for d in docs] == ["d1"]

    def test_tie_breaks_by_ascending_id(self):
        index = make_index({"d2": "apple pie", "d1": "apple tart"})
        docs = index.top_documents(Query(terms=("apple",)), k=5)
        assert [d.id for d in docs] == ["d1", "d2"]

    def test_frequency_orders_before_id(self):
        index = make_index({"d1": "apple", "d2": "apple apple apple"})
        docs = index.top_documents(Query(terms=("apple",)), k=5)
        assert [d.id for d in docs] == ["d2", "d1"]

    def test_no_match_consistent_with_count(self, mini_index):
        query = Query(terms=("zanzibar",))
        assert mini_index.count_results(query) == 0
        assert mini_index.top_documents(query) == []

    def test_pdf_excluded_only_when_requested(self):
        index = make_index(
            {"d1": "capital of france paris"},
            urls={"d1": "https://example.org/doc.pdf"},
        )
        with_exclusion = Query(terms=("paris",), exclude_extensions=("pdf",))
        without = Query(terms=("paris",))
        assert index.count_results(with_exclusion) == 0
        assert index.count_results(without) == 1

    def test_duplicate_doc_id_rejected(self):
        docs = [Document(id="d1", tokens=("a",)), Document(id="d1", tokens=("b",))]
        with pytest.raises(CorpusFormatError, match="duplicate"):
            LocalCorpusIndex(docs)

    def test_count_equals_unbounded_top_documents(self, mini_index):
        query = Query(terms=("capital",))
        assert mini_index.count_results(query) == \
            len(mini_index.top_documents(query, k=10**6))


class TestCorpusIO:
    def test_jsonl_round_trip(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            json.dumps({"id": "d1", "url": "u", "text": "hello world"}) + "\n",
            encoding="utf-8",
        )
        docs = read_corpus(path)
        assert docs == [Document(id="d1", source_name="u", tokens=("hello", "world"))]

    def test_directory_of_text_files(self, tmp_path):
        (tmp_path / "a.txt").write_text("alpha beta", encoding="utf-8")
        (tmp_path / "b.txt").write_text("gamma", encoding="utf-8")
        docs = read_corpus(tmp_path)
        assert [d.id for d in docs] == ["a.txt", "b.txt"]

    def test_missing_source_raises(self, tmp_path):
        with pytest.raises(CorpusFormatError, match="no such corpus"):
            read_corpus(tmp_path / "nope.jsonl")

    def test_record_without_text_names_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "d1"}\n', encoding="utf-8")
        with pytest.raises(CorpusFormatError, match=":1:"):
            read_corpus(path)

    def test_reindex_is_bit_stable(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text(
            "\n".join(
                json.dumps({"id": f"d{i}", "text": f"word{i} shared tokens"})
                for i in range(5)
            ),
            encoding="utf-8",
        )
        out1, out2 = tmp_path / "i1.json", tmp_path / "i2.json"
        index_corpus(corpus).save(out1)
        index_corpus(corpus).save(out2)
        assert out1.read_bytes() == out2.read_bytes()

    def test_save_load_round_trip(self, tmp_path, mini_index):
        path = tmp_path / "index.json"
        mini_index.save(path)
        loaded = LocalCorpusIndex.load(path)
        query = Query(terms=("capital", "france"))
        assert loaded.count_results(query) == mini_index.count_results(query)


def _matching_ids(index, query):
    return {d.id for d in index.top_documents(query, k=10**6)}


class TestWeakeningProperty:
    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_later_stages_match_supersets(self, data):
        vocab = ["alpha", "bravo", "charlie", "delta", "echo", "paris", "rome"]
        texts = {
            f"d{i}": " ".join(data.draw(st.lists(st.sampled_from(vocab), min_size=1,
                                                 max_size=12)))
            for i in range(6)
        }
        index = make_index(texts)
        words = data.draw(st.lists(st.sampled_from(vocab), min_size=1, max_size=6))
        choice = data.draw(st.sampled_from(["paris", "red queen", "rome"]))
        plan = plan_for("which " + " ".join(words) + "?", choice)
        previous = _matching_ids(index, plan.stages[0])
        for stage in plan.stages[1:]:
            current = _matching_ids(index, stage)
            assert previous <= current
            previous = current

    def test_pair_plan_weakens_too(self, mini_index):
        plan = build_pair_plan(("capital", "france"), "Ming the Merciless")
        previous = _matching_ids(mini_index, plan.stages[0])
        for stage in plan.stages[1:]:
            current = _matching_ids(mini_index, stage)
            assert previous <= current
            previous = current
        assert plan.stages[-1].terms == ("ming", "the", "merciless")


class _StubAdapter(LiveSearchAdapter):
    def __init__(self, cache_dir, payloads=None, fail=False):
        super().__init__("stub", cache_dir)
        self.calls = 0
        self.fail = fail
        self.payloads = payloads or {}

    def fetch(self, rendered_query):
        self.calls += 1
        if self.fail:
            raise BackendUnavailableError("service down", retry_after=30.0)
        return self.payloads.get(rendered_query, {"count": 0, "documents": []})


class TestLiveAdapterShell:
    def test_render_query_syntax(self, tmp_path):
        adapter = _StubAdapter(tmp_path)
        rendered = adapter.render_query(
            Query(required_phrases=(("ming", "the", "merciless"),),
                  terms=("flash", "gordon"), exclude_extensions=("pdf",))
        )
        assert rendered == '"ming the merciless" flash gordon -filetype:pdf'

    def test_responses_cached_on_disk(self, tmp_path):
        query = Query(terms=("paris",))
        adapter = _StubAdapter(
            tmp_path, payloads={"paris": {"count": 3, "documents": []}}
        )
        assert adapter.count_results(query) == 3
        assert adapter.count_results(query) == 3
        assert adapter.calls == 1
        fresh = _StubAdapter(tmp_path)
        assert fresh.count_results(query) == 3
        assert fresh.calls == 0

    def test_unavailable_carries_retry_after(self, tmp_path):
        adapter = _StubAdapter(tmp_path, fail=True)
        with pytest.raises(BackendUnavailableError) as exc:
            adapter.count_results(Query(terms=("paris",)))
        assert exc.value.retry_after == 30.0

    def test_documents_tokenized_like_corpus(self, tmp_path):
        payload = {"count": 1, "documents": [
            {"id": "w1", "url": "https://x.test/a", "text": "The Eiffel Tower"}
        ]}
        adapter = _StubAdapter(tmp_path, payloads={"eiffel": payload})
        docs = adapter.top_documents(Query(terms=("eiffel",)))
        assert docs[0].tokens == ("the", "eiffel", "tower")
