import math

import pytest

from debate_forge.corpus import ExamplePair
from debate_forge.generation import GenerationRequest
from debate_forge.retrieval import (
    EmptyIndex,
    RetrievalBackend,
    build_retrieval_index,
    generate_retrieval,
)
from debate_forge.tokens import EOS


def pair(prompt, response):
    return ExamplePair(
        prompt=tuple(prompt),
        response=tuple(response),
        strategy="Supportive",
        tree_id="t",
        node_ids=("1.1",),
        split_index=1,
    )


def test_index_requires_pairs():
    with pytest.raises(EmptyIndex):
        build_retrieval_index([])


def test_self_query_returns_own_response():
    pairs = [
        pair(["cats", "purr", "softly"], ["r1", EOS]),
        pair(["dogs", "bark", "loudly"], ["r2", EOS]),
        pair(["birds", "sing", "sweetly"], ["r3", EOS]),
    ]
    index = build_retrieval_index(pairs)
    for p in pairs:
        req = GenerationRequest(prompt=p.prompt, max_tokens=10)
        assert generate_retrieval(index, req) == p.response


def test_no_overlap_falls_back_to_first_pair():
    pairs = [pair(["alpha"], ["r1", EOS]), pair(["beta"], ["r2", EOS])]
    index = build_retrieval_index(pairs)
    out = generate_retrieval(index, GenerationRequest(prompt=("gamma",), max_tokens=10))
    assert out == ("r1", EOS)


def test_tie_keeps_earliest_pair():
    # identical prompts: both score 1.0 against the query, first wins
    pairs = [pair(["same", "words"], ["early", EOS]), pair(["same", "words"], ["late", EOS])]
    index = build_retrieval_index(pairs)
    out = generate_retrieval(index, GenerationRequest(prompt=("same", "words"), max_tokens=10))
    assert out == ("early", EOS)


def test_cosine_hand_computation_selects_expected_pair():
    # N=2 documents. "shared" appears in both (idf ln(1) = 0, contributes
    # nothing); "only1" and "only2" each have idf ln 2.
    pairs = [
        pair(["shared", "only1"], ["r1", EOS]),
        pair(["shared", "only2", "only2"], ["r2", EOS]),
    ]
    index = build_retrieval_index(pairs)

    idf = math.log(2)
    w_only1 = math.log(2) * idf           # tf 1 in doc 1
    w_only2 = math.log(3) * idf           # tf 2 in doc 2

    # query mentions only2 once
    q = math.log(2) * idf
    sim1 = 0.0
    sim2 = (q * w_only2) / (q * w_only2)  # parallel vectors
    assert sim2 > sim1
    out = generate_retrieval(index, GenerationRequest(prompt=("shared", "only2"), max_tokens=10))
    assert out == ("r2", EOS)
    assert w_only1 > 0  # sanity on the hand numbers


def test_response_respects_max_tokens():
    pairs = [pair(["q"], ["a", "b", "c", "d", EOS])]
    index = build_retrieval_index(pairs)
    out = generate_retrieval(index, GenerationRequest(prompt=("q",), max_tokens=2))
    assert out == ("a", "b", EOS)


def test_backend_wrapper(f1_corpus):
    index = build_retrieval_index(f1_corpus.train)
    backend = RetrievalBackend(index)
    out = backend.generate(GenerationRequest(prompt=f1_corpus.train[0].prompt, max_tokens=60))
    assert out == f1_corpus.train[0].response
