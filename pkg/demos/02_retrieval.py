#!/usr/bin/env python3
"""Walkthrough: the three retrieval paths over one argument base.

* wizard suggestions: TF-IDF cosine, top 50, with the short-utterance rule
  (under five words the previous utterance joins the query)
* bot retrieval: Okapi BM25 plus three +1 boosts (gold argument, important
  term, overlap with the last utterance)
* keyword search: conjunctive terms, BM25-ranked, stance filterable
"""

from oumwoz.argbase import ArgumentBase, ArgumentRecord
from oumwoz.retrieval import (
    SuggestionQuery,
    boosted_retrieve,
    build_index,
    keyword_search,
    tfidf_suggest,
)

ARGUMENTS = [
    ("v1", "vaccines reduce severe illness and hospital load", "pro"),
    ("v2", "mandates limit personal freedom of choice", "con"),
    ("v3", "herd immunity protects people who cannot be vaccinated", "pro"),
    ("v4", "rushed trials made many people nervous about safety", "con"),
    ("v5", "adjuvants boost the immune response at lower doses", "pro"),
]

base = ArgumentBase(
    topic_id="vaccination",
    topic_text="COVID-19 vaccination",
    records=[
        ArgumentRecord(id=i, topic_id="vaccination", text=t, topic_stance=s,
                       depth=1, source="tree", path=("root",))
        for i, t, s in ARGUMENTS
    ],
)
index = build_index(base)
texts = {r.id: r.text for r in base.records}

print("== wizard suggestions ==")
query = SuggestionQuery("what do adjuvants actually do in a vaccine")
for rank, hit in enumerate(tfidf_suggest(index, query), start=1):
    print(f"  {rank}. {hit.base_score:.3f} [{index.stance[hit.argument_id]}] {texts[hit.argument_id]}")

print("\n== short utterance pulls in the previous one ==")
short = SuggestionQuery("yes that's true", previous_utterance="adjuvants sound risky to me")
for rank, hit in enumerate(tfidf_suggest(index, short), start=1):
    print(f"  {rank}. {hit.base_score:.3f} {texts[hit.argument_id]}")

print("\n== boosted bot retrieval ==")
results = boosted_retrieve(
    index,
    SuggestionQuery("are the vaccines safe after those rushed trials"),
    gold_ids={"v4"},              # arguments wizards actually used
    important_terms={"adjuv"},    # compiled from wizard search logs
)
for hit in results:
    print(f"  {hit.final_score:.3f} = base {hit.base_score:.3f}"
          f" +gold {hit.boost_gold} +term {hit.boost_term} +overlap {hit.boost_overlap}"
          f"  {texts[hit.argument_id]}")

print("\n== keyword search, con side only ==")
for hit in keyword_search(index, ["people"], stance_filter="con"):
    print(f"  {hit.base_score:.3f} {texts[hit.argument_id]}")
