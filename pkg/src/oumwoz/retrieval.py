"""Term-statistics index over an argument base plus three retrieval paths.

* tfidf_suggest  - cosine-scored wizard suggestions (top 50 by default)
* boosted_retrieve - Okapi BM25 with three +1 bonuses for the bot
* keyword_search - conjunctive term search, BM25-ranked

All paths share one query-construction rule: when the last utterance is
shorter than five words and a previous utterance exists, the previous
utterance is prepended to the query.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter
from dataclasses import dataclass

from .argbase import ArgumentBase
from .errors import EmptyBase, IoError, SchemaVersionMismatch
from .textproc import TokenPipelineConfig, preprocess, word_count

INDEX_SCHEMA_VERSION = 1

SHORT_QUERY_WORDS = 5  # below this, the previous utterance joins the query
DEFAULT_LIMIT = 50


@dataclass(frozen=True)
class ScoredArgument:
    argument_id: str
    base_score: float
    boost_gold: int = 0
    boost_term: int = 0
    boost_overlap: int = 0

    @property
    def final_score(self) -> float:
        return self.base_score + self.boost_gold + self.boost_term + self.boost_overlap


@dataclass
class SuggestionQuery:
    last_utterance: str
    previous_utterance: str | None = None
    stance_filter: str | None = None  # "pro" | "con" | None
    keyword_terms: list[str] | None = None
    limit: int = DEFAULT_LIMIT

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError("limit must be >= 1")

    def effective_text(self) -> str:
        if (
            self.previous_utterance
            and word_count(self.last_utterance) < SHORT_QUERY_WORDS
        ):
            return f"{self.previous_utterance} {self.last_utterance}"
        return self.last_utterance


class RetrievalIndex:
    """Immutable term statistics for one argument base.

    Documents keep base-record order; all ranking ties break on ascending
    argument id so results are reproducible across processes.
    """

    def __init__(self, doc_ids, term_freqs, stances, fingerprint):
        self.doc_ids: list[str] = list(doc_ids)
        self.tf: dict[str, Counter] = dict(term_freqs)
        self.stance: dict[str, str] = dict(stances)
        self.pipeline_fingerprint = fingerprint
        self.N = len(self.doc_ids)
        self.doc_len = {d: sum(self.tf[d].values()) for d in self.doc_ids}
        self.avg_doc_length = (
            sum(self.doc_len.values()) / self.N if self.N else 0.0
        )
        self.df: Counter = Counter()
        for d in self.doc_ids:
            for term in self.tf[d]:
                self.df[term] += 1

    def terms_of(self, doc_id: str) -> set[str]:
        return set(self.tf[doc_id])


def build_index(base: ArgumentBase, config: TokenPipelineConfig | None = None) -> RetrievalIndex:
    if not base.records:
        raise EmptyBase(f"argument base {base.topic_id!r} has no records")
    if config is None:
        config = TokenPipelineConfig()
    term_freqs = {}
    stances = {}
    for record in base.records:
        term_freqs[record.id] = Counter(preprocess(record.text, config))
        stances[record.id] = record.topic_stance
    return RetrievalIndex(
        doc_ids=[r.id for r in base.records],
        term_freqs=term_freqs,
        stances=stances,
        fingerprint=config.fingerprint(),
    )


# ---------------------------------------------------------------------------
# TF-IDF suggestions
# ---------------------------------------------------------------------------


def _tfidf_weight(tf: int, df: int, n_docs: int) -> float:
    return (1.0 + math.log(tf)) * math.log((n_docs + 1) / (df + 1))


def tfidf_suggest(
    index: RetrievalIndex,
    query: SuggestionQuery,
    config: TokenPipelineConfig | None = None,
) -> list[ScoredArgument]:
    """Cosine similarity between (1+ln tf) * ln((N+1)/(df+1)) weighted vectors."""
    query_terms = Counter(preprocess(query.effective_text(), config))
    if not query_terms:
        return []
    q_weights = {
        t: _tfidf_weight(tf, index.df.get(t, 0), index.N) for t, tf in query_terms.items()
    }
    q_norm = math.sqrt(sum(w * w for w in q_weights.values()))
    if q_norm == 0.0:
        return []

    scored = []
    for doc_id in index.doc_ids:
        if query.stance_filter and index.stance[doc_id] != query.stance_filter:
            continue
        doc_tf = index.tf[doc_id]
        if not doc_tf:
            continue
        d_weights = {
            t: _tfidf_weight(tf, index.df[t], index.N) for t, tf in doc_tf.items()
        }
        dot = sum(q_weights[t] * d_weights[t] for t in q_weights if t in d_weights)
        if dot <= 0.0:
            continue
        d_norm = math.sqrt(sum(w * w for w in d_weights.values()))
        scored.append(ScoredArgument(doc_id, dot / (q_norm * d_norm)))
    scored.sort(key=lambda s: (-s.base_score, s.argument_id))
    return scored[: query.limit]


# ---------------------------------------------------------------------------
# BM25 and the boosted bot path
# ---------------------------------------------------------------------------


def bm25_score(
    index: RetrievalIndex,
    query_terms: list[str],
    doc_id: str,
    k1: float = 1.2,
    b: float = 0.75,
) -> float:
    """Okapi BM25 with idf(t) = ln(1 + (N - df + 0.5)/(df + 0.5))."""
    doc_tf = index.tf[doc_id]
    dl = index.doc_len[doc_id]
    norm = k1 * (1.0 - b + b * dl / index.avg_doc_length) if index.avg_doc_length else k1
    score = 0.0
    for term in query_terms:
        tf = doc_tf.get(term, 0)
        if tf == 0:
            continue
        df = index.df[term]
        idf = math.log(1.0 + (index.N - df + 0.5) / (df + 0.5))
        score += idf * (tf * (k1 + 1.0)) / (tf + norm)
    return score


def boosted_retrieve(
    index: RetrievalIndex,
    query: SuggestionQuery,
    gold_ids: set[str] | frozenset[str] = frozenset(),
    important_terms: set[str] | frozenset[str] = frozenset(),
    k1: float = 1.2,
    b: float = 0.75,
    config: TokenPipelineConfig | None = None,
) -> list[ScoredArgument]:
    """BM25 base score plus three +1 bonuses, for documents BM25 retrieved.

    Only documents with base_score > 0 appear; the overlap bonus looks at the
    last utterance alone, not the extended query. `important_terms` must
    already be preprocessed (as compile_important_terms produces them).
    """
    query_terms = preprocess(query.effective_text(), config)
    last_terms = set(preprocess(query.last_utterance, config))
    results = []
    for doc_id in index.doc_ids:
        if query.stance_filter and index.stance[doc_id] != query.stance_filter:
            continue
        base = bm25_score(index, query_terms, doc_id, k1=k1, b=b)
        if base <= 0.0:
            continue
        doc_terms = index.terms_of(doc_id)
        results.append(
            ScoredArgument(
                argument_id=doc_id,
                base_score=base,
                boost_gold=1 if doc_id in gold_ids else 0,
                boost_term=1 if doc_terms & set(important_terms) else 0,
                boost_overlap=1 if doc_terms & last_terms else 0,
            )
        )
    results.sort(key=lambda s: (-s.final_score, s.argument_id))
    return results[: query.limit]


def keyword_search(
    index: RetrievalIndex,
    terms: list[str],
    stance_filter: str | None = None,
    limit: int | None = None,
    config: TokenPipelineConfig | None = None,
) -> list[ScoredArgument]:
    """Documents containing ALL preprocessed terms, ranked by BM25."""
    search_terms = []
    for term in terms:
        search_terms.extend(preprocess(term, config))
    if not search_terms:
        return []
    needed = set(search_terms)
    results = []
    for doc_id in index.doc_ids:
        if stance_filter and index.stance[doc_id] != stance_filter:
            continue
        if not needed <= index.terms_of(doc_id):
            continue
        results.append(ScoredArgument(doc_id, bm25_score(index, search_terms, doc_id)))
    results.sort(key=lambda s: (-s.base_score, s.argument_id))
    return results[:limit] if limit is not None else results


def compile_important_terms(logs, config: TokenPipelineConfig | None = None) -> set[str]:
    """Union of preprocessed tokens across all wizard search-bar entries."""
    terms: set[str] = set()
    for log in logs:
        actions = log.get("actions", []) if isinstance(log, dict) else log.actions
        for action in actions:
            if isinstance(action, dict):
                kind = action.get("kind")
                payload = action.get("payload", {})
            else:
                kind = action.kind
                payload = action.payload
            if kind != "search":
                continue
            for term in payload.get("terms", []):
                terms.update(preprocess(term, config))
    return terms


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def save_index(index: RetrievalIndex, path) -> None:
    doc = {
        "schema_version": INDEX_SCHEMA_VERSION,
        "pipeline_fingerprint": index.pipeline_fingerprint,
        "documents": [
            {
                "id": d,
                "stance": index.stance[d],
                "tf": {t: index.tf[d][t] for t in sorted(index.tf[d])},
            }
            for d in index.doc_ids
        ],
    }
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, ensure_ascii=False, separators=(",", ":"), sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write index {path}: {exc}") from exc


def load_index(path) -> RetrievalIndex:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read index {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"index {path} is corrupt: {exc.msg}") from exc
    if doc.get("schema_version") != INDEX_SCHEMA_VERSION:
        raise SchemaVersionMismatch(INDEX_SCHEMA_VERSION, doc.get("schema_version"))
    docs = doc["documents"]
    return RetrievalIndex(
        doc_ids=[d["id"] for d in docs],
        term_freqs={d["id"]: Counter(d["tf"]) for d in docs},
        stances={d["id"]: d["stance"] for d in docs},
        fingerprint=doc["pipeline_fingerprint"],
    )
