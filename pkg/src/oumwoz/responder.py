"""The retrieval-gated template bot and the chitchat control bot.

For each participant utterance the bot retrieves boosted-BM25 arguments,
featurizes the utterance, computes a sigmoid gate probability (how much the
response should be free-form rather than argument-grounded), enumerates
hedge-prefixed and template candidates, scores them under a two-component
unigram mixture weighted by the gate, and finally re-ranks by similarity to
the retrieved argument minus similarity to its own previous utterances.
"""

from __future__ import annotations

import json
import math
import os
import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import IoError, NoCandidates, SchemaVersionMismatch, ValidationError
from .retrieval import RetrievalIndex, ScoredArgument, SuggestionQuery, boosted_retrieve
from .textproc import (
    TokenPipelineConfig,
    max_bleu_against,
    preprocess,
    sentence_bleu,
    tokenize,
)

GATE_SCHEMA_VERSION = 1

FEATURE_NAMES = (
    "word_count_norm",
    "ends_with_question",
    "top_score_norm",
    "overlap_ratio",
    "turn_index_norm",
)
FEATURE_DIM = len(FEATURE_NAMES)

WORD_COUNT_SCALE = 50.0
TURN_INDEX_SCALE = 20.0

ARGUMENT_GROUNDED = "argument_grounded"
FREE = "free"


@dataclass(frozen=True)
class ResponderState:
    """What the bot sees of a dialogue when composing the next turn."""

    last_utterance: str
    previous_utterance: str | None = None
    turn_index: int = 0
    previous_bot_utterances: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Gate (sigmoid over handcrafted features)
# ---------------------------------------------------------------------------


@dataclass
class GateModel:
    weights: np.ndarray
    bias: float
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (FEATURE_DIM,):
            raise ValidationError(f"gate weights must have shape ({FEATURE_DIM},)")
        if not (np.all(np.isfinite(self.weights)) and math.isfinite(self.bias)):
            raise ValidationError("gate parameters must be finite")


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def featurize(
    state: ResponderState,
    retrieval_results: list[ScoredArgument],
    index: RetrievalIndex | None = None,
    config: TokenPipelineConfig | None = None,
) -> np.ndarray:
    """Five features, each clamped to [0, 1]; deterministic per fixed state."""
    text = state.last_utterance
    wc = min(len(tokenize(text)) / WORD_COUNT_SCALE, 1.0)
    ends_q = 1.0 if text.strip().endswith("?") else 0.0

    top_norm = 0.0
    overlap = 0.0
    if retrieval_results:
        scores = [r.base_score for r in retrieval_results]
        hi, lo = max(scores), min(scores)
        top = retrieval_results[0].base_score
        top_norm = (top - lo) / (hi - lo) if hi > lo else 1.0
        if index is not None:
            query_terms = set(preprocess(text, config))
            if query_terms:
                doc_terms = index.terms_of(retrieval_results[0].argument_id)
                overlap = len(query_terms & doc_terms) / len(query_terms)

    turn_norm = min(state.turn_index / TURN_INDEX_SCALE, 1.0)
    vec = np.array([wc, ends_q, top_norm, overlap, turn_norm], dtype=float)
    return np.clip(vec, 0.0, 1.0)


def pgen(model: GateModel, h: np.ndarray) -> float:
    """sigma(W . h + b): probability that the response should be free-form."""
    return sigmoid(float(np.dot(model.weights, np.asarray(h, dtype=float))) + model.bias)


def gate_loss_and_grad(weights, bias, features, labels, l2):
    """Mean cross-entropy plus l2*|W|^2, with its analytic gradient."""
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    z = X @ weights + bias
    p = np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)), np.exp(z) / (1.0 + np.exp(z)))
    eps = 1e-12
    ce = -np.mean(y * np.log(p + eps) + (1.0 - y) * np.log(1.0 - p + eps))
    loss = ce + l2 * float(np.dot(weights, weights))
    resid = p - y
    grad_w = X.T @ resid / len(y) + 2.0 * l2 * weights
    grad_b = float(np.mean(resid))
    return loss, grad_w, grad_b


def train_gate(
    examples: list[tuple],
    lr: float = 0.5,
    epochs: int = 500,
    l2: float = 1e-4,
) -> GateModel:
    """Full-batch gradient descent from zero init; deterministic.

    If every label is identical the model still trains (it converges to a
    constant prediction on the right side of 0.5) and training_meta carries
    degenerate=True as the warning flag.
    """
    if not examples:
        raise ValidationError("no training examples")
    X = np.asarray([f for f, _ in examples], dtype=float)
    y = np.asarray([label for _, label in examples], dtype=float)
    if X.ndim != 2 or X.shape[1] != FEATURE_DIM:
        raise ValidationError(f"features must be {FEATURE_DIM}-dimensional")
    if not set(np.unique(y)) <= {0.0, 1.0}:
        raise ValidationError("labels must be 0 or 1")
    degenerate = len(np.unique(y)) < 2

    w = np.zeros(FEATURE_DIM)
    b = 0.0
    loss = float("nan")
    for _ in range(epochs):
        loss, gw, gb = gate_loss_and_grad(w, b, X, y, l2)
        w -= lr * gw
        b -= lr * gb
    final_loss, _, _ = gate_loss_and_grad(w, b, X, y, l2)
    preds = np.array([pgen(GateModel(w, b), x) for x in X])
    accuracy = float(np.mean((preds >= 0.5) == (y == 1.0)))
    return GateModel(
        weights=w,
        bias=b,
        training_meta={
            "final_loss": float(final_loss),
            "last_step_loss": float(loss),
            "accuracy": accuracy,
            "epochs": epochs,
            "lr": lr,
            "l2": l2,
            "degenerate": degenerate,
            "n_examples": len(examples),
        },
    )


def save_gate(model: GateModel, path) -> None:
    doc = {
        "schema_version": GATE_SCHEMA_VERSION,
        "feature_names": list(FEATURE_NAMES),
        "weights": [float(w) for w in model.weights],
        "bias": float(model.bias),
        "training_meta": model.training_meta,
    }
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write gate model {path}: {exc}") from exc


def load_gate(path) -> GateModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read gate model {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"gate model {path} is corrupt: {exc.msg}") from exc
    if doc.get("schema_version") != GATE_SCHEMA_VERSION:
        raise SchemaVersionMismatch(GATE_SCHEMA_VERSION, doc.get("schema_version"))
    return GateModel(
        weights=np.asarray(doc["weights"], dtype=float),
        bias=float(doc["bias"]),
        training_meta=doc.get("training_meta", {}),
    )


# ---------------------------------------------------------------------------
# Candidates and scoring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    text: str
    mode: str  # ARGUMENT_GROUNDED | FREE
    template_id: str
    argument_id: str | None = None

    def __post_init__(self):
        if self.mode == ARGUMENT_GROUNDED and self.argument_id is None:
            raise ValidationError("argument-grounded candidates need an argument_id")


class UnigramModel:
    """Add-1 smoothed unigram distribution over vocabulary plus UNK."""

    def __init__(self, counts: Counter | None = None):
        self.counts = Counter(counts or {})
        self.total = sum(self.counts.values())

    @classmethod
    def from_texts(cls, texts) -> "UnigramModel":
        counts = Counter()
        for text in texts:
            counts.update(tokenize(text))
        return cls(counts)

    def prob(self, token: str) -> float:
        return (self.counts.get(token, 0) + 1) / (self.total + len(self.counts) + 1)


def generate_candidates(
    retrieved: tuple[ScoredArgument, str] | None,
    hedges: list[str],
    question_templates: list[str],
    k: int,
    salient_term: str | None = None,
) -> list[Candidate]:
    """Hedge-prefixed argument candidates followed by free templates; <= 2k total."""
    if k <= 0:
        return []
    candidates: list[Candidate] = []
    if retrieved is not None:
        scored, arg_text = retrieved
        for i, hedge in enumerate(hedges[:k]):
            candidates.append(
                Candidate(
                    text=f"{hedge} {arg_text}",
                    mode=ARGUMENT_GROUNDED,
                    template_id=f"hedge:{i}",
                    argument_id=scored.argument_id,
                )
            )
    free_count = 0
    for i, template in enumerate(question_templates):
        if free_count >= k:
            break
        if "{term}" in template:
            if not salient_term:
                continue
            text = template.replace("{term}", salient_term)
        else:
            text = template
        candidates.append(Candidate(text=text, mode=FREE, template_id=f"free:{i}"))
        free_count += 1
    return candidates


def mixture_score(
    candidate: Candidate,
    pgen_value: float,
    free_model: UnigramModel,
    arg_model: UnigramModel,
) -> float:
    """Sum over tokens of ln(pgen * P_free + (1 - pgen) * P_arg)."""
    if not 0.0 <= pgen_value <= 1.0:
        raise ValidationError(f"pgen must be in [0, 1], got {pgen_value}")
    score = 0.0
    for token in tokenize(candidate.text):
        mixed = pgen_value * free_model.prob(token) + (1.0 - pgen_value) * arg_model.prob(token)
        score += math.log(mixed)
    return score


def rerank(
    candidates: list[Candidate],
    retrieved_argument_text: str | None,
    previous_bot_utterances: list[str] | tuple[str, ...],
) -> list[tuple[Candidate, float]]:
    """Average of BLEU-to-argument and negated max BLEU-to-own-history."""
    ref = tokenize(retrieved_argument_text) if retrieved_argument_text else None
    history = [tokenize(u) for u in previous_bot_utterances]
    scored = []
    for cand in candidates:
        tokens = tokenize(cand.text)
        s1 = sentence_bleu(tokens, ref) if ref else 0.0
        s2 = -max_bleu_against(tokens, history)
        scored.append((cand, (s1 + s2) / 2.0))
    return sorted(scored, key=lambda item: -item[1])


def salient_term_of(text: str, config: TokenPipelineConfig | None = None) -> str | None:
    """Longest content token of the utterance (first on ties), unstemmed."""
    raw_config = TokenPipelineConfig(
        lowercase=True,
        stem=False,
        stopwords=(config or TokenPipelineConfig()).stopwords,
    )
    terms = preprocess(text, raw_config)
    if not terms:
        return None
    return max(terms, key=len)


# ---------------------------------------------------------------------------
# Full pipelines
# ---------------------------------------------------------------------------


@dataclass
class ResponderConfig:
    hedges: list[str]
    question_templates: list[str]
    candidates_per_mode: int = 6
    gold_ids: frozenset[str] = frozenset()
    important_terms: frozenset[str] = frozenset()
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    pipeline: TokenPipelineConfig | None = None


@dataclass(frozen=True)
class BotReply:
    """A composed bot turn plus everything needed for provenance logging."""

    text: str
    mode: str
    argument_id: str | None
    stance: str | None
    pgen: float
    mixture: float
    rerank_score: float
    top_base_score: float | None


def respond(
    state: ResponderState,
    index: RetrievalIndex,
    argument_texts: dict[str, str],
    gate: GateModel,
    free_model: UnigramModel,
    config: ResponderConfig,
    rng_seed: int = 0,
) -> BotReply:
    """Retrieve top-1, gate, enumerate, mixture-score, re-rank, emit the winner."""
    query = SuggestionQuery(
        last_utterance=state.last_utterance,
        previous_utterance=state.previous_utterance,
    )
    results = boosted_retrieve(
        index,
        query,
        gold_ids=config.gold_ids,
        important_terms=config.important_terms,
        k1=config.bm25_k1,
        b=config.bm25_b,
        config=config.pipeline,
    )
    top = results[0] if results else None
    retrieved = (top, argument_texts[top.argument_id]) if top else None

    h = featurize(state, results, index, config.pipeline)
    p = pgen(gate, h)

    rng = random.Random(rng_seed)
    hedges = list(config.hedges)
    templates = list(config.question_templates)
    rng.shuffle(hedges)
    rng.shuffle(templates)

    candidates = generate_candidates(
        retrieved,
        hedges,
        templates,
        config.candidates_per_mode,
        salient_term=salient_term_of(state.last_utterance, config.pipeline),
    )
    if not candidates:
        raise NoCandidates("retrieval came up empty and no templates are configured")

    arg_model = UnigramModel.from_texts([retrieved[1]] if retrieved else [])
    mixtures = {
        cand.template_id: mixture_score(cand, p, free_model, arg_model)
        for cand in candidates
    }
    # Mixture orders the pool (the generation-probability stand-in); the BLEU
    # criterion then decides among them.
    pool = sorted(candidates, key=lambda c: -mixtures[c.template_id])
    ranked = rerank(pool, retrieved[1] if retrieved else None, state.previous_bot_utterances)
    winner, winner_score = ranked[0]
    return BotReply(
        text=winner.text,
        mode=winner.mode,
        argument_id=winner.argument_id,
        stance=index.stance.get(winner.argument_id) if winner.argument_id else None,
        pgen=p,
        mixture=mixtures[winner.template_id],
        rerank_score=winner_score,
        top_base_score=top.base_score if top else None,
    )


def control_respond(agent_turns_so_far: int, templates: list[str]) -> BotReply:
    """Cycle through topic-neutral chitchat prompts; never touches the index."""
    if not templates:
        raise NoCandidates("control mode has no chitchat templates configured")
    text = templates[agent_turns_so_far % len(templates)]
    return BotReply(
        text=text,
        mode="control",
        argument_id=None,
        stance=None,
        pgen=1.0,
        mixture=0.0,
        rerank_score=0.0,
        top_base_score=None,
    )


# ---------------------------------------------------------------------------
# Extracting training signal from logs
# ---------------------------------------------------------------------------


def _turns_of(log) -> list[dict]:
    return log["turns"] if isinstance(log, dict) else [t.to_dict() for t in log.turns]


def gate_training_data(
    corpus,
    index: RetrievalIndex | None = None,
    config: TokenPipelineConfig | None = None,
) -> list[tuple[np.ndarray, int]]:
    """(features, label) per agent turn: 0 when an argument was used, 1 otherwise.

    Retrieval features are replayed when an index is supplied, else zero.
    """
    examples = []
    for log in corpus:
        turns = _turns_of(log)
        participant_history: list[str] = []
        for i, turn in enumerate(turns):
            if turn["speaker"] == "participant":
                participant_history.append(turn["text"])
                continue
            if not participant_history:
                continue  # agent opened; no utterance to condition on
            state = ResponderState(
                last_utterance=participant_history[-1],
                previous_utterance=participant_history[-2] if len(participant_history) > 1 else None,
                turn_index=i,
            )
            results: list[ScoredArgument] = []
            if index is not None:
                results = boosted_retrieve(
                    index,
                    SuggestionQuery(
                        last_utterance=state.last_utterance,
                        previous_utterance=state.previous_utterance,
                    ),
                    config=config,
                )
            provenance = turn.get("provenance") or {}
            label = 0 if provenance.get("argument_id") else 1
            examples.append((featurize(state, results, index, config), label))
    return examples


def free_turn_texts(corpus) -> list[str]:
    """Agent turns composed without an argument, for the free unigram model."""
    texts = []
    for log in corpus:
        for turn in _turns_of(log):
            if turn["speaker"] != "agent":
                continue
            provenance = turn.get("provenance") or {}
            if not provenance.get("argument_id"):
                texts.append(turn["text"])
    return texts
