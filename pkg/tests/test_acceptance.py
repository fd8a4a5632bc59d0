"""Acceptance gate: one test per release criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report. Tolerances are pinned here and nowhere else.

One criterion is knowingly red: the Welch fixture below was handed down
with the expected value t = -2.22 +/- 0.05, but brute-force evaluation of
the Welch formulas on that exact data yields t = -3.158862709812029 (scipy
agrees to 1e-15, and no t-test variant produces -2.22 on it). The test
asserting the handed-down constant is marked strict-xfail so the
inconsistency stays visible without being silently swallowed, and a
companion test holds the implementation to the oracle-verified value at
the same tolerance.
"""

import json
import math
import random
import time
from collections import Counter

import numpy as np
import pytest

from oumwoz.argbase import ArgumentTreeNode, propagate_stances
from oumwoz.cli import main as cli_main
from oumwoz.oum import OumScores, QuestionnaireResponse, aggregate, compute_oum_scores
from oumwoz.responder import (
    Candidate,
    FEATURE_DIM,
    GateModel,
    UnigramModel,
    gate_loss_and_grad,
    mixture_score,
    pgen,
    rerank,
    train_gate,
)
from oumwoz.retrieval import SuggestionQuery, bm25_score, boosted_retrieve, build_index, tfidf_suggest
from oumwoz.service import SessionStore
from oumwoz.stats import spearman, welch_t
from oumwoz.textproc import tokenize

from tests.corpus_fixture import build_five_dialogues
from tests.test_retrieval import RAW, make_base, naive_boosted, naive_tfidf
from tests.test_responder import oracle_bleu
from tests.test_stats import WELCH_A, WELCH_B, WELCH_FIXTURE_T, oracle_spearman

_SUITE_START = time.monotonic()


def _report(name: str, detail: str = ""):
    suffix = f" — {detail}" if detail else ""
    print(f"\n[acceptance] {name}: PASS{suffix}")


# ---------------------------------------------------------------------------
# Stance propagation
# ---------------------------------------------------------------------------


def test_stance_propagation_parity_oracle():
    rng = random.Random(20240)
    checked_nodes = 0
    propagation_seconds = 0.0
    for _ in range(1000):
        n_nodes = rng.randrange(1, 500)
        root = ArgumentTreeNode(text="topic", id="root")
        nodes = [root]
        parities = {"root": 0}
        expected = {}
        for i in range(n_nodes):
            parent = rng.choice(nodes)
            stance = rng.choice(["pro", "con"])
            child = ArgumentTreeNode(text=f"n{i}", local_stance=stance, id=f"n{i}")
            parent.children.append(child)
            nodes.append(child)
            parities[child.id] = parities[parent.id] + (1 if stance == "con" else 0)
            expected[child.id] = "pro" if parities[child.id] % 2 == 0 else "con"

        started = time.perf_counter()
        records = propagate_stances(root)
        propagation_seconds += time.perf_counter() - started

        assert {r.id: r.topic_stance for r in records} == expected
        checked_nodes += n_nodes

    assert propagation_seconds < 1.0, f"propagating 1000 trees took {propagation_seconds:.2f}s"
    _report(
        "stance-propagation",
        f"{checked_nodes} nodes across 1000 trees, exact parity match, "
        f"{propagation_seconds:.2f}s propagation time",
    )


# ---------------------------------------------------------------------------
# Retrieval
# ---------------------------------------------------------------------------


def test_retrieval_oracle_equivalence():
    rng = random.Random(555)
    for trial in range(20):
        vocab = [f"w{i}" for i in range(rng.randrange(5, 30))]
        texts = [" ".join(rng.choices(vocab, k=rng.randrange(1, 12)))
                 for _ in range(rng.randrange(2, 50))]
        index = build_index(make_base(texts), RAW)

        query_text = " ".join(rng.choices(vocab, k=rng.randrange(1, 8)))
        expected = naive_tfidf(texts, query_text, RAW)
        got = {
            r.argument_id: r.base_score
            for r in tfidf_suggest(index, SuggestionQuery(query_text, limit=len(texts)), RAW)
        }
        assert set(got) == set(expected)
        for doc_id, score in expected.items():
            assert abs(got[doc_id] - score) <= 1e-9

        query = SuggestionQuery(
            " ".join(rng.choices(vocab, k=rng.randrange(1, 6))),
            previous_utterance=" ".join(rng.choices(vocab, k=3)),
            limit=len(texts),
        )
        gold = {f"d{rng.randrange(len(texts))}"}
        important = set(rng.choices(vocab, k=2))
        expected_boosted = naive_boosted(texts, query, gold, important, RAW)
        results = boosted_retrieve(index, query, gold_ids=gold, important_terms=important, config=RAW)
        got_boosted = {r.argument_id: r.final_score for r in results}
        assert set(got_boosted) == set(expected_boosted)
        for doc_id, score in expected_boosted.items():
            assert abs(got_boosted[doc_id] - score) <= 1e-9
        for r in results:
            assert r.final_score == r.base_score + r.boost_gold + r.boost_term + r.boost_overlap
    _report("retrieval-oracle-equivalence", "20 corpora, tfidf+boosted, |delta| <= 1e-9")


def test_bm25_hand_fixture():
    index = build_index(make_base(["cat dog", "cat cat fish bird"]), RAW)
    assert abs(bm25_score(index, ["cat"], "d0", k1=1.2, b=0.75) - 0.21110917102457905) <= 1e-9
    assert abs(bm25_score(index, ["cat"], "d1", k1=1.2, b=0.75) - 0.2292042428266858) <= 1e-9
    _report("bm25-fixture", "2-doc hand computation, |delta| <= 1e-9")


# ---------------------------------------------------------------------------
# Gate
# ---------------------------------------------------------------------------


def test_gate_mechanism():
    rng = np.random.default_rng(99)
    X = rng.random((30, FEATURE_DIM))
    y = rng.integers(0, 2, size=30).astype(float)
    step = 1e-6
    for _ in range(10):
        w = rng.normal(0, 1.5, FEATURE_DIM)
        b = float(rng.normal())
        _, grad_w, grad_b = gate_loss_and_grad(w, b, X, y, 1e-4)
        for j in range(FEATURE_DIM):
            delta = np.zeros(FEATURE_DIM)
            delta[j] = step
            hi, _, _ = gate_loss_and_grad(w + delta, b, X, y, 1e-4)
            lo, _, _ = gate_loss_and_grad(w - delta, b, X, y, 1e-4)
            numeric = (hi - lo) / (2 * step)
            assert abs(grad_w[j] - numeric) <= 1e-6 * max(1.0, abs(numeric))
        hi, _, _ = gate_loss_and_grad(w, b + step, X, y, 1e-4)
        lo, _, _ = gate_loss_and_grad(w, b - step, X, y, 1e-4)
        numeric = (hi - lo) / (2 * step)
        assert abs(grad_b - numeric) <= 1e-6 * max(1.0, abs(numeric))

    examples = []
    py_rng = random.Random(0)
    for _ in range(200):
        label = py_rng.randrange(2)
        first = py_rng.uniform(0.6, 1.0) if label else py_rng.uniform(0.0, 0.4)
        examples.append((np.array([first] + [py_rng.random() for _ in range(FEATURE_DIM - 1)]), label))
    model = train_gate(examples, lr=0.5, epochs=500, l2=1e-4)
    assert model.training_meta["accuracy"] >= 0.95

    zero = GateModel(np.zeros(FEATURE_DIM), 0.0)
    assert pgen(zero, np.full(FEATURE_DIM, 0.37)) == 0.5
    _report(
        "gate-mechanism",
        f"finite-diff <= 1e-6 rel at 10 points; accuracy {model.training_meta['accuracy']:.3f}; sigma(0) = 0.5",
    )


# ---------------------------------------------------------------------------
# Mixture scoring
# ---------------------------------------------------------------------------


def test_mixture_scoring_identities():
    free = UnigramModel(Counter({"x": 1}))
    arg = UnigramModel(Counter({"y": 2}))
    candidate = Candidate(text="x y", mode="free", template_id="t")

    free_only = sum(math.log(free.prob(t)) for t in ("x", "y"))
    arg_only = sum(math.log(arg.prob(t)) for t in ("x", "y"))
    assert abs(mixture_score(candidate, 1.0, free, arg) - free_only) <= 1e-12
    assert abs(mixture_score(candidate, 0.0, free, arg) - arg_only) <= 1e-12

    hand = math.log(11 / 24) + math.log(13 / 24)
    assert abs(mixture_score(candidate, 0.5, free, arg) - hand) <= 1e-12
    _report("mixture-scoring", "collapse identities and 0.5 fixture to 1e-12")


# ---------------------------------------------------------------------------
# Re-ranker
# ---------------------------------------------------------------------------


def test_reranker_fixture():
    argument = "vaccines reduce severe illness in most patients"
    history = ["Why do you feel that way?"]
    candidates = [
        Candidate("It could be argued that vaccines reduce severe illness in most patients",
                  "argument_grounded", "hedge:0", "a1"),
        Candidate("Why do you feel that way?", "free", "free:0"),
        Candidate("vaccines reduce severe illness in most patients",
                  "argument_grounded", "hedge:1", "a1"),
    ]
    expected = []
    for cand in candidates:
        tokens = tokenize(cand.text)
        s1 = oracle_bleu(tokens, tokenize(argument))
        s2 = -max((oracle_bleu(tokens, tokenize(h)) for h in history), default=0.0)
        expected.append((cand.template_id, (s1 + s2) / 2))
    expected.sort(key=lambda item: -item[1])

    ranked = rerank(candidates, argument, history)
    assert [c.template_id for c, _ in ranked] == [tid for tid, _ in expected]
    for (_, got), (_, want) in zip(ranked, expected):
        assert abs(got - want) <= 1e-12

    # a candidate equal to the previous bot utterance, unigram-disjoint from
    # the argument, must score strictly below zero
    repeat = Candidate("Why do you feel that way?", "free", "free:9")
    score = dict((c.template_id, s) for c, s in rerank([repeat], "zebras graze quietly", history))
    assert score["free:9"] < 0.0
    _report("re-ranker", "3-candidate ordering matches BLEU arithmetic; repeat < 0")


# ---------------------------------------------------------------------------
# OUM arithmetic
# ---------------------------------------------------------------------------


def test_oum_arithmetic():
    half = [OumScores(1.0, 1.0, 1.0)] * 40 + [OumScores(-1.0, -1.0, -1.0)] * 40
    result = aggregate(half)
    for category in ("good_reasons", "intellect", "morality"):
        assert result[category].overall == 0.0

    rng = random.Random(31337)

    def random_response():
        return QuestionnaireResponse(
            good_reasons=rng.randint(1, 7),
            intellect=tuple(rng.randint(1, 7) for _ in range(3)),
            morality=tuple(rng.randint(1, 7) for _ in range(3)),
        )

    for _ in range(10_000):
        pre, post = random_response(), random_response()
        forward = compute_oum_scores(pre, post)
        backward = compute_oum_scores(post, pre)
        assert forward.good_reasons == -backward.good_reasons
        assert abs(forward.intellect + backward.intellect) <= 1e-12
        assert abs(forward.morality + backward.morality) <= 1e-12
        for value in (forward.good_reasons, forward.intellect, forward.morality):
            assert -6.0 <= value <= 6.0
    _report("oum-arithmetic", "balanced corpus overall = 0 exactly; 10k antisymmetry/bounds")


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def test_statistics_spearman_oracle():
    rng = random.Random(808)
    checked = 0
    while checked < 100:
        n = rng.randrange(3, 40)
        x = [rng.randrange(0, 6) for _ in range(n)]
        y = [rng.randrange(0, 6) for _ in range(n)]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        assert abs(spearman(x, y) - oracle_spearman(x, y)) <= 1e-12
        checked += 1
    _report("statistics-spearman", "100 tied vectors vs definitional oracle, 1e-12")


@pytest.mark.xfail(
    strict=True,
    reason="the handed-down expected value -2.22 +/- 0.05 is inconsistent "
    "with this fixture's data: brute-force Welch evaluation gives t = "
    "-3.1589 (scipy agrees). Kept failing rather than bending the constant; "
    "the companion test pins the oracle-verified value.",
)
def test_statistics_welch_fixture_as_stated():
    result = welch_t(WELCH_A, WELCH_B)
    stated = -2.22
    print(
        f"\n[acceptance] statistics-welch-as-stated: FAIL — computed t = "
        f"{result.statistic:.6f}; the handed-down constant {stated} +/- 0.05 "
        f"does not match this data under any t-test variant"
    )
    assert abs(result.statistic - stated) <= 0.05


def test_statistics_welch_oracle_verified():
    result = welch_t(WELCH_A, WELCH_B)
    assert abs(result.statistic - WELCH_FIXTURE_T) <= 1e-12
    assert abs(result.statistic - WELCH_FIXTURE_T) <= 0.05  # criterion tolerance
    backward = welch_t(WELCH_B, WELCH_A)
    assert result.statistic == -backward.statistic
    assert result.p_value == backward.p_value
    _report(
        "statistics-welch-oracle",
        f"t = {result.statistic:.6f} matches brute-force oracle to 1e-12; sign-flip exact",
    )


# ---------------------------------------------------------------------------
# Dataset replay (bundled fixtures; the released corpus is not reachable)
# ---------------------------------------------------------------------------


def test_replay_five_dialogue_goldens(tmp_path, capsys):
    from pathlib import Path

    corpus_path = tmp_path / "five.jsonl"
    corpus_path.write_text(
        "\n".join(json.dumps(r) for r in build_five_dialogues()) + "\n", "utf-8"
    )
    assert cli_main(["analyze", "--corpus", str(corpus_path), "--report", "actions"]) == 0
    out = capsys.readouterr().out
    golden = (Path(__file__).parent / "data" / "golden_actions.csv").read_text("utf-8")
    assert out == golden
    _report("replay-five-dialogue-goldens", "CLI actions report == hand-computed golden CSV")


def test_replay_planted_reference_statistics():
    from oumwoz.analytics import (
        correlation_report,
        experience_report,
        oum_report,
        wizard_action_stats,
    )
    from oumwoz.synthetic import build_replica_corpus

    corpus = build_replica_corpus(seed=7)

    stats = wizard_action_stats(corpus)
    targets = {
        "edit_selected_arg": 74.86,
        "use_search_terms": 68.77,
        "use_stance_filter": 71.76,
        "select_from_top_10": 21.15,
        "use_pro_args": 47.40,
        "use_con_args": 52.60,
    }
    for key, target in targets.items():
        assert abs(stats[key] - target) <= 0.01, (key, stats[key])
    assert abs(stats["arg_use_rate"] - 66.0) <= 1.0

    report = oum_report(corpus)
    wizard_row = next(r for r in report.rows if r["mode"] == "wizard")
    gr = wizard_row["aggregates"]["good_reasons"]
    assert f"{gr.pct_zero:.1f}" == "52.5"
    assert f"{gr.pct_plus:.1f}" == "35.8"
    assert f"{gr.mean_plus:.2f}" == "1.41"
    assert f"{gr.pct_minus:.1f}" == "11.7"
    assert f"{gr.mean_minus:.2f}" == "-1.32"
    assert abs(gr.overall - 0.35) <= 0.01
    assert gr.overall == 0.35  # exact by construction
    assert wizard_row["stars"]["good_reasons"] != ""   # significant vs control
    assert wizard_row["stars"]["morality"] == ""       # not significant
    assert wizard_row["stars"]["intellect"] == ""

    experience = experience_report(corpus)
    wizard_exp = next(r for r in experience.rows if r["mode"] == "wizard")
    assert abs(wizard_exp["means"]["enjoyable"] - 6.05) <= 0.01

    correlations = dict(correlation_report(corpus, which="features").pairs)
    assert abs(correlations["positive_lexicon"] - 0.18) <= 0.03
    assert abs(correlations["subjunctive"] - (-0.18)) <= 0.03
    _report(
        "replay-planted-statistics",
        "actions +/-0.01; good-reasons row at printed precision (overall exactly 0.35); "
        f"enjoyable 6.05; rho {correlations['positive_lexicon']:+.3f}/"
        f"{correlations['subjunctive']:+.3f} within +/-0.03",
    )


# ---------------------------------------------------------------------------
# End-to-end determinism and durability
# ---------------------------------------------------------------------------


def test_end_to_end_determinism(tmp_path, capsys):
    tree = tmp_path / "tree.txt"
    tree.write_text(
        "vaccination helps\n\tPro: vaccines reduce severe illness\n"
        "\tCon: mandates limit freedom\n\t\tCon: public health justifies limits\n",
        "utf-8",
    )
    base = tmp_path / "base.json"
    assert cli_main(["ingest", str(tree), "--format", "indented",
                     "--topic", "vaccination", "--out", str(base)]) == 0
    script = tmp_path / "script.txt"
    script.write_text("I worry about severe illness\nthat seems fair\nwhat about freedom\n", "utf-8")

    logs = []
    outputs = []
    for tag in ("one", "two"):
        out = tmp_path / f"log-{tag}.json"
        assert cli_main(["chat", "--base", str(base), "--mode", "argu_bot",
                         "--seed", "7", "--script", str(script), "--out", str(out)]) == 0
        logs.append(out.read_bytes())
        outputs.append(capsys.readouterr().out)
    assert logs[0] == logs[1]
    assert outputs[0] == outputs[1]
    _report("end-to-end-determinism", "chat --seed 7 twice: byte-identical logs and transcripts")


def test_service_kill_restart_durability(tmp_path):
    from fastapi.testclient import TestClient

    from oumwoz.service import create_app
    from tests.test_service import PRE_BODY, make_service

    service = make_service(tmp_path)
    client = TestClient(create_app(service))
    created = client.post("/sessions", json={"topic": "vaccination", "mode": "wizard"}).json()
    sid = created["session_id"]
    client.post(f"/sessions/{sid}/pre", params={"token": created["participant_token"]}, json=PRE_BODY)
    with client.websocket_connect(
        f"/sessions/{sid}/chat?role=participant&token={created['participant_token']}"
    ) as ws:
        ws.receive_json()
        ws.send_json({"type": "utterance", "seq": 1, "text": "acknowledged before the crash"})
        assert ws.receive_json()["type"] == "ack"
    snapshot = service.store.get(sid).to_export()

    revived = SessionStore(tmp_path / "data")  # simulated restart on the same WAL dir
    assert revived.get(sid).to_export() == snapshot
    assert revived.get(sid).turns[0].text == "acknowledged before the crash"
    _report("service-durability", "acked turn survives kill-and-restart replay")


def test_primary_suite_runtime_budget():
    elapsed = time.monotonic() - _SUITE_START
    assert elapsed < 60.0, f"acceptance module took {elapsed:.1f}s"
    _report("suite-runtime", f"acceptance module finished in {elapsed:.1f}s (< 60s)")
