"""Batch evaluation over exported dialogue logs.

Reports: wizard action statistics, OUM score tables with Welch significance
against the control group, chat-experience tables with rating histograms,
per-dialogue feature extraction and Spearman correlation reports. Output is
CSV (RFC 4180 via the csv module) or Markdown; no plotting.

Documented divergences from the tooling the numbers were first produced
with: question detection is rule-based (cue words / '?') rather than parsed,
and politeness markers come from plain lexicon files, so correlation values
on real logs carry wider tolerances than the arithmetic itself.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .errors import IoError, ValidationError
from .oum import (
    EXPERIENCE_METRICS,
    BOT_ONLY_METRICS,
    LIKERT_MAX,
    LIKERT_MIN,
    OumScores,
    QuestionnaireResponse,
    compute_oum_scores,
)
from .stats import spearman, welch_t
from .errors import ConstantInput, ZeroVariance
from .textproc import data_file, is_question, split_sentences, tokenize

CONTROL_MODE = "control_bot"

CATEGORIES = ("good_reasons", "morality", "intellect")

ACTION_STAT_KEYS = (
    "edit_selected_arg",
    "use_search_terms",
    "use_stance_filter",
    "select_from_top_10",
    "use_pro_args",
    "use_con_args",
    "arg_use_rate",
)


def load_corpus(path) -> list[dict]:
    """Read a JSONL corpus of exported session records."""
    records = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise IoError(f"{path}:{lineno}: bad JSON record: {exc.msg}") from exc
    except OSError as exc:
        raise IoError(f"cannot read corpus {path}: {exc}") from exc
    return records


def _agent_turns(record: dict) -> list[dict]:
    return [t for t in record.get("turns", []) if t["speaker"] == "agent"]


def _argument_turns(record: dict) -> list[dict]:
    return [t for t in _agent_turns(record) if (t.get("provenance") or {}).get("argument_id")]


# ---------------------------------------------------------------------------
# Wizard action statistics
# ---------------------------------------------------------------------------


def wizard_action_stats(corpus: list[dict]) -> dict[str, float]:
    """Percentages of wizard argument-selection behaviour.

    Denominators: edit / top-10 / pro / con are over agent turns that used an
    argument; search and filter are over dialogues where the action occurred
    at least once; arg_use_rate is over all agent turns.
    """
    sessions = [r for r in corpus if r.get("mode") == "wizard"]
    if not sessions:
        raise ValidationError("corpus contains no wizard-mode sessions")

    agent_total = 0
    arg_turns = 0
    edited = 0
    top10 = 0
    pro = 0
    con = 0
    searched_dialogues = 0
    filtered_dialogues = 0
    for record in sessions:
        agents = _agent_turns(record)
        agent_total += len(agents)
        for turn in agents:
            prov = turn.get("provenance") or {}
            if not prov.get("argument_id"):
                continue
            arg_turns += 1
            if prov.get("edited"):
                edited += 1
            rank = prov.get("selection_rank")
            if rank is not None and rank <= 10:
                top10 += 1
            if prov.get("stance") == "pro":
                pro += 1
            elif prov.get("stance") == "con":
                con += 1
        kinds = set()
        for action in record.get("actions", []):
            if action["kind"] == "search":
                kinds.add("search")
            elif action["kind"] == "stance_filter" and action.get("payload", {}).get("stance") in ("pro", "con"):
                kinds.add("filter")
        searched_dialogues += 1 if "search" in kinds else 0
        filtered_dialogues += 1 if "filter" in kinds else 0

    def pct(num, den):
        return 100.0 * num / den if den else 0.0

    return {
        "edit_selected_arg": pct(edited, arg_turns),
        "use_search_terms": pct(searched_dialogues, len(sessions)),
        "use_stance_filter": pct(filtered_dialogues, len(sessions)),
        "select_from_top_10": pct(top10, arg_turns),
        "use_pro_args": pct(pro, arg_turns),
        "use_con_args": pct(con, arg_turns),
        "arg_use_rate": pct(arg_turns, agent_total),
    }


# ---------------------------------------------------------------------------
# Dialogue features
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DialogueFeatures:
    length: int
    wizard_turn_prop: float
    participant_turn_prop: float
    question_prop: float
    arg_use_prop: float
    edited_prop: float
    pro_con_ratio: float
    marker_freq: dict[str, float]
    con_clamped: bool = False  # pro/con denominator was clamped to 1

    def named_values(self) -> dict[str, float]:
        base = {
            "length": float(self.length),
            "wizard_turns": self.wizard_turn_prop,
            "participant_turns": self.participant_turn_prop,
            "wizard_questions": self.question_prop,
            "args_from_base": self.arg_use_prop,
            "edited_args": self.edited_prop,
            "pro_con_ratio": self.pro_con_ratio,
        }
        base.update(self.marker_freq)
        return base


def default_marker_lexicons() -> dict[str, list[list[str]]]:
    """Lexicons shipped with the package: marker name -> tokenized entries."""
    lexicons = {}
    for entry in sorted(data_file("lexicons").iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".txt"):
            continue
        name = entry.name[:-4]
        phrases = []
        for line in entry.read_text("utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                phrases.append(tokenize(line))
        lexicons[name] = phrases
    return lexicons


def _count_phrase(tokens: list[str], phrase: list[str]) -> int:
    if not phrase or len(phrase) > len(tokens):
        return 0
    hits = 0
    span = len(phrase)
    for i in range(len(tokens) - span + 1):
        if tokens[i : i + span] == phrase:
            hits += 1
    return hits


def extract_features(
    record: dict,
    marker_lexicons: dict[str, list[list[str]]] | None = None,
) -> DialogueFeatures:
    if marker_lexicons is None:
        marker_lexicons = default_marker_lexicons()
    turns = record.get("turns", [])
    agents = _agent_turns(record)
    length = len(turns)
    agent_prop = len(agents) / length if length else 0.0

    sentences = []
    for turn in agents:
        sentences.extend(split_sentences(turn["text"]))
    questions = sum(1 for s in sentences if is_question(s))

    arg_turns = _argument_turns(record)
    edited = sum(1 for t in arg_turns if (t.get("provenance") or {}).get("edited"))
    pro = sum(1 for t in arg_turns if (t.get("provenance") or {}).get("stance") == "pro")
    con = sum(1 for t in arg_turns if (t.get("provenance") or {}).get("stance") == "con")

    marker_freq = {}
    token_lists = [tokenize(s) for s in sentences]
    for name, phrases in sorted(marker_lexicons.items()):
        hits = sum(_count_phrase(tokens, p) for tokens in token_lists for p in phrases)
        marker_freq[name] = hits / len(sentences) if sentences else 0.0

    return DialogueFeatures(
        length=length,
        wizard_turn_prop=agent_prop,
        participant_turn_prop=1.0 - agent_prop if length else 0.0,
        question_prop=questions / len(sentences) if sentences else 0.0,
        arg_use_prop=len(arg_turns) / len(agents) if agents else 0.0,
        edited_prop=edited / len(arg_turns) if arg_turns else 0.0,
        pro_con_ratio=pro / max(1, con),
        marker_freq=marker_freq,
        con_clamped=con == 0,
    )


# ---------------------------------------------------------------------------
# OUM table
# ---------------------------------------------------------------------------


def _scored_sessions(corpus: list[dict]) -> tuple[list[tuple[dict, OumScores]], int]:
    """Sessions with both questionnaires, scored; plus the excluded count."""
    scored = []
    excluded = 0
    for record in corpus:
        if not record.get("pre") or not record.get("post"):
            excluded += 1
            continue
        pre = QuestionnaireResponse.from_dict(record["pre"])
        post = QuestionnaireResponse.from_dict(record["post"])
        scored.append((record, compute_oum_scores(pre, post)))
    return scored, excluded


def _stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


@dataclass
class OumReport:
    rows: list[dict]  # mode, n, per-category CategoryAggregate + stars
    excluded: int
    control_mode: str | None


def oum_report(corpus: list[dict], control_mode: str = CONTROL_MODE) -> OumReport:
    """Per mode and category: class percentages, class means, overall mean,
    and Welch-t stars against the control mode (when a control group exists)."""
    from .oum import aggregate

    scored, excluded = _scored_sessions(corpus)
    if not scored:
        raise ValidationError("no sessions with both questionnaires")
    by_mode: dict[str, list[OumScores]] = {}
    for record, scores in scored:
        by_mode.setdefault(record["mode"], []).append(scores)

    has_control = control_mode in by_mode and len(by_mode) > 1
    rows = []
    for mode in sorted(by_mode, key=lambda m: (m != "wizard", m)):
        scores = by_mode[mode]
        aggregates = aggregate(scores)
        stars: dict[str, str] = {}
        if has_control and mode != control_mode:
            for category in CATEGORIES:
                a = [getattr(s, category) for s in scores]
                b = [getattr(s, category) for s in by_mode[control_mode]]
                try:
                    stars[category] = _stars(welch_t(a, b).p_value)
                except (ZeroVariance, ValidationError):
                    stars[category] = ""
        rows.append({"mode": mode, "n": len(scores), "aggregates": aggregates, "stars": stars})
    return OumReport(rows=rows, excluded=excluded, control_mode=control_mode if has_control else None)


# ---------------------------------------------------------------------------
# Experience table
# ---------------------------------------------------------------------------


@dataclass
class ExperienceReport:
    rows: list[dict]  # mode, n, means per metric, stars per metric
    metrics: tuple[str, ...]
    control_mode: str | None


def experience_report(corpus: list[dict], control_mode: str = CONTROL_MODE) -> ExperienceReport:
    """Mean rating per mode and metric, Welch stars against the control mode.

    The stars anchor to the control group (there is no second bot variant to
    pair with, unlike the setting the metric list originated from).
    """
    by_mode: dict[str, list[dict]] = {}
    for record in corpus:
        if record.get("experience"):
            by_mode.setdefault(record["mode"], []).append(record["experience"])
    if not by_mode:
        raise ValidationError("no sessions with experience ratings")

    metrics = EXPERIENCE_METRICS + BOT_ONLY_METRICS
    has_control = control_mode in by_mode and len(by_mode) > 1
    rows = []
    for mode in sorted(by_mode, key=lambda m: (m != "wizard", m)):
        ratings = by_mode[mode]
        means: dict[str, float | None] = {}
        stars: dict[str, str] = {}
        for metric in metrics:
            values = [r[metric] for r in ratings if metric in r]
            means[metric] = sum(values) / len(values) if values else None
            if has_control and mode != control_mode and values:
                control_values = [r[metric] for r in by_mode[control_mode] if metric in r]
                if len(control_values) >= 2 and len(values) >= 2:
                    try:
                        stars[metric] = _stars(welch_t(values, control_values).p_value)
                    except ZeroVariance:
                        stars[metric] = ""
        rows.append({"mode": mode, "n": len(ratings), "means": means, "stars": stars})
    return ExperienceReport(rows=rows, metrics=metrics, control_mode=control_mode if has_control else None)


def experience_histograms(corpus: list[dict]) -> list[dict]:
    """Counts of each Likert value per mode and metric (plotting data)."""
    counts: dict[tuple[str, str], list[int]] = {}
    for record in corpus:
        experience = record.get("experience")
        if not experience:
            continue
        for metric, value in experience.items():
            key = (record["mode"], metric)
            counts.setdefault(key, [0] * (LIKERT_MAX - LIKERT_MIN + 1))
            counts[key][value - LIKERT_MIN] += 1
    return [
        {"mode": mode, "metric": metric, "counts": values}
        for (mode, metric), values in sorted(counts.items())
    ]


# ---------------------------------------------------------------------------
# Correlation report
# ---------------------------------------------------------------------------


@dataclass
class CorrelationReport:
    pairs: list[tuple[str, float]]
    excluded: list[tuple[str, str]]  # (name, reason)
    n: int


def correlation_report(
    corpus: list[dict],
    which: str = "features",
    marker_lexicons: dict[str, list[list[str]]] | None = None,
    mode: str = "wizard",
) -> CorrelationReport:
    """Spearman rho between good-reasons OUM scores and features or ratings."""
    if which not in ("features", "experience"):
        raise ValidationError(f"which must be 'features' or 'experience', got {which!r}")
    scored, _ = _scored_sessions([r for r in corpus if r.get("mode") == mode])
    if len(scored) < 3:
        raise ValidationError("need at least 3 scored sessions for correlations")
    good_reasons = [scores.good_reasons for _, scores in scored]

    columns: dict[str, list[float]] = {}
    if which == "features":
        for record, _ in scored:
            features = extract_features(record, marker_lexicons).named_values()
            for name, value in features.items():
                columns.setdefault(name, []).append(value)
    else:
        usable = [(r, s) for r, s in scored if r.get("experience")]
        if len(usable) < 3:
            raise ValidationError("need at least 3 sessions with experience ratings")
        good_reasons = [s.good_reasons for _, s in usable]
        for metric in EXPERIENCE_METRICS:
            columns[metric] = [float(r["experience"][metric]) for r, _ in usable]

    pairs = []
    excluded = []
    for name, values in columns.items():
        try:
            pairs.append((name, spearman(values, good_reasons)))
        except ConstantInput:
            excluded.append((name, "ConstantFeature"))
    return CorrelationReport(pairs=pairs, excluded=excluded, n=len(good_reasons))


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _fmt_pct(value: float) -> str:
    return f"{value:.1f}"


def _fmt_mean(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def render_table_csv(headers: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buffer.getvalue()


def render_table_markdown(headers: list[str], rows: list[list[str]]) -> str:
    lines = [
        "| " + " | ".join(headers) + " |",
        "| " + " | ".join("---" for _ in headers) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    return "\n".join(lines) + "\n"


def action_stats_table(stats: dict[str, float]) -> tuple[list[str], list[list[str]]]:
    headers = ["action", "percentage"]
    rows = [[key, f"{stats[key]:.2f}"] for key in ACTION_STAT_KEYS]
    return headers, rows


def oum_table(report: OumReport) -> tuple[list[str], list[list[str]]]:
    headers = ["mode", "n"]
    for category in CATEGORIES:
        headers += [
            f"{category}_pct_zero",
            f"{category}_pct_plus",
            f"{category}_pct_minus",
            f"{category}_overall",
        ]
    rows = []
    for row in report.rows:
        cells = [row["mode"], str(row["n"])]
        for category in CATEGORIES:
            agg = row["aggregates"][category]
            star = row["stars"].get(category, "")
            plus = _fmt_pct(agg.pct_plus)
            if agg.mean_plus is not None:
                plus += f" ({_fmt_mean(agg.mean_plus)})"
            minus = _fmt_pct(agg.pct_minus)
            if agg.mean_minus is not None:
                minus += f" ({_fmt_mean(agg.mean_minus)})"
            cells += [_fmt_pct(agg.pct_zero), plus, minus, _fmt_mean(agg.overall) + star]
        rows.append(cells)
    return headers, rows


def experience_table(report: ExperienceReport) -> tuple[list[str], list[list[str]]]:
    headers = ["metric"] + [row["mode"] for row in report.rows]
    rows = []
    for metric in report.metrics:
        cells = [metric]
        for row in report.rows:
            mean = row["means"].get(metric)
            if mean is None:
                cells.append("-")
            else:
                cells.append(_fmt_mean(mean) + row["stars"].get(metric, ""))
        rows.append(cells)
    return headers, rows


def correlation_table(report: CorrelationReport) -> tuple[list[str], list[list[str]]]:
    headers = ["name", "rho"]
    rows = [[name, f"{rho:.3f}"] for name, rho in report.pairs]
    for name, reason in report.excluded:
        rows.append([name, reason])
    return headers, rows


def histogram_table(histograms: list[dict]) -> tuple[list[str], list[list[str]]]:
    headers = ["mode", "metric"] + [f"rating_{v}" for v in range(LIKERT_MIN, LIKERT_MAX + 1)]
    rows = [[h["mode"], h["metric"], *[str(c) for c in h["counts"]]] for h in histograms]
    return headers, rows
