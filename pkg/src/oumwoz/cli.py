"""Operator command line: ingest, index, serve, chat, train-gate, terms, analyze.

Exit codes: 0 success, 1 usage error, 2 data/schema error. Diagnostics go to
stderr; reports and transcripts go to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analytics, responder as rsp
from .argbase import base_from_tree, load_base, merge_augmented, parse_tree, save_base
from .errors import OumwozError
from .retrieval import build_index, compile_important_terms, save_index
from .session import TOPIC_STANCES, create_session
from .oum import QuestionnaireResponse
from .textproc import data_file

USAGE_EXIT = 1
DATA_EXIT = 2

CHAT_EPOCH = 1_700_000_000.0
CHAT_TICK_SECONDS = 30.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE_EXIT)


def _build_parser() -> _Parser:
    parser = _Parser(prog="oumwoz", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a tree, propagate stances, merge augments")
    p.add_argument("tree_file")
    p.add_argument("--format", choices=["json_tree", "indented"], required=True)
    p.add_argument("--topic", required=True)
    p.add_argument("--augment", action="append", default=[],
                   help="JSON file: list of {text, topic_stance[, id][, source_tag]}")
    p.add_argument("--out", required=True)

    p = sub.add_parser("index", help="build a retrieval index from a base")
    p.add_argument("--base", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="run the chat service")
    p.add_argument("--config", required=True)

    p = sub.add_parser("chat", help="terminal bot chat; writes a session log on exit")
    p.add_argument("--base", required=True)
    p.add_argument("--mode", choices=["argu_bot", "control"], required=True)
    p.add_argument("--gate", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--script", default=None, help="participant utterances, one per line")
    p.add_argument("--out", default=None, help="session log path (default: chat-<id>.json)")

    p = sub.add_parser("train-gate", help="extract labels from logs and train the gate")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--base", default=None, help="argument base for retrieval features")

    p = sub.add_parser("terms", help="compile important terms from wizard searches")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="evaluation tables from a log corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--report", choices=["actions", "oum", "experience", "correlations"], required=True)
    p.add_argument("--format", choices=["csv", "md"], default="csv")
    p.add_argument("--which", choices=["features", "experience"], default="features",
                   help="correlation flavor (correlations report only)")
    p.add_argument("--histogram-out", default=None,
                   help="also write rating histograms as CSV (experience report only)")
    p.add_argument("--out", default=None, help="write the table here instead of stdout")
    return parser


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    fmt = "indented_text" if args.format == "indented" else "json_tree"
    tree = parse_tree(Path(args.tree_file).read_bytes(), fmt)
    base = base_from_tree(tree, topic_id=args.topic)
    for augment_path in args.augment:
        extras = json.loads(Path(augment_path).read_text("utf-8"))
        base = merge_augmented(base, extras)
    save_base(base, args.out)
    print(f"wrote {args.out}: {len(base.records)} records", file=sys.stderr)
    return 0


def _cmd_index(args) -> int:
    base = load_base(args.base)
    index = build_index(base)
    save_index(index, args.out)
    print(f"wrote {args.out}: {index.N} documents, {len(index.df)} terms", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .config import load_config
    from .service import ChatService, create_app

    config = load_config(args.config)
    app = create_app(ChatService.from_config(config))
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def _default_lines(name: str) -> list[str]:
    lines = []
    for line in data_file(name).read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def _cmd_chat(args) -> int:
    base = load_base(args.base)
    index = build_index(base)
    mode = "control_bot" if args.mode == "control" else "argu_bot"
    gate = rsp.load_gate(args.gate) if args.gate else rsp.GateModel([0.0] * rsp.FEATURE_DIM, 0.0)
    hedges = _default_lines("hedges.txt")
    questions = _default_lines("question_templates.txt")
    chitchat = _default_lines("chitchat_templates.txt")
    free_model = rsp.UnigramModel.from_texts(questions)
    responder_config = rsp.ResponderConfig(hedges=hedges, question_templates=questions)
    texts = {r.id: r.text for r in base.records}

    # Logical clock so that identical (seed, script) runs produce identical logs.
    ticks = {"n": 0}

    def clock() -> float:
        ticks["n"] += 1
        return CHAT_EPOCH + CHAT_TICK_SECONDS * ticks["n"]

    session = create_session(
        topic=base.topic_id,
        mode=mode,
        clock=clock,
        session_id=f"chat-{mode}-{args.seed}",
    )
    stances = TOPIC_STANCES.get(base.topic_id)
    neutral = QuestionnaireResponse(good_reasons=4, intellect=(4, 4, 4), morality=(4, 4, 4))
    session.submit_pre(stances[0] if stances else "unspecified", neutral)

    if args.script:
        lines = [ln for ln in Path(args.script).read_text("utf-8").splitlines() if ln.strip()]
        source = iter(lines)
    else:
        source = None

    def next_utterance() -> str | None:
        if source is not None:
            return next(source, None)
        try:
            return input("you> ")
        except EOFError:
            return None

    def bot_turn() -> None:
        if mode == "control_bot":
            reply = rsp.control_respond(len(session.agent_turns()), chitchat)
        else:
            last, previous = session.last_participant_utterances()
            state = rsp.ResponderState(
                last_utterance=last or "",
                previous_utterance=previous,
                turn_index=len(session.turns),
                previous_bot_utterances=tuple(t.text for t in session.agent_turns()),
            )
            reply = rsp.respond(
                state, index, texts, gate, free_model, responder_config,
                rng_seed=args.seed + len(session.turns),
            )
        provenance = {"mode": reply.mode if reply.mode == "control" else "argu_bot", "pgen": reply.pgen}
        if reply.argument_id:
            provenance.update(argument_id=reply.argument_id, edited=False, stance=reply.stance)
        session.post_agent_turn(reply.text, provenance)
        print(f"bot> {reply.text}")

    if mode == "control_bot":
        session.post_agent_turn(chitchat[0], {"mode": "control"})
        print(f"bot> {chitchat[0]}")
    else:
        opener = f"Hello! What do you think about {base.topic_text}?"
        session.post_agent_turn(opener, {"mode": "argu_bot"})
        print(f"bot> {opener}")

    while True:
        utterance = next_utterance()
        if utterance is None or not utterance.strip():
            break
        session.post_participant_turn(utterance.strip())
        if source is not None:
            print(f"you> {utterance.strip()}")
        bot_turn()

    session.close(force=True)
    out_path = args.out or f"chat-{session.session_id}.json"
    Path(out_path).write_text(
        json.dumps(session.to_export(), ensure_ascii=False, indent=1) + "\n", "utf-8"
    )
    print(f"wrote {out_path}", file=sys.stderr)
    return 0


def _cmd_train_gate(args) -> int:
    corpus = analytics.load_corpus(args.corpus)
    index = build_index(load_base(args.base)) if args.base else None
    examples = rsp.gate_training_data(corpus, index=index)
    if not examples:
        print("corpus contains no usable agent turns", file=sys.stderr)
        return DATA_EXIT
    model = rsp.train_gate(examples, lr=args.lr, epochs=args.epochs, l2=args.l2)
    rsp.save_gate(model, args.out)
    meta = model.training_meta
    print(
        f"trained on {meta['n_examples']} examples: "
        f"loss {meta['final_loss']:.4f}, accuracy {meta['accuracy']:.3f}"
        + (" (degenerate labels)" if meta["degenerate"] else ""),
        file=sys.stderr,
    )
    return 0


def _cmd_terms(args) -> int:
    corpus = analytics.load_corpus(args.corpus)
    terms = sorted(compile_important_terms(corpus))
    Path(args.out).write_text("\n".join(terms) + ("\n" if terms else ""), "utf-8")
    print(f"wrote {args.out}: {len(terms)} terms", file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    corpus = analytics.load_corpus(args.corpus)
    if args.report == "actions":
        headers, rows = analytics.action_stats_table(analytics.wizard_action_stats(corpus))
    elif args.report == "oum":
        report = analytics.oum_report(corpus)
        headers, rows = analytics.oum_table(report)
    elif args.report == "experience":
        report = analytics.experience_report(corpus)
        headers, rows = analytics.experience_table(report)
        if args.histogram_out:
            h_headers, h_rows = analytics.histogram_table(analytics.experience_histograms(corpus))
            Path(args.histogram_out).write_text(
                analytics.render_table_csv(h_headers, h_rows), "utf-8"
            )
    else:
        report = analytics.correlation_report(corpus, which=args.which)
        headers, rows = analytics.correlation_table(report)

    if args.format == "csv":
        output = analytics.render_table_csv(headers, rows)
    else:
        output = analytics.render_table_markdown(headers, rows)
    if args.out:
        Path(args.out).write_text(output, "utf-8")
    else:
        sys.stdout.write(output)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "index": _cmd_index,
    "serve": _cmd_serve,
    "chat": _cmd_chat,
    "train-gate": _cmd_train_gate,
    "terms": _cmd_terms,
    "analyze": _cmd_analyze,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except OumwozError as exc:
        print(f"oumwoz {args.command}: {exc}", file=sys.stderr)
        return DATA_EXIT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"oumwoz {args.command}: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
