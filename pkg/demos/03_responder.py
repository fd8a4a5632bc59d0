#!/usr/bin/env python3
"""Walkthrough: the gated template bot, one decision at a time.

The gate (a logistic model over five utterance features) says how free-form
the reply should be. Candidates are hedge-prefixed arguments plus question
templates; each is scored under a two-part unigram mixture weighted by the
gate, then re-ranked by BLEU similarity to the retrieved argument minus
similarity to the bot's own previous utterances.
"""

import numpy as np

from oumwoz.argbase import ArgumentBase, ArgumentRecord
from oumwoz.responder import (
    ResponderConfig,
    ResponderState,
    UnigramModel,
    featurize,
    pgen,
    respond,
    train_gate,
)
from oumwoz.retrieval import SuggestionQuery, boosted_retrieve, build_index

rng = np.random.default_rng(0)

# Train the gate on synthetic labels: 1 = wizard wrote freely, 0 = used an argument.
examples = []
for _ in range(300):
    label = int(rng.random() < 0.5)
    features = rng.random(5)
    features[2] = rng.uniform(0.0, 0.4) if label else rng.uniform(0.6, 1.0)
    examples.append((features, label))
gate = train_gate(examples, lr=0.5, epochs=300, l2=1e-4)
meta = gate.training_meta
print(f"gate trained: loss {meta['final_loss']:.4f}, accuracy {meta['accuracy']:.2f}")

base = ArgumentBase(
    topic_id="veganism",
    topic_text="veganism",
    records=[
        ArgumentRecord(id="a1", topic_id="veganism", topic_stance="pro", depth=1,
                       source="tree", path=("root",),
                       text="a plant based diet sharply cuts personal emissions"),
        ArgumentRecord(id="a2", topic_id="veganism", topic_stance="con", depth=1,
                       source="tree", path=("root",),
                       text="balanced vegan nutrition takes planning and money"),
    ],
)
index = build_index(base)
texts = {r.id: r.text for r in base.records}

state = ResponderState(
    last_utterance="I doubt my diet changes emissions much",
    turn_index=3,
    previous_bot_utterances=("Hello! What do you think about veganism?",),
)
results = boosted_retrieve(index, SuggestionQuery(state.last_utterance))
h = featurize(state, results, index)
print(f"features: {np.round(h, 3)}  ->  pgen {pgen(gate, h):.3f}")

config = ResponderConfig(
    hedges=["It could be argued that", "I see what you mean, but"],
    question_templates=["Why do you feel that way?", "What about {term}?"],
)
free_model = UnigramModel.from_texts(["Why do you feel that way?", "What makes you say that?"])

reply = respond(state, index, texts, gate, free_model, config, rng_seed=7)
print(f"\nbot says ({reply.mode}, pgen {reply.pgen:.2f}, rerank {reply.rerank_score:+.3f}):")
print(f"  {reply.text}")
if reply.argument_id:
    print(f"  grounded in {reply.argument_id} [{reply.stance}]")

# Same seed, same state: the reply is reproducible.
again = respond(state, index, texts, gate, free_model, config, rng_seed=7)
print(f"\ndeterministic: {again == reply}")
