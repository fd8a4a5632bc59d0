#!/usr/bin/env python3
"""Walkthrough: debate tree -> topic-stance records -> persisted base.

Stances in the input tree are relative to each node's PARENT; the platform
needs them relative to the TOPIC. A con edge flips the stance, so a node is
pro-topic exactly when its path to the root crosses an even number of con
edges.
"""

import tempfile
from pathlib import Path

from oumwoz.argbase import (
    base_from_tree,
    load_base,
    merge_augmented,
    parse_tree,
    save_base,
)

TREE = """\
Veganism is the best choice for the planet
\tPro: plant agriculture needs less land
\t\tCon: some plant crops drive deforestation too
\tCon: nutrition is harder to balance
\t\tCon: supplements cover the common gaps
\t\tPro: b12 deficiency is a real risk
"""

root = parse_tree(TREE, "indented_text")
print(f"topic: {root.text}")

for record in base_from_tree(root, topic_id="veganism").records:
    indent = "  " * record.depth
    print(f"{indent}[{record.topic_stance:>3}] {record.text}  (id={record.id})")

# "supplements cover the common gaps" attacks an attack, so it lands pro.

base = base_from_tree(root, topic_id="veganism")
base = merge_augmented(
    base,
    [
        ("grazing land could be rewilded", "pro", "survey"),
        ("food culture has real value", "con", "survey"),
    ],
)
print(f"\nafter augmentation: {len(base.records)} records "
      f"({sum(1 for r in base.records if r.source == 'augmented')} augmented)")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "veganism.base.json"
    save_base(base, path)
    reloaded = load_base(path)
    print(f"round-trip equal: {reloaded == base}")
