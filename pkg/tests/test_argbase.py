"""Tree parsing, stance propagation (vs. a path-parity oracle), persistence."""

import json
import random

import pytest

from oumwoz.argbase import (
    ArgumentTreeNode,
    base_from_tree,
    load_base,
    merge_augmented,
    parse_tree,
    propagate_stances,
    save_base,
    serialize_tree,
)
from oumwoz.errors import DuplicateId, IoError, MalformedInput, SchemaVersionMismatch


class TestParseJsonTree:
    def test_minimal_tree(self):
        root = parse_tree(b'{"text":"T","children":[{"stance":"pro","text":"A","children":[]}]}', "json_tree")
        assert root.text == "T"
        assert root.local_stance is None
        assert [c.text for c in root.children] == ["A"]
        assert root.children[0].local_stance == "pro"

    def test_dotted_ids_assigned(self):
        root = parse_tree(
            json.dumps(
                {
                    "text": "T",
                    "children": [
                        {"stance": "pro", "text": "A", "children": [
                            {"stance": "con", "text": "B", "children": []},
                            {"stance": "pro", "text": "C", "children": []},
                        ]},
                        {"stance": "con", "text": "D", "children": []},
                    ],
                }
            ),
            "json_tree",
        )
        assert root.id == "0"
        assert root.children[0].id == "1"
        assert root.children[0].children[0].id == "1.1"
        assert root.children[0].children[1].id == "1.2"
        assert root.children[1].id == "2"

    def test_missing_stance_rejected(self):
        with pytest.raises(MalformedInput):
            parse_tree('{"text":"T","children":[{"text":"A","children":[]}]}', "json_tree")

    def test_empty_text_rejected(self):
        with pytest.raises(MalformedInput):
            parse_tree('{"text":"  ","children":[]}', "json_tree")

    def test_root_stance_rejected(self):
        with pytest.raises(MalformedInput):
            parse_tree('{"text":"T","stance":"pro","children":[]}', "json_tree")

    def test_duplicate_explicit_ids_rejected(self):
        doc = {
            "text": "T",
            "children": [
                {"id": "x", "stance": "pro", "text": "A", "children": []},
                {"id": "x", "stance": "con", "text": "B", "children": []},
            ],
        }
        with pytest.raises(DuplicateId):
            parse_tree(json.dumps(doc), "json_tree")


class TestParseIndented:
    def test_basic_nesting(self):
        root = parse_tree("T\n\tPro: A\n\t\tCon: B", "indented_text")
        assert root.text == "T"
        assert root.children[0].text == "A"
        assert root.children[0].local_stance == "pro"
        assert root.children[0].children[0].local_stance == "con"

    def test_missing_prefix_reports_line(self):
        with pytest.raises(MalformedInput) as err:
            parse_tree("T\n\tA has no prefix", "indented_text")
        assert err.value.line == 2

    def test_bad_nesting_jump(self):
        with pytest.raises(MalformedInput):
            parse_tree("T\n\t\t\tPro: too deep", "indented_text")

    def test_siblings_after_descent(self):
        root = parse_tree("T\n\tPro: A\n\t\tCon: B\n\tCon: C", "indented_text")
        assert [c.text for c in root.children] == ["A", "C"]


class TestSerializeRoundTrip:
    def _tree(self):
        return parse_tree(
            "T\n\tPro: A\n\t\tCon: B\n\t\tPro: C\n\tCon: D\n\t\tCon: E",
            "indented_text",
        )

    def _structure(self, node):
        return (node.text, node.local_stance, tuple(self._structure(c) for c in node.children))

    @pytest.mark.parametrize("fmt", ["json_tree", "indented_text"])
    def test_parse_serialize_identity(self, fmt):
        tree = self._tree()
        again = parse_tree(serialize_tree(tree, fmt), fmt)
        assert self._structure(again) == self._structure(tree)


def parity_oracle(root):
    """Independent DFS: stance is pro iff the con-edge count to the root is even."""
    expected = {}

    def walk(node, con_edges):
        for child in node.children:
            edges = con_edges + (1 if child.local_stance == "con" else 0)
            expected[child.id] = "pro" if edges % 2 == 0 else "con"
            walk(child, edges)

    walk(root, 0)
    return expected


def random_tree(rng, max_nodes):
    root = ArgumentTreeNode(text="topic", id="root")
    nodes = [root]
    for i in range(rng.randrange(1, max_nodes)):
        parent = rng.choice(nodes)
        child = ArgumentTreeNode(
            text=f"arg {i}",
            local_stance=rng.choice(["pro", "con"]),
            id=f"n{i}",
        )
        parent.children.append(child)
        nodes.append(child)
    return root


class TestPropagation:
    def test_pro_parent_rules(self):
        root = parse_tree("T\n\tPro: A\n\t\tCon: B", "indented_text")
        records = {r.text: r.topic_stance for r in propagate_stances(root)}
        assert records == {"A": "pro", "B": "con"}

    def test_con_parent_flips_con_child(self):
        root = parse_tree("T\n\tCon: C\n\t\tCon: D", "indented_text")
        records = {r.text: r.topic_stance for r in propagate_stances(root)}
        assert records == {"C": "con", "D": "pro"}

    def test_depth_and_path(self):
        root = parse_tree("T\n\tPro: A\n\t\tCon: B", "indented_text")
        by_text = {r.text: r for r in propagate_stances(root)}
        assert by_text["A"].depth == 1
        assert by_text["B"].depth == 2
        assert by_text["B"].path == ("0", "1")
        assert by_text["A"].path[0] == "0"

    def test_parity_oracle_on_random_trees(self):
        rng = random.Random(1234)
        for _ in range(200):
            tree = random_tree(rng, max_nodes=60)
            expected = parity_oracle(tree)
            actual = {r.id: r.topic_stance for r in propagate_stances(tree)}
            assert actual == expected

    def test_record_count_is_nonroot_count(self):
        rng = random.Random(5)
        tree = random_tree(rng, max_nodes=40)
        count = 0
        stack = [tree]
        while stack:
            node = stack.pop()
            count += len(node.children)
            stack.extend(node.children)
        assert len(propagate_stances(tree)) == count

    def test_sibling_order_independence(self):
        rng = random.Random(7)
        tree = random_tree(rng, max_nodes=40)
        before = {r.id: r.topic_stance for r in propagate_stances(tree)}

        def shuffle(node):
            rng.shuffle(node.children)
            for child in node.children:
                shuffle(child)

        shuffle(tree)
        after = {r.id: r.topic_stance for r in propagate_stances(tree)}
        assert after == before


class TestMergeAugmented:
    def _base(self, n=10):
        root = ArgumentTreeNode(text="topic", id="root")
        for i in range(n):
            root.children.append(
                ArgumentTreeNode(text=f"arg {i}", local_stance="pro", id=f"n{i}")
            )
        return base_from_tree(root, topic_id="t")

    def test_appends_with_fresh_ids(self):
        base = merge_augmented(self._base(10), [("X", "pro"), ("Y", "con")])
        assert len(base.records) == 12
        augmented = [r for r in base.records if r.source == "augmented"]
        assert len(augmented) == 2
        assert all(r.depth == 1 and r.path == ("root",) for r in augmented)

    def test_empty_merge_is_identity(self):
        base = self._base(3)
        merged = merge_augmented(base, [])
        assert merged.records == base.records

    def test_explicit_id_collision(self):
        with pytest.raises(DuplicateId):
            merge_augmented(self._base(3), [{"text": "X", "topic_stance": "pro", "id": "n1"}])

    def test_counts_match_two_source_merge(self):
        # Tree records plus two augmentation batches of 479 and 108 items.
        base = self._base(50)
        first = [(f"aug a {i}", "con", "setA") for i in range(479)]
        second = [(f"aug b {i}", "pro", "setB") for i in range(108)]
        merged = merge_augmented(merge_augmented(base, first), second)
        assert len(merged.records) == 50 + 479 + 108

    def test_original_records_unchanged(self):
        base = self._base(4)
        merged = merge_augmented(base, [("X", "con")])
        assert merged.records[:4] == base.records


class TestPersistence:
    def test_round_trip(self, tmp_path):
        base = merge_augmented(
            base_from_tree(parse_tree("T\n\tPro: A\n\t\tCon: B", "indented_text"), "veg"),
            [("Extra", "con")],
        )
        path = tmp_path / "base.json"
        save_base(base, path)
        assert load_base(path) == base

    def test_truncated_file_fails_cleanly(self, tmp_path):
        base = base_from_tree(parse_tree("T\n\tPro: A", "indented_text"), "veg")
        path = tmp_path / "base.json"
        save_base(base, path)
        content = path.read_text("utf-8")
        path.write_text(content[: len(content) // 2], "utf-8")
        with pytest.raises((IoError, SchemaVersionMismatch)):
            load_base(path)

    def test_version_mismatch_names_versions(self, tmp_path):
        path = tmp_path / "base.json"
        path.write_text(json.dumps({"schema_version": 99, "topic_id": "x", "topic_text": "x", "records": []}), "utf-8")
        with pytest.raises(SchemaVersionMismatch) as err:
            load_base(path)
        assert err.value.expected == 1
        assert err.value.found == 99

    def test_file_schema_keys(self, tmp_path):
        base = base_from_tree(parse_tree("T\n\tPro: A", "indented_text"), "veg")
        path = tmp_path / "base.json"
        save_base(base, path)
        doc = json.loads(path.read_text("utf-8"))
        assert set(doc) == {"schema_version", "topic_id", "topic_text", "records"}
        assert set(doc["records"][0]) == {"id", "text", "topic_stance", "depth", "source", "path"}
