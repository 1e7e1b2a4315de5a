"""Decoding tree: node classification, pruning, and the activation schedule.

Nodes live on layers 0 (root, width N) through n (leaves, width 1) and are
classified by their frozen pattern: rate-0 (all frozen), rate-1 (none
frozen), or arbitrary. Pruning keeps maximal rate-0/rate-1 subtrees and
labels every retained terminal with a scheduling class:

* t0: decoded in a single shot with no metric update (rate-0 nodes, and
  rate-1 nodes whose dimension exceeds the threshold w_t),
* t1: candidate-expanded against the path metrics (rate-1 nodes with
  dimension at most w_t, and maximal-likelihood nodes).

Rate-1 nodes wider than 8 that fall under the threshold are split into
width-8 rate-1 terminals; the split's internal nodes count as arbitrary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .code import PolarCode

RATE0 = "rate0"
RATE1 = "rate1"
ML = "ml"
ARB = "arb"

_SPLIT_WIDTH = 8


@dataclass
class TreeNode:
    layer: int
    idx0: int
    idx1: int
    i_v: int
    kind: str
    list_class: str | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    frozen_local: np.ndarray | None = None

    @property
    def width(self) -> int:
        return self.idx1 - self.idx0 + 1

    def is_terminal(self) -> bool:
        return self.left is None and self.right is None


def _trailing_zeros(x: int) -> int:
    return (x & -x).bit_length() - 1


def _trailing_ones(x: int) -> int:
    return _trailing_zeros(x + 1)


def boundary_layers(n: int, idx0: int, idx1: int) -> tuple[int, int]:
    """(start, stop) layers for a node covering leaves [idx0, idx1].

    The start layer is where the fresh computation for the node begins: the
    layer of the deepest right turn on the root path, 0 when the path is all
    left turns. The stop layer is where the node's partial-sum ascent ends,
    i.e. the layer of the highest ancestor reached while ascending out of
    right children.
    """
    i_s = 0 if idx0 == 0 else n - _trailing_zeros(idx0)
    i_e = n - _trailing_ones(idx1)
    return i_s, i_e


def build_tree(code: PolarCode) -> TreeNode:
    """Full balanced tree with per-node information dimension and class."""
    frozen = code.frozen

    def make(layer: int, idx0: int) -> TreeNode:
        w = 1 << (code.n - layer)
        idx1 = idx0 + w - 1
        i_v = w - int(np.count_nonzero(frozen[idx0 : idx1 + 1]))
        kind = RATE0 if i_v == 0 else RATE1 if i_v == w else ARB
        node = TreeNode(layer, idx0, idx1, i_v, kind)
        if layer < code.n:
            node.left = make(layer + 1, idx0)
            node.right = make(layer + 1, idx0 + w // 2)
        return node

    return make(0, 0)


def split_rate1(node: TreeNode) -> TreeNode:
    """Replace a wide rate-1 node by its subtree down to width-8 terminals."""
    w = node.width
    if w <= _SPLIT_WIDTH:
        return TreeNode(node.layer, node.idx0, node.idx1, node.i_v, RATE1, "t1")
    half = w // 2
    out = TreeNode(node.layer, node.idx0, node.idx1, node.i_v, ARB)
    out.left = split_rate1(TreeNode(node.layer + 1, node.idx0,
                                    node.idx0 + half - 1, half, RATE1))
    out.right = split_rate1(TreeNode(node.layer + 1, node.idx0 + half,
                                     node.idx1, half, RATE1))
    return out


@dataclass
class CodeTree:
    n: int
    k: int
    root: TreeNode
    terminals: list[TreeNode]
    w_t: int
    w_ml: int
    i_ml_max: int

    @property
    def block_len(self) -> int:
        return 1 << self.n


def prune_and_label(tree: TreeNode, w_t: int, w_ml: int,
                    i_ml_max: int = 8) -> CodeTree:
    """Pruned, labeled copy of a full tree."""
    n = tree.layer + (tree.idx1 - tree.idx0 + 1).bit_length() - 1
    if tree.layer != 0:
        raise ValueError("expected the root of a full tree")
    frozen = np.zeros(tree.width, dtype=bool)

    def mark_frozen(node: TreeNode):
        if node.is_terminal():
            frozen[node.idx0] = node.kind == RATE0
        else:
            mark_frozen(node.left)
            mark_frozen(node.right)

    mark_frozen(tree)

    def build(node: TreeNode) -> TreeNode:
        if node.kind == RATE0:
            return TreeNode(node.layer, node.idx0, node.idx1, 0, RATE0, "t0")
        if node.kind == RATE1:
            if node.i_v <= w_t:
                return split_rate1(node)
            return TreeNode(node.layer, node.idx0, node.idx1, node.i_v, RATE1, "t0")
        if node.width <= w_ml and node.i_v <= i_ml_max:
            local = frozen[node.idx0 : node.idx1 + 1].copy()
            return TreeNode(node.layer, node.idx0, node.idx1, node.i_v, ML, "t1",
                            frozen_local=local)
        out = TreeNode(node.layer, node.idx0, node.idx1, node.i_v, ARB)
        out.left = build(node.left)
        out.right = build(node.right)
        return out

    root = build(tree)
    terminals: list[TreeNode] = []

    def collect(node: TreeNode):
        if node.is_terminal():
            terminals.append(node)
        else:
            collect(node.left)
            collect(node.right)

    collect(root)
    k = tree.i_v
    return CodeTree(n, k, root, terminals, w_t, w_ml, i_ml_max)


@dataclass
class Action:
    """One schedule step. op is 'compute', 'decode_t0', 'decode_t1', or 'psum'."""

    op: str
    node: TreeNode
    i_s: int
    i_e: int
    top: int


def schedule(ctree: CodeTree) -> list[Action]:
    """Ordered action list walked by the node-based decoders.

    Each terminal contributes a compute action covering layers
    max(i_s, 1)..top (omitted when that range is empty), its decode action,
    and a partial-sum ascent. Rate-0 terminals stop the compute one layer
    short: their own layer is never materialized, only the ancestors later
    g-steps read from.
    """
    actions: list[Action] = []
    for node in ctree.terminals:
        i_s, i_e = boundary_layers(ctree.n, node.idx0, node.idx1)
        top = node.layer - 1 if node.kind == RATE0 else node.layer
        if max(i_s, 1) <= top:
            actions.append(Action("compute", node, i_s, i_e, top))
        op = "decode_t1" if node.list_class == "t1" else "decode_t0"
        actions.append(Action(op, node, i_s, i_e, top))
        actions.append(Action("psum", node, i_s, i_e, top))
    return actions


def validate_tree(ctree: CodeTree) -> None:
    """Assert the structural invariants of a pruned tree."""
    spans = [(t.idx0, t.idx1) for t in ctree.terminals]
    assert spans == sorted(spans)
    cursor = 0
    for a, b in spans:
        assert a == cursor and b >= a
        cursor = b + 1
    assert cursor == ctree.block_len

    assert sum(t.i_v for t in ctree.terminals) == ctree.k
    for t in ctree.terminals:
        i_s, i_e = boundary_layers(ctree.n, t.idx0, t.idx1)
        assert i_s <= t.layer and i_e <= t.layer
        if t.kind == RATE1:
            assert t.i_v == t.width
            if t.list_class == "t1":
                assert t.width in (1, 2, 4, 8)
                assert t.i_v <= max(ctree.w_t, _SPLIT_WIDTH)
        elif t.kind == RATE0:
            assert t.i_v == 0 and t.list_class == "t0"
        elif t.kind == ML:
            assert t.list_class == "t1"
            assert t.width <= ctree.w_ml and t.i_v <= ctree.i_ml_max
            assert t.frozen_local is not None and t.frozen_local.size == t.width


def dump_tree(ctree: CodeTree) -> str:
    """Indented text rendering of the pruned tree."""
    lines: list[str] = []

    def walk(node: TreeNode, depth: int):
        tag = node.kind + (f"/{node.list_class}" if node.list_class else "")
        lines.append("  " * depth +
                     f"[{node.idx0},{node.idx1}] layer={node.layer} "
                     f"w={node.width} i={node.i_v} {tag}")
        if not node.is_terminal():
            walk(node.left, depth + 1)
            walk(node.right, depth + 1)

    walk(ctree.root, 0)
    return "\n".join(lines)


def to_dot(ctree: CodeTree) -> str:
    """GraphViz rendering of the pruned tree."""
    lines = ["digraph tree {", "  node [shape=box, fontsize=10];"]
    counter = [0]

    def walk(node: TreeNode) -> int:
        my_id = counter[0]
        counter[0] += 1
        tag = node.kind + (f"/{node.list_class}" if node.list_class else "")
        color = {"rate0": "gray80", "rate1": "lightblue", "ml": "palegreen"}.get(
            node.kind if node.is_terminal() else "", "white")
        lines.append(f'  n{my_id} [label="[{node.idx0},{node.idx1}]\\n{tag} i={node.i_v}"'
                     f', style=filled, fillcolor={color}];')
        if not node.is_terminal():
            for child in (node.left, node.right):
                cid = walk(child)
                lines.append(f"  n{my_id} -> n{cid};")
        return my_id

    walk(ctree.root)
    lines.append("}")
    return "\n".join(lines)
