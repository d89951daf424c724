"""In-memory R-tree (Guttman: quadratic split, max fanout 16, min fill 6).

Stores (bbox, id) pairs for memory entries; box queries return every id
whose stored bbox intersects the query box, edges inclusive. The tree is
rebuilt on load, never persisted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core.geometry import BBox

MAX_FANOUT = 16
MIN_FILL = 6


def _union(a: BBox, b: BBox) -> BBox:
    return BBox(
        min(a.min_x, b.min_x),
        min(a.min_y, b.min_y),
        max(a.max_x, b.max_x),
        max(a.max_y, b.max_y),
    )


def _area(b: BBox) -> float:
    return (b.max_x - b.min_x) * (b.max_y - b.min_y)


def _enlargement(current: BBox, extra: BBox) -> float:
    return _area(_union(current, extra)) - _area(current)


@dataclass
class _Node:
    leaf: bool
    # leaf: list of (bbox, id); internal: list of (bbox, child node)
    entries: list = field(default_factory=list)
    parent: "_Node | None" = None

    def bbox(self) -> BBox:
        box = self.entries[0][0]
        for b, _ in self.entries[1:]:
            box = _union(box, b)
        return box


class RTree:
    def __init__(self, max_fanout: int = MAX_FANOUT, min_fill: int = MIN_FILL):
        if not (2 <= min_fill <= max_fanout // 2):
            raise ValueError("min_fill must be in [2, max_fanout/2]")
        self.max_fanout = max_fanout
        self.min_fill = min_fill
        self.root = _Node(leaf=True)
        self._count = 0

    def __len__(self) -> int:
        return self._count

    # -- insertion ------------------------------------------------------------

    def insert(self, item_id, box: BBox) -> None:
        self._insert_entry(box, item_id, into_leaf=True)
        self._count += 1

    def _insert_entry(self, box: BBox, payload, into_leaf: bool, level: int | None = None) -> None:
        node = self._choose_node(box, into_leaf, level)
        node.entries.append((box, payload))
        if not into_leaf:
            payload.parent = node
        if len(node.entries) > self.max_fanout:
            self._split_and_adjust(node)
        else:
            self._adjust_upward(node)

    def _choose_node(self, box: BBox, to_leaf: bool, level: int | None) -> _Node:
        node = self.root
        depth = 0
        while True:
            if to_leaf and node.leaf:
                return node
            if not to_leaf and level is not None and depth == level:
                return node
            if node.leaf:
                return node
            best = None
            best_key = None
            for b, child in node.entries:
                key = (_enlargement(b, box), _area(b))
                if best_key is None or key < best_key:
                    best_key = key
                    best = child
            node = best
            depth += 1

    def _split_and_adjust(self, node: _Node) -> None:
        while len(node.entries) > self.max_fanout:
            sibling = self._quadratic_split(node)
            parent = node.parent
            if parent is None:
                new_root = _Node(leaf=False)
                new_root.entries = [(node.bbox(), node), (sibling.bbox(), sibling)]
                node.parent = new_root
                sibling.parent = new_root
                self.root = new_root
                return
            sibling.parent = parent
            parent.entries = [
                (node.bbox() if child is node else b, child) for b, child in parent.entries
            ]
            parent.entries.append((sibling.bbox(), sibling))
            node = parent
        self._adjust_upward(node)

    def _quadratic_split(self, node: _Node) -> _Node:
        entries = node.entries
        # PickSeeds: pair wasting the most area; ties fall to first found.
        worst = (-1.0, 0, 1)
        for i in range(len(entries)):
            for j in range(i + 1, len(entries)):
                waste = (
                    _area(_union(entries[i][0], entries[j][0]))
                    - _area(entries[i][0])
                    - _area(entries[j][0])
                )
                if waste > worst[0]:
                    worst = (waste, i, j)
        _, si, sj = worst
        group_a = [entries[si]]
        group_b = [entries[sj]]
        box_a, box_b = entries[si][0], entries[sj][0]
        rest = [e for k, e in enumerate(entries) if k not in (si, sj)]

        while rest:
            # Forced assignment keeps both groups at min fill.
            if len(group_a) + len(rest) == self.min_fill:
                group_a.extend(rest)
                rest = []
                break
            if len(group_b) + len(rest) == self.min_fill:
                group_b.extend(rest)
                rest = []
                break
            # PickNext: entry with the strongest preference.
            best_k, best_diff = 0, -1.0
            for k, (b, _) in enumerate(rest):
                d1 = _enlargement(box_a, b)
                d2 = _enlargement(box_b, b)
                diff = abs(d1 - d2)
                if diff > best_diff:
                    best_diff, best_k = diff, k
            b, payload = rest.pop(best_k)
            d1 = _enlargement(box_a, b)
            d2 = _enlargement(box_b, b)
            if (d1, _area(box_a), len(group_a)) <= (d2, _area(box_b), len(group_b)):
                group_a.append((b, payload))
                box_a = _union(box_a, b)
            else:
                group_b.append((b, payload))
                box_b = _union(box_b, b)

        node.entries = group_a
        sibling = _Node(leaf=node.leaf, entries=group_b)
        if not node.leaf:
            for _, child in group_a:
                child.parent = node
            for _, child in group_b:
                child.parent = sibling
        return sibling

    def _adjust_upward(self, node: _Node) -> None:
        while node.parent is not None:
            parent = node.parent
            parent.entries = [
                (child.bbox() if child is node else b, child) for b, child in parent.entries
            ]
            node = parent

    # -- deletion -------------------------------------------------------------

    def delete(self, item_id, box: BBox) -> bool:
        leaf = self._find_leaf(self.root, item_id, box)
        if leaf is None:
            return False
        leaf.entries = [(b, i) for b, i in leaf.entries if i != item_id]
        self._condense(leaf)
        self._count -= 1
        if not self.root.leaf and len(self.root.entries) == 1:
            self.root = self.root.entries[0][1]
            self.root.parent = None
        if not self.root.entries and not self.root.leaf:
            self.root = _Node(leaf=True)
        return True

    def _find_leaf(self, node: _Node, item_id, box: BBox) -> _Node | None:
        if node.leaf:
            for b, i in node.entries:
                if i == item_id:
                    return node
            return None
        for b, child in node.entries:
            if b.intersects(box):
                found = self._find_leaf(child, item_id, box)
                if found is not None:
                    return found
        return None

    def _condense(self, node: _Node) -> None:
        orphans: list[tuple[int, list]] = []  # (level from leaf, entries)
        level = 0
        while node.parent is not None:
            parent = node.parent
            if len(node.entries) < self.min_fill:
                parent.entries = [(b, c) for b, c in parent.entries if c is not node]
                orphans.append((level, node.entries))
            else:
                parent.entries = [
                    (child.bbox() if child is node else b, child)
                    for b, child in parent.entries
                ]
            node = parent
            level += 1
        for orphan_level, entries in orphans:
            for b, payload in entries:
                if orphan_level == 0:
                    self._insert_entry(b, payload, into_leaf=True)
                else:
                    self._reinsert_subtree(b, payload, orphan_level)

    def _reinsert_subtree(self, box: BBox, child: _Node, level_from_leaf: int) -> None:
        target_level = self._height() - 1 - level_from_leaf
        if target_level <= 0:
            # Tree shrank below the subtree's height; splice entries instead.
            for b, payload in child.entries:
                if child.leaf:
                    self._insert_entry(b, payload, into_leaf=True)
                else:
                    self._reinsert_subtree(b, payload, level_from_leaf - 1)
            return
        self._insert_entry(box, child, into_leaf=False, level=target_level - 1)

    def _height(self) -> int:
        h = 1
        node = self.root
        while not node.leaf:
            node = node.entries[0][1]
            h += 1
        return h

    # -- queries ----------------------------------------------------------------

    def query(self, box: BBox) -> list:
        """All ids whose bbox intersects the query box (edges inclusive)."""
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            for b, payload in node.entries:
                if b.intersects(box):
                    if node.leaf:
                        out.append(payload)
                    else:
                        stack.append(payload)
        return out
