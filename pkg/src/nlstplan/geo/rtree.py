"""Static R-tree built once with Sort-Tile-Recursive packing.

The tree is read-only after the build (datasets never change), which keeps
it deterministic: the same entry order always yields the same node layout.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

from ..errors import EmptyInput
from .types import Rect

TupleId = int


@dataclass
class _Node:
    rect: Rect
    # leaf nodes carry (rect, id) entries, inner nodes carry child nodes
    entries: list[tuple[Rect, TupleId]] = field(default_factory=list)
    children: list["_Node"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


def _union_rect(rects: list[Rect]) -> Rect:
    out = rects[0]
    for r in rects[1:]:
        out = out.union(r)
    return out


def _grouped(items: list, group_size: int, min_fill: int) -> list[list]:
    """Chunk items into runs of group_size, rebalancing the tail so every
    group holds at least min_fill items (callers guarantee len > min_fill
    or accept a single short group)."""
    if len(items) <= group_size:
        return [items]
    groups = [items[i:i + group_size] for i in range(0, len(items), group_size)]
    if len(groups) >= 2 and len(groups[-1]) < min_fill:
        merged = groups[-2] + groups[-1]
        half = (len(merged) + 1) // 2
        groups[-2:] = [merged[:half], merged[half:]]
    return groups


class RTree:
    """Height-balanced R-tree over (Rect, tuple-id) entries."""

    def __init__(self, root: _Node, fanout: int, size: int, height: int):
        self._root = root
        self.fanout = fanout
        self.size = size
        self.height = height

    def window(self, w: Rect) -> set[TupleId]:
        """Ids of all entries whose rect intersects w (closed boundaries)."""
        out: set[TupleId] = set()
        stack = [self._root]
        while stack:
            node = stack.pop()
            if not node.rect.intersects(w):
                continue
            if node.is_leaf:
                out.update(tid for rect, tid in node.entries if rect.intersects(w))
            else:
                stack.extend(child for child in node.children if child.rect.intersects(w))
        return out

    def structural_hash(self) -> str:
        """Digest of the full node layout; equal layouts hash equally."""
        h = hashlib.sha256()

        def visit(node: _Node) -> None:
            h.update(f"N{node.rect.xmin},{node.rect.ymin},{node.rect.xmax},{node.rect.ymax};".encode())
            if node.is_leaf:
                for rect, tid in node.entries:
                    h.update(f"E{rect.xmin},{rect.ymin},{rect.xmax},{rect.ymax},{tid};".encode())
            else:
                h.update(f"C{len(node.children)};".encode())
                for child in node.children:
                    visit(child)

        visit(self._root)
        return h.hexdigest()

    def check_invariants(self) -> None:
        """Structure check: fill factors and parent/child rect containment."""
        def visit(node: _Node, is_root: bool) -> None:
            count = len(node.entries) if node.is_leaf else len(node.children)
            if not is_root:
                min_fill = math.ceil(self.fanout / 2)
                assert min_fill <= count <= self.fanout, f"node fill {count} outside [{min_fill}, {self.fanout}]"
            else:
                assert count <= self.fanout
            if node.is_leaf:
                for rect, _ in node.entries:
                    assert node.rect.union(rect) == node.rect
            else:
                for child in node.children:
                    assert node.rect.union(child.rect) == node.rect
                    visit(child, False)

        visit(self._root, True)


def rtree_bulk_load(entries: list[tuple[Rect, TupleId]], fanout: int = 8) -> RTree:
    """Pack entries bottom-up with STR: sort by x-center into vertical
    slices, sort each slice by y-center, emit nodes of `fanout` entries."""
    if fanout < 4:
        raise ValueError(f"fanout must be >= 4, got {fanout}")
    if not entries:
        raise EmptyInput("cannot bulk-load an empty entry list")

    min_fill = math.ceil(fanout / 2)

    def tile(items: list, rect_of) -> list[list]:
        n = len(items)
        leaf_count = math.ceil(n / fanout)
        slice_count = math.ceil(math.sqrt(leaf_count))
        per_slice = math.ceil(n / slice_count)
        by_x = sorted(items, key=lambda it: (rect_of(it).xmin + rect_of(it).xmax))
        groups: list[list] = []
        for i in range(0, n, per_slice):
            sl = sorted(by_x[i:i + per_slice], key=lambda it: (rect_of(it).ymin + rect_of(it).ymax))
            groups.extend(_grouped(sl, fanout, min_fill))
        # A short final slice can leave one under-filled tail group; fold it
        # into its neighbor (and re-split only if that would overflow).
        if len(groups) >= 2 and len(groups[-1]) < min_fill:
            merged = groups[-2] + groups[-1]
            if len(merged) <= fanout:
                groups[-2:] = [merged]
            else:
                half = (len(merged) + 1) // 2
                groups[-2:] = [merged[:half], merged[half:]]
        return groups

    level: list[_Node] = [
        _Node(rect=_union_rect([r for r, _ in grp]), entries=grp)
        for grp in tile(list(entries), lambda it: it[0])
    ]
    height = 1
    while len(level) > fanout:
        level = [
            _Node(rect=_union_rect([c.rect for c in grp]), children=grp)
            for grp in tile(level, lambda node: node.rect)
        ]
        height += 1
    if len(level) == 1:
        root = level[0]
    else:
        root = _Node(rect=_union_rect([c.rect for c in level]), children=level)
        height += 1
    return RTree(root, fanout, len(entries), height)
