"""Rooted plane trees with root degree one, and the local ball geometry.

A tree is stored as its preorder child-count code: one entry per non-root
vertex, the root's unique child first.  The code length equals the number
of edges.  A sequence c_1..c_n is a valid code iff the running count of
pending vertices, started at 1 and updated by -1 + c_i per entry, stays
positive before the last entry and reaches zero exactly at the end.

Distances from the root give every vertex a depth (the root's child has
depth 1); the height of the tree is the maximum depth.  The ball of
radius r is the subtree spanned by vertices at depth <= r, and the
ultrametric between two trees is 1/r for the largest r at which their
balls agree (0 for equal trees).  Grafting plants one branch on every
vertex of a base tree at full depth, identifying the branch's root edge
with the edge into that vertex; it is the inverse of ball extraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import (
    ArityMismatchError,
    CapExceededError,
    EmptyCodeError,
    MalformedCodeError,
)

ENUMERATION_CAP = 12


@dataclass(frozen=True)
class Tree:
    """Immutable plane tree; size counts edges, height the maximum depth."""

    code: tuple[int, ...]
    size: int
    height: int

    def __iter__(self):
        return iter(self.code)


@dataclass(frozen=True)
class BallSpec:
    """A base tree of height r together with its depth-r graft slots.

    graft_positions are code indices of the vertices at depth exactly r,
    in preorder (left to right) order.
    """

    base: Tree
    r: int
    graft_positions: tuple[int, ...]

    @property
    def n_slots(self) -> int:
        return len(self.graft_positions)


def _replay_height(code: Sequence[int]) -> int:
    """Validate a code and return the height; raises on malformed input."""
    if len(code) == 0:
        raise EmptyCodeError("tree code must have at least one entry")
    stack = [1]
    height = 0
    last = len(code) - 1
    for i, c in enumerate(code):
        if not stack:
            raise MalformedCodeError(f"entry {i} has no open parent slot")
        if c < 0:
            raise MalformedCodeError(f"negative child count at entry {i}")
        depth = len(stack)
        if depth > height:
            height = depth
        stack[-1] -= 1
        stack.append(c)
        while stack and stack[-1] == 0:
            stack.pop()
        if not stack and i < last:
            raise MalformedCodeError(f"code closes early at entry {i}")
    if stack:
        raise MalformedCodeError("code ends with unfilled child slots")
    return height


def decode(code: Sequence[int]) -> Tree:
    """Build a Tree from a child-count sequence, validating as it replays."""
    code = tuple(int(c) for c in code)
    height = _replay_height(code)
    return Tree(code=code, size=len(code), height=height)


def _depths(code: Sequence[int]) -> list[int]:
    """Depth of each code entry's vertex, in code order."""
    stack = [1]
    out = []
    for c in code:
        out.append(len(stack))
        stack[-1] -= 1
        stack.append(c)
        while stack and stack[-1] == 0:
            stack.pop()
    return out


def _ball_code(tree: Tree, r: int) -> tuple[int, ...]:
    if r >= tree.height:
        return tree.code
    code = tree.code
    out = []
    stack = [1]
    i = 0
    n = len(code)
    while i < n:
        c = code[i]
        depth = len(stack)
        stack[-1] -= 1
        if depth == r:
            out.append(0)
            # skip the subtree below this vertex
            pending = c
            while pending:
                i += 1
                pending += code[i] - 1
        else:
            out.append(c)
            stack.append(c)
        while stack and stack[-1] == 0:
            stack.pop()
        i += 1
    return tuple(out)


def ball(tree: Tree, r: int) -> Tree:
    """Subtree spanned by vertices at depth <= r; the whole tree once r >= height."""
    if r < 1:
        raise ValueError("ball radius must be >= 1")
    if r >= tree.height:
        return tree
    code = _ball_code(tree, r)
    return Tree(code=code, size=len(code), height=r)


def dist(a: Tree, b: Tree) -> Fraction:
    """Ultrametric 1/r_max with r_max the largest radius of ball agreement."""
    if a.code == b.code:
        return Fraction(0)
    r = 1
    while _ball_code(a, r + 1) == _ball_code(b, r + 1):
        r += 1
    return Fraction(1, r)


def enumerate_trees(n: int, cap: int = ENUMERATION_CAP) -> list[Tree]:
    """All trees with n edges in lexicographic code order; Catalan(n-1) of them."""
    if n < 1:
        raise ValueError("size must be >= 1")
    if n > cap:
        raise CapExceededError(f"enumeration of size {n} exceeds cap {cap}")
    out: list[Tree] = []
    prefix: list[int] = []

    def rec(pending: int) -> None:
        pos = len(prefix)
        remaining = n - pos - 1
        if remaining == 0:
            # last entry must close everything: pending - 1 + c == 0
            if pending == 1:
                prefix.append(0)
                out.append(decode(prefix))
                prefix.pop()
            return
        lo = max(0, 2 - pending)
        hi = remaining - pending + 1
        for c in range(lo, hi + 1):
            prefix.append(c)
            rec(pending - 1 + c)
            prefix.pop()

    rec(1)
    return out


def ball_spec(base: Tree, r: int) -> BallSpec:
    """Package a height-r base tree with its depth-r graft slots."""
    if base.height != r:
        raise ValueError(f"base has height {base.height}, expected {r}")
    positions = tuple(i for i, d in enumerate(_depths(base.code)) if d == r)
    return BallSpec(base=base, r=r, graft_positions=positions)


def graft(spec: BallSpec, branches: Sequence[Tree]) -> Tree:
    """Plant one branch per graft slot; branch root edges land on the slot edges.

    The result T satisfies ball(T, r) == spec.base,
    size(T) == size(base) - R + sum of branch sizes, and
    height(T) == r - 1 + max branch height.
    """
    if len(branches) != spec.n_slots:
        raise ArityMismatchError(
            f"{spec.n_slots} graft slots but {len(branches)} branches"
        )
    positions = set(spec.graft_positions)
    out: list[int] = []
    it = iter(branches)
    for i, c in enumerate(spec.base.code):
        if i in positions:
            out.extend(next(it).code)
        else:
            out.append(c)
    size = spec.base.size - spec.n_slots + sum(t.size for t in branches)
    height = spec.r - 1 + max(t.height for t in branches)
    return Tree(code=tuple(out), size=size, height=height)


def extract_branches(tree: Tree, r: int) -> tuple[BallSpec, tuple[Tree, ...]]:
    """Inverse of graft: split a tree into its radius-r ball and branch tuple."""
    if not 1 <= r <= tree.height:
        raise ValueError(f"radius {r} outside 1..height={tree.height}")
    spec = ball_spec(ball(tree, r), r)
    depths = _depths(tree.code)
    branches = []
    code = tree.code
    for i, d in enumerate(depths):
        if d == r:
            # contiguous subtree span starting at i
            j = i
            pending = 1
            while pending:
                pending += code[j] - 1
                j += 1
            branches.append(decode(code[i:j]))
    return spec, tuple(branches)


def branch_iter(tree: Tree) -> Iterator[Tree]:
    """Child subtrees hanging off the root's unique child, left to right."""
    code = tree.code
    i = 1
    while i < len(code):
        j = i
        pending = 1
        while pending:
            pending += code[j] - 1
            j += 1
        yield decode(code[i:j])
        i = j
