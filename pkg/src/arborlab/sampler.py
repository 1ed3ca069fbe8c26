"""Exact samplers: the height-weighted measure, critical branching trees,
and balls of the infinite-tree local limit.

The height-weighted measure on trees with N edges puts mass
proportional to h(T)^alpha on each tree.  Sampling splits into a height
draw with weights h^alpha E(N, h), then a uniform draw among trees of
that exact height.  Both stages run on exact integer counts: for
integer alpha the height weights are cleared to a common denominator,
and the uniform stage chooses each child subtree of the current vertex
with probability proportional to the integer count of completions.  The
exact-height constraint propagates as "all parts bounded by b, at least
one part reaching b", split by inclusion-exclusion into bounded counts.

The branching-tree sampler draws child counts from the critical
geometric law p_c = 2^{-c-1}, one buffered random bit per trial, so the
whole path is integer arithmetic.  P(single edge) = 1/2 and
P(size = N) = 2 Catalan(N-1) 4^-N.  The infinite-tree ball sampler
materializes the spine to depth r-1 (degree law (k-1) 2^-k, spine child
uniform among the k-1 slots, spine rooted at the root's unique child)
and hangs depth-truncated branching trees off it.

Random draws go through RngStream, a counter-based 64-bit generator
keyed by (seed, stream id); integer draws never pass through floats, so
sequences are reproducible across platforms.
"""

from __future__ import annotations

import sys
from bisect import bisect_right
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import (
    EmptyClassError,
    ModeMismatchError,
    TruncatedError,
)
from .heightcount import CountTable
from .treecore import Tree, decode

DEFAULT_SIZE_CAP = 10 ** 6

_TWO64 = 1 << 64


class RngStream:
    """Deterministic stream of ints, bits, and floats; Philox under the hood."""

    def __init__(self, seed: int = 0, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        key = (self.seed & (_TWO64 - 1)) | (self.stream & (_TWO64 - 1)) << 64
        self._gen = np.random.Generator(np.random.Philox(key=key))
        self._word = 0
        self._nbits = 0

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n); exact for arbitrarily large n."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        if n <= (1 << 63):
            return int(self._gen.integers(0, n))
        k = n.bit_length()
        words = (k + 63) // 64
        shift = 64 * words - k
        while True:
            r = 0
            for w in self._gen.integers(0, _TWO64, size=words, dtype=np.uint64):
                r = (r << 64) | int(w)
            r >>= shift
            if r < n:
                return r

    def random(self) -> float:
        return float(self._gen.random())

    def bit(self) -> int:
        if self._nbits == 0:
            self._word = int(self._gen.integers(0, _TWO64, dtype=np.uint64))
            self._nbits = 64
        b = self._word & 1
        self._word >>= 1
        self._nbits -= 1
        return b

    def geometric_halving(self) -> int:
        """Number of 1-bits before the first 0-bit: P(c) = 2^-(c+1)."""
        c = 0
        while self.bit():
            c += 1
        return c


# --- weighted choice on exact integer weights ---------------------------


def _pick(cums: list, total, rng: RngStream, exact: bool) -> int:
    if exact:
        u = rng.randbelow(total)
    else:
        u = rng.random() * total
    return bisect_right(cums, u)


def _sampler_cache(table: CountTable) -> dict:
    return table.scratch.setdefault("sampler", {})


def _height_cdf(n: int, alpha: float, table: CountTable):
    """Cumulative weights h^alpha E(n, h); exact ints when possible."""
    cache = _sampler_cache(table)
    key = ("hcdf", n, float(alpha))
    hit = cache.get(key)
    if hit is not None:
        return hit
    row = table.row(n)
    exact = table.mode == "exact" and float(alpha) == int(alpha)
    cums: list = []
    if exact:
        a = int(alpha)
        if a >= 0:
            weights = [h ** a * row[h - 1] for h in range(1, n + 1)]
        else:
            scale = lcm(*range(1, n + 1)) ** (-a)
            weights = [(scale // h ** (-a)) * row[h - 1] for h in range(1, n + 1)]
        total = 0
        for w in weights:
            total += w
            cums.append(total)
    else:
        acc = 0.0
        for h in range(1, n + 1):
            acc += h ** float(alpha) * float(row[h - 1])
            cums.append(acc)
        total = acc
    out = (cums, total, exact)
    cache[key] = out
    return out


def sample_height(n: int, alpha: float, table: CountTable, rng: RngStream) -> int:
    """Height marginal of the weighted measure: P(h) propto h^alpha E(n, h)."""
    cums, total, exact = _height_cdf(n, alpha, table)
    if not cums or total == 0:
        raise EmptyClassError(f"no trees of size {n}")
    return _pick(cums, total, rng, exact) + 1


# --- uniform tree of exact size and height ------------------------------


def _forest_counts(b: int, table: CountTable) -> list:
    """F_b(s): number of forests of trees, each of height <= b, total size s.

    Grown lazily; F_b(0) = 1 and F_b(s) = sum_k L(k, b) F_b(s - k).
    """
    cache = _sampler_cache(table)
    key = ("forest", b)
    f = cache.get(key)
    if f is None:
        f = [1]
        cache[key] = f
    return f


def _forest_count(b: int, s: int, table: CountTable) -> int:
    if b < 1:
        return 1 if s == 0 else 0
    f = _forest_counts(b, table)
    while len(f) <= s:
        t = len(f)
        f.append(sum(table.L(k, b) * f[t - k] for k in range(1, t + 1)))
    return f[s]


def _need_count(b: int, s: int, table: CountTable) -> int:
    """Forests with parts <= b, total s, at least one part of height b."""
    return _forest_count(b, s, table) - _forest_count(b - 1, s, table)


def _free_cdf(b: int, s: int, table: CountTable):
    """First-part size distribution for an unconstrained bounded forest."""
    cache = _sampler_cache(table)
    key = ("free", b, s)
    hit = cache.get(key)
    if hit is None:
        cums = []
        total = 0
        for k in range(1, s + 1):
            total += table.L(k, b) * _forest_count(b, s - k, table)
            cums.append(total)
        hit = (cums, total)
        cache[key] = hit
    return hit


def _need_cdf(b: int, s: int, table: CountTable):
    """First-part (size, tallness) distribution under the must-reach-b rule."""
    cache = _sampler_cache(table)
    key = ("need", b, s)
    hit = cache.get(key)
    if hit is None:
        cums = []
        acts = []
        total = 0
        for k in range(1, s + 1):
            tall = (table.L(k, b) - table.L(k, b - 1)) * _forest_count(b, s - k, table)
            if tall:
                total += tall
                cums.append(total)
                acts.append((k, True))
            short = table.L(k, b - 1) * _need_count(b, s - k, table)
            if short:
                total += short
                cums.append(total)
                acts.append((k, False))
        hit = (cums, acts, total)
        cache[key] = hit
    return hit


def _build_bounded(n: int, b: int, table: CountTable, rng: RngStream,
                   out: list) -> None:
    """Append the code of a uniform tree with n edges, height <= b."""
    if n == 1:
        out.append(0)
        return
    slot = len(out)
    out.append(0)
    s = n - 1
    parts = 0
    while s > 0:
        cums, total = _free_cdf(b - 1, s, table)
        k = _pick(cums, total, rng, True) + 1
        _build_bounded(k, b - 1, table, rng, out)
        s -= k
        parts += 1
    out[slot] = parts


def _build_exact(n: int, h: int, table: CountTable, rng: RngStream,
                 out: list) -> None:
    """Append the code of a uniform tree with n edges, height exactly h."""
    if h == 1:
        out.append(0)
        return
    slot = len(out)
    out.append(0)
    s = n - 1
    b = h - 1
    parts = 0
    satisfied = False
    while s > 0:
        if satisfied:
            cums, total = _free_cdf(b, s, table)
            k = _pick(cums, total, rng, True) + 1
            _build_bounded(k, b, table, rng, out)
        else:
            cums, acts, total = _need_cdf(b, s, table)
            k, tall = acts[_pick(cums, total, rng, True)]
            if tall:
                _build_exact(k, b, table, rng, out)
                satisfied = True
            else:
                _build_bounded(k, b - 1, table, rng, out)
        s -= k
        parts += 1
    out[slot] = parts


def sample_uniform_given_height(n: int, h: int, table: CountTable,
                                rng: RngStream) -> Tree:
    """Uniform tree among the E(n, h) trees with n edges and height h."""
    if table.mode != "exact":
        raise ModeMismatchError("exact-height sampling needs an exact table")
    if h < 1 or h > n or table.E(n, h) == 0:
        raise EmptyClassError(f"no trees with size {n} and height {h}")
    if 4 * n > sys.getrecursionlimit() - 200:
        sys.setrecursionlimit(4 * n + 400)
    out: list[int] = []
    _build_exact(n, h, table, rng, out)
    return Tree(code=tuple(out), size=n, height=h)


def rejection_sample_given_height(n: int, h: int, table: CountTable,
                                  rng: RngStream) -> Tree:
    """Same law by a simpler route: uniform height <= h, retry until == h.

    Kept as an independent check on the constrained construction.
    """
    if table.mode != "exact":
        raise ModeMismatchError("exact-height sampling needs an exact table")
    if h < 1 or h > n or table.E(n, h) == 0:
        raise EmptyClassError(f"no trees with size {n} and height {h}")
    while True:
        out: list[int] = []
        _build_bounded(n, h, table, rng, out)
        t = decode(out)
        if t.height == h:
            return t


def sample_mu(n: int, alpha: float, table: CountTable, rng: RngStream) -> Tree:
    """One draw from the height-weighted measure on trees with n edges."""
    h = sample_height(n, alpha, table, rng)
    return sample_uniform_given_height(n, h, table, rng)


# --- critical branching trees and the infinite-tree ball ----------------


def _bgw_code(rng: RngStream, size_cap: int, depth_cap: int | None) -> list[int]:
    code: list[int] = []
    stack = [1]
    while stack:
        depth = len(stack)
        stack[-1] -= 1
        if depth_cap is not None and depth >= depth_cap:
            c = 0
        else:
            c = rng.geometric_halving()
        code.append(c)
        if len(code) > size_cap:
            raise TruncatedError(
                f"branching tree exceeded size cap {size_cap}",
                partial_size=len(code),
            )
        stack.append(c)
        while stack and stack[-1] == 0:
            stack.pop()
    return code


def sample_bgw_branch(rng: RngStream, size_cap: int = DEFAULT_SIZE_CAP,
                      depth_cap: int | None = None) -> Tree:
    """Critical geometric branching tree, planted: p_c = 2^-(c+1) children.

    With depth_cap set, vertices at that depth get no children (used for
    ball-limited generation).  Oversize draws raise TruncatedError and
    are never silently retried.
    """
    return decode(_bgw_code(rng, size_cap, depth_cap))


def sample_spine_degree(rng: RngStream) -> int:
    """Spine vertex degree law P(k) = (k-1) 2^-k, k >= 2."""
    return 2 + rng.geometric_halving() + rng.geometric_halving()


def sample_uipt_ball(r: int, rng: RngStream,
                     size_cap: int = DEFAULT_SIZE_CAP) -> Tree:
    """Radius-r ball of the infinite local limit around the root.

    Spine vertices sit at depths 1..r-1; each draws its degree k, places
    the spine continuation uniformly among its k-1 child slots, and fills
    the rest with independent branching trees truncated at depth r.
    """
    if r < 1:
        raise ValueError("radius must be >= 1")
    if r == 1:
        return decode([0])
    spine = [0]
    for i in range(r - 1, 0, -1):
        k = sample_spine_degree(rng)
        nkids = k - 1
        pos = rng.randbelow(nkids)
        parts: list[int] = [nkids]
        for j in range(nkids):
            if j == pos:
                parts.extend(spine)
            else:
                parts.extend(_bgw_code(rng, size_cap, depth_cap=r - i))
        spine = parts
    return decode(spine)
