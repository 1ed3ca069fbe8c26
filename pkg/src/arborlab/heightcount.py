"""Exact and scaled joint size/height counts, and partition functions.

Everything rests on one recursion for generating functions of trees with
height at most m:

    X_1(g) = g,    X_{m+1}(g) = g / (1 - X_m(g)).

The coefficient L(N, m) = [g^N] X_m counts trees with N edges and height
at most m; differencing consecutive levels gives the exact-height count
E(N, h) = L(N, h) - L(N, h-1).  Row sums recover the Catalan numbers.

Two modes share the recursion.  Exact mode runs it on Python integers.
Scaled mode substitutes g -> g/4, so every stored entry is L(N, m) 4^-N,
which lives in [0, 1] and never overflows a float; the reciprocal series
has non-negative coefficients throughout, so no cancellation occurs.

The reciprocal 1/(1 - X_m) is expanded by schoolbook convolution,
Y_n = sum_k X_k Y_{n-k}, at O(N^2) per level and O(N^3) total.  That is
deliberate: the coefficients are dense and the simple loop is easy to
audit.  Partition functions Z_N(alpha) = sum_h h^alpha E(N, h) are
accumulated with compensated summation in ascending h.
"""

from __future__ import annotations

import json
import math
import operator
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CapExceededError,
    ModeMismatchError,
    OutOfRangeError,
)

EXACT_CAP = 512
SCALED_CAP = 20000
MATERIALIZE_CAP = 2048

CACHE_FORMAT = "arborlab-count"
CACHE_VERSION = 1
CACHE_ENV = "ARBORLAB_CACHE"


def catalan(n: int) -> int:
    """Number of trees with n edges: the (n-1)-st Catalan number."""
    if n < 1:
        raise ValueError("size must be >= 1")
    return math.comb(2 * (n - 1), n - 1) // n


def kahan_sum(terms: Iterable[float]) -> float:
    """Compensated sum; insensitive to the magnitude spread of the terms."""
    total = 0.0
    comp = 0.0
    for t in terms:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return float(total)


def _exact_levels(n_max: int) -> Iterator[tuple[int, list[int]]]:
    """Yield (m, coefficients of X_m to order n_max) with integer entries."""
    cur = [0] * (n_max + 1)
    cur[1] = 1
    yield 1, cur
    mul = operator.mul
    for m in range(2, n_max + 1):
        xs = cur[1:]
        rec = [1] * n_max
        for n in range(1, n_max):
            rec[n] = sum(map(mul, xs, reversed(rec[:n])))
        nxt = [0] * (n_max + 1)
        nxt[1:] = rec
        cur = nxt
        yield m, cur


def _scaled_levels(n_max: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (m, coefficients of X_m(g/4) to order n_max) as float64 arrays."""
    cur = np.zeros(n_max + 1)
    cur[1] = 0.25
    yield 1, cur
    for m in range(2, n_max + 1):
        xs = cur[1:]
        rec = np.empty(n_max)
        rec[0] = 1.0
        for n in range(1, n_max):
            rec[n] = np.dot(xs[:n], rec[n - 1 :: -1])
        nxt = np.zeros(n_max + 1)
        nxt[1:] = 0.25 * rec
        cur = nxt
        yield m, cur


def _levels(n_max: int, mode: str):
    if mode == "exact":
        return _exact_levels(n_max)
    if mode == "scaled":
        return _scaled_levels(n_max)
    raise ValueError(f"unknown mode {mode!r}")


def _check_cap(n_max: int, mode: str) -> None:
    cap = EXACT_CAP if mode == "exact" else SCALED_CAP
    if n_max > cap:
        raise CapExceededError(f"N_max={n_max} exceeds {mode} cap {cap}")
    if n_max < 1:
        raise ValueError("N_max must be >= 1")


@dataclass
class CountTable:
    """Triangular table of exact-height counts E(N, h), h <= N <= materialized.

    Exact mode stores Python integers; scaled mode stores E(N, h) 4^-N in a
    dense float array.  L(N, m) queries are served from cached cumulative
    rows.  The table carries a scratch cache used by the samplers.
    """

    mode: str
    n_max: int
    materialized: int
    _rows: list | None = None            # exact: _rows[N] = [E(N,1)..E(N,N)]
    _emat: np.ndarray | None = None      # scaled: _emat[N, h] = E(N,h) 4^-N
    _lmat: np.ndarray | None = field(default=None, repr=False)
    _lrows: dict = field(default_factory=dict, repr=False)
    scratch: dict = field(default_factory=dict, repr=False)

    def covers(self, n: int) -> bool:
        return 1 <= n <= self.materialized

    def _check(self, n: int) -> None:
        if not self.covers(n):
            raise OutOfRangeError(
                f"N={n} outside materialized range 1..{self.materialized}"
            )

    def row(self, n: int):
        """E(n, h) for h = 1..n; ints in exact mode, floats (times 4^-n) scaled."""
        self._check(n)
        if self.mode == "exact":
            return self._rows[n]
        return self._emat[n, 1 : n + 1]

    def E(self, n: int, h: int):
        self._check(n)
        if h < 1 or h > n:
            return 0 if self.mode == "exact" else 0.0
        if self.mode == "exact":
            return self._rows[n][h - 1]
        return self._emat[n, h]

    def L(self, n: int, m: int):
        """Count of trees with n edges and height <= m (scaled by 4^-n in scaled mode)."""
        self._check(n)
        if m >= n:
            m = n
        if m < 1:
            return 0 if self.mode == "exact" else 0.0
        if self.mode == "exact":
            lr = self._lrows.get(n)
            if lr is None:
                lr = list(_accumulate_ints(self._rows[n]))
                self._lrows[n] = lr
            return lr[m - 1]
        return self._lmat_cached()[n, m]

    def _lmat_cached(self) -> np.ndarray:
        if self._lmat is None:
            self._lmat = np.cumsum(self._emat, axis=1)
        return self._lmat

    def L_column(self, m: int, n_hi: int) -> np.ndarray:
        """Vector of L(n, m) for n = 1..n_hi (scaled mode only)."""
        if self.mode != "scaled":
            raise ModeMismatchError("column access is a scaled-mode operation")
        self._check(n_hi)
        lm = self._lmat_cached()
        # E(n, h) = 0 above h = n, so the cumsum is already flat there
        return lm[1 : n_hi + 1, min(m, lm.shape[1] - 1)].copy()

    def row_sum(self, n: int):
        return self.L(n, n)


def _accumulate_ints(row: Sequence[int]) -> Iterator[int]:
    total = 0
    for v in row:
        total += v
        yield total


def build_count_table(
    n_max: int,
    mode: str = "exact",
    materialize_cap: int = MATERIALIZE_CAP,
) -> CountTable:
    """Run the level recursion to n_max and difference into E rows.

    Rows are materialized for N <= min(n_max, materialize_cap); larger
    partition sums should go through stream_partition_functions, which
    keeps only two live coefficient vectors.
    """
    _check_cap(n_max, mode)
    mat = min(n_max, materialize_cap)
    if mode == "exact":
        rows: list = [None] * (mat + 1)
        for n in range(1, mat + 1):
            rows[n] = [0] * n
        prev = [0] * (mat + 1)
        for m, cur in _exact_levels(mat):
            for n in range(m, mat + 1):
                rows[n][m - 1] = cur[n] - prev[n]
            prev = cur
        return CountTable(mode=mode, n_max=n_max, materialized=mat, _rows=rows)
    emat = np.zeros((mat + 1, mat + 1))
    prev = np.zeros(mat + 1)
    for m, cur in _scaled_levels(mat):
        emat[m:, m] = cur[m:] - prev[m:]
        prev = cur
    return CountTable(mode=mode, n_max=n_max, materialized=mat, _emat=emat)


# --- partition functions -------------------------------------------------


@dataclass(frozen=True)
class PartitionVector:
    """Z_N(alpha) for N = 1..n_max.

    Exact mode holds integers Z_N; float mode holds the scaled values
    Z_N 4^-N, which stay bounded for every alpha of interest.
    """

    alpha: float
    mode: str          # "exact" | "float"
    n_max: int
    values: tuple

    def Z(self, n: int):
        if not 1 <= n <= self.n_max:
            raise OutOfRangeError(f"N={n} outside 1..{self.n_max}")
        return self.values[n - 1]

    @property
    def scaled(self) -> bool:
        return self.mode == "float"


def _scaled_row_from_exact(row: Sequence[int], n: int) -> list[float]:
    """E(n, h) 4^-n as floats, computed without overflow."""
    out = []
    for e in row:
        if e == 0:
            out.append(0.0)
        elif e.bit_length() < 1000:
            out.append(math.ldexp(float(e), -2 * n))
        else:
            out.append(float(Fraction(e, 1 << (2 * n))))
    return out


def partition_function(
    n_max: int,
    alpha: float,
    table: CountTable,
    mode: str | None = None,
) -> PartitionVector:
    """Z_N(alpha) = sum_h h^alpha E(N, h) for N = 1..n_max from a table.

    mode "exact" needs an exact table and integer alpha >= 0.  mode
    "float" works from either table kind and returns Z_N 4^-N.
    """
    if not table.covers(n_max):
        raise OutOfRangeError(f"table materialized to {table.materialized} < {n_max}")
    if mode is None:
        mode = "exact" if (
            table.mode == "exact"
            and float(alpha) == int(alpha)
            and int(alpha) >= 0
        ) else "float"
    if mode == "exact":
        if table.mode != "exact":
            raise ModeMismatchError("exact partition values need an exact table")
        if float(alpha) != int(alpha) or int(alpha) < 0:
            raise ModeMismatchError(
                "exact mode is defined for integer alpha >= 0 only"
            )
        a = int(alpha)
        vals = []
        for n in range(1, n_max + 1):
            row = table.row(n)
            vals.append(sum(h ** a * e for h, e in enumerate(row, start=1)))
        return PartitionVector(alpha=float(alpha), mode="exact", n_max=n_max,
                               values=tuple(vals))
    alpha = float(alpha)
    vals = []
    for n in range(1, n_max + 1):
        if table.mode == "exact":
            row = _scaled_row_from_exact(table.row(n), n)
        else:
            row = table.row(n)
        vals.append(kahan_sum(h ** alpha * e for h, e in enumerate(row, start=1)))
    return PartitionVector(alpha=alpha, mode="float", n_max=n_max,
                           values=tuple(vals))


def stream_partition_functions(
    n_max: int,
    alphas: Sequence[float],
    mode: str = "scaled",
) -> dict[float, PartitionVector]:
    """One recursion pass accumulating Z_N 4^-N for several alpha at once.

    Avoids materializing the O(N^2) table; memory stays O(N) per alpha.
    Accumulation is compensated, and levels arrive in ascending h.
    """
    if mode != "scaled":
        raise ModeMismatchError("streaming accumulation is scaled-mode only")
    _check_cap(n_max, mode)
    alphas = [float(a) for a in alphas]
    acc = {a: np.zeros(n_max + 1) for a in alphas}
    comp = {a: np.zeros(n_max + 1) for a in alphas}
    prev = np.zeros(n_max + 1)
    for m, cur in _scaled_levels(n_max):
        diff = cur[m:] - prev[m:]
        for a in alphas:
            w = m ** a
            z = acc[a][m:]
            c = comp[a][m:]
            y = w * diff - c
            t = z + y
            comp[a][m:] = (t - z) - y
            acc[a][m:] = t
        prev = cur
    return {
        a: PartitionVector(alpha=a, mode="float", n_max=n_max,
                           values=tuple(acc[a][1:].tolist()))
        for a in alphas
    }


def truncated_partition(n: int, m_cut: int, alpha: float, table: CountTable):
    """Z_{N,M}(alpha) = sum_{h <= M} h^alpha E(N, h).

    Exact tables with integer alpha give an exact int or Fraction; any
    other combination gives a float (unscaled, so keep N moderate).
    """
    table._check(n)
    hi = min(m_cut, n)
    if table.mode == "exact" and float(alpha) == int(alpha):
        a = int(alpha)
        row = table.row(n)
        if a >= 0:
            return sum(h ** a * row[h - 1] for h in range(1, hi + 1))
        return sum(Fraction(row[h - 1], h ** (-a)) for h in range(1, hi + 1))
    row = table.row(n)
    alpha = float(alpha)
    s = kahan_sum(h ** alpha * row[h - 1] for h in range(1, hi + 1))
    if table.mode == "scaled":
        if n > 500:
            raise ModeMismatchError(
                "unscaled truncated sum overflows for large N; "
                "use truncated_partition_scaled"
            )
        return s * 4.0 ** n
    return s


def truncated_partition_scaled(n: int, m_cut: int, alpha: float,
                               table: CountTable) -> float:
    """Z_{N,M}(alpha) 4^-N from a scaled table."""
    if table.mode != "scaled":
        raise ModeMismatchError("scaled truncated sums need a scaled table")
    table._check(n)
    hi = min(m_cut, n)
    row = table.row(n)
    return kahan_sum(h ** float(alpha) * row[h - 1] for h in range(1, hi + 1))


# --- cache ---------------------------------------------------------------


def cache_path(cache_dir: str, mode: str, n_max: int) -> str:
    return os.path.join(cache_dir, f"count_{mode}_{n_max}.jsonl")


def save_table(table: CountTable, cache_dir: str) -> str:
    """Write a table as JSON lines; exact integers go out as decimal strings."""
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, table.mode, table.n_max)
    header = {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "mode": table.mode,
        "N_max": table.n_max,
        "materialized": table.materialized,
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for n in range(1, table.materialized + 1):
            row = table.row(n)
            if table.mode == "exact":
                enc = [str(v) for v in row]
            else:
                enc = [float(v) for v in row]
            fh.write(json.dumps({"N": n, "E": enc}) + "\n")
    return path


def load_table(cache_dir: str, mode: str, n_max: int) -> CountTable | None:
    """Load a cached table; None unless (format, version, mode, N_max) match."""
    path = cache_path(cache_dir, mode, n_max)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError:
            return None
        if (
            header.get("format") != CACHE_FORMAT
            or header.get("version") != CACHE_VERSION
            or header.get("mode") != mode
            or header.get("N_max") != n_max
        ):
            return None
        mat = header["materialized"]
        if mode == "exact":
            rows: list = [None] * (mat + 1)
            for line in fh:
                rec = json.loads(line)
                rows[rec["N"]] = [int(v) for v in rec["E"]]
            return CountTable(mode=mode, n_max=n_max, materialized=mat, _rows=rows)
        emat = np.zeros((mat + 1, mat + 1))
        for line in fh:
            rec = json.loads(line)
            n = rec["N"]
            emat[n, 1 : n + 1] = rec["E"]
        return CountTable(mode=mode, n_max=n_max, materialized=mat, _emat=emat)
