"""Ball masses: finite-size exact values against the local-limit law.

Around the root, the weighted measures converge to a limit assigning
each base tree T0 of height r the ball mass

    Lambda(T0) = R 2^{R+1} 4^{-|T0|},

with R the number of vertices of T0 at depth exactly r.  The limit does
not depend on the height exponent.  Summed over all bases of a fixed
height r the masses add to one.

At finite N the exact ball mass is a sum over graft profiles: trees
with ball T0 are exactly the grafts of R branches (T_1..T_R) with total
size N - |T0| + R, and such a graft has height r - 1 + max h(T_i).  The
mass is assembled from the per-branch count tables by an R-fold size
convolution, carrying the running maximum height through an
inclusion-exclusion on bounded-height counts: with

    D_R(s, H) = number of R-tuples, total size s, all heights <= H,

the profile count at exact max H is D_R(s, H) - D_R(s, H-1).  One DP
table serves a whole sweep over N; in scaled mode every entry carries
4^-s and the final mass multiplies by 4^{R-|T0|}, so nothing overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ModeMismatchError, TooSmallError
from .heightcount import CountTable, kahan_sum
from .sampler import RngStream, sample_mu
from .treecore import Tree, _ball_code, _depths


@dataclass(frozen=True)
class BallMassReport:
    """Mass of one ball event at one size, next to its limit value."""

    t0_code: tuple[int, ...]
    r: int
    n_slots: int
    alpha: float
    N: int
    mass: float
    mass_exact: Fraction | None
    lam: Fraction
    gap: float
    method: str                  # "exact-rational" | "scaled" | "empirical"
    draws: int | None = None
    ci_halfwidth: float | None = None


def lambda_of(t0: Tree) -> Fraction:
    """Limit ball mass R 2^{R+1} 4^{-|T0|} of the base tree t0."""
    r = t0.height
    slots = sum(1 for d in _depths(t0.code) if d == r)
    return Fraction(slots * 2 ** (slots + 1), 4 ** t0.size)


def lambda_partial_sum(r: int, size_cap: int,
                       table: CountTable | None = None) -> tuple[Fraction, float]:
    """Sum of Lambda over bases of height r with at most size_cap edges.

    Returns the exact partial sum and a geometric estimate of the
    missing tail, extrapolated from the last two per-size contributions.
    The full sum over each height class is one.  A count table, when
    supplied, cross-checks the profile totals against its height rows.
    """
    if r < 1:
        raise ValueError("height must be >= 1")
    if r == 1:
        return (Fraction(1) if size_cap >= 1 else Fraction(0)), 0.0
    # profile[n] maps (count of depth-m vertices) -> number of trees,
    # over trees with n edges and height <= m
    profile: list[dict[int, int]] = [dict() for _ in range(size_cap + 1)]
    if size_cap >= 1:
        profile[1] = {1: 1}
    for _m in range(2, r + 1):
        forest: list[dict[int, int]] = [dict() for _ in range(size_cap)]
        forest[0] = {0: 1}
        for s in range(1, size_cap):
            acc: dict[int, int] = {}
            for k in range(1, s + 1):
                for j1, c1 in profile[k].items():
                    for j2, c2 in forest[s - k].items():
                        acc[j1 + j2] = acc.get(j1 + j2, 0) + c1 * c2
            forest[s] = acc
        profile = [dict()] + [forest[n - 1] for n in range(1, size_cap + 1)]
    partial = Fraction(0)
    per_size = []
    for n in range(1, size_cap + 1):
        contrib = Fraction(0)
        at_depth = 0
        for j, cnt in profile[n].items():
            if j >= 1:
                contrib += Fraction(cnt * j * 2 ** (j + 1), 4 ** n)
                at_depth += cnt
        if table is not None and table.mode == "exact" and table.covers(n):
            if at_depth != table.E(n, r):
                raise AssertionError(
                    f"profile total disagrees with count table at N={n}"
                )
        partial += contrib
        per_size.append(float(contrib))
    tail = 0.0
    if len(per_size) >= 2 and per_size[-2] > 0:
        rho = per_size[-1] / per_size[-2]
        if 0 < rho < 1:
            tail = per_size[-1] * rho / (1.0 - rho)
        else:
            tail = float("inf")
    return partial, tail


# --- exact ball masses ---------------------------------------------------


def _slots_of(t0: Tree) -> int:
    return sum(1 for d in _depths(t0.code) if d == t0.height)


def _exact_Z(n: int, alpha: int, table: CountTable) -> Fraction:
    key = ("Zexact", n, alpha)
    hit = table.scratch.get(key)
    if hit is None:
        row = table.row(n)
        if alpha >= 0:
            hit = Fraction(sum(h ** alpha * e for h, e in enumerate(row, 1)))
        else:
            hit = sum(Fraction(e, h ** (-alpha)) for h, e in enumerate(row, 1))
        table.scratch[key] = hit
    return hit


def _exact_profile_mass(t0: Tree, n: int, alpha: int,
                        table: CountTable) -> Fraction:
    r = t0.height
    slots = _slots_of(t0)
    s = n - t0.size + slots
    h_hi = s - slots + 1
    # bounded[H][k] = L(k+1, H); R-fold integer convolution per height cap
    per_h = []
    for cap in range(0, h_hi + 1):
        col = [table.L(k, cap) for k in range(1, s + 1)]
        d = col
        for _ in range(slots - 1):
            d = _int_conv(d, col, s - slots + 1)
        per_h.append(d)
    num = Fraction(0)
    idx = s - slots
    for cap in range(1, h_hi + 1):
        cnt = per_h[cap][idx] - per_h[cap - 1][idx]
        if cnt == 0:
            continue
        height = r - 1 + cap
        if alpha >= 0:
            num += cnt * height ** alpha
        else:
            num += Fraction(cnt, height ** (-alpha))
    return num / _exact_Z(n, alpha, table)


def _int_conv(a: list, b: list, keep: int) -> list:
    out = [0] * min(len(a) + len(b) - 1, max(keep, 1) + len(b))
    for i, av in enumerate(a):
        if av == 0:
            continue
        for j, bv in enumerate(b):
            k = i + j
            if k >= len(out):
                break
            out[k] += av * bv
    return out


def _scaled_profile_table(slots: int, s_max: int, table: CountTable) -> np.ndarray:
    """mat[H, j] = D_slots(j + slots, H) 4^-(j+slots), H = 0..h_cap."""
    key = ("ballDP", slots, s_max)
    hit = table.scratch.get(key)
    if hit is not None:
        return hit
    h_cap = s_max - slots + 1
    mat = np.zeros((h_cap + 1, s_max - slots + 1))
    for cap in range(1, h_cap + 1):
        col = table.L_column(cap, s_max)
        d = col
        for _ in range(slots - 1):
            d = np.convolve(d, col)
        mat[cap, :] = d[: s_max - slots + 1]
    table.scratch[key] = mat
    return mat


def exact_ball_mass(t0: Tree, n: int, alpha: float, table: CountTable,
                    z_scaled: float | None = None) -> BallMassReport:
    """Weighted-measure mass of the event ball_r(T) = t0 at size n.

    Exact tables with integer alpha give an exact rational; scaled
    tables evaluate in floats via the shared convolution table.
    z_scaled can pass a precomputed Z_n 4^-n to skip the row sum.
    """
    if n < t0.size:
        raise TooSmallError(f"N={n} cannot contain a base of size {t0.size}")
    lam = lambda_of(t0)
    r = t0.height
    slots = _slots_of(t0)
    if table.mode == "exact":
        if float(alpha) != int(alpha):
            raise ModeMismatchError(
                "rational ball masses need an integer height exponent"
            )
        mass = _exact_profile_mass(t0, n, int(alpha), table)
        return BallMassReport(
            t0_code=t0.code, r=r, n_slots=slots, alpha=float(alpha), N=n,
            mass=float(mass), mass_exact=mass, lam=lam,
            gap=abs(float(mass) - float(lam)), method="exact-rational",
        )
    s = n - t0.size + slots
    mat = _scaled_profile_table(slots, s, table)
    value = _scaled_mass_from_table(t0, n, float(alpha), table, mat, z_scaled)
    return BallMassReport(
        t0_code=t0.code, r=r, n_slots=slots, alpha=float(alpha), N=n,
        mass=value, mass_exact=None, lam=lam,
        gap=abs(value - float(lam)), method="scaled",
    )


def _scaled_mass_from_table(t0: Tree, n: int, alpha: float,
                            table: CountTable, mat: np.ndarray,
                            z_scaled: float | None) -> float:
    from .heightcount import partition_function

    r = t0.height
    slots = _slots_of(t0)
    s = n - t0.size + slots
    j = s - slots
    h_cap = min(mat.shape[0] - 1, s - slots + 1)
    counts = mat[1 : h_cap + 1, j] - mat[0:h_cap, j]
    heights = r - 1 + np.arange(1, h_cap + 1, dtype=float)
    num = kahan_sum(w * c for w, c in zip(heights ** float(alpha), counts))
    if z_scaled is None:
        z_scaled = partition_function(n, alpha, table, mode="float").Z(n)
    return num * 4.0 ** (slots - t0.size) / z_scaled


def ball_mass_sweep(t0: Tree, n_list, alpha: float,
                    table: CountTable) -> list[BallMassReport]:
    """Exact masses at several sizes from one convolution table (scaled)."""
    if table.mode != "scaled":
        raise ModeMismatchError("sweeps run on a scaled table")
    from .heightcount import partition_function

    n_list = sorted(set(int(n) for n in n_list))
    if not n_list:
        return []
    if n_list[0] < t0.size:
        raise TooSmallError(f"N={n_list[0]} below base size {t0.size}")
    slots = _slots_of(t0)
    s_max = n_list[-1] - t0.size + slots
    mat = _scaled_profile_table(slots, s_max, table)
    pv = partition_function(n_list[-1], alpha, table, mode="float")
    lam = lambda_of(t0)
    out = []
    for n in n_list:
        value = _scaled_mass_from_table(t0, n, float(alpha), table, mat,
                                        pv.Z(n))
        out.append(BallMassReport(
            t0_code=t0.code, r=t0.height, n_slots=slots, alpha=float(alpha),
            N=n, mass=value, mass_exact=None, lam=lam,
            gap=abs(value - float(lam)), method="scaled",
        ))
    return out


def empirical_ball_mass(t0: Tree, n: int, alpha: float, draws: int,
                        table: CountTable, rng: RngStream,
                        z_conf: float = 1.96) -> BallMassReport:
    """Monte Carlo estimate of the same mass, with a Wilson interval."""
    if n < t0.size:
        raise TooSmallError(f"N={n} cannot contain a base of size {t0.size}")
    r = t0.height
    hits = 0
    for _ in range(draws):
        t = sample_mu(n, alpha, table, rng)
        if _ball_code(t, r) == t0.code:
            hits += 1
    p = hits / draws
    z2 = z_conf * z_conf
    center = (p + z2 / (2 * draws)) / (1 + z2 / draws)
    half = (
        z_conf
        * ((p * (1 - p) + z2 / (4 * draws)) / draws) ** 0.5
        / (1 + z2 / draws)
    )
    lam = lambda_of(t0)
    return BallMassReport(
        t0_code=t0.code, r=r, n_slots=_slots_of(t0), alpha=float(alpha), N=n,
        mass=center, mass_exact=None, lam=lam,
        gap=abs(center - float(lam)), method="empirical",
        draws=draws, ci_halfwidth=half,
    )
