"""Singularity analysis toolkit: Laurent data, amplitudes, closed forms.

The height-resolved generating functions have a closed form in the
variable z with z^2 = 1 - 4g.  Writing rho = (1+z)/(1-z),

    X_m(g) = 2g (rho^m - 1) / ((1+z) rho^m - (1-z)),

and the level difference is X_m - X_{m-1} = z^2 / D_m(z) with

    D_m(z) = (1+z)/2 rho^m + (1-z)/2 rho^-m - 1
           = 2 sinh^2(w/2) + z sinh(w),      w = 2m atanh(z).

Small-z behaviour is governed by the Laurent expansion

    1/(cosh(2t) - 1) = (1/(2t^2)) (1 + sum_k A_k (2t)^{2k}),

whose rational coefficients A_k obey A_0 = 1 and
A_k = -sum_{l<k} 2 A_l / (2(k-l+1))!.  The weighted sums over levels
acquire an algebraic singular term c_alpha z^{1-alpha} for generic
exponents; on the odd boundaries alpha = 1, -1, -3, ... the algebraic
term degenerates to d_n z^{2n} log z with d_n = -2^{2n-1} A_n.  The
coefficient-asymptotics amplitude is

    C_alpha = c_alpha / Gamma((alpha-1)/2)        (generic),
    C_alpha = 4^{n-1} |A_n| n!                    (alpha = -(2n-1), n >= 1),

so that Z_N(alpha) = C_alpha N^{(alpha-3)/2} 4^N (1 + o(1)).

c_alpha itself is an integral of t^alpha against 1/(cosh(2t) - 1),
regularized below the convergence boundary by subtracting the degree-n
Laurent partial sum L_n(2t).  It is computed here in three pieces: the
[0, delta] part summed analytically from the Laurent series, the
[delta, T] part by adaptive Gauss-Kronrod quadrature, and the [T, inf)
part of the subtracted polynomial in closed form, plus an explicit bound
on the dropped exponential tail.  The reported error estimate adds the
quadrature estimate, the series truncation bound, and the tail bound.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from scipy.integrate import quad

from .errors import (
    AtBranchPointError,
    AtPoleError,
    DivergentError,
    ExtrapolationUnstableError,
    LogCaseError,
    UnsupportedError,
)

# Proven bounds on the wedge coefficient families; exposed so tests can
# check them, never fed into value computations.
WEDGE_K = 2.0 * math.e ** 2
WEDGE_L = 2.0 * (math.e ** 3 + 1.0)

_SERIES_DELTA = 0.5
_SERIES_TERMS = 24


@dataclass(frozen=True)
class AnalyticConstant:
    """A numeric constant with an honest error estimate and its origin."""

    value: float
    error_estimate: float
    provenance: str          # "rational-recursion" | "quadrature" | "residue" | "formula"
    params: dict = field(default_factory=dict)


# --- Laurent coefficients ------------------------------------------------


@lru_cache(maxsize=None)
def _laurent_tuple(k_max: int) -> tuple[Fraction, ...]:
    acc = [Fraction(1)]
    for k in range(1, k_max + 1):
        s = sum(
            Fraction(2 * acc[l], math.factorial(2 * (k - l + 1)))
            for l in range(k)
        )
        acc.append(-s)
    return tuple(acc)


def laurent_coeffs(k_max: int) -> list[Fraction]:
    """A_0..A_{k_max} of the Laurent expansion of 1/(cosh(2t)-1).

    A_0 = 1, A_1 = -1/12, A_2 = 1/240; signs alternate and the radius of
    the underlying series (in 2t) is 2 pi.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    return list(_laurent_tuple(k_max))


def eval_Ln(n: int, t: float) -> float:
    """Laurent partial sum L_n(t) = (2/t^2)(1 + sum_{k<=n} A_k t^{2k})."""
    if t == 0:
        raise ZeroDivisionError("L_n has a double pole at t = 0")
    acc = laurent_coeffs(n)
    s = 1.0
    t2k = 1.0
    for k in range(1, n + 1):
        t2k *= t * t
        s += float(acc[k]) * t2k
    return 2.0 / (t * t) * s


def log_amplitude(n: int) -> Fraction:
    """Coefficient d_n = -2^{2n-1} A_n of the z^{2n} log z boundary term."""
    if n < 0:
        raise ValueError("n must be >= 0")
    a_n = _laurent_tuple(n)[n]
    return -a_n * Fraction(2) ** (2 * n - 1)


# --- branch classification ----------------------------------------------


def alpha_branch(alpha: float) -> tuple[str, int | None]:
    """Sort an exponent into direct / regularized / log-boundary territory.

    direct: alpha > 1.  log: alpha an odd integer <= 1, with the index n
    of the z^{2n} log z term.  regularized: everything else, with the
    Laurent depth n needed to make the defining integral converge,
    -(2n+1) < alpha < -(2n-1).
    """
    a = float(alpha)
    if a > 1.0:
        return "direct", None
    ia = round(a)
    if a == ia and int(ia) % 2 != 0:
        return "log", (1 - int(ia)) // 2
    return "regularized", math.floor((1.0 - a) / 2.0)


# --- the singular amplitude c_alpha -------------------------------------


def _integrand_weight(t: float) -> float:
    return 1.0 / (math.cosh(2.0 * t) - 1.0)


def _series_piece(alpha: float, lo_order: int, delta: float) -> tuple[float, float]:
    """integral_0^delta of t^alpha times the Laurent series from order lo_order.

    Term k integrates to A_k 2^{2k-1} delta^{alpha+2k-1} / (alpha+2k-1).
    Returns (value, truncation bound); the terms decay like (delta/pi)^{2k}.
    """
    acc = laurent_coeffs(_SERIES_TERMS)
    total = 0.0
    last = 0.0
    for k in range(lo_order, _SERIES_TERMS + 1):
        p = alpha + 2 * k - 1
        last = float(acc[k]) * math.ldexp(1.0, 2 * k - 1) * delta ** p / p
        total += last
    return total, 2.0 * abs(last)


def _poly_tail(alpha: float, n: int, T: float) -> float:
    """integral_T^inf of t^alpha L_n(2t), converging since alpha < 1 - 2n."""
    acc = laurent_coeffs(n)
    total = 0.0
    for k in range(n + 1):
        p = alpha + 2 * k - 1
        total -= float(acc[k]) * math.ldexp(1.0, 2 * k - 1) * T ** p / p
    return total


def _exp_tail_cutoff(alpha: float, target: float) -> tuple[float, float]:
    T = 20.0 + 2.0 * max(alpha, 0.0)
    while True:
        bound = 5.0 * T ** max(alpha, 0.0) * math.exp(-2.0 * T)
        if bound < target or T > 200.0:
            return T, bound
        T += 5.0


def c_alpha(alpha: float, tol: float = 1e-12) -> AnalyticConstant:
    """Singular amplitude c_alpha of the z^{1-alpha} term.

    alpha > 1: integral of t^alpha / (cosh 2t - 1) over (0, inf).
    -(2n+1) < alpha < -(2n-1): same integrand with t^alpha L_n(2t)
    subtracted.  Odd alpha <= 1 has no algebraic amplitude; the log
    boundary raises and the caller should switch to log_amplitude.
    """
    branch, n = alpha_branch(alpha)
    if branch == "log":
        raise LogCaseError(
            f"alpha={alpha} sits on a logarithmic boundary (n={n})"
        )
    alpha = float(alpha)
    T, tail_bound = _exp_tail_cutoff(alpha, tol * 1e-4)
    delta = _SERIES_DELTA
    if branch == "direct":
        series, series_err = _series_piece(alpha, 0, delta)
        integral, quad_err = quad(
            lambda t: t ** alpha * _integrand_weight(t),
            delta, T, epsabs=tol / 4, epsrel=tol, limit=200,
        )
        value = series + integral
    else:
        series, series_err = _series_piece(alpha, n + 1, delta)
        integral, quad_err = quad(
            lambda t: t ** alpha * (_integrand_weight(t) - eval_Ln(n, 2.0 * t)),
            delta, T, epsabs=tol / 4, epsrel=tol, limit=200,
        )
        value = series + integral - _poly_tail(alpha, n, T)
    err = quad_err + series_err + tail_bound
    return AnalyticConstant(
        value=value,
        error_estimate=err,
        provenance="quadrature",
        params={"alpha": alpha, "branch": branch, "n": n, "tol": tol,
                "delta": delta, "T": T},
    )


def leading_constant(alpha: float, tol: float = 1e-12) -> AnalyticConstant:
    """Amplitude C_alpha in Z_N ~ C_alpha N^{(alpha-3)/2} 4^N.

    Generic exponents divide c_alpha by Gamma((alpha-1)/2); the odd
    boundaries alpha = -(2n-1), n >= 1, have the closed form
    4^{n-1} |A_n| n!.  alpha = 1 is left unsupported: the artifact
    reports the empirical sequence there rather than asserting a limit.
    """
    branch, n = alpha_branch(alpha)
    if branch == "log":
        if n == 0:
            raise UnsupportedError(
                "alpha=1: no leading constant is asserted; "
                "inspect the empirical sequence instead"
            )
        a_n = _laurent_tuple(n)[n]
        value = float(Fraction(4) ** (n - 1) * abs(a_n) * math.factorial(n))
        return AnalyticConstant(
            value=value, error_estimate=0.0, provenance="formula",
            params={"alpha": float(alpha), "branch": "log", "n": n},
        )
    c = c_alpha(alpha, tol=tol)
    gamma = math.gamma((float(alpha) - 1.0) / 2.0)
    return AnalyticConstant(
        value=c.value / gamma,
        error_estimate=c.error_estimate / abs(gamma),
        provenance="quadrature",
        params={"alpha": float(alpha), "branch": c.params["branch"],
                "n": n, "tol": tol},
    )


# --- closed forms in z ---------------------------------------------------


def critical_point(m: int) -> float:
    """Radius of convergence g_m = (1 + tan^2(pi/(m+1))) / 4 of level m.

    Strictly decreasing to 1/4.  Level 1 is entire, hence unsupported.
    """
    if m < 2:
        raise UnsupportedError("X_1 = g has no finite singularity")
    t = math.tan(math.pi / (m + 1))
    return 0.25 * (1.0 + t * t)


def _cexpm1(w: complex) -> complex:
    if abs(w) < 0.05:
        # (exp(w) - 1)/w by Horner; relative truncation error below 1e-16
        s = 1.0 / 40320.0
        for d in (5040.0, 720.0, 120.0, 24.0, 6.0, 2.0, 1.0):
            s = s * w + 1.0 / d
        return w * s
    return cmath.exp(w) - 1.0


def eval_Xm(m: int, point: complex, variable: str = "g") -> complex:
    """Closed-form X_m at one point, stable near z = 0 and for large m.

    With w = 2m atanh(z) and e = exp(-w) - 1 the value is
    -2g e / (2z - (1-z) e); the function is even in z, so z is flipped
    into the right half plane before exponentials are formed.
    """
    if m < 1:
        raise ValueError("level m must be >= 1")
    if variable == "g":
        g = complex(point)
        z = cmath.sqrt(1.0 - 4.0 * g)
    elif variable == "z":
        z = complex(point)
        g = (1.0 - z * z) / 4.0
    else:
        raise ValueError("variable must be 'g' or 'z'")
    if g == 0:
        return 0j
    if z.real < 0 or (z.real == 0 and z.imag < 0):
        z = -z
    if z == 1.0:
        return 0j
    w = 2.0 * m * cmath.atanh(z)
    e = _cexpm1(-w)
    den = 2.0 * z - (1.0 - z) * e
    scale = 2.0 * abs(z) + abs((1.0 - z) * e)
    if abs(den) <= 1e-12 * scale:
        raise AtPoleError(f"X_{m} evaluated at a pole (z={z:.6g})")
    return -2.0 * g * e / den


def eval_Dm(m: int, z: complex) -> complex:
    """D_m(z) = 2 sinh^2(w/2) + z sinh(w), w = 2m atanh(z).

    Satisfies X_m - X_{m-1} = z^2 / D_m away from poles, and
    D_m(z) ~ 2m(m+1) z^2 as z -> 0.
    """
    if m < 1:
        raise ValueError("level m must be >= 1")
    z = complex(z)
    if z == 1.0 or z == -1.0:
        raise AtBranchPointError("D_m is singular at z = +-1")
    w = 2.0 * m * cmath.atanh(z)
    sh = cmath.sinh(0.5 * w)
    return 2.0 * sh * sh + z * cmath.sinh(w)


# --- wedge coefficient families -----------------------------------------


@dataclass(frozen=True)
class WedgeCoefficients:
    """Exact rational coefficient families at one level m.

    a[j]: ((1+z)/(1-z))^m = 1 + sum_j a_j (2mz)^j, j = 0..2k_max+2.
    b[k]: D_m = 2m(m+1) z^2 (1 + sum_k b_{2k} (2mz)^{2k}), k = 1..k_max.
    c[k]: z^2/D_m expansion inverse, c_0 = 1, k = 0..k_max; c_{2k} -> A_k
    as m grows, at rate O(1/m).
    """

    m: int
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...]


@lru_cache(maxsize=4096)
def wedge_coefficients(m: int, k_max: int) -> WedgeCoefficients:
    if m < 1:
        raise ValueError("level m must be >= 1")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    j_hi = 2 * k_max + 2
    two_m = 2 * m
    a = [Fraction(1)]
    for j in range(1, j_hi + 1):
        coeff = sum(
            math.comb(m, j - i) * math.comb(m + i - 1, i)
            for i in range(j + 1)
        )
        a.append(Fraction(coeff, two_m ** j))
    b = [Fraction(0)]
    for k in range(1, k_max + 1):
        b.append(Fraction(two_m * a[2 * k + 2] + a[2 * k + 1], m + 1))
    c = [Fraction(1)]
    for k in range(1, k_max + 1):
        c.append(-sum(c[l] * b[k - l] for l in range(k)))
    return WedgeCoefficients(m=m, a=tuple(a), b=tuple(b), c=tuple(c))


def truncated_Wn(
    alpha: float, n: int, z: complex, m_trunc: int
) -> tuple[complex, float]:
    """Partial sum of the smooth part W^(n) plus an integral-comparison tail bound.

    W^(n)(z) = sum_m m^alpha/(2m(m+1)) (1 + sum_{k<=n} c_{2k}^m (2mz)^{2k});
    absolute convergence needs alpha + 2n - 1 < 0.  The tail bound uses
    |c_{2k}^m| <= (K+1)^k and decays like m_trunc^{alpha+2n-1}.
    """
    alpha = float(alpha)
    if alpha + 2 * n - 1 >= 0:
        raise DivergentError(
            f"alpha + 2n - 1 = {alpha + 2 * n - 1} >= 0: series diverges"
        )
    if m_trunc < 1:
        raise ValueError("m_trunc must be >= 1")
    z = complex(z)
    total = 0j
    for m in range(1, m_trunc + 1):
        base = m ** alpha / (2.0 * m * (m + 1))
        factor = 1.0 + 0j
        if n >= 1 and z != 0:
            wc = wedge_coefficients(m, n)
            u = (2.0 * m * z) ** 2
            uk = 1.0 + 0j
            for k in range(1, n + 1):
                uk *= u
                factor += float(wc.c[k]) * uk
        total += base * factor
    z2 = abs(z) ** 2
    bound = 0.0
    for k in range(n + 1):
        p = alpha + 2 * k - 1
        bound += (
            0.5 * (WEDGE_K + 1.0) ** k * (4.0 * z2) ** k
            * m_trunc ** p / (-p)
        )
    return total, bound


# --- pole residues of truncated weighted sums ---------------------------


def _w_alpha_trunc(alpha: float, m_top: int, g: float) -> float:
    """W_{alpha,M}(g) = sum_{m<=M} m^alpha (X_m - X_{m-1}) at real g."""
    total = 0.0
    prev = 0.0
    for m in range(1, m_top + 1):
        x = eval_Xm(m, g).real
        total += m ** float(alpha) * (x - prev)
        prev = x
    return total


def pole_residue(m_top: int, alpha: float, eps0: float = 0.02,
                 levels: int = 4) -> AnalyticConstant:
    """Amplitude r_M with Z_{N,M} = r_M g_M^{-(N+1)} (1 + o(1)).

    r_M = g_M lim_{g -> g_M} (1 - g/g_M) W_{alpha,M}(g), taken by
    Richardson extrapolation of phi(eps) = eps g_M W(g_M (1 - eps)) on a
    geometric ladder eps0 / 2^i.  phi is smooth in eps, so each Neville
    column removes one power.
    """
    g_m = critical_point(m_top)
    phi = []
    for i in range(levels):
        eps = eps0 / 2 ** i
        phi.append(eps * g_m * _w_alpha_trunc(alpha, m_top, g_m * (1.0 - eps)))
    tab = list(phi)
    diag = [tab[0]]
    for j in range(1, levels):
        fac = 2.0 ** j
        tab = [
            (fac * tab[i + 1] - tab[i]) / (fac - 1.0)
            for i in range(levels - j)
        ]
        diag.append(tab[0])
    err = abs(diag[-1] - diag[-2])
    prev_err = abs(diag[-2] - diag[-3]) if levels >= 3 else math.inf
    if not math.isfinite(diag[-1]) or (err > 8.0 * prev_err and err > 1e-6):
        raise ExtrapolationUnstableError(
            f"Richardson ladder did not settle: diagonal {diag}"
        )
    return AnalyticConstant(
        value=diag[-1],
        error_estimate=err,
        provenance="residue",
        params={"M": m_top, "alpha": float(alpha), "eps0": eps0,
                "levels": levels},
    )
