"""Named invariant checks over the whole library, for the verify command.

Each check is a function (config, ctx) -> (ok, detail).  ctx carries
lazily built shared tables so the expensive recursions run once.  The
default sizes finish on a laptop in a couple of minutes; quick() trims
sizes and draw counts for use inside the test suite.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction

from scipy.stats import chi2 as _chi2

from . import analytic, heightcount, locallimit, sampler, treecore
from .errors import TruncatedError, UnsupportedError


@dataclass(frozen=True)
class VerifyConfig:
    n_exact: int = 256
    n_scaled: int = 4096
    alphas: tuple[float, ...] = (-3.0, -1.0, -0.5, 0.0, 1.0, 2.0)
    seed: int = 0
    draws: int = 100_000
    quick: bool = False

    @staticmethod
    def default() -> "VerifyConfig":
        return VerifyConfig()

    @staticmethod
    def quick_config() -> "VerifyConfig":
        return VerifyConfig(n_exact=128, n_scaled=512, draws=20_000,
                            quick=True)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


# --- shared context ------------------------------------------------------


def _exact_table(cfg, ctx):
    if "exact" not in ctx:
        ctx["exact"] = heightcount.build_count_table(cfg.n_exact, mode="exact")
    return ctx["exact"]


def _scaled_table(cfg, ctx):
    if "scaled" not in ctx:
        n = min(cfg.n_scaled, 2048)
        ctx["scaled"] = heightcount.build_count_table(
            n, mode="scaled", materialize_cap=n
        )
    return ctx["scaled"]


def _streamed(cfg, ctx):
    if "stream" not in ctx:
        ctx["stream"] = heightcount.stream_partition_functions(
            cfg.n_scaled, cfg.alphas
        )
    return ctx["stream"]


# --- counting ------------------------------------------------------------


def check_catalan_partition(cfg, ctx):
    table = _exact_table(cfg, ctx)
    pv = heightcount.partition_function(cfg.n_exact, 0, table)
    for n in range(1, cfg.n_exact + 1):
        if pv.Z(n) != heightcount.catalan(n):
            return False, f"Z_{n}(0) is not the tree count"
    return True, f"Z_N(0) matches catalan up to N={cfg.n_exact}"


def check_row_sums(cfg, ctx):
    table = _exact_table(cfg, ctx)
    for n in range(1, cfg.n_exact + 1):
        if table.row_sum(n) != heightcount.catalan(n):
            return False, f"exact row sum off at N={n}"
    stable = _scaled_table(cfg, ctx)
    worst = 0.0
    for n in range(1, stable.materialized + 1):
        want = float(Fraction(heightcount.catalan(n), 4 ** n))
        got = stable.row_sum(n)
        worst = max(worst, abs(got - want) / want)
    if worst > 1e-12:
        return False, f"scaled row-sum rel error {worst:.2e} > 1e-12"
    return True, (
        f"rows sum to catalan (exact to {cfg.n_exact}, "
        f"scaled rel {worst:.1e} to {stable.materialized})"
    )


def check_strip_width_two(cfg, ctx):
    table = _exact_table(cfg, ctx)
    for n in range(2, cfg.n_exact + 1):
        if table.L(n, 2) != 1:
            return False, f"L({n},2) != 1"
    for a in (-1, 0, 2):
        want = Fraction(2) ** a
        for n in (2, 17, 128):
            got = heightcount.truncated_partition(n, 2, a, table)
            if got != want:
                return False, f"width-2 partition at N={n}, alpha={a}: {got}"
    for m, want in ((2, 1.0), (3, 0.5)):
        if abs(analytic.critical_point(m) - want) > 1e-12:
            return False, f"critical point m={m} off"
    return True, "width-2 strip pins L=1, Z=2^alpha, g_2=1, g_3=1/2"


def check_critical_point_poles(cfg, ctx):
    # at g_m the strip denominator vanishes: D_m(i tan(pi/(m+1))) = 0
    worst = 0.0
    for m in range(2, 9):
        g = analytic.critical_point(m)
        z = complex(0.0, math.sqrt(4 * g - 1))
        scale = abs(analytic.eval_Dm(m, 0.9 * z)) + 1e-30
        worst = max(worst, abs(analytic.eval_Dm(m, z)) / scale)
    if worst > 1e-10:
        return False, f"denominator at critical point: rel {worst:.2e}"
    return True, f"closed-form poles sit at critical points (rel {worst:.1e})"


def check_strip_three_residue(cfg, ctx):
    table = _exact_table(cfg, ctx)
    hi = min(80, cfg.n_exact)
    vals = []
    for n in range(40, hi + 1, 10):
        z3 = heightcount.truncated_partition(n, 3, 0, table)
        vals.append(z3 * Fraction(1, 2) ** (n + 1))
    spread = float(max(vals) - min(vals))
    res = analytic.pole_residue(3, 0.0)
    gap = abs(float(vals[-1]) - res.value)
    if spread > 1e-6 or gap > 1e-3:
        return False, f"residue mismatch: spread {spread:.1e}, gap {gap:.1e}"
    return True, (
        f"Z_(N,3)(0) g_3^(N+1) flat at {float(vals[-1]):.6f}, "
        f"residue gap {gap:.1e}"
    )


# --- analytic constants --------------------------------------------------


def check_laurent_coefficients(cfg, ctx):
    a = analytic.laurent_coeffs(3)
    want = [Fraction(1), Fraction(-1, 12), Fraction(1, 240),
            Fraction(-1, 6048)]
    if a != want:
        return False, f"coefficients {a}"
    if abs(analytic.eval_Ln(1, 2.0) - 1.0 / 3.0) > 1e-15:
        return False, "L_1(2) != 1/3"
    return True, "expansion coefficients and L_1(2)=1/3 confirmed"


def check_singularity_constants(cfg, ctx):
    probes = [
        (analytic.c_alpha(0.0).value, -0.5, 1e-9, "c(0)"),
        (analytic.c_alpha(2.0).value, math.pi ** 2 / 12, 1e-9, "c(2)"),
        (analytic.leading_constant(0.0).value,
         1.0 / (4 * math.sqrt(math.pi)), 1e-10, "C(0)"),
        (analytic.leading_constant(-1.0).value, 1.0 / 12, 1e-12, "C(-1)"),
        (analytic.leading_constant(-3.0).value, 1.0 / 30, 1e-12, "C(-3)"),
        (analytic.leading_constant(2.0).value,
         math.pi ** 1.5 / 12, 1e-9, "C(2)"),
    ]
    for got, want, tol, name in probes:
        if abs(got - want) > tol:
            return False, f"{name}: {got!r} vs {want!r}"
    return True, "integral constants match closed forms"


def check_strip_identity(cfg, ctx):
    # X_m - X_(m-1) agrees with the ratio form z^2 / D_m; the tolerance
    # is scale-aware because the difference cancels near the real axis
    worst = 0.0
    for m in (2, 5, 12, 24):
        for z in (0.3, 0.3 + 0.2j, -0.55 + 0.1j, 0.05j):
            g = (1 - z * z) / 4
            lhs = analytic.eval_Xm(m, g) - analytic.eval_Xm(m - 1, g)
            rhs = z * z / analytic.eval_Dm(m, z)
            scale = (abs(analytic.eval_Xm(m, g))
                     + abs(analytic.eval_Xm(m - 1, g)) + abs(rhs))
            worst = max(worst, abs(lhs - rhs) / (1e-300 + scale))
    if worst > 1e-11:
        return False, f"difference identity rel {worst:.2e}"
    return True, f"strip difference identity holds (rel {worst:.1e})"


def check_wedge_expansion(cfg, ctx):
    wc = analytic.wedge_coefficients(1, 2)
    if wc.c[1] != Fraction(-1, 4):
        return False, f"c_2 at m=1 is {wc.c[1]}"
    big = analytic.wedge_coefficients(60, 2)
    drift = abs(float(big.c[1] - analytic.laurent_coeffs(1)[1]))
    if drift > 0.01:
        return False, f"c_2 at m=60 misses A_1 by {drift:.3f}"
    val, bound = analytic.truncated_Wn(0.0, 0, 0.0, 400)
    if abs(val.real - 0.5) > bound + 1e-12:
        return False, f"W_0 partial {val.real} outside tail bound {bound}"
    return True, (
        f"wedge coefficients converge (drift {drift:.1e}), "
        f"W_0 partial within {bound:.1e} of 1/2"
    )


def check_asymptotics(cfg, ctx):
    pvs = _streamed(cfg, ctx)
    n = cfg.n_scaled
    checkpoints = [n // 8, n // 4, n // 2, n]
    tol = {2.0: 0.03, 0.0: 0.03, -0.5: 0.05, -1.0: 0.05, -3.0: 0.05}
    if cfg.quick:
        tol = {a: 3 * t for a, t in tol.items()}
    msgs = []
    for a in cfg.alphas:
        if a not in tol:
            continue
        limit = analytic.leading_constant(a).value
        errs = []
        for m in checkpoints:
            ratio = pvs[a].Z(m) * m ** ((3 - a) / 2)
            errs.append(abs(ratio / limit - 1.0))
        if errs[-1] > tol[a]:
            return False, f"alpha={a:g}: rel {errs[-1]:.3f} > {tol[a]}"
        if a == 2.0 and not all(x >= y for x, y in zip(errs, errs[1:])):
            return False, f"alpha=2 error not shrinking: {errs}"
        msgs.append(f"{a:g}:{errs[-1]:.3f}")
    return True, f"normalized ratios at N={n} (rel err " + " ".join(msgs) + ")"


# --- samplers ------------------------------------------------------------


def _chisq_p(observed, expected):
    stat = sum((o - e) ** 2 / e for o, e in zip(observed, expected))
    dof = len(observed) - 1
    return float(_chi2.sf(stat, dof)), stat


def check_sampler_exactness(cfg, ctx):
    table = _exact_table(cfg, ctx)
    trees = treecore.enumerate_trees(6)
    worst = 1.0
    for stream, a in enumerate((-1.0, 0.0, 2.0), start=11):
        rng = sampler.RngStream(cfg.seed, stream)
        weights = [t.height ** a for t in trees]
        z = sum(weights)
        expected = [cfg.draws * w / z for w in weights]
        counts = {t.code: 0 for t in trees}
        for _ in range(cfg.draws):
            counts[sampler.sample_mu(6, a, table, rng).code] += 1
        p, stat = _chisq_p([counts[t.code] for t in trees], expected)
        if p < 1e-3:
            return False, f"alpha={a:g}: chi2={stat:.1f}, p={p:.2e}"
        worst = min(worst, p)
    return True, f"size-6 draws match weights (min p={worst:.3f})"


def check_sampler_routes_agree(cfg, ctx):
    # direct construction vs rejection, uniform on a fixed height class
    table = _exact_table(cfg, ctx)
    rng_a = sampler.RngStream(cfg.seed, 21)
    rng_b = sampler.RngStream(cfg.seed, 22)
    trees = [t for t in treecore.enumerate_trees(7) if t.height == 4]
    idx = {t.code: i for i, t in enumerate(trees)}
    draws = max(2000, cfg.draws // 10)
    ca = [0] * len(trees)
    cb = [0] * len(trees)
    for _ in range(draws):
        ca[idx[sampler.sample_uniform_given_height(7, 4, table, rng_a).code]] += 1
        cb[idx[sampler.rejection_sample_given_height(7, 4, table, rng_b).code]] += 1
    stat = 0.0
    for o, e in zip(ca, cb):
        if o + e:
            stat += (o - e) ** 2 / (o + e)
    p = float(_chi2.sf(stat, len(trees) - 1))
    if p < 1e-3:
        return False, f"two-sample chi2={stat:.1f}, p={p:.2e}"
    return True, f"direct and rejection routes agree (p={p:.3f})"


def check_branch_size_law(cfg, ctx):
    rng = sampler.RngStream(cfg.seed, 31)
    draws = cfg.draws
    hi = 8
    counts = [0] * (hi + 2)
    for _ in range(draws):
        try:
            t = sampler.sample_bgw_branch(rng, size_cap=10_000)
            counts[min(t.size, hi + 1)] += 1
        except TruncatedError:
            counts[hi + 1] += 1
    probs = [2 * heightcount.catalan(n) * 0.25 ** n
             for n in range(1, hi + 1)]
    expected = [draws * p for p in probs] + [draws * (1 - sum(probs))]
    p, stat = _chisq_p(counts[1:], expected)
    if p < 1e-3:
        return False, f"offspring-law chi2={stat:.1f}, p={p:.2e}"
    return True, f"critical branch sizes follow 2 C_(N-1) 4^-N (p={p:.3f})"


def check_uipt_ball_law(cfg, ctx):
    rng = sampler.RngStream(cfg.seed, 41)
    draws = cfg.draws
    hi = 8
    counts = [0] * (hi + 2)
    for _ in range(draws):
        ball = sampler.sample_uipt_ball(2, rng)
        c = ball.code[0]  # depth-2 ball is the c-star [c, 0, ..., 0]
        counts[min(c, hi + 1)] += 1
    probs = [c * 2.0 ** (-c - 1) for c in range(1, hi + 1)]
    expected = [draws * p for p in probs] + [draws * (1 - sum(probs))]
    p, stat = _chisq_p(counts[1:], expected)
    if p < 1e-3:
        return False, f"star-law chi2={stat:.1f}, p={p:.2e}"
    rng2 = sampler.RngStream(cfg.seed, 42)
    kc = [0] * 12
    for _ in range(draws):
        kc[min(sampler.sample_spine_degree(rng2), 11)] += 1
    kp = [(k - 1) * 2.0 ** (-k) for k in range(2, 11)]
    ke = [draws * p for p in kp] + [draws * (1 - sum(kp))]
    p2, stat2 = _chisq_p(kc[2:], ke)
    if p2 < 1e-3:
        return False, f"spine-degree chi2={stat2:.1f}, p={p2:.2e}"
    return True, f"depth-2 star law and spine degrees match (p={p:.3f}, {p2:.3f})"


# --- local limit ---------------------------------------------------------


def check_ball_mass_exact(cfg, ctx):
    table = _exact_table(cfg, ctx)
    t0 = treecore.decode([2, 0, 0])
    for n, a in ((8, 0), (8, 2), (9, -1)):
        num = Fraction(0)
        den = Fraction(0)
        for t in treecore.enumerate_trees(n):
            w = (Fraction(t.height ** a) if a >= 0
                 else Fraction(1, t.height ** -a))
            den += w
            if treecore.ball(t, 2).code == t0.code:
                num += w
        got = locallimit.exact_ball_mass(t0, n, a, table).mass_exact
        if got != num / den:
            return False, f"N={n}, alpha={a}: {got} != {num / den}"
    return True, "convolution masses equal full enumeration at N<=9"


def check_ball_mass_limit(cfg, ctx):
    table = _scaled_table(cfg, ctx)
    n = 1000 if not cfg.quick else 300
    tol = 0.01 if not cfg.quick else 0.05
    worst = 0.0
    for a in (-1.0, 0.0, 2.0):
        for c in range(1, 5):
            star = treecore.decode([c] + [0] * c)
            rep = locallimit.exact_ball_mass(star, n, a, table)
            worst = max(worst, rep.gap)
    if worst > tol:
        return False, f"worst gap {worst:.4f} > {tol} at N={n}"
    return True, f"height-2 masses within {worst:.4f} of limits at N={n}"


def check_lambda_partial_sums(cfg, ctx):
    if cfg.quick:
        jobs = [(2, 20, 1e-4), (3, 25, 2e-2)]
    else:
        jobs = [(2, 30, 1e-6), (3, 40, 1e-3)]
    for r, cap, slack in jobs:
        total, tail = locallimit.lambda_partial_sum(r, cap)
        if not (1 - slack <= float(total) <= 1):
            return False, f"r={r}, cap={cap}: partial {float(total):.8f}"
        if not (0 <= tail < 10 * slack):
            return False, f"r={r}: tail estimate {tail:.2e} out of range"
    return True, "limit masses sum to one within the truncation tails"


# --- core structures -----------------------------------------------------


def check_ultrametric(cfg, ctx):
    trees = treecore.enumerate_trees(5)
    a, b = treecore.decode([1, 1, 0]), treecore.decode([1, 1, 1, 0])
    if treecore.dist(a, b) != Fraction(1, 3):
        return False, "anchor distance wrong"
    for x in trees:
        for y in trees:
            dxy = treecore.dist(x, y)
            if (dxy == 0) != (x.code == y.code):
                return False, f"separation fails at {x.code}, {y.code}"
            for z in trees:
                if dxy > max(treecore.dist(x, z), treecore.dist(z, y)):
                    return False, "ultrametric inequality fails"
    return True, "distance is a separated ultrametric on size-5 trees"


def check_graft_roundtrip(cfg, ctx):
    count = 0
    for n in (4, 6, 7):
        for t in treecore.enumerate_trees(n):
            for r in range(1, t.height + 1):
                spec, branches = treecore.extract_branches(t, r)
                back = treecore.graft(spec, branches)
                if back.code != t.code:
                    return False, f"roundtrip fails: {t.code} at r={r}"
                if treecore.ball(back, r).code != spec.base.code:
                    return False, f"graft escapes its ball: {t.code}"
                count += 1
    return True, f"extract/graft round-trips on {count} cases"


def check_cache_roundtrip(cfg, ctx):
    with tempfile.TemporaryDirectory() as d:
        for mode in ("exact", "scaled"):
            t = heightcount.build_count_table(32, mode=mode)
            heightcount.save_table(t, d)
            back = heightcount.load_table(d, mode, 32)
            if back is None:
                return False, f"{mode} table failed to load"
            for n in (1, 7, 32):
                a, b = t.row(n), back.row(n)
                if list(a) != list(b):
                    return False, f"{mode} row {n} mismatch after reload"
            if heightcount.load_table(d, mode, 64) is not None:
                return False, "stale cache accepted for larger N_max"
    return True, "cache files reload to identical tables"


CHECKS = [
    ("ultrametric", check_ultrametric),
    ("graft-roundtrip", check_graft_roundtrip),
    ("laurent-coefficients", check_laurent_coefficients),
    ("singularity-constants", check_singularity_constants),
    ("strip-identity", check_strip_identity),
    ("critical-point-poles", check_critical_point_poles),
    ("wedge-expansion", check_wedge_expansion),
    ("catalan-partition", check_catalan_partition),
    ("row-sums", check_row_sums),
    ("strip-width-two", check_strip_width_two),
    ("strip-three-residue", check_strip_three_residue),
    ("cache-roundtrip", check_cache_roundtrip),
    ("sampler-exactness", check_sampler_exactness),
    ("sampler-routes-agree", check_sampler_routes_agree),
    ("branch-size-law", check_branch_size_law),
    ("uipt-ball-law", check_uipt_ball_law),
    ("ball-mass-exact", check_ball_mass_exact),
    ("ball-mass-limit", check_ball_mass_limit),
    ("lambda-partial-sums", check_lambda_partial_sums),
    ("asymptotics", check_asymptotics),
]


def run_verify(cfg: VerifyConfig | None = None, names=None,
               report=None) -> list[CheckResult]:
    """Run the named checks (all by default), reporting one line each."""
    cfg = cfg or VerifyConfig()
    ctx: dict = {}
    wanted = set(names) if names else None
    results = []
    for name, fn in CHECKS:
        if wanted is not None and name not in wanted:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = fn(cfg, ctx)
        except UnsupportedError as exc:
            ok, detail = False, f"unsupported: {exc}"
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        dt = time.perf_counter() - t0
        res = CheckResult(name=name, ok=ok, detail=detail, seconds=dt)
        results.append(res)
        if report is not None:
            tag = "ok  " if ok else "FAIL"
            report(f"{tag} {name} ({dt:.2f}s) {detail}")
    return results
