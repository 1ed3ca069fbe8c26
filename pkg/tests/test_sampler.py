"""Random streams and exact tree samplers.

Randomized checks run at fixed seeds and are therefore deterministic;
chi-square thresholds sit at p = 1e-3 so a correct sampler fails only
by seed misfortune, which the pinned seeds rule out.  Distribution
targets come from exact enumeration (size-weighted classes), from the
closed offspring law 2^-(c+1), and from the size law 2 C_(N-1) 4^-N.
"""

import math

import pytest
from scipy.stats import chi2

from arborlab.errors import EmptyClassError, ModeMismatchError, TruncatedError
from arborlab.heightcount import catalan
from arborlab.sampler import (
    RngStream,
    rejection_sample_given_height,
    sample_bgw_branch,
    sample_height,
    sample_mu,
    sample_spine_degree,
    sample_uipt_ball,
    sample_uniform_given_height,
)
from arborlab.treecore import ball, decode, enumerate_trees


def chisq_p(observed, expected):
    stat = sum((o - e) ** 2 / e for o, e in zip(observed, expected))
    return float(chi2.sf(stat, len(observed) - 1))


# --- raw streams ---------------------------------------------------------


class TestRngStream:
    def test_reproducible(self):
        a = [RngStream(7, 3).randbelow(10 ** 30) for _ in range(1)]
        b = [RngStream(7, 3).randbelow(10 ** 30) for _ in range(1)]
        assert a == b
        r1, r2 = RngStream(7, 3), RngStream(7, 3)
        assert [r1.random() for _ in range(50)] == [r2.random()
                                                   for _ in range(50)]

    def test_streams_differ(self):
        xs = [RngStream(0, s).randbelow(1 << 64) for s in range(6)]
        assert len(set(xs)) == 6

    def test_randbelow_range_and_uniformity(self):
        rng = RngStream(1, 0)
        counts = [0] * 3
        for _ in range(30_000):
            v = rng.randbelow(3)
            counts[v] += 1
        assert chisq_p(counts, [10_000] * 3) > 1e-3

    def test_randbelow_huge_modulus(self):
        rng = RngStream(2, 0)
        n = 10 ** 40
        vs = [rng.randbelow(n) for _ in range(200)]
        assert all(0 <= v < n for v in vs)
        assert max(vs) > n // 10  # draws actually fill the range

    def test_geometric_halving_law(self):
        rng = RngStream(3, 0)
        draws = 50_000
        counts = [0] * 10
        for _ in range(draws):
            counts[min(rng.geometric_halving(), 9)] += 1
        probs = [2.0 ** -(c + 1) for c in range(9)]
        expected = [draws * p for p in probs] + [draws * (1 - sum(probs))]
        assert chisq_p(counts, expected) > 1e-3


# --- weighted-measure samplers -------------------------------------------


class TestHeightSampler:
    @pytest.mark.parametrize("alpha", [-1.0, 0.0, 2.0])
    def test_height_law(self, exact_table, alpha):
        n, draws = 7, 40_000
        rng = RngStream(0, 51)
        row = exact_table.row(n)
        weights = [h ** alpha * e for h, e in enumerate(row, 1)]
        z = sum(weights)
        counts = [0] * n
        for _ in range(draws):
            counts[sample_height(n, alpha, exact_table, rng) - 1] += 1
        keep = [i for i, w in enumerate(weights) if w > 0]
        assert all(counts[i] == 0 for i in range(n) if i not in keep)
        p = chisq_p([counts[i] for i in keep],
                    [draws * weights[i] / z for i in keep])
        assert p > 1e-3


class TestUniformGivenHeight:
    def test_exactly_the_class(self, exact_table):
        rng = RngStream(0, 52)
        for n, h in ((6, 3), (8, 5), (12, 2)):
            for _ in range(40):
                t = sample_uniform_given_height(n, h, exact_table, rng)
                assert t.size == n and t.height == h

    def test_uniform_on_class(self, exact_table):
        n, h, draws = 7, 3, 40_000
        cls = [t.code for t in enumerate_trees(n) if t.height == h]
        idx = {c: i for i, c in enumerate(cls)}
        rng = RngStream(0, 53)
        counts = [0] * len(cls)
        for _ in range(draws):
            counts[idx[sample_uniform_given_height(n, h, exact_table,
                                                   rng).code]] += 1
        assert chisq_p(counts, [draws / len(cls)] * len(cls)) > 1e-3

    def test_empty_class(self, exact_table):
        with pytest.raises(EmptyClassError):
            sample_uniform_given_height(4, 1, exact_table, RngStream())

    def test_needs_exact_table(self, scaled_table):
        with pytest.raises(ModeMismatchError):
            sample_uniform_given_height(5, 3, scaled_table, RngStream())

    def test_routes_agree(self, exact_table):
        n, h, draws = 7, 4, 6000
        cls = [t.code for t in enumerate_trees(n) if t.height == h]
        idx = {c: i for i, c in enumerate(cls)}
        ca, cb = [0] * len(cls), [0] * len(cls)
        ra, rb = RngStream(0, 54), RngStream(0, 55)
        for _ in range(draws):
            ca[idx[sample_uniform_given_height(n, h, exact_table, ra).code]] += 1
            cb[idx[rejection_sample_given_height(n, h, exact_table, rb).code]] += 1
        stat = sum((a - b) ** 2 / (a + b) for a, b in zip(ca, cb) if a + b)
        assert float(chi2.sf(stat, len(cls) - 1)) > 1e-3


class TestMuSampler:
    @pytest.mark.parametrize("n,alpha,stream", [
        (5, 2.0, 61),
        (6, -1.0, 62),
        (6, 0.0, 63),
    ])
    def test_exact_law(self, exact_table, n, alpha, stream):
        draws = 60_000
        trees = enumerate_trees(n)
        weights = [t.height ** alpha for t in trees]
        z = sum(weights)
        idx = {t.code: i for i, t in enumerate(trees)}
        counts = [0] * len(trees)
        rng = RngStream(0, stream)
        for _ in range(draws):
            counts[idx[sample_mu(n, alpha, exact_table, rng).code]] += 1
        p = chisq_p(counts, [draws * w / z for w in weights])
        assert p > 1e-3

    def test_deterministic_across_instances(self, exact_table):
        a = [sample_mu(30, -0.5, exact_table, RngStream(9, 1)).code
             for _ in range(1)]
        b = [sample_mu(30, -0.5, exact_table, RngStream(9, 1)).code
             for _ in range(1)]
        assert a == b

    def test_large_size_runs(self, exact_table):
        t = sample_mu(256, 1.0, exact_table, RngStream(0, 64))
        assert t.size == 256
        assert decode(t.code).height == t.height


# --- branching-process samplers ------------------------------------------


class TestBranchSampler:
    def test_size_law(self):
        rng = RngStream(0, 71)
        draws = 60_000
        hi = 7
        counts = [0] * (hi + 2)
        for _ in range(draws):
            try:
                counts[min(sample_bgw_branch(rng, size_cap=5000).size,
                           hi + 1)] += 1
            except TruncatedError:
                counts[hi + 1] += 1
        probs = [2 * catalan(n) * 0.25 ** n for n in range(1, hi + 1)]
        expected = [draws * p for p in probs] + [draws * (1 - sum(probs))]
        assert chisq_p(counts[1:], expected) > 1e-3

    def test_truncation_reports_partial_size(self):
        rng = RngStream(0, 72)
        saw = False
        for _ in range(3000):
            try:
                sample_bgw_branch(rng, size_cap=8)
            except TruncatedError as exc:
                saw = True
                assert exc.partial_size > 8
                break
        assert saw

    def test_depth_cap_limits_height(self):
        rng = RngStream(0, 73)
        for _ in range(500):
            t = sample_bgw_branch(rng, depth_cap=3)
            assert t.height <= 3


class TestUiptSampler:
    def test_radius_one_is_single_edge(self):
        rng = RngStream(0, 81)
        for _ in range(20):
            assert sample_uipt_ball(1, rng).code == (0,)

    def test_spine_degree_law(self):
        rng = RngStream(0, 82)
        draws = 60_000
        counts = [0] * 13
        for _ in range(draws):
            counts[min(sample_spine_degree(rng), 12)] += 1
        probs = [(k - 1) * 2.0 ** -k for k in range(2, 12)]
        expected = [draws * p for p in probs] + [draws * (1 - sum(probs))]
        assert chisq_p(counts[2:], expected) > 1e-3

    def test_depth_two_star_law(self):
        rng = RngStream(0, 83)
        draws = 60_000
        hi = 8
        counts = [0] * (hi + 2)
        for _ in range(draws):
            b = sample_uipt_ball(2, rng)
            assert b.height == 2
            counts[min(b.code[0], hi + 1)] += 1
        probs = [c * 2.0 ** -(c + 1) for c in range(1, hi + 1)]
        expected = [draws * p for p in probs] + [draws * (1 - sum(probs))]
        assert chisq_p(counts[1:], expected) > 1e-3

    def test_balls_are_consistent_across_radii(self):
        # the depth-2 ball of a radius-3 sample follows the radius-2 law
        rng3, rng2 = RngStream(0, 84), RngStream(0, 85)
        draws = 30_000
        hi = 7
        c3 = [0] * (hi + 2)
        c2 = [0] * (hi + 2)
        for _ in range(draws):
            t3 = sample_uipt_ball(3, rng3)
            assert t3.height <= 3
            c3[min(ball(t3, 2).code[0], hi + 1)] += 1
            c2[min(sample_uipt_ball(2, rng2).code[0], hi + 1)] += 1
        stat = sum((a - b) ** 2 / (a + b)
                   for a, b in zip(c3[1:], c2[1:]) if a + b)
        assert float(chi2.sf(stat, hi)) > 1e-3

    def test_reproducible(self):
        xs = [sample_uipt_ball(4, RngStream(5, 2)).code for _ in range(1)]
        ys = [sample_uipt_ball(4, RngStream(5, 2)).code for _ in range(1)]
        assert xs == ys
