import numpy as np
import pytest

import ttbeam as tb
from ttbeam.errors import ZeroMassError
from ttbeam.oracle import brute_marginal
from ttbeam.probability import ORTH_RESIDUAL_TOL, beam_marginal_check

from conftest import random_small_tt
from test_tensor import rank1_from_vectors


def tv_distance(p, q):
    return 0.5 * np.abs(np.asarray(p) - np.asarray(q)).sum()


def empirical_joint(samples, shape):
    counts = np.zeros(shape)
    for row in samples:
        counts[tuple(row - 1)] += 1
    return counts / len(samples)


class TestPrefixMarginal:
    def test_matches_brute_force_first_mode(self, rng):
        t = tb.tt_random((4, 5, 6), 3, seed=1)
        table = tb.prefix_marginal(t, (), orthogonalize=True)
        expected = brute_marginal(t.to_full(), (), 1)
        assert np.abs(table.probs - expected).max() <= 1e-10

    def test_matches_brute_force_conditioned(self):
        t = tb.tt_random((4, 5, 6), 2, seed=2)
        full = t.to_full()
        t_orth = tb.tt_orth(t)
        for partial in [(2,), (4, 5), (1, 1)]:
            table = tb.prefix_marginal(t_orth, partial)
            expected = brute_marginal(full, partial, len(partial) + 1)
            assert np.abs(table.probs - expected).max() <= 1e-10
            assert np.array_equal(table.conditioning, partial)

    def test_constant_tensor_is_uniform(self):
        t = tb.tt_const((5, 3), 2.0)
        table = tb.prefix_marginal(t, (), orthogonalize=True)
        assert np.abs(table.probs - 0.2).max() <= 1e-12

    def test_rank1_first_table_proportional_to_u_squared(self):
        u, v = np.array([1.0, -2.0, 3.0]), np.array([0.5, 4.0])
        t = rank1_from_vectors(u, v)
        table = tb.prefix_marginal(t, (), orthogonalize=True)
        expected = u**2 / (u**2).sum()
        assert np.abs(table.probs - expected).max() <= 1e-12

    def test_last_mode_table(self):
        t = tb.tt_random((3, 4), 2, seed=3)
        table = tb.prefix_marginal(t, (2,), orthogonalize=True)
        expected = brute_marginal(t.to_full(), (2,), 2)
        assert np.abs(table.probs - expected).max() <= 1e-10

    def test_normalization_and_nonnegativity(self, rng):
        for _ in range(5):
            t = random_small_tt(rng, max_elems=2000)
            table = tb.prefix_marginal(t, (), orthogonalize=True)
            assert table.probs.min() >= 0.0
            assert abs(table.probs.sum() - 1.0) <= 1e-12
            assert table.norm_const > 0

    def test_non_orthogonal_input_rejected(self):
        t = tb.tt_random((4, 4, 4), 3, seed=4)
        assert tb.gram_residual(t) > ORTH_RESIDUAL_TOL
        with pytest.raises(ValueError, match="not right-orthogonal"):
            tb.prefix_marginal(t, ())

    def test_zero_mass_prefix_reported(self):
        u = np.array([0.0, 1.0])
        v = np.array([1.0, 2.0])
        t = rank1_from_vectors(u, v)
        with pytest.raises(ZeroMassError):
            tb.prefix_marginal(t, (1,), orthogonalize=True)

    def test_too_long_partial_rejected(self):
        t = tb.tt_const((2, 2), 1.0)
        with pytest.raises(ValueError, match="no coordinate"):
            tb.prefix_marginal(t, (1, 1), orthogonalize=True)


class TestTheoremOneIdentity:
    def test_prefix_norms_equal_trailing_sums_everywhere(self, rng):
        # prefix-product norms of the orthogonalized train equal the sums
        # of the squared tensor over all trailing modes, for every level
        # and every prefix at once
        for _ in range(5):
            t = random_small_tt(rng, max_d=4, max_n=6, max_r=3, max_elems=5000)
            t_orth = tb.tt_orth(t)
            full_sq = t.to_full() ** 2
            v = t_orth.cores[0][0]  # (n_1, r_1)
            for level in range(1, t.ndim):
                masses = np.einsum("pr,pr->p", v, v)
                brute = full_sq.reshape(masses.size, -1).sum(axis=1)
                scale = max(1.0, brute.max())
                assert np.abs(masses - brute).max() <= 1e-10 * scale
                core = t_orth.cores[level]
                r_prev, n, r_next = core.shape
                v = (v @ core.reshape(r_prev, n * r_next)).reshape(-1, r_next)

    def test_chain_rule_along_sampled_paths(self, rng):
        t = random_small_tt(rng, max_d=4, max_n=5, max_r=3, max_elems=500)
        t_orth = tb.tt_orth(t)
        full = t.to_full()
        p_exact = full**2 / (full**2).sum()
        idx = tb.sample(t, 5, seed=11)
        for row in idx:
            prob = 1.0
            for level in range(t.ndim):
                table = tb.prefix_marginal(t_orth, tuple(row[:level]))
                prob *= table.probs[row[level] - 1]
            assert prob == pytest.approx(
                p_exact[tuple(row - 1)], abs=1e-10, rel=1e-8
            )


class TestSample:
    def test_deterministic_for_fixed_seed(self):
        t = tb.tt_random((3, 3, 3), 2, seed=5)
        a = tb.sample(t, 50, seed=9)
        b = tb.sample(t, 50, seed=9)
        assert np.array_equal(a, b)

    def test_uniform_two_by_two(self):
        t = tb.tt_const((2, 2), 1.0)
        samples = tb.sample(t, 100_000, seed=10)
        freq = empirical_joint(samples, (2, 2))
        assert tv_distance(freq.ravel(), np.full(4, 0.25)) <= 0.02

    def test_random_tensor_tv_distance(self):
        t = tb.tt_random((3, 3, 3), 2, seed=6)
        full = t.to_full()
        p = full**2 / (full**2).sum()
        samples = tb.sample(t, 100_000, seed=12)
        freq = empirical_joint(samples, (3, 3, 3))
        assert tv_distance(freq.ravel(), p.ravel()) <= 0.02

    def test_dominant_element_dominates_draws(self):
        full = np.full((3, 3, 3), 1.0)
        full[1, 2, 0] = 1000.0
        t = tb.tt_svd(full, rel_tol=1e-12)
        samples = tb.sample(t, 2000, seed=13)
        hits = (samples == np.array([2, 3, 1])).all(axis=1).mean()
        assert hits >= 0.99

    def test_zero_tensor_rejected(self):
        t = tb.tt_const((2, 2), 0.0)
        with pytest.raises(ZeroMassError):
            tb.sample(t, 1, seed=0)

    def test_count_validation(self):
        t = tb.tt_const((2, 2), 1.0)
        with pytest.raises(ValueError):
            tb.sample(t, 0, seed=0)


class TestBeamMarginalCheck:
    def test_random_small_tensors(self, rng):
        for _ in range(5):
            t = random_small_tt(rng, max_d=4, max_n=8, max_r=3, max_elems=4096)
            report = beam_marginal_check(t, 5)
            assert report.max_discrepancy <= 1e-10
            assert len(report.step_discrepancies) == t.ndim

    def test_rank1_tensor(self):
        t = rank1_from_vectors([1.0, 2.0], [3.0, -1.0], [0.5, 2.0])
        report = beam_marginal_check(t, 2)
        assert report.max_discrepancy <= 1e-12

    def test_constant_tensor_has_flat_beam(self):
        t = tb.tt_const((3, 3, 3), 2.0)
        report = beam_marginal_check(t, 3)
        # all prefixes carry equal mass; matching the brute-force sums
        # to this accuracy means the beam norms are equal too
        assert report.max_discrepancy <= 1e-12
        table = tb.prefix_marginal(t, (), orthogonalize=True)
        assert np.ptp(table.probs) <= 1e-14
