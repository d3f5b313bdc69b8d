import math

import numpy as np
import pytest

import ttbeam as tb
from ttbeam.errors import BudgetExceededError
from ttbeam.oracle import brute_min_max, brute_top_abs

from conftest import random_small_tt
from test_tensor import rank1_from_vectors


class TestTopK:
    def test_hand_computed_norms_with_tie(self):
        m = [[3.0, 4.0], [0.0, 1.0], [5.0, 0.0]]
        # rows 1 and 3 tie at norm 5; lower row number wins
        assert list(tb.top_k(m, 2)) == [1, 3]

    def test_k_at_least_rows_returns_all(self):
        m = [[1.0], [3.0], [2.0]]
        assert list(tb.top_k(m, 10)) == [2, 3, 1]

    def test_agrees_with_sort_oracle(self, rng):
        m = rng.standard_normal((50, 4))
        norms = np.linalg.norm(m, axis=1)
        expected = np.argsort(-norms, kind="stable")[:7] + 1
        assert np.array_equal(tb.top_k(m, 7), expected)

    def test_invalid_k(self):
        with pytest.raises(ValueError):
            tb.top_k([[1.0]], 0)


class TestOptimaTTMax:
    def test_rank1_factorizes(self):
        u, v, w = [1.0, -4.0, 2.0], [0.5, 3.0], [2.0, -1.0, 0.5, 1.0]
        t = rank1_from_vectors(u, v, w)
        for k in (1, 2, 10):
            idx, _ = tb.optima_tt_max(t, k)
            assert list(idx) == [2, 2, 1]  # per-mode argmax of |.|

    def test_exact_when_no_pruning(self, rng):
        for _ in range(5):
            t = random_small_tt(rng, max_d=4, max_n=6, max_r=4, max_elems=1000)
            full = t.to_full()
            idx, _ = tb.optima_tt_max(t, k=t.size)
            oracle_idx, _ = brute_top_abs(full, 1)
            assert np.array_equal(idx, oracle_idx[0])

    def test_matches_true_max_modulus_at_default_width(self, rng):
        sizes = rng.integers(5, 21, size=6)
        t = tb.tt_random(sizes, 5, seed=99)
        idx, _ = tb.optima_tt_max(t, 100)
        full = t.to_full()
        true_abs = max(abs(full.min()), abs(full.max()))
        assert abs(abs(t.eval(idx)) - true_abs) <= 1e-12

    def test_final_beam_is_top_k(self, rng):
        t = random_small_tt(rng, max_d=4, max_n=5, max_r=3, max_elems=500)
        full = t.to_full()
        k = t.size  # no pruning: beam must equal the exact top list
        _, beam = tb.optima_tt_max(t, k)
        oracle_idx, oracle_vals = brute_top_abs(full, 10)
        beam_vals = np.abs(t.eval_many(beam.indices[:10]))
        assert np.abs(beam_vals - np.abs(oracle_vals)).max() <= 1e-11

    def test_beam_rows_distinct_and_bounded(self):
        t = tb.tt_random((4, 4, 4), 2, seed=5)
        _, beam = tb.optima_tt_max(t, 1000)
        assert len(beam) == t.size  # k_cur caps at the element count
        assert np.unique(beam.indices, axis=0).shape[0] == len(beam)

    def test_single_mode_tensor(self):
        t = rank1_from_vectors([1.0, -7.0, 3.0])
        idx, beam = tb.optima_tt_max(t, 2)
        assert list(idx) == [2]
        assert list(beam.indices[:, 0]) == [2, 3]

    def test_invalid_k(self):
        t = tb.tt_const((2, 2), 1.0)
        with pytest.raises(ValueError):
            tb.optima_tt_max(t, 0)

    def test_input_not_mutated(self):
        t = tb.tt_random((5, 5, 5), 3, seed=6)
        before = [c.copy() for c in t.cores]
        tb.optima_tt_max(t, 10)
        assert all(np.array_equal(a, b) for a, b in zip(before, t.cores))


class TestOptimaTT:
    def test_constant_tensor_degenerates_cleanly(self):
        res = tb.optima_tt(tb.tt_const((3, 3), 4.0), k=5)
        assert res.y_min == pytest.approx(4.0, rel=1e-12)
        assert res.y_max == pytest.approx(4.0, rel=1e-12)

    def test_four_element_enumeration(self):
        t = rank1_from_vectors([-2.0, 1.0], [1.0, 3.0])
        res = tb.optima_tt(t, k=4)
        assert res.y_min == pytest.approx(-6.0)
        assert list(res.i_min) == [1, 2]
        assert res.y_max == pytest.approx(3.0)
        assert list(res.i_max) == [2, 2]

    @pytest.mark.parametrize("seed", range(20))
    def test_random_tensors_match_brute_force(self, seed):
        rng = np.random.default_rng([17, seed])
        d = int(rng.integers(4, 7))
        shape = rng.integers(4, 9, size=d)
        r = int(rng.integers(1, 6))
        t = tb.tt_random(shape, r, rng)
        res = tb.optima_tt(t, k=100)
        _, y_min, _, y_max = brute_min_max(t.to_full())
        assert abs(res.y_min - y_min) <= 1e-10
        assert abs(res.y_max - y_max) <= 1e-10

    def test_result_invariants(self, rng):
        t = random_small_tt(rng)
        res = tb.optima_tt(t, k=25)
        assert res.y_min <= res.y_max
        assert res.y_min == t.eval(res.i_min)
        assert res.y_max == t.eval(res.i_max)
        assert res.k_used == 25
        assert res.direction == "forward"

    def test_directions(self, rng):
        t = random_small_tt(rng, max_elems=2000)
        _, y_min, _, y_max = brute_min_max(t.to_full())
        for direction in ("forward", "backward", "best-of-both"):
            res = tb.optima_tt(t, k=t.size, direction=direction)
            assert res.y_min == pytest.approx(y_min, abs=1e-11)
            assert res.y_max == pytest.approx(y_max, abs=1e-11)
            assert res.direction == direction

    def test_bad_direction(self):
        with pytest.raises(ValueError, match="direction"):
            tb.optima_tt(tb.tt_const((2, 2), 1.0), k=1, direction="sideways")


class TestBidirectional:
    def test_symmetric_tensor_passes_agree(self):
        v = [0.5, -2.0, 1.0]
        t = rank1_from_vectors(v, v, v)  # palindromic cores
        fwd, _ = tb.optima_tt_max(t, 3)
        both = tb.optima_tt_max_bidir(t, 3)
        assert abs(t.eval(both)) == pytest.approx(abs(t.eval(fwd)))

    def test_never_worse_than_forward(self, rng):
        for _ in range(10):
            t = random_small_tt(rng, max_elems=5000)
            fwd, _ = tb.optima_tt_max(t, 2)
            both = tb.optima_tt_max_bidir(t, 2)
            assert abs(t.eval(both)) >= abs(t.eval(fwd))

    def test_backward_pass_equals_forward_on_reversed(self, rng):
        # the backward candidate is, by construction, the forward result
        # on the reversed train mapped back to forward mode order
        t = random_small_tt(rng, max_elems=5000)
        rev_idx, _ = tb.optima_tt_max(t.reverse(), 3)
        value_on_reversed = abs(t.reverse().eval(rev_idx))
        value_mapped_back = abs(t.eval(np.asarray(rev_idx)[::-1]))
        assert value_mapped_back == pytest.approx(value_on_reversed, rel=1e-12)

    def test_bidir_fixes_forward_failures(self):
        # seeds where the width-1 forward pass provably misses the optimum
        found = 0
        for seed in range(200):
            rng = np.random.default_rng([23, seed])
            t = random_small_tt(rng, max_d=4, max_n=6, max_r=3, max_elems=2000)
            full = t.to_full()
            true_abs = max(abs(full.min()), abs(full.max()))
            fwd, _ = tb.optima_tt_max(t, 1)
            e_fwd = true_abs - abs(t.eval(fwd))
            if e_fwd <= 1e-9 * true_abs:
                continue
            found += 1
            both = tb.optima_tt_max_bidir(t, 1)
            e_both = true_abs - abs(t.eval(both))
            assert e_both <= e_fwd + 1e-12
            if found >= 10:
                break
        assert found >= 5  # the sweep must actually exercise failure cases


class TestWorstCaseBounds:
    @staticmethod
    def check_bound(t, k):
        """Mass of the found index obeys the worst-case lower bound."""
        full = t.to_full()
        p = full**2
        p_star = p.max()
        idx, _ = tb.optima_tt_max(t, k)
        p_found = p[tuple(np.asarray(idx) - 1)]
        # largest j with n_1 * ... * n_{j-1} <= k
        j = 1
        while j < t.ndim and math.prod(t.shape[:j]) <= k:
            j += 1
        bound = p_star * math.prod(1.0 / n for n in t.shape[j:])
        assert p_found >= bound * (1.0 - 1e-9)

    @pytest.mark.parametrize("seed", range(25))
    def test_width1_and_wider_bounds(self, seed):
        rng = np.random.default_rng([29, seed])
        t = random_small_tt(rng, max_d=4, max_n=6, max_r=3, max_elems=2000)
        n1, n2 = t.shape[0], t.shape[1]
        for k in (1, 2, n1, n1 * n2):
            self.check_bound(t, k)


class TestJoin:
    def test_j_one_is_identity(self):
        t = tb.tt_random((3, 4), 2, seed=30)
        assert tb.join_first_indices(t, 1) is t

    def test_values_preserved_under_flattening(self):
        t = tb.tt_random((3, 4, 5), 3, seed=31)
        joined = tb.join_first_indices(t, 2)
        assert joined.shape == (12, 5)
        for i1 in range(1, 4):
            for i2 in range(1, 5):
                flat = i1 + (i2 - 1) * 3  # first index varies fastest
                for i3 in range(1, 6):
                    assert joined.eval((flat, i3)) == pytest.approx(
                        t.eval((i1, i2, i3)), abs=1e-12, rel=1e-12
                    )

    def test_split_inverts_flattening(self):
        shape = (3, 4, 5)
        for flat in (1, 7, 12):
            i = tb.split_joined_index(shape, 2, flat)
            assert flat == i[0] + (i[1] - 1) * shape[0]

    def test_adversarial_tensor_improved_by_join(self):
        # mode-1 marginal prefers the wrong row: 2 a^2 > b^2 but b > a
        a, b = 0.72, 1.0
        g1 = np.zeros((1, 2, 2))
        g1[0, 0, 0] = 1.0
        g1[0, 1, 1] = 1.0
        g2 = np.zeros((2, 2, 1))
        g2[0, :, 0] = [a, a]
        g2[1, :, 0] = [b, 0.0]
        g3 = np.zeros((1, 4, 1))
        g3[0, 0, 0] = 1.0
        t = tb.TTTensor([g1, g2, g3])
        full = t.to_full()
        p = full**2
        p_star = p.max()

        idx_plain, _ = tb.optima_tt_max(t, 1)
        p_plain = p[tuple(np.asarray(idx_plain) - 1)]
        assert p_plain < p_star  # width-1 search lands on the decoy
        assert p_plain >= p_star / (t.shape[1] * t.shape[2]) * (1 - 1e-12)

        joined = tb.join_first_indices(t, 2)
        idx_joined, _ = tb.optima_tt_max(joined, 1)
        p_joined = (joined.eval(idx_joined)) ** 2
        assert p_joined == pytest.approx(p_star)  # merged search is exact here
        assert p_joined >= p_star / t.shape[2] * (1 - 1e-12)

    def test_budget_enforced(self):
        t = tb.tt_random((40, 40, 40, 2), 3, seed=32)
        with pytest.raises(BudgetExceededError):
            tb.join_first_indices(t, 3, element_budget=10_000)

    def test_bad_j(self):
        t = tb.tt_random((3, 3), 2, seed=33)
        with pytest.raises(ValueError):
            tb.join_first_indices(t, 0)
        with pytest.raises(ValueError):
            tb.join_first_indices(t, 2)
