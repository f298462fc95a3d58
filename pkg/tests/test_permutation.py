import json
import math

import numpy as np
import pytest

from tdaperm import (
    GroupLabels,
    ValidationError,
    distance_matrix,
    exact_permutation_pvalue,
    joint_loss,
    permutation_pvalue,
    save_test_result,
    standard_shuffles,
    strong_mixing_shuffles,
)


def four_item_matrix():
    """Groups {0,1} and {2,3}: within-group distances 1 and 3."""
    m = np.zeros((4, 4))
    m[0, 1] = m[1, 0] = 1.0
    m[2, 3] = m[3, 2] = 3.0
    for i in (0, 1):
        for j in (2, 3):
            m[i, j] = m[j, i] = 5.0
    return m


def block_matrix():
    """Within-group distances 0, between-group distances 1."""
    m = np.ones((4, 4))
    m[:2, :2] = 0.0
    m[2:, 2:] = 0.0
    np.fill_diagonal(m, 0.0)
    return m


from oracles import enumerate_labelings, loss_for_labels


def random_symmetric(rng, n):
    a = rng.uniform(0.1, 1.0, (n, n))
    m = (a + a.T) / 2
    np.fill_diagonal(m, 0.0)
    return m


def oracle_exhaustive(m, n1, q=1):
    """Classical enumeration: count of labelings at or below the identity loss."""
    losses = enumerate_labelings(m, n1, q)
    observed = losses[0]
    count = sum(1 for x in losses if x <= observed + 1e-12)
    return observed, count, len(losses)


class TestGroupLabels:
    def test_contiguous(self):
        g = GroupLabels.contiguous(3, 2)
        np.testing.assert_array_equal(g.labels, [1, 1, 1, 2, 2])
        assert g.n1 == 3
        assert g.n2 == 2

    def test_rejects_other_values(self):
        with pytest.raises(ValidationError):
            GroupLabels([1, 2, 3])

    def test_rejects_single_group(self):
        with pytest.raises(ValidationError):
            GroupLabels([1, 1, 1])

    def test_immutable(self):
        g = GroupLabels([1, 2])
        with pytest.raises(ValueError):
            g.labels[0] = 2

    def test_equality(self):
        assert GroupLabels([1, 2, 1]) == GroupLabels([1, 2, 1])
        assert GroupLabels([1, 2, 1]) != GroupLabels([1, 1, 2])


class TestJointLoss:
    def test_two_pair_example(self):
        assert joint_loss(four_item_matrix(), GroupLabels([1, 1, 2, 2])) == pytest.approx(2.0)

    def test_all_zero_distances(self):
        assert joint_loss(np.zeros((5, 5)), GroupLabels([1, 1, 1, 2, 2])) == 0.0

    def test_global_label_swap_invariance(self):
        rng = np.random.default_rng(40)
        m = random_symmetric(rng, 7)
        lab = GroupLabels([1, 2, 1, 1, 2, 2, 1])
        swapped = GroupLabels(np.where(lab.labels == 1, 2, 1))
        assert joint_loss(m, lab) == pytest.approx(joint_loss(m, swapped), abs=1e-12)

    def test_within_group_permutation_invariance(self):
        rng = np.random.default_rng(41)
        m = random_symmetric(rng, 6)
        lab = GroupLabels.contiguous(3, 3)
        base = joint_loss(m, lab, q=2)
        perm = np.array([2, 0, 1, 5, 3, 4])
        m2 = m[np.ix_(perm, perm)]
        assert joint_loss(m2, lab, q=2) == pytest.approx(base, abs=1e-12)

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            m = random_symmetric(rng, 8)
            lab = GroupLabels(rng.permutation([1] * 4 + [2] * 4))
            for q in (1, 2, 1.5):
                assert joint_loss(m, lab, q) == pytest.approx(
                    loss_for_labels(m, lab.labels, q), abs=1e-12
                )

    def test_small_group_rejected(self):
        m = np.zeros((3, 3))
        with pytest.raises(ValidationError):
            joint_loss(m, GroupLabels([1, 1, 2]))

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            joint_loss(np.zeros((4, 4)), GroupLabels([1, 1, 2, 2, 2]))

    def test_accepts_distance_matrix_object(self):
        from tdaperm import PersistenceDiagram

        ds = [PersistenceDiagram(0, [[0.0, float(i + 1)]]) for i in range(4)]
        dm = distance_matrix(ds, "w")
        lab = GroupLabels([1, 1, 2, 2])
        assert joint_loss(dm, lab) == pytest.approx(joint_loss(dm.entries, lab), abs=1e-15)


class TestStandardShuffles:
    def test_group_sizes_preserved(self):
        lab = GroupLabels.contiguous(10, 10)
        for s in standard_shuffles(lab, 25, seed=0):
            assert int(np.sum(s.labels == 1)) == 10
            assert int(np.sum(s.labels == 2)) == 10

    def test_single_shuffle_reproducible(self):
        lab = GroupLabels.contiguous(5, 5)
        a = standard_shuffles(lab, 1, seed=42)[0]
        b = standard_shuffles(lab, 1, seed=42)[0]
        assert a == b

    def test_prefix_stability(self):
        # shuffle i depends only on (seed, i), not on the requested count
        lab = GroupLabels.contiguous(4, 4)
        long = standard_shuffles(lab, 10, seed=7)
        short = standard_shuffles(lab, 3, seed=7)
        for a, b in zip(short, long):
            assert a == b

    def test_uniform_over_labelings(self):
        # n1 = n2 = 2: six labelings, each expected 1/6 of the time
        lab = GroupLabels.contiguous(2, 2)
        counts = {}
        draws = 10_000
        for s in standard_shuffles(lab, draws, seed=5):
            key = tuple(int(v) for v in s.labels)
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 6
        for c in counts.values():
            assert abs(c / draws - 1 / 6) <= 0.02


class TestStrongMixingShuffles:
    def test_balanced_ten_differs_in_ten_positions(self):
        lab = GroupLabels.contiguous(10, 10)
        for s in strong_mixing_shuffles(lab, 30, seed=1):
            assert int(np.sum(s.labels != lab.labels)) == 10

    def test_support_of_balanced_four(self):
        lab = GroupLabels.contiguous(4, 4)
        seen = {tuple(int(v) for v in s.labels)
                for s in strong_mixing_shuffles(lab, 10_000, seed=2)}
        assert len(seen) == 36

    def test_unbalanced_swaps_one_each_way(self):
        lab = GroupLabels.contiguous(4, 2)
        for s in strong_mixing_shuffles(lab, 20, seed=3):
            flipped_to_two = np.sum((lab.labels == 1) & (s.labels == 2))
            flipped_to_one = np.sum((lab.labels == 2) & (s.labels == 1))
            assert flipped_to_two == 1
            assert flipped_to_one == 1

    def test_group_sizes_preserved(self):
        lab = GroupLabels.contiguous(7, 3)
        for s in strong_mixing_shuffles(lab, 20, seed=4):
            assert int(np.sum(s.labels == 1)) == 7

    def test_tiny_group_rejected(self):
        lab = GroupLabels([1, 1, 1, 2])
        with pytest.raises(ValidationError):
            strong_mixing_shuffles(lab, 5, seed=0)

    def test_determinism(self):
        lab = GroupLabels.contiguous(5, 5)
        a = strong_mixing_shuffles(lab, 10, seed=9)
        b = strong_mixing_shuffles(lab, 10, seed=9)
        assert all(x == y for x, y in zip(a, b))


class TestPermutationPvalue:
    def test_all_equal_distances_give_p_one(self):
        m = np.ones((6, 6))
        np.fill_diagonal(m, 0.0)
        res = permutation_pvalue(m, GroupLabels.contiguous(3, 3), n_perms=200, seed=0)
        assert res.p_value == 1.0

    def test_pvalue_bounds(self):
        rng = np.random.default_rng(43)
        for seed in range(5):
            m = random_symmetric(rng, 8)
            res = permutation_pvalue(m, GroupLabels.contiguous(4, 4),
                                     n_perms=99, seed=seed)
            assert 1 / 100 <= res.p_value <= 1.0

    def test_determinism(self):
        rng = np.random.default_rng(44)
        m = random_symmetric(rng, 8)
        lab = GroupLabels.contiguous(4, 4)
        a = permutation_pvalue(m, lab, n_perms=300, mixing="strong", seed=11)
        b = permutation_pvalue(m, lab, n_perms=300, mixing="strong", seed=11)
        assert a.p_value == b.p_value
        assert a.observed_loss == b.observed_loss
        assert a.mixing == "strong"
        assert a.seed == 11

    def test_separated_blocks_get_small_p(self):
        res = permutation_pvalue(block_matrix(), GroupLabels([1, 1, 2, 2]),
                                 n_perms=999, seed=0)
        # only the two label-swap-symmetric labelings attain the observed loss
        assert res.p_value < 0.5
        assert res.observed_loss == 0.0

    def test_bad_mixing_rejected(self):
        with pytest.raises(ValidationError):
            permutation_pvalue(block_matrix(), GroupLabels([1, 1, 2, 2]),
                               n_perms=10, mixing="none", seed=0)

    def test_stored_losses(self):
        rng = np.random.default_rng(45)
        m = random_symmetric(rng, 6)
        res = permutation_pvalue(m, GroupLabels.contiguous(3, 3), n_perms=50,
                                 seed=1, store_losses=True)
        assert res.permutation_losses is not None
        assert len(res.permutation_losses) == 50
        count = int(np.sum(np.asarray(res.permutation_losses) <= res.observed_loss))
        assert res.p_value == pytest.approx((1 + count) / 51)


class TestExactPvalue:
    def test_block_example(self):
        res = exact_permutation_pvalue(block_matrix(), GroupLabels([1, 1, 2, 2]))
        assert res.p_value == pytest.approx(3 / 7, abs=1e-15)
        assert res.n_permutations == 6
        assert res.mixing == "exhaustive"

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(46)
        for _ in range(10):
            m = random_symmetric(rng, 6)
            res = exact_permutation_pvalue(m, GroupLabels.contiguous(3, 3))
            _, count, total = oracle_exhaustive(m, 3)
            assert total == 20
            assert res.p_value == pytest.approx((1 + count) / (total + 1), abs=1e-12)

    def test_sampled_close_to_classical_proportion(self):
        rng = np.random.default_rng(47)
        lab = GroupLabels.contiguous(3, 3)
        for seed in range(3):
            m = random_symmetric(rng, 6)
            _, count, total = oracle_exhaustive(m, 3)
            classical = count / total
            res = permutation_pvalue(m, lab, n_perms=10_000, seed=seed)
            assert abs(res.p_value - classical) <= 0.03

    def test_enumeration_cap(self):
        m = np.zeros((40, 40))
        with pytest.raises(ValidationError):
            exact_permutation_pvalue(m, GroupLabels.contiguous(20, 20))


class TestResultSerialization:
    def test_json_keys_exact(self, tmp_path):
        res = exact_permutation_pvalue(block_matrix(), GroupLabels([1, 1, 2, 2]))
        path = tmp_path / "result.json"
        save_test_result(res, str(path))
        obj = json.loads(path.read_text())
        assert set(obj) == {"p_value", "observed_loss", "n_permutations",
                            "mixing", "seed", "method"}
        assert obj["p_value"] == pytest.approx(3 / 7)
        assert obj["mixing"] == "exhaustive"

    def test_method_carried_from_distance_matrix(self):
        from tdaperm import PersistenceDiagram

        rng = np.random.default_rng(48)
        ds = []
        for _ in range(4):
            b = rng.uniform(0, 1, 3)
            ds.append(PersistenceDiagram(0, np.column_stack([b, b + rng.uniform(0, 1, 3)])))
        dm = distance_matrix(ds, "vab")
        res = permutation_pvalue(dm, GroupLabels([1, 1, 2, 2]), n_perms=20, seed=0)
        assert res.method == "vab"

    def test_invalid_pvalue_rejected(self):
        from tdaperm import TestResult

        with pytest.raises(ValidationError):
            TestResult(observed_loss=0.0, p_value=1.5, n_permutations=10,
                       mixing="standard", seed=0)
