"""Two-group permutation test on a matrix of pairwise distances.

The statistic is the joint within-group loss

    F = sum over groups m of [1 / (2 n_m (n_m - 1))] * sum_{i != j in m} d(i, j)^q,

small when groups are internally tight.  The test shuffles the group labels
(uniformly, or with a strong-mixing scheme that swaps exactly
floor(min(n1, n2)/2) members each way) and reports the add-one corrected
fraction of shuffles whose loss does not exceed the observed one.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError

__all__ = [
    "GroupLabels",
    "TestResult",
    "joint_loss",
    "standard_shuffles",
    "strong_mixing_shuffles",
    "permutation_pvalue",
    "exact_permutation_pvalue",
    "save_test_result",
]

MIXINGS = ("standard", "strong")


class GroupLabels:
    """Group membership vector with values in {1, 2}."""

    __slots__ = ("labels", "n1", "n2")

    def __init__(self, labels):
        arr = np.asarray(labels, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError(f"labels must be a nonempty vector, got shape {arr.shape}")
        if not np.all((arr == 1) | (arr == 2)):
            raise ValidationError("labels must contain only the values 1 and 2")
        n1 = int(np.sum(arr == 1))
        n2 = int(np.sum(arr == 2))
        if n1 == 0 or n2 == 0:
            raise ValidationError("both groups must be nonempty")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)
        object.__setattr__(self, "n1", n1)
        object.__setattr__(self, "n2", n2)

    def __setattr__(self, name, value):
        raise AttributeError("GroupLabels is immutable")

    @classmethod
    def contiguous(cls, n1, n2):
        """n1 ones followed by n2 twos."""
        return cls([1] * int(n1) + [2] * int(n2))

    def __len__(self):
        return self.labels.size

    def __eq__(self, other):
        if not isinstance(other, GroupLabels):
            return NotImplemented
        return bool(np.array_equal(self.labels, other.labels))

    __hash__ = None

    def __repr__(self):
        return f"GroupLabels(n1={self.n1}, n2={self.n2})"


@dataclass(frozen=True)
class TestResult:
    """Outcome of one permutation test.

    ``p_value`` always equals (1 + #{permutation losses <= observed}) over
    (n_permutations + 1).  ``mixing`` is "standard", "strong", or
    "exhaustive" when every distinct labeling was enumerated.
    """

    observed_loss: float
    p_value: float
    n_permutations: int
    mixing: str
    seed: int
    method: str = ""
    permutation_losses: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValidationError(f"p_value must lie in [0, 1], got {self.p_value}")
        if self.mixing not in MIXINGS + ("exhaustive",):
            raise ValidationError(f"unknown mixing {self.mixing!r}")

    def to_json(self):
        obj = {
            "p_value": self.p_value,
            "observed_loss": self.observed_loss,
            "n_permutations": self.n_permutations,
            "mixing": self.mixing,
            "seed": self.seed,
            "method": self.method,
        }
        return json.dumps(obj, sort_keys=True)


def save_test_result(result, path_or_buf):
    out = result.to_json() + "\n"
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(out)
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(out)


def _loss_from_entries(entries, labels_arr, q):
    total = 0.0
    for g in (1, 2):
        idx = np.nonzero(labels_arr == g)[0]
        if idx.size < 2:
            raise ValidationError(f"group {g} has fewer than 2 members")
        sub = entries[np.ix_(idx, idx)]
        if q == 1:
            s = float(sub.sum())
        else:
            s = float((sub ** q).sum())
        total += s / (2.0 * idx.size * (idx.size - 1))
    return total


def joint_loss(m, labels, q=1):
    """Within-group average of q-th powers of pairwise distances, both groups.

    The normalization 1/(2 n_m (n_m - 1)) averages over ordered within-group
    pairs, so relabeling the two groups leaves the loss unchanged.
    """
    entries = m.entries if hasattr(m, "entries") else np.asarray(m, dtype=np.float64)
    if entries.shape[0] != len(labels):
        raise ValidationError(
            f"matrix size {entries.shape[0]} does not match {len(labels)} labels"
        )
    if not q >= 1:
        raise ValidationError(f"q must be >= 1, got {q!r}")
    return _loss_from_entries(entries, labels.labels, q)


def standard_shuffles(labels, count, seed=0):
    """Uniform random relabelings preserving group sizes, with replacement.

    Shuffle i depends only on (seed, i), so any subset of the sequence can be
    regenerated independently.
    """
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ValidationError(f"count must be a positive integer, got {count!r}")
    base = labels.labels
    return [
        GroupLabels(np.random.default_rng([seed, i]).permutation(base))
        for i in range(int(count))
    ]


def strong_mixing_shuffles(labels, count, seed=0):
    """Relabelings that swap exactly k_max members between the groups.

    k_max = floor(min(n1, n2) / 2): each shuffle picks k_max indices from
    each group uniformly without replacement and exchanges their labels, so
    every emitted labeling differs from the original in exactly 2 k_max
    positions.
    """
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ValidationError(f"count must be a positive integer, got {count!r}")
    if min(labels.n1, labels.n2) < 2:
        raise ValidationError("strong mixing needs at least 2 members in each group")
    k_max = min(labels.n1, labels.n2) // 2
    base = labels.labels
    ones = np.nonzero(base == 1)[0]
    twos = np.nonzero(base == 2)[0]
    out = []
    for i in range(int(count)):
        rng = np.random.default_rng([seed, i])
        swap1 = rng.choice(ones, size=k_max, replace=False)
        swap2 = rng.choice(twos, size=k_max, replace=False)
        arr = np.array(base)
        arr[swap1] = 2
        arr[swap2] = 1
        out.append(GroupLabels(arr))
    return out


def permutation_pvalue(m, labels, n_perms=1000, mixing="standard", q=1, seed=0,
                       store_losses=False):
    """Monte-Carlo permutation test of group exchangeability.

    One-sided: small observed loss (tight within-group clustering) is the
    evidence against exchangeability, so the p-value is the add-one corrected
    fraction of shuffles with loss at or below the observed one.
    """
    if mixing not in MIXINGS:
        raise ValidationError(f"mixing must be one of {MIXINGS}, got {mixing!r}")
    entries = m.entries if hasattr(m, "entries") else np.asarray(m, dtype=np.float64)
    method = getattr(m, "method", "")
    observed = joint_loss(m, labels, q)
    shuffler = standard_shuffles if mixing == "standard" else strong_mixing_shuffles
    shuffles = shuffler(labels, n_perms, seed)
    losses = np.array([_loss_from_entries(entries, s.labels, q) for s in shuffles])
    count = int(np.sum(losses <= observed))
    p = (1.0 + count) / (n_perms + 1.0)
    return TestResult(
        observed_loss=float(observed),
        p_value=float(p),
        n_permutations=int(n_perms),
        mixing=mixing,
        seed=int(seed),
        method=method,
        permutation_losses=losses if store_losses else None,
    )


def exact_permutation_pvalue(m, labels, q=1, store_losses=False):
    """Exhaustive permutation test over all distinct labelings.

    Enumerates every assignment of n1 items to group 1 (the identity
    labeling included) and applies the same add-one rule as the sampled
    estimator, with n_permutations equal to the number of labelings.
    """
    entries = m.entries if hasattr(m, "entries") else np.asarray(m, dtype=np.float64)
    method = getattr(m, "method", "")
    observed = joint_loss(m, labels, q)
    n = len(labels)
    total = math.comb(n, labels.n1)
    if total > 200_000:
        raise ValidationError(
            f"{total} labelings is too many to enumerate; use permutation_pvalue"
        )
    losses = np.empty(total)
    arr = np.empty(n, dtype=np.int64)
    for idx, ones in enumerate(itertools.combinations(range(n), labels.n1)):
        arr[:] = 2
        arr[list(ones)] = 1
        losses[idx] = _loss_from_entries(entries, arr, q)
    count = int(np.sum(losses <= observed))
    p = (1.0 + count) / (total + 1.0)
    return TestResult(
        observed_loss=float(observed),
        p_value=float(p),
        n_permutations=int(total),
        mixing="exhaustive",
        seed=0,
        method=method,
        permutation_losses=losses if store_losses else None,
    )
