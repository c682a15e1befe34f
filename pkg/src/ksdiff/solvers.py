"""Minimizers for the sparsest k-subgraph objective over a weight matrix.

For a symmetric nonnegative matrix H, the objective of a selection S is the
sum of H over the complement block, f(S) = sum_{i,j not in S} H[i][j].
Greedy selection removes the heaviest remaining feature each round using an
O(D) bookkeeping update; the scoring variant runs the same loop to exhaustion
and converts each round's drop in f into a per-feature score, so no target
cardinality is needed. Exact minimization enumerates complements with
branch-and-bound pruning, which is sound because entries are nonnegative.

All tie-breaks are by smallest feature index (greedy) or lexicographically
smallest complement (exact), making every solver deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import DataValidationError, SolverLimitError
from .matrix import EmpiricalKsMatrix

DEFAULT_EXACT_LIMIT = 25


@dataclass(frozen=True)
class SolverResult:
    """Selected features (in order of selection), objective value, optional scores."""

    selected: tuple[int, ...]
    objective: float
    method: str
    scores: np.ndarray | None = None


def as_weight_matrix(h) -> np.ndarray:
    """Coerce a KS matrix or raw array into a validated symmetric nonnegative matrix."""
    if isinstance(h, EmpiricalKsMatrix):
        return h.entries
    arr = np.asarray(h, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DataValidationError(f"weight matrix must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataValidationError("weight matrix contains non-finite entries")
    if not np.array_equal(arr, arr.T):
        raise DataValidationError("weight matrix is not symmetric")
    if np.any(arr < 0.0):
        raise DataValidationError("weight matrix has negative entries")
    return arr


def complement_objective(h, complement: Sequence[int]) -> float:
    """Direct evaluation of f at a complement set."""
    w = as_weight_matrix(h)
    idx = np.asarray(sorted(complement), dtype=np.intp)
    if idx.size == 0:
        return 0.0
    return float(w[np.ix_(idx, idx)].sum())


def greedy_k(h, k: int) -> SolverResult:
    """Greedily select D-k features; the complement of the selection has size k.

    Each round adds the feature whose removal from the complement minimizes
    the remaining objective, computed in O(1) per candidate from the running
    row sums over the complement.
    """
    w = as_weight_matrix(h)
    d = w.shape[0]
    if not 0 <= k <= d:
        raise DataValidationError(f"k must be in [0, {d}], got {k}")
    diag = np.diag(w).copy()
    row_sums = w.sum(axis=1)
    obj = float(w.sum())
    remaining = np.ones(d, dtype=bool)
    selected: list[int] = []
    for _ in range(d - k):
        candidates = np.where(remaining, obj - 2.0 * row_sums + diag, np.inf)
        chosen = int(np.argmin(candidates))
        obj = float(candidates[chosen])
        remaining[chosen] = False
        selected.append(chosen)
        row_sums -= w[chosen]
    complement = [i for i in range(d) if remaining[i]]
    return SolverResult(
        selected=tuple(selected),
        objective=complement_objective(w, complement),
        method="greedy-k",
    )


def greedy_score(h) -> SolverResult:
    """Run the greedy loop to exhaustion and score each feature.

    The feature removed at round i receives its drop in f divided by the
    complement size at that round (D - i + 1). High scores mark features
    whose removal erased a lot of weight; thresholding is the caller's
    choice. Scores are always nonnegative.
    """
    w = as_weight_matrix(h)
    d = w.shape[0]
    diag = np.diag(w).copy()
    row_sums = w.sum(axis=1)
    obj = float(w.sum())
    remaining = np.ones(d, dtype=bool)
    scores = np.zeros(d, dtype=np.float64)
    selected: list[int] = []
    for i in range(1, d + 1):
        candidates = np.where(remaining, obj - 2.0 * row_sums + diag, np.inf)
        chosen = int(np.argmin(candidates))
        drop = 2.0 * row_sums[chosen] - diag[chosen]
        scores[chosen] = drop / (d - i + 1)
        obj = float(candidates[chosen])
        remaining[chosen] = False
        selected.append(chosen)
        row_sums -= w[chosen]
    return SolverResult(selected=tuple(selected), objective=0.0, method="greedy-score", scores=scores)


def greedy_score_objective(objective: Callable[[list[int]], float], d: int) -> np.ndarray:
    """Greedy scoring trace for an arbitrary objective over complements.

    ``objective`` maps a sorted list of complement indices to a value; the
    loop mirrors ``greedy_score`` but evaluates the objective directly, so it
    also serves non-quadratic objectives. Scores may be negative when the
    objective is not monotone.
    """
    if d < 1:
        raise DataValidationError("need at least one feature")
    complement = list(range(d))
    scores = np.zeros(d, dtype=np.float64)
    current = float(objective(complement))
    for i in range(1, d + 1):
        values = [float(objective([c for c in complement if c != cand])) for cand in complement]
        pos = int(np.argmin(values))
        chosen = complement[pos]
        scores[chosen] = (current - values[pos]) / (d - i + 1)
        current = values[pos]
        complement.pop(pos)
    return scores


def exact_min(h, k: int, limit_d: int = DEFAULT_EXACT_LIMIT) -> SolverResult:
    """Global minimizer of f over complements of size k by pruned enumeration.

    Complements are explored in lexicographic order; a partial complement is
    abandoned once its (monotone) partial objective reaches the incumbent,
    which also keeps the first-found, lexicographically smallest optimum.
    """
    w = as_weight_matrix(h)
    d = w.shape[0]
    if d > limit_d:
        raise SolverLimitError(f"exact solver size limit: D={d} exceeds {limit_d}")
    if not 0 <= k <= d:
        raise DataValidationError(f"k must be in [0, {d}], got {k}")

    best_value = np.inf
    best_complement: list[int] = []
    chosen: list[int] = []

    def descend(start: int, partial: float, cross: np.ndarray) -> None:
        # cross[i] = sum of w[i, c] over the complement members chosen so far
        nonlocal best_value, best_complement
        if len(chosen) == k:
            if partial < best_value:
                best_value = partial
                best_complement = list(chosen)
            return
        slots = k - len(chosen)
        for nxt in range(start, d - slots + 1):
            added = partial + w[nxt, nxt] + 2.0 * cross[nxt]
            if added >= best_value:
                continue
            chosen.append(nxt)
            descend(nxt + 1, added, cross + w[nxt])
            chosen.pop()

    if k == 0:
        best_value = 0.0
        best_complement = []
    else:
        descend(0, 0.0, np.zeros(d, dtype=np.float64))
    selected = tuple(i for i in range(d) if i not in set(best_complement))
    return SolverResult(
        selected=selected,
        objective=complement_objective(w, best_complement),
        method="exact",
    )


def optimality_margin(h, selected, k: int, limit_d: int = DEFAULT_EXACT_LIMIT) -> float:
    """Gap between the best competing size-k complement and the given selection.

    Positive iff the selection's complement is the unique minimizer; may be
    <= 0 otherwise. Brute force over complements, so limited to small D.
    """
    w = as_weight_matrix(h)
    d = w.shape[0]
    if d > limit_d:
        raise SolverLimitError(f"margin brute force size limit: D={d} exceeds {limit_d}")
    star = frozenset(int(i) for i in selected)
    if not star <= set(range(d)):
        raise DataValidationError("selected features out of range")
    complement_star = sorted(set(range(d)) - star)
    if len(complement_star) != k:
        raise DataValidationError(
            f"selection leaves a complement of size {len(complement_star)}, expected k={k}"
        )
    f_star = complement_objective(w, complement_star)
    baseline = frozenset(complement_star)
    best = np.inf
    for comp in combinations(range(d), k):
        if frozenset(comp) == baseline:
            continue
        best = min(best, complement_objective(w, comp) - f_star)
    if not np.isfinite(best):
        raise DataValidationError("no competing complement of the requested size exists")
    return float(best)
