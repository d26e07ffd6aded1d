"""n-path coherence, distinguishability and their duality relations.

The n-path wave measure is the overlap-damped l1-type coherence

    C   = (1/(n-1)) sum_{i != j} |rho_ij| |gram_ij|

and the particle measure is

    D_Q = 1 - (1/(n-1)) sum_{i != j} sqrt(rho_ii rho_jj) |gram_ij|,

bounded by C + D_Q <= 1 with equality for a pure quanton.  Both quantities
are also exact aggregates of the two-path metrics:

    equal path probabilities:   C = (2/(n(n-1))) sum_pairs V_ij
                                D_Q = (2/(n(n-1))) sum_pairs D_ij
    general path probabilities: C = (1/(n-1)) sum_pairs (rho_ii+rho_jj) V_ij
                                D_Q = (1/(n-1)) sum_pairs (rho_ii+rho_jj) D_ij

so both are measurable by opening one pair of paths at a time.  The report
computes the direct formulas AND the pairwise aggregates so the identity can
be checked rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_state import InterferometerState
from .errors import DarkPairError, ValidationError
from .pairwise import DARK_PAIR_THRESHOLD, PairMetrics, pair_distinguishability, \
    pair_metrics, pair_visibility

# Below this deviation of max|rho_ii - 1/n| the state counts as symmetric
# (equal path probabilities).
SYMMETRY_TOL = 1e-10
# Pairwise aggregates must match the direct formulas this tightly.
AGGREGATION_TOL = 1e-10
DUALITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DualityReport:
    """Complete duality bookkeeping for one state.

    ``duality_margin`` is 1 - (coherence + distinguishability), non-negative
    for every valid state and zero (within tolerance) for a pure quanton.
    ``symmetric_sum_lhs`` is the plain pair average of (D_ij + V_ij) and is
    only populated when the state is symmetric; ``weighted_sum_lhs`` is the
    intensity-weighted pair sum of (D_ij + V_ij)/(n-1), valid universally.
    Pairs whose total probability is numerically zero cannot be renormalized
    and are listed in ``dark_pairs`` instead of ``pairwise``; they carry zero
    weight in every aggregate.
    """

    n: int
    coherence: float
    distinguishability: float
    pairwise: tuple[PairMetrics, ...]
    dark_pairs: tuple[tuple[int, int], ...]
    symmetric_sum_lhs: float | None
    weighted_sum_lhs: float
    duality_margin: float
    is_symmetric: bool
    gram_rank: int


def _path_probabilities(state: InterferometerState) -> np.ndarray:
    return np.clip(np.diag(state.rho).real, 0.0, None)


def _pair_indices(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def is_symmetric(state: InterferometerState) -> bool:
    """True when all path probabilities equal 1/n within SYMMETRY_TOL."""
    probs = np.diag(state.rho).real
    return bool(np.max(np.abs(probs - 1.0 / state.n)) <= SYMMETRY_TOL)


def coherence(state: InterferometerState) -> float:
    """Overlap-damped l1 coherence C of the effective state, in [0, 1]."""
    weights = np.abs(state.rho) * np.abs(state.gram)
    off_diagonal = weights.sum() - np.trace(weights)
    return float(off_diagonal) / (state.n - 1)


def distinguishability(state: InterferometerState) -> float:
    """n-path distinguishability D_Q, in [0, 1].

    Defined through the same pair sums that remain meaningful even when the
    detector states are linearly dependent (rank-deficient Gram matrix).
    """
    probs = _path_probabilities(state)
    geo = np.sqrt(np.outer(probs, probs)) * np.abs(state.gram)
    off_diagonal = geo.sum() - np.trace(geo)
    return 1.0 - float(off_diagonal) / (state.n - 1)


def coherence_from_pair_visibilities(state: InterferometerState) -> float:
    """Aggregate the two-path visibilities back into the n-path coherence.

    Symmetric states use the plain average over pairs scaled by n(n-1)/2;
    general states weight each pair by its total probability rho_ii+rho_jj
    over (n-1).  Dark pairs would carry weight ~0 and are skipped in the
    weighted branch; in the symmetric branch they cannot occur (every path
    carries 1/n) so DarkPairError propagates.
    """
    n = state.n
    pairs = _pair_indices(n)
    if is_symmetric(state):
        total = 0.0
        for i, j in pairs:
            total += pair_visibility(state, i, j)
        return 2.0 * total / (n * (n - 1))
    probs = _path_probabilities(state)
    total = 0.0
    for i, j in pairs:
        weight = state.rho[i, i].real + state.rho[j, j].real
        if weight <= DARK_PAIR_THRESHOLD:
            continue
        total += weight * pair_visibility(state, i, j)
    return total / (n - 1)


def distinguishability_from_pairs(state: InterferometerState) -> float:
    """Aggregate the two-path distinguishabilities into the n-path D_Q.

    Mirrors coherence_from_pair_visibilities with D_ij in place of V_ij.
    """
    n = state.n
    pairs = _pair_indices(n)
    if is_symmetric(state):
        total = 0.0
        for i, j in pairs:
            total += pair_distinguishability(state, i, j)
        return 2.0 * total / (n * (n - 1))
    total = 0.0
    for i, j in pairs:
        weight = state.rho[i, i].real + state.rho[j, j].real
        if weight <= DARK_PAIR_THRESHOLD:
            continue
        total += weight * pair_distinguishability(state, i, j)
    return total / (n - 1)


def duality_report(state: InterferometerState) -> DualityReport:
    """Evaluate every duality quantity and cross-check the aggregates.

    The pair loop runs in ascending (i, j) order so sums are reproducible
    bit-for-bit regardless of how callers parallelize around this function.
    """
    n = state.n
    coh = coherence(state)
    dist = distinguishability(state)
    margin = 1.0 - (coh + dist)
    if margin < -DUALITY_TOL:
        raise ValidationError(
            f"coherence + distinguishability exceeds 1 by {-margin!r}",
            check="duality_bound", residual=margin, tolerance=DUALITY_TOL)

    metrics: list[PairMetrics] = []
    dark: list[tuple[int, int]] = []
    for i, j in _pair_indices(n):
        try:
            metrics.append(pair_metrics(state, i, j))
        except DarkPairError:
            dark.append((i, j))

    symmetric = is_symmetric(state)
    symmetric_sum = None
    if symmetric:
        symmetric_sum = 2.0 * math.fsum(
            m.distinguishability + m.visibility for m in metrics) / (n * (n - 1))
    weighted_sum = math.fsum(
        m.pair_weight * (m.distinguishability + m.visibility) for m in metrics) / (n - 1)

    coh_pairs = coherence_from_pair_visibilities(state)
    dist_pairs = distinguishability_from_pairs(state)
    for label, direct, aggregated in (("coherence", coh, coh_pairs),
                                      ("distinguishability", dist, dist_pairs)):
        if abs(direct - aggregated) > AGGREGATION_TOL:
            raise ValidationError(
                f"pairwise-aggregated {label} {aggregated!r} deviates from the "
                f"direct value {direct!r}",
                check=f"{label}_aggregation",
                residual=abs(direct - aggregated), tolerance=AGGREGATION_TOL)

    rank = int(np.linalg.matrix_rank(state.gram, hermitian=True))
    return DualityReport(
        n=n, coherence=coh, distinguishability=dist,
        pairwise=tuple(metrics), dark_pairs=tuple(dark),
        symmetric_sum_lhs=symmetric_sum, weighted_sum_lhs=weighted_sum,
        duality_margin=margin, is_symmetric=symmetric, gram_rank=rank)
