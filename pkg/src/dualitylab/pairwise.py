"""Metrics for a single pair of open interferometer paths.

Blocking all paths except i and j leaves the renormalized 2x2 state

    [[rho_ii,            rho_ij gram_ij],
     [rho_ji gram_ji,    rho_jj        ]] / (rho_ii + rho_jj),

whose fringe visibility and optimal unambiguous path-discrimination
probability are

    V_ij = 2 |rho_ij| |gram_ij| / (rho_ii + rho_jj)
    D_ij = 1 - 2 sqrt(rho_ii rho_jj) |gram_ij| / (rho_ii + rho_jj).

They close to an exact identity V_ij + D_ij + slack_ij = 1 with

    slack_ij = 2 (sqrt(rho_ii rho_jj) - |rho_ij|) |gram_ij| / (rho_ii + rho_jj),

non-negative because every 2x2 principal minor of a PSD matrix satisfies
|rho_ij| <= sqrt(rho_ii rho_jj); it vanishes identically for a pure quanton.
Hence V_ij + D_ij <= 1 always, with equality in the pure case.

Path indices are 0-based throughout the API (human-readable CLI tables are
1-based).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_state import InterferometerState
from .errors import DarkPairError, ValidationError

# Below this total pair probability the 2x2 renormalization is numerically
# meaningless.
DARK_PAIR_THRESHOLD = 1e-14
# Closure of V + D + slack onto 1.
IDENTITY_TOL = 1e-10
SLACK_FLOOR = -1e-12


@dataclass(frozen=True, eq=False)
class PairMetrics:
    """Visibility/distinguishability bundle for one pair of open paths.

    ``pair_weight`` is rho_ii + rho_jj, the probability that the quanton is
    found in either path; ``reduced`` is the renormalized 2x2 physical state
    (detector overlaps included in the off-diagonals).
    """

    i: int
    j: int
    visibility: float
    distinguishability: float
    slack: float
    pair_weight: float
    reduced: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.reduced, dtype=complex, copy=True)
        mat.setflags(write=False)
        object.__setattr__(self, "reduced", mat)


def _pair_parts(state: InterferometerState, i: int, j: int):
    """Shared index validation plus the raw entries a pair metric needs."""
    n = state.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"pair ({i}, {j}) out of range for {n} paths")
    if i == j:
        raise ValueError(f"pair indices must differ, got ({i}, {j})")
    p_i = max(state.rho[i, i].real, 0.0)
    p_j = max(state.rho[j, j].real, 0.0)
    weight = state.rho[i, i].real + state.rho[j, j].real
    if weight <= DARK_PAIR_THRESHOLD:
        raise DarkPairError(
            f"paths ({i}, {j}) carry total probability {weight!r}; "
            "the renormalized pair state is undefined")
    return p_i, p_j, state.rho[i, j], state.gram[i, j], weight


def open_pair(state: InterferometerState, i: int, j: int) -> np.ndarray:
    """Renormalized 2x2 state of paths (i, j) with all other paths blocked.

    Returns the physical reduced state, i.e. with the detector overlap
    folded into the off-diagonal, so its fringe pattern is directly
    comparable with the full simulation.

    Raises DarkPairError when rho_ii + rho_jj is numerically zero.
    """
    _pair_parts(state, i, j)
    weight = state.rho[i, i].real + state.rho[j, j].real
    reduced = np.array(
        [[state.rho[i, i], state.rho[i, j] * state.gram[i, j]],
         [state.rho[j, i] * state.gram[j, i], state.rho[j, j]]],
        dtype=complex) / weight
    return reduced


def pair_visibility(state: InterferometerState, i: int, j: int) -> float:
    """Fringe visibility of the two-path pattern from paths (i, j)."""
    p_i, p_j, rho_ij, gram_ij, weight = _pair_parts(state, i, j)
    return 2.0 * abs(rho_ij) * abs(gram_ij) / weight


def pair_distinguishability(state: InterferometerState, i: int, j: int) -> float:
    """Optimal probability of unambiguously telling path i from path j.

    Evaluates 1 - 2 sqrt(rho_ii rho_jj) |gram_ij| / (rho_ii + rho_jj), the
    optimal two-state unambiguous-discrimination success probability with
    priors rho_ii/(rho_ii+rho_jj) and rho_jj/(rho_ii+rho_jj).
    """
    p_i, p_j, rho_ij, gram_ij, weight = _pair_parts(state, i, j)
    return 1.0 - 2.0 * math.sqrt(p_i * p_j) * abs(gram_ij) / weight


def pair_metrics(state: InterferometerState, i: int, j: int) -> PairMetrics:
    """Full metric bundle for one pair, with the closure identity checked.

    Verifies V + D + slack = 1 within IDENTITY_TOL and slack >= SLACK_FLOOR;
    a violation would mean the input state escaped validation and is
    reported as a ValidationError.
    """
    p_i, p_j, rho_ij, gram_ij, weight = _pair_parts(state, i, j)
    abs_gram = abs(gram_ij)
    visibility = 2.0 * abs(rho_ij) * abs_gram / weight
    distinguishability = 1.0 - 2.0 * math.sqrt(p_i * p_j) * abs_gram / weight
    slack = 2.0 * (math.sqrt(p_i * p_j) - abs(rho_ij)) * abs_gram / weight

    closure = visibility + distinguishability + slack - 1.0
    if abs(closure) > IDENTITY_TOL:
        raise ValidationError(
            f"pair ({i}, {j}): V + D + slack deviates from 1 by {closure!r}",
            check="pair_identity", residual=closure, tolerance=IDENTITY_TOL)
    if slack < SLACK_FLOOR:
        raise ValidationError(
            f"pair ({i}, {j}): negative slack {slack!r} implies a non-PSD minor",
            check="pair_slack", residual=slack, tolerance=SLACK_FLOOR)

    return PairMetrics(
        i=i, j=j, visibility=visibility,
        distinguishability=distinguishability, slack=slack,
        pair_weight=weight, reduced=open_pair(state, i, j))
