"""Random state ensembles for property testing and exploration.

All samplers take an explicit ``numpy.random.Generator`` so ensembles are
reproducible; none touch global RNG state.
"""

from __future__ import annotations

import numpy as np

from .core_state import InterferometerState, build_mixed_state, build_pure_state


def random_amplitudes(n: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized complex Gaussian amplitude vector (Haar direction)."""
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


def random_detectors(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """(n, dim) array of independent random unit vectors.

    ``dim < n`` forces linearly dependent detector states and hence a
    rank-deficient Gram matrix, a case every formula here must survive.
    """
    z = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_density_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Trace-one PSD matrix from the Ginibre construction A A^dagger."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_gram(n: int, rng: np.random.Generator,
                rank: int | None = None) -> np.ndarray:
    """Unit-diagonal PSD Gram matrix of ``n`` random unit detector vectors."""
    detectors = random_detectors(n, rank if rank is not None else n, rng)
    return detectors @ detectors.conj().T


def random_pure_state(n: int, rng: np.random.Generator,
                      gram_rank: int | None = None) -> InterferometerState:
    dim = gram_rank if gram_rank is not None else n
    return build_pure_state(random_amplitudes(n, rng), random_detectors(n, dim, rng))


def random_mixed_state(n: int, rng: np.random.Generator,
                       gram_rank: int | None = None) -> InterferometerState:
    return build_mixed_state(random_density_matrix(n, rng),
                             random_gram(n, rng, rank=gram_rank))


def random_symmetric_pure_state(n: int, rng: np.random.Generator,
                                gram_rank: int | None = None) -> InterferometerState:
    """Pure state with equal path probabilities 1/n and random phases."""
    phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=n))
    amplitudes = phases / np.sqrt(n)
    dim = gram_rank if gram_rank is not None else n
    return build_pure_state(amplitudes, random_detectors(n, dim, rng))


def random_symmetric_mixed_state(n: int, rng: np.random.Generator,
                                 gram_rank: int | None = None) -> InterferometerState:
    """Mixed state whose diagonal is exactly 1/n in every entry.

    Rescales a Ginibre density matrix by its diagonal (a congruence, so PSD
    survives) and pins the diagonal to 1/n exactly.
    """
    rho = random_density_matrix(n, rng)
    scale = np.sqrt(np.diag(rho).real)
    while np.any(scale < 1e-8):          # essentially never for Ginibre
        rho = random_density_matrix(n, rng)
        scale = np.sqrt(np.diag(rho).real)
    rho = rho / np.outer(scale, scale) / n
    np.fill_diagonal(rho, 1.0 / n)
    return build_mixed_state(rho, random_gram(n, rng, rank=gram_rank))
