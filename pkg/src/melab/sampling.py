"""Random positive definite matrices and deterministic per-trial RNG streams."""
import numpy as np

from melab.spectral import eigh

EIG_LO = 1e-2
EIG_HI = 1e2


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for ``key`` split from the master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def sample_pd(n: int, rng: np.random.Generator, cond_cap: float = 1e3) -> np.ndarray:
    """Random positive definite ``n x n`` matrix.

    Draws ``B B^H / n + 0.05 I`` from a complex Gaussian ``B``, rescales it by
    a log-uniform factor, then clamps the spectrum into ``[1e-2, 1e2]`` with
    condition number at most ``cond_cap``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not cond_cap >= 1:
        raise ValueError("cond_cap must be >= 1")
    b = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    a = (b @ b.conj().T / n + 0.05 * np.eye(n)) * 10.0 ** rng.uniform(-1.5, 1.5)
    dec = eigh((a + a.conj().T) / 2)
    top = min(max(dec.eigenvalues[-1], EIG_LO), EIG_HI)
    floor = max(EIG_LO, top / cond_cap)
    return dec.map(np.clip(dec.eigenvalues, floor, top))


def random_hermitian(n: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    """Gaussian Hermitian matrix scaled to Frobenius norm ``norm``."""
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (b + b.conj().T) / 2
    return h * (norm / np.linalg.norm(h))


def random_matrix(n: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return b * (norm / np.linalg.norm(b))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(random_matrix(n, rng))
    d = np.diagonal(r)
    return q * (d / np.abs(d))
