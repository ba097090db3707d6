"""The matrix phi-entropy ``H(Z) = E[Tr phi(Z)] - Tr phi(E[Z])`` over finite ensembles."""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from melab.catalog import PhiFunction
from melab.errors import DimensionError, DomainError, MelabError
from melab.spectral import eigh, eigvalsh, hermitian, matrix_from_json, matrix_to_json

PROBABILITY_TOL = 1e-12


class EnsembleError(MelabError, ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MatrixEnsemble:
    """Finite distribution over positive definite matrices of a common size."""

    probabilities: tuple
    matrices: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        mats = tuple(hermitian(m) for m in self.matrices)
        if not probs or len(probs) != len(mats):
            raise EnsembleError("ensemble needs one probability per outcome and at least one outcome")
        if any(not (0 < p <= 1) for p in probs):
            raise EnsembleError(f"probabilities must lie in (0, 1], got {probs}")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise EnsembleError(f"probabilities sum to {total!r}, not 1 within {PROBABILITY_TOL:g}")
        n = mats[0].shape[0]
        if any(m.shape != (n, n) for m in mats):
            raise DimensionError("all outcomes must share one dimension")
        for k, m in enumerate(mats):
            lo = eigvalsh(m)[0]
            if not lo > 0:
                raise DomainError(f"outcome {k} is not positive definite (eigenvalue {lo!r})")
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_outcomes(cls, outcomes) -> "MatrixEnsemble":
        """From an iterable of ``(probability, matrix)`` pairs."""
        outcomes = list(outcomes)
        return cls(tuple(p for p, _ in outcomes), tuple(m for _, m in outcomes))

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    def mean(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        for p, m in zip(self.probabilities, self.matrices):
            out = out + p * m
        return out

    def conjugated(self, u) -> "MatrixEnsemble":
        u = np.asarray(u)
        return MatrixEnsemble(self.probabilities, tuple(u @ m @ u.conj().T for m in self.matrices))

    def to_json(self) -> dict:
        return {"outcomes": [{"p": p, "matrix": matrix_to_json(m)} for p, m in zip(self.probabilities, self.matrices)]}

    @classmethod
    def from_json(cls, obj) -> "MatrixEnsemble":
        try:
            outcomes = [(float(o["p"]), matrix_from_json(o["matrix"])) for o in obj["outcomes"]]
        except (KeyError, TypeError) as exc:
            raise EnsembleError(f"malformed ensemble JSON: {exc}") from exc
        return cls.from_outcomes(outcomes)


def trace_phi(spec: PhiFunction, a) -> float:
    """``Tr phi(a) = sum_i phi(lambda_i)`` for positive definite ``a``."""
    lam = eigh(a).eigenvalues
    if not lam[0] > 0:
        raise DomainError(f"spectrum must lie in (0, inf); found eigenvalue {lam[0]!r}")
    return math.fsum(np.atleast_1d(spec.phi(lam)))


def matrix_phi_entropy(spec: PhiFunction, z: MatrixEnsemble) -> float:
    expected = math.fsum(p * trace_phi(spec, m) for p, m in zip(z.probabilities, z.matrices))
    return expected - trace_phi(spec, z.mean())
