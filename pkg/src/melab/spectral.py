"""Dense Hermitian spectral calculus.

Eigendecomposition (cyclic Jacobi), univariate and bivariate functional
calculus, Loewner matrices of divided differences, Frechet differentials of
matrix functions and their inverses, and superoperators on the space of
``n x n`` matrices with the trace inner product.

Superoperators are stored as dense ``n^2 x n^2`` arrays acting on
column-stacked matrices, ``vec(h) = h.reshape(-1, order="F")``.  With this
convention ``vec(a h b) = (b^T kron a) vec(h)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from melab import _kernels
from melab.errors import (
    DimensionError,
    DomainError,
    EighConvergenceError,
    NotHermitianError,
    SingularDifferentialError,
)

HERMITIAN_ATOL = 1e-12
COINCIDENCE_TAU = 1e-7
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
SINGULAR_LOEWNER = 1e-14
SELF_ADJOINT_TOL = 1e-10


# -- matrices ---------------------------------------------------------------


def hermitian(a, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate ``a`` as a Hermitian matrix and return it as a complex array.

    The returned array is exactly Hermitian (the rounding-level asymmetry
    allowed by ``atol`` is averaged away).
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    asym = np.max(np.abs(m - m.conj().T))
    if asym > atol:
        raise NotHermitianError(f"matrix is not Hermitian: max |a - a^H| = {asym:.3e} > {atol:g}")
    return (m + m.conj().T) / 2


def _square(h, n: int) -> np.ndarray:
    m = np.asarray(h, dtype=np.complex128)
    if m.ndim == 0 and n == 1:
        m = m.reshape(1, 1)
    if m.shape != (n, n):
        raise DimensionError(f"expected shape {(n, n)}, got {m.shape}")
    return m


def matrix_to_json(a) -> dict:
    m = np.asarray(a, dtype=np.complex128)
    return {"n": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj: dict, check_hermitian: bool = True) -> np.ndarray:
    """Parse ``{"n": int, "re": [[...]], "im": [[...]]}``; ``im`` defaults to zero.

    A bare nested list is read as a real matrix.
    """
    if isinstance(obj, list):
        obj = {"n": len(obj), "re": obj}
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64) if obj.get("im") is not None else np.zeros_like(re)
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed matrix JSON: {exc}") from exc
    if n < 1 or re.shape != (n, n) or im.shape != (n, n):
        raise DimensionError(f"matrix JSON declares n={n} but re/im have shapes {re.shape}/{im.shape}")
    m = re + 1j * im
    return hermitian(m) if check_hermitian else m


# -- eigendecomposition -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def map(self, values) -> np.ndarray:
        """Return ``U diag(values) U^H`` (exactly Hermitian for real ``values``)."""
        u = self.eigenvectors
        m = (u * np.asarray(values)) @ u.conj().T
        return (m + m.conj().T) / 2

    def reconstruct(self) -> np.ndarray:
        return self.map(self.eigenvalues)

    def to_eigenbasis(self, h) -> np.ndarray:
        u = self.eigenvectors
        return u.conj().T @ h @ u

    def from_eigenbasis(self, h) -> np.ndarray:
        u = self.eigenvectors
        return u @ h @ u.conj().T


def _jacobi(m: np.ndarray, want_vectors: bool):
    w, v, sweeps, off = _kernels.jacobi_eigh(m, JACOBI_TOL, JACOBI_MAX_SWEEPS, want_vectors)
    if off > JACOBI_TOL * np.linalg.norm(m):
        raise EighConvergenceError(off, sweeps)
    return w, v


def eigh(a) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are returned in ascending order with the eigenvectors as the
    columns of a unitary matrix.  Raises :class:`EighConvergenceError` if the
    off-diagonal Frobenius mass is still above ``1e-13 * ||a||_F`` after 100
    sweeps.
    """
    m = hermitian(a)
    w, v = _jacobi(m, want_vectors=True)
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], v[:, order])


def eigvalsh(a) -> np.ndarray:
    m = hermitian(a)
    w, _ = _jacobi(m, want_vectors=False)
    return np.sort(w)


# -- scalar functions and divided differences -------------------------------


@dataclass(frozen=True)
class ScalarFunction:
    """A real function on (0, inf) together with its derivative.

    ``quotient(t, s)``, when given, evaluates ``(f(t) - f(s)) / (t - s)`` for
    separated arguments without cancellation.  All callables act elementwise
    on float arrays.
    """

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    quotient: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    name: str = "f"

    def __call__(self, t):
        return self.value(t)


def _values(f, t) -> np.ndarray:
    fn = f.value if isinstance(f, ScalarFunction) else f
    return np.asarray(fn(t), dtype=np.float64) * np.ones_like(t, dtype=np.float64)


def divided_differences(f: ScalarFunction, t, s) -> np.ndarray:
    """Elementwise divided differences ``[t, s]_f`` over broadcast arrays."""
    t, s = np.broadcast_arrays(np.asarray(t, dtype=np.float64), np.asarray(s, dtype=np.float64))
    if np.any(~(t > 0)) or np.any(~(s > 0)):
        bad = np.concatenate([t[~(t > 0)], s[~(s > 0)]])
        raise DomainError(f"divided difference needs positive arguments, got {bad[0]!r}")
    close = np.abs(t - s) <= COINCIDENCE_TAU * np.maximum(1.0, np.maximum(np.abs(t), np.abs(s)))
    out = np.empty(t.shape, dtype=np.float64)
    if close.any():
        mid = (t[close] + s[close]) / 2
        out[close] = np.asarray(f.derivative(mid), dtype=np.float64) * np.ones_like(mid)
    far = ~close
    if far.any():
        tf, sf = t[far], s[far]
        if f.quotient is not None:
            out[far] = f.quotient(tf, sf)
        else:
            out[far] = (_values(f, tf) - _values(f, sf)) / (tf - sf)
    return out


def divided_difference(f: ScalarFunction, t: float, s: float) -> float:
    """The divided difference ``(f(t) - f(s)) / (t - s)``.

    Arguments closer than ``1e-7 * max(1, |t|, |s|)`` are treated as
    coincident and give ``f'((t + s) / 2)``.
    """
    return float(divided_differences(f, t, s))


def loewner_matrix(f: ScalarFunction, eigenvalues) -> np.ndarray:
    """Real symmetric matrix ``L[i, j] = [lambda_i, lambda_j]_f``."""
    lam = np.asarray(eigenvalues, dtype=np.float64).ravel()
    out = divided_differences(f, lam[:, None], lam[None, :])
    return (out + out.T) / 2


# -- univariate calculus and Frechet differentials --------------------------


def _positive_decomposition(x) -> SpectralDecomposition:
    dec = eigh(x)
    bad = dec.eigenvalues[~(dec.eigenvalues > 0)]
    if bad.size:
        raise DomainError(f"spectrum must lie in (0, inf); found eigenvalue {bad[0]!r}")
    return dec


def apply_univariate(f, x) -> np.ndarray:
    """``f(x) = U diag(f(lambda_i)) U^H`` for ``x`` with positive spectrum."""
    dec = _positive_decomposition(x)
    return dec.map(_values(f, dec.eigenvalues))


def frechet_diff(f: ScalarFunction, x, h) -> np.ndarray:
    """Frechet differential ``df(x) h``.

    In an eigenbasis of ``x`` the differential is the Hadamard product of
    ``h`` with the Loewner matrix of ``f`` at the eigenvalues of ``x``.  The
    map is extended complex-linearly to non-Hermitian ``h``.
    """
    dec = _positive_decomposition(x)
    h = _square(h, dec.n)
    lw = loewner_matrix(f, dec.eigenvalues)
    return dec.from_eigenbasis(dec.to_eigenbasis(h) * lw)


def frechet_diff_inverse(f: ScalarFunction, x, h) -> np.ndarray:
    """Inverse Frechet differential ``df(x)^{-1} h`` (entrywise division by the Loewner matrix).

    Raises
    ------
    SingularDifferentialError
        If some Loewner entry is below ``1e-14``; ``f`` is then not strictly
        increasing on the spectrum of ``x``.
    """
    dec = _positive_decomposition(x)
    h = _square(h, dec.n)
    lw = loewner_matrix(f, dec.eigenvalues)
    if np.min(lw) < SINGULAR_LOEWNER:
        raise SingularDifferentialError(
            f"Loewner matrix entry {np.min(lw):.3e} < {SINGULAR_LOEWNER:g}: differential not invertible"
        )
    return dec.from_eigenbasis(dec.to_eigenbasis(h) / lw)


def trace_pairing(k, h) -> complex:
    """``Tr k^* h`` (the trace inner product, conjugate-linear in ``k``)."""
    return complex(np.vdot(np.asarray(k), np.asarray(h)))


# -- superoperators ---------------------------------------------------------


def vec(h) -> np.ndarray:
    return np.asarray(h, dtype=np.complex128).reshape(-1, order="F")


def unvec(v, n: int) -> np.ndarray:
    return np.asarray(v).reshape((n, n), order="F")


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on ``n x n`` matrices, stored as an ``n^2 x n^2`` array."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.n * self.n, self.n * self.n):
            raise DimensionError(f"superoperator on {self.n}x{self.n} needs shape {(self.n**2,) * 2}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "Superoperator":
        return cls(n, np.eye(n * n, dtype=np.complex128))

    @classmethod
    def from_map(cls, n: int, fn: Callable[[np.ndarray], np.ndarray]) -> "Superoperator":
        """Materialize a linear map by applying it to the matrix units."""
        cols = []
        for k in range(n * n):
            e = np.zeros(n * n, dtype=np.complex128)
            e[k] = 1.0
            cols.append(vec(fn(unvec(e, n))))
        return cls(n, np.column_stack(cols))

    def __call__(self, h) -> np.ndarray:
        return unvec(self.matrix @ vec(_square(h, self.n)), self.n)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.n, self.matrix @ other.matrix)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.n, self.matrix + other.matrix)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.n, self.matrix - other.matrix)

    def __mul__(self, c) -> "Superoperator":
        return Superoperator(self.n, c * self.matrix)

    __rmul__ = __mul__

    def adjoint(self) -> "Superoperator":
        """Adjoint with respect to the trace inner product."""
        return Superoperator(self.n, self.matrix.conj().T)

    def is_self_adjoint(self, atol: float = SELF_ADJOINT_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= atol * max(1.0, np.max(np.abs(self.matrix))))

    def quadratic_form(self, h) -> float:
        """``Re Tr h^* S(h)``."""
        v = vec(_square(h, self.n))
        return float(np.vdot(v, self.matrix @ v).real)


def left_right_superops(x) -> tuple[Superoperator, Superoperator]:
    """Left and right multiplication ``L_x h = x h`` and ``R_x h = h x``."""
    m = hermitian(x)
    eye = np.eye(m.shape[0], dtype=np.complex128)
    return Superoperator(m.shape[0], np.kron(eye, m)), Superoperator(m.shape[0], np.kron(m.T, eye))


def bivariate_calculus(g: Callable[[np.ndarray, np.ndarray], np.ndarray], x, y=None) -> Superoperator:
    """The superoperator ``g(L_x, R_y)``.

    With ``x = sum lambda_i P_i`` and ``y = sum mu_j Q_j`` the result maps
    ``h`` to ``sum_ij g(lambda_i, mu_j) P_i h Q_j``; it acts diagonally on the
    matrix units ``u_i v_j^H`` built from eigenvectors of ``x`` (rows) and
    ``y`` (columns).  Both spectra must be positive.
    """
    dx = _positive_decomposition(x)
    dy = dx if y is None else _positive_decomposition(y)
    if dx.n != dy.n:
        raise DimensionError(f"x is {dx.n}x{dx.n} but y is {dy.n}x{dy.n}")
    weights = np.asarray(g(dx.eigenvalues[:, None], dy.eigenvalues[None, :]), dtype=np.float64)
    weights = weights * np.ones((dx.n, dy.n))
    if not np.all(np.isfinite(weights)):
        raise DomainError("bivariate kernel is not finite on the spectral rectangle")
    w = np.kron(dy.eigenvectors.conj(), dx.eigenvectors)
    m = (w * vec(weights)) @ w.conj().T
    return Superoperator(dx.n, (m + m.conj().T) / 2)


def _self_adjoint_array(s) -> np.ndarray:
    m = s.matrix if isinstance(s, Superoperator) else np.asarray(s, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square operator, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if np.max(np.abs(m - m.conj().T)) > SELF_ADJOINT_TOL * scale:
        raise NotHermitianError("operator is not self-adjoint within 1e-10")
    return (m + m.conj().T) / 2


def min_eigenvalue(s) -> float:
    """Smallest eigenvalue of a self-adjoint matrix or superoperator.

    ``A >= B`` in the operator order is decided by
    ``min_eigenvalue(A - B) >= -eta``.
    """
    w, _ = _jacobi(_self_adjoint_array(s), want_vectors=False)
    return float(np.min(w))


def min_eigenpair(s) -> tuple[float, np.ndarray]:
    m = _self_adjoint_array(s)
    w, v = _jacobi(m, want_vectors=True)
    k = int(np.argmin(w))
    return float(w[k]), v[:, k]
