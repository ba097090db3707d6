"""Catalog of convex functions phi for phi-entropies, their derivatives and the scalar kernels.

Every family exposes ``phi``, ``f = phi'``, ``fprime = f'`` and ``fsecond``
as elementwise functions on positive arrays.  The canonical family
parametrizes phi by a finite measure on ``[0, inf)``:

    phi(x) = a + b x + beta/2 x^2 + sum_k w_k h(x, lambda_k),
    h(x, l) = (1 + l) (1 - x + (x + l) log((x + l) / (1 + l))),

so that ``f'(t) = beta + sum_k w_k (1 + l_k) / (t + l_k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np

from melab.errors import DegenerateKernelError, DomainError, MelabError, NumericalInstabilityError
from melab.quadrature import integrate_unit
from melab.sampling import sample_pd, trial_rng
from melab.spectral import ScalarFunction, apply_univariate, divided_differences, min_eigenvalue

GRID_LO, GRID_HI, GRID_POINTS = 1e-3, 1e3, 200
ZERO_PROBES = (1e-4, 1e-6, 1e-8)


class SpecError(MelabError, ValueError):
    """Malformed function-spec JSON."""


def _positive(t, what="argument"):
    arr = np.asarray(t, dtype=np.float64)
    if np.any(~(arr > 0)):
        bad = arr[~(arr > 0)] if arr.ndim else arr
        raise DomainError(f"{what} must be positive, got {float(np.ravel(bad)[0])!r}")
    return arr


def _out(arr):
    arr = np.asarray(arr, dtype=np.float64)
    return float(arr) if arr.ndim == 0 else arr


# -- canonical measures -----------------------------------------------------


@dataclass(frozen=True)
class CanonicalMeasure:
    """Discrete measure ``sum w_k delta_{lambda_k}`` plus ``beta`` and affine constants ``a, b``."""

    beta: float = 0.0
    atoms: tuple = ()
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        atoms = tuple((float(lam), float(w)) for lam, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be a finite non-negative number, got {self.beta}")
        for lam, w in atoms:
            if not (lam >= 0 and math.isfinite(lam)):
                raise DomainError(f"atom location must be finite and >= 0, got {lam}")
            if not (w > 0 and math.isfinite(w)):
                raise DomainError(f"atom weight must be finite and > 0, got {w}")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("a and b must be finite")

    @classmethod
    def from_reference(cls, beta, atoms, phi_at_one, dphi_at_one) -> "CanonicalMeasure":
        """Fix ``a, b`` from the values ``phi(1)`` and ``phi'(1)``."""
        beta = float(beta)
        return cls(beta, atoms, phi_at_one - dphi_at_one + beta / 2, dphi_at_one - beta)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, w in self.atoms))

    @property
    def is_trivial(self) -> bool:
        return self.beta == 0 and not self.atoms


def _log1p_excess(u):
    """``(1 + u) log1p(u) - u``, with the series ``sum_k (-u)^k / (k (k - 1))`` for ``|u| < 1/4``."""
    u = np.asarray(u, dtype=np.float64)
    out = (1 + u) * np.log1p(u) - u
    small = np.abs(u) < 0.25
    if np.any(small):
        us = u[small]
        power, acc = us * us, np.zeros_like(us)
        for k in range(2, 32):
            acc += power / (k * (k - 1))
            power = -power * us
        out = np.where(small, 0.0, out)
        out[small] = acc
    return out


def _h_kernel(x, lam):
    """``(1 + lam)(1 - x + (x + lam) log((x + lam)/(1 + lam)))``, evaluated as ``(1 + lam)^2 q(u)``.

    With ``u = (x - 1)/(1 + lam)`` the bracket equals ``(1 + lam) q(u)`` for
    ``q(u) = (1 + u) log1p(u) - u``, which avoids the cancellation of the
    direct form when ``lam`` is large.
    """
    return (1 + lam) ** 2 * _log1p_excess((x - 1) / (1 + lam))


def canonical_phi(m: CanonicalMeasure, x):
    x = _positive(x, "x")
    out = m.a + m.b * x + 0.5 * m.beta * x * x
    for lam, w in m.atoms:
        out = out + w * _h_kernel(x, lam)
    return _out(out)


def canonical_f(m: CanonicalMeasure, x):
    x = _positive(x, "x")
    out = m.b + m.beta * x
    for lam, w in m.atoms:
        out = out + w * (1 + lam) * np.log1p((x - 1) / (1 + lam))
    return _out(out)


def canonical_fprime(m: CanonicalMeasure, t):
    """``beta + sum w (1 + lambda) / (t + lambda)``."""
    t = _positive(t, "t")
    out = m.beta + 0.0 * t
    for lam, w in m.atoms:
        out = out + w * (1 + lam) / (t + lam)
    return _out(out)


def canonical_fsecond(m: CanonicalMeasure, t):
    t = _positive(t, "t")
    out = 0.0 * t
    for lam, w in m.atoms:
        out = out - w * (1 + lam) / (t + lam) ** 2
    return _out(out)


def _canonical_quotient(m: CanonicalMeasure, t, s):
    d = t - s
    out = m.beta + 0.0 * d
    for lam, w in m.atoms:
        out = out + w * (1 + lam) * np.log1p(d / (s + lam)) / d
    return out


@dataclass(frozen=True)
class ZeroLimitEstimate:
    limit: float
    probes: tuple
    values: tuple
    stabilized: bool
    bound: float
    total_mass_bound: float

    @property
    def within_bound(self) -> bool:
        return self.limit <= self.bound


def zero_limit_estimate(m: CanonicalMeasure) -> ZeroLimitEstimate:
    """Estimate ``lim_{x -> 0+} phi(x)`` for a canonical phi.

    Probes ``x = 1e-4, 1e-6, 1e-8``, requires successive differences to
    shrink, and extrapolates linearly through the last two probes.  The
    estimate is compared with ``a + sum w (1 + lambda)``; the tighter
    ``a + sum w`` (from ``0 <= h(x, lambda) <= (1 - x)^2``) is also recorded.
    """
    xs = ZERO_PROBES
    vals = tuple(canonical_phi(m, x) for x in xs)
    d1, d2 = abs(vals[1] - vals[0]), abs(vals[2] - vals[1])
    scale = 1.0 + max(abs(v) for v in vals)
    stabilized = d2 <= d1 + 1e-15 * scale
    if not stabilized:
        raise NumericalInstabilityError(f"phi(x) does not settle as x -> 0: differences {d1:.3e}, {d2:.3e}")
    limit = vals[2] + (vals[2] - vals[1]) * xs[2] / (xs[1] - xs[2])
    bound = m.a + sum(w * (1 + lam) for lam, w in m.atoms)
    return ZeroLimitEstimate(limit, xs, vals, stabilized, bound, m.a + m.total_weight)


# -- function specs ---------------------------------------------------------


class PhiFunction:
    """Base class of the catalog families."""

    kind: str = ""
    is_affine: bool = False

    def phi(self, t):
        raise NotImplementedError

    def f(self, t):
        raise NotImplementedError

    def fprime(self, t):
        raise NotImplementedError

    def fsecond(self, t):
        raise NotImplementedError

    def f_quotient(self, t, s):
        """``(f(t) - f(s)) / (t - s)`` for separated arrays; ``None`` means use the plain formula."""
        return None

    @property
    def is_convex(self) -> bool:
        return True

    @property
    def status(self) -> str:
        return "paper-member"

    @property
    def primitive(self) -> ScalarFunction:
        """phi with derivative f."""
        return ScalarFunction(self.phi, self.f, name=f"phi[{self.label}]")

    @property
    def derivative(self) -> ScalarFunction:
        """f = phi' with derivative f'."""
        quotient = self.f_quotient if type(self).f_quotient is not PhiFunction.f_quotient else None
        return ScalarFunction(self.f, self.fprime, quotient, name=f"f[{self.label}]")

    @property
    def second(self) -> ScalarFunction:
        """f' with derivative f''."""
        return ScalarFunction(self.fprime, self.fsecond, name=f"f'[{self.label}]")

    def role(self, name: str) -> ScalarFunction:
        return {"phi": self.primitive, "f": self.derivative, "fprime": self.second}[name]

    @property
    def label(self) -> str:
        return self.kind

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Affine(PhiFunction):
    c0: float = 0.0
    c1: float = 0.0
    kind = "affine"
    is_affine = True

    def __post_init__(self):
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "c1", float(self.c1))

    def phi(self, t):
        t = _positive(t)
        return _out(self.c0 + self.c1 * t)

    def f(self, t):
        t = _positive(t)
        return _out(self.c1 + 0.0 * t)

    def fprime(self, t):
        return _out(0.0 * _positive(t))

    def fsecond(self, t):
        return _out(0.0 * _positive(t))

    @property
    def label(self):
        return f"affine(c0={self.c0:g}, c1={self.c1:g})"

    def to_json(self):
        return {"kind": "affine", "c0": self.c0, "c1": self.c1}


@dataclass(frozen=True)
class StandardEntropy(PhiFunction):
    """phi(t) = t log t."""

    kind = "xlogx"

    def phi(self, t):
        t = _positive(t)
        return _out(t * np.log(t))

    def f(self, t):
        return _out(1.0 + np.log(_positive(t)))

    def fprime(self, t):
        return _out(1.0 / _positive(t))

    def fsecond(self, t):
        t = _positive(t)
        return _out(-1.0 / (t * t))

    def f_quotient(self, t, s):
        d = t - s
        return np.log1p(d / s) / d

    @property
    def label(self):
        return "xlogx"

    def to_json(self):
        return {"kind": "xlogx"}


@dataclass(frozen=True)
class Power(PhiFunction):
    """phi(t) = t^p."""

    p: float = 2.0
    kind = "power"

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        if not math.isfinite(self.p):
            raise DomainError("power exponent must be finite")

    @property
    def is_affine(self) -> bool:
        return self.p in (0.0, 1.0)

    @property
    def is_convex(self) -> bool:
        return self.p <= 0 or self.p >= 1

    @property
    def status(self) -> str:
        return "paper-member" if 1 <= self.p <= 2 else "candidate"

    def phi(self, t):
        return _out(_positive(t) ** self.p)

    def f(self, t):
        return _out(self.p * _positive(t) ** (self.p - 1))

    def fprime(self, t):
        p = self.p
        return _out(p * (p - 1) * _positive(t) ** (p - 2))

    def fsecond(self, t):
        p = self.p
        return _out(p * (p - 1) * (p - 2) * _positive(t) ** (p - 3))

    def f_quotient(self, t, s):
        q = self.p - 1
        d = t - s
        return self.p * s**q * np.expm1(q * np.log1p(d / s)) / d

    @property
    def label(self):
        return f"power(p={self.p:g})"

    def to_json(self):
        return {"kind": "power", "p": self.p}


@dataclass(frozen=True)
class Canonical(PhiFunction):
    measure: CanonicalMeasure = field(default_factory=CanonicalMeasure)
    kind = "canonical"

    @property
    def is_affine(self) -> bool:
        return self.measure.is_trivial

    def phi(self, t):
        return canonical_phi(self.measure, t)

    def f(self, t):
        return canonical_f(self.measure, t)

    def fprime(self, t):
        return canonical_fprime(self.measure, t)

    def fsecond(self, t):
        return canonical_fsecond(self.measure, t)

    def f_quotient(self, t, s):
        return _canonical_quotient(self.measure, t, s)

    @property
    def label(self):
        m = self.measure
        atoms = ",".join(f"({lam:.4g},{w:.4g})" for lam, w in m.atoms)
        return f"canonical(beta={m.beta:.4g}, atoms=[{atoms}])"

    def to_json(self):
        m = self.measure
        return {"kind": "canonical", "beta": m.beta, "atoms": [[lam, w] for lam, w in m.atoms], "a": m.a, "b": m.b}


def spec_from_json(obj) -> PhiFunction:
    """Build a catalog function from its JSON description."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SpecError("function spec must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "affine":
            return Affine(float(obj.get("c0", 0.0)), float(obj.get("c1", 0.0)))
        if kind in ("xlogx", "standard_entropy"):
            return StandardEntropy()
        if kind == "power":
            return Power(float(obj["p"]))
        if kind == "canonical":
            atoms = tuple((float(lam), float(w)) for lam, w in obj.get("atoms", []))
            measure = CanonicalMeasure(float(obj.get("beta", 0.0)), atoms, float(obj.get("a", 0.0)), float(obj.get("b", 0.0)))
            return Canonical(measure)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad parameters for kind {kind!r}: {exc}") from exc
    raise SpecError(f"unknown function kind {kind!r}")


def random_canonical(rng: np.random.Generator, max_atoms: int = 5) -> Canonical:
    k = int(rng.integers(1, max_atoms + 1))
    atoms = []
    for _ in range(k):
        lam = 0.0 if rng.random() < 0.3 else float(10.0 ** rng.uniform(-2, 2))
        atoms.append((lam, float(rng.uniform(0.1, 2.0))))
    beta = float(rng.uniform(0, 1)) if rng.random() < 0.5 else 0.0
    return Canonical(CanonicalMeasure(beta, tuple(atoms), float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1))))


# -- kernels ----------------------------------------------------------------


def k_kernel(spec: PhiFunction, t, s):
    """``k(t, s) = (f(t) - f(s)) / (t - s)``, the divided difference of ``f = phi'``."""
    return _out(divided_differences(spec.derivative, t, s))


def g_kernel(spec: PhiFunction, t, s):
    """``g(t, s) = (s - t) / (f(s) - f(t))``, with ``1 / f'`` on the diagonal."""
    if spec.is_affine:
        raise DegenerateKernelError(f"{spec.label} is affine: f is constant and g is undefined")
    return _out(1.0 / divided_differences(spec.derivative, t, s))


def g_kernel_fn(spec: PhiFunction):
    if spec.is_affine:
        raise DegenerateKernelError(f"{spec.label} is affine: f is constant and g is undefined")
    f = spec.derivative
    return lambda t, s: 1.0 / divided_differences(f, t, s)


def k_kernel_fn(spec: PhiFunction):
    f = spec.derivative
    return lambda t, s: divided_differences(f, t, s)


def hermite_integral(spec: PhiFunction, t: float, s: float) -> float:
    """``int_0^1 f'(u t + (1 - u) s) du`` by graded 64-node Gauss-Legendre."""
    t, s = float(_positive(t)), float(_positive(s))
    ratio = max(t, s) / min(t, s)
    return integrate_unit(lambda u: spec.fprime(u * t + (1 - u) * s), ratio, vectorized=True)


def hermite_check(spec: PhiFunction, t: float, s: float) -> float:
    """Residual between the closed-form divided difference and its integral form."""
    return abs(k_kernel(spec, t, s) - hermite_integral(spec, t, s))


# -- sufficient condition ---------------------------------------------------


@dataclass
class SubVerdict:
    name: str
    passed: bool
    witness: Optional[dict] = None

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class HypothesisVerdict:
    """Sub-verdicts of :func:`sufficient_hypothesis_check`; sampling-based, hence labeled as evidence."""

    spec: dict
    positive: SubVerdict
    decreasing: SubVerdict
    operator_convex: SubVerdict
    n: int
    trials: int
    tol: float
    label: str = "numerical evidence"

    @property
    def passed(self) -> bool:
        return self.positive.passed and self.decreasing.passed and self.operator_convex.passed

    def to_json(self):
        return {
            "spec": self.spec,
            "label": self.label,
            "passed": self.passed,
            "n": self.n,
            "trials": self.trials,
            "tol": self.tol,
            "sub_verdicts": [v.to_json() for v in (self.positive, self.decreasing, self.operator_convex)],
        }


def log_grid() -> np.ndarray:
    return np.geomspace(GRID_LO, GRID_HI, GRID_POINTS)


def sufficient_hypothesis_check(spec: PhiFunction, n: int, trials: int, seed: int, tol: float = 1e-8) -> HypothesisVerdict:
    """Check a sufficient condition for membership on the second derivative ``f'``.

    Positivity and monotonicity are checked on 200 log-spaced points in
    ``[1e-3, 1e3]``.  Operator convexity is probed by the matrix midpoint
    inequality ``f'((x + y)/2) <= (f'(x) + f'(y))/2`` on ``trials`` random
    positive definite pairs of size ``n``.
    """
    if spec.is_affine:
        raise DegenerateKernelError("the sufficient condition concerns non-affine phi")
    grid = log_grid()
    d = np.asarray(spec.fprime(grid))

    bad = np.flatnonzero(~(d > 0))
    positive = SubVerdict("f' > 0", bad.size == 0, None if bad.size == 0 else {"t": float(grid[bad[0]]), "fprime": float(d[bad[0]])})

    rises = np.flatnonzero(d[1:] > d[:-1] + tol * np.abs(d[:-1]))
    decreasing = SubVerdict(
        "f' numerically decreasing",
        rises.size == 0,
        None if rises.size == 0 else {"t1": float(grid[rises[0]]), "t2": float(grid[rises[0] + 1]),
                                      "fprime_t1": float(d[rises[0]]), "fprime_t2": float(d[rises[0] + 1])},
    )

    second = spec.second
    witness = None
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        x, y = sample_pd(n, rng), sample_pd(n, rng)
        avg = 0.5 * apply_univariate(second, x) + 0.5 * apply_univariate(second, y)
        gap = min_eigenvalue(avg - apply_univariate(second, (x + y) / 2))
        if gap < -tol * (1 + np.max(np.abs(avg))):
            witness = {"trial": trial, "gap": gap}
            break
    convex = SubVerdict("f' operator convex (midpoint sampling)", witness is None, witness)
    return HypothesisVerdict(spec.to_json(), positive, decreasing, convex, n, trials, tol)
