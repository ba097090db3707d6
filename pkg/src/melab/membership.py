"""Numerical checks of the four equivalent membership conditions.

For a convex ``phi`` with ``f = phi'`` the following are equivalent, and the
checkers below probe each one by random sampling:

I    ``x -> Tr h^* df(x)^{-1} h`` is concave in positive definite ``x``;
II   ``(x, h) -> Tr h^* df(x) h`` is jointly convex (``h`` self-adjoint);
III  ``(x, y) -> Tr (y - x)(f(y) - f(x))`` is jointly convex;
IV   ``g(t, s) = (s - t)/(f(s) - f(t))`` is operator concave, tested as
     concavity of the superoperator map ``(x, y) -> g(L_x, R_y)``.

Every trial evaluates a :class:`Slack` ``(lhs, rhs, gap)`` oriented so that a
member gives ``gap >= 0``.  A trial violates when
``gap < -tol * (1 + |rhs|)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from melab import _kernels
from melab.catalog import (
    Affine,
    PhiFunction,
    Power,
    StandardEntropy,
    g_kernel_fn,
    random_canonical,
    spec_from_json,
)
from melab.errors import DomainError, SingularDifferentialError, SkipBudgetExceeded
from melab.sampling import random_hermitian, sample_pd, trial_rng
from melab.spectral import (
    apply_univariate,
    bivariate_calculus,
    eigvalsh,
    frechet_diff,
    frechet_diff_inverse,
    matrix_from_json,
    matrix_to_json,
    min_eigenpair,
)

DEFAULT_TOL = 1e-8
SKIP_CAP = 0.05
REPLAY_TOL = 1e-12
CONDITIONS = ("I", "II", "III", "IV")


@dataclass(frozen=True)
class Slack:
    lhs: float
    rhs: float
    gap: float

    @property
    def scale(self) -> float:
        return 1.0 + abs(self.rhs)

    @property
    def relative(self) -> float:
        return self.gap / self.scale

    def violates(self, tol: float) -> bool:
        return self.gap < -tol * self.scale


def _mix(lam, a, b):
    return lam * a + (1 - lam) * b


def _lambda(rng, trial):
    return 0.5 if trial % 2 == 0 else float(rng.uniform(0.0, 1.0))


# -- slack functions --------------------------------------------------------


def slack_i(spec: PhiFunction, x1, x2, h, lam) -> Slack:
    f = spec.derivative

    def form(x):
        return float(np.vdot(h, frechet_diff_inverse(f, x, h)).real)

    lhs = form(_mix(lam, x1, x2))
    rhs = lam * form(x1) + (1 - lam) * form(x2)
    return Slack(lhs, rhs, lhs - rhs)


def slack_ii(spec: PhiFunction, x1, x2, h1, h2, lam) -> Slack:
    f = spec.derivative

    def form(x, h):
        return float(np.vdot(h, frechet_diff(f, x, h)).real)

    lhs = form(_mix(lam, x1, x2), _mix(lam, h1, h2))
    rhs = lam * form(x1, h1) + (1 - lam) * form(x2, h2)
    return Slack(lhs, rhs, rhs - lhs)


def trace_bivariate(spec: PhiFunction, x, y) -> float:
    """``Tr (y - x)(f(y) - f(x))``."""
    f = spec.derivative
    return float(np.vdot(y - x, apply_univariate(f, y) - apply_univariate(f, x)).real)


def slack_iii(spec: PhiFunction, x1, x2, y1, y2, lam) -> Slack:
    lhs = trace_bivariate(spec, _mix(lam, x1, x2), _mix(lam, y1, y2))
    rhs = lam * trace_bivariate(spec, x1, y1) + (1 - lam) * trace_bivariate(spec, x2, y2)
    return Slack(lhs, rhs, rhs - lhs)


def slack_iv(spec: PhiFunction, x1, x2, y1, y2, lam) -> Slack:
    g = g_kernel_fn(spec)
    mid = bivariate_calculus(g, _mix(lam, x1, x2), _mix(lam, y1, y2))
    avg = lam * bivariate_calculus(g, x1, y1) + (1 - lam) * bivariate_calculus(g, x2, y2)
    gap, v = min_eigenpair(mid - avg)
    lhs = float(np.vdot(v, mid.matrix @ v).real)
    rhs = float(np.vdot(v, avg.matrix @ v).real)
    return Slack(lhs, rhs, gap)


MODES = ("global", "local", "diagonal", "diagonal-local")


def _spectral_room(x, k):
    """Lower bound ``lmin(x) / ||k||`` on the step keeping ``x + s k`` positive."""
    return float(eigvalsh(x)[0] / np.max(np.abs(eigvalsh(k))))


def _congruence(x, d, r):
    """``x^1/2 (I + r d) x^1/2``; positive definite when ``||d|| <= 1`` and ``r < 1``."""
    root = apply_univariate(np.sqrt, x)
    y = root @ (np.eye(x.shape[0]) + r * d) @ root
    return (y + y.conj().T) / 2


def _direction(n, rng):
    d = random_hermitian(n, rng)
    return d / np.max(np.abs(eigvalsh(d)))


def _nearby_pd(x, rng):
    return _congruence(x, _direction(x.shape[0], rng), rng.uniform(0.1, 0.9))


def _nearby_hermitian(h, rng):
    return h + rng.uniform(0.1, 1.0) * np.linalg.norm(h) * random_hermitian(h.shape[0], rng)


@dataclass(frozen=True)
class Condition:
    """One membership condition: its slack function and how a trial samples arguments.

    Trial ``k`` uses mode ``MODES[(k // 2) % 4]`` and ``lam = 1/2`` for even
    ``k``, uniform otherwise.  In ``local`` modes the second endpoint perturbs
    the first, so the midpoint test resolves second-order curvature.  In
    ``diagonal`` modes (conditions with an ``(x, y)`` pair) each ``y`` is
    ``x + s k`` for a shared small step ``s``; there the two-variable trace
    function behaves like ``s^2 Tr k df(x) k``, so curvature defects of the
    one-variable forms become visible.
    """

    name: str
    statement: str
    slack: Callable[..., Slack]
    pd_pairs: tuple
    h_pairs: tuple = ()
    h_single: tuple = ()

    @property
    def positive(self) -> tuple:
        return tuple(k for pair in self.pd_pairs for k in pair)

    @property
    def hermitian(self) -> tuple:
        return tuple(k for pair in self.h_pairs for k in pair) + self.h_single

    def draw(self, n: int, rng: np.random.Generator, trial: int) -> dict:
        mode = MODES[(trial // 2) % len(MODES)]
        local = mode in ("local", "diagonal-local")
        args = {}
        (x1, x2), rest = self.pd_pairs[0], self.pd_pairs[1:]
        args[x1] = sample_pd(n, rng)
        args[x2] = _nearby_pd(args[x1], rng) if local else sample_pd(n, rng)
        for y1, y2 in rest:
            if mode.startswith("diagonal"):
                k1 = random_hermitian(n, rng, 10.0 ** rng.uniform(-1, 1))
                k2 = _nearby_hermitian(k1, rng) if local else random_hermitian(n, rng, 10.0 ** rng.uniform(-1, 1))
                room = min(_spectral_room(args[x1], k1), _spectral_room(args[x2], k2))
                s = room * 10.0 ** rng.uniform(-1, -0.1)
                args[y1], args[y2] = args[x1] + s * k1, args[x2] + s * k2
            else:
                args[y1] = sample_pd(n, rng)
                args[y2] = _nearby_pd(args[y1], rng) if local else sample_pd(n, rng)
        for h1, h2 in self.h_pairs:
            args[h1] = random_hermitian(n, rng, 10.0 ** rng.uniform(-1, 1))
            args[h2] = _nearby_hermitian(args[h1], rng) if local else random_hermitian(n, rng, 10.0 ** rng.uniform(-1, 1))
        for key in self.h_single:
            args[key] = random_hermitian(n, rng)
        args["lam"] = _lambda(rng, trial)
        return args

    def evaluate(self, spec: PhiFunction, args: dict) -> Slack:
        return self.slack(spec, **args)


CONDITION_DEFS = {
    "I": Condition("I", "x -> Tr h* df(x)^-1 h is concave", slack_i, (("x1", "x2"),), h_single=("h",)),
    "II": Condition("II", "(x, h) -> Tr h* df(x) h is jointly convex", slack_ii, (("x1", "x2"),), h_pairs=(("h1", "h2"),)),
    "III": Condition("III", "(x, y) -> Tr (y - x)(f(y) - f(x)) is jointly convex", slack_iii, (("x1", "x2"), ("y1", "y2"))),
    "IV": Condition("IV", "(x, y) -> g(L_x, R_y) is concave", slack_iv, (("x1", "x2"), ("y1", "y2"))),
}


def _witness_json(args: dict) -> dict:
    return {k: (float(v) if k == "lam" else matrix_to_json(v)) for k, v in args.items()}


def _witness_from_json(obj: dict) -> dict:
    return {k: (float(v) if k == "lam" else matrix_from_json(v)) for k, v in obj.items()}


# -- verdicts ---------------------------------------------------------------


@dataclass
class ConditionVerdict:
    """Outcome of one condition checker.

    ``passed`` is ``worst_relative_gap >= -tol``; ``worst_gap`` is the raw
    slack of that same trial.  ``witness`` is the first violating trial.
    """

    condition: str
    passed: bool
    trials: int
    tol: float
    worst_gap: float = 0.0
    worst_relative_gap: float = 0.0
    worst_trial: Optional[int] = None
    skipped: int = 0
    witness: Optional[dict] = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "passed": self.passed,
            "trials": self.trials,
            "skipped": self.skipped,
            "tol": self.tol,
            "worst_gap": self.worst_gap,
            "worst_relative_gap": self.worst_relative_gap,
            "worst_trial": self.worst_trial,
            "witness": self.witness,
            "note": self.note,
        }


def _require_checkable(spec: PhiFunction):
    if not spec.is_convex:
        raise DomainError(f"{spec.label} is not convex on (0, inf); the membership conditions do not apply")


def check_condition(condition: str, spec: PhiFunction, n: int, trials: int, seed: int, tol: float = DEFAULT_TOL) -> ConditionVerdict:
    """Run ``trials`` random probes of one condition at dimension ``n``.

    Trial ``k`` draws from the stream ``trial_rng(seed, k)``, so verdicts are
    reproducible bit for bit and independent of evaluation order.  Trials
    whose differential is numerically singular are skipped; more than 5%
    skipped raises :class:`SkipBudgetExceeded`.
    """
    if spec.is_affine:
        return ConditionVerdict(condition, True, 0, tol, note="affine: member by definition")
    _require_checkable(spec)
    cond = CONDITION_DEFS[condition]
    verdict = ConditionVerdict(condition, True, trials, tol)
    worst = None
    for trial in range(trials):
        args = cond.draw(n, trial_rng(seed, trial), trial)
        try:
            sl = cond.evaluate(spec, args)
        except SingularDifferentialError:
            verdict.skipped += 1
            continue
        if worst is None or sl.relative < worst:
            worst = sl.relative
            verdict.worst_gap, verdict.worst_relative_gap, verdict.worst_trial = sl.gap, sl.relative, trial
        if verdict.witness is None and sl.violates(tol):
            verdict.passed = False
            verdict.witness = {"trial": trial, "lhs": sl.lhs, "rhs": sl.rhs, "gap": sl.gap, "args": _witness_json(args)}
    if verdict.skipped > SKIP_CAP * trials:
        raise SkipBudgetExceeded(f"condition {condition}: {verdict.skipped} of {trials} trials skipped (cap {SKIP_CAP:.0%})")
    return verdict


def check_condition_i(spec, n, trials, seed, tol=DEFAULT_TOL):
    return check_condition("I", spec, n, trials, seed, tol)


def check_condition_ii(spec, n, trials, seed, tol=DEFAULT_TOL):
    return check_condition("II", spec, n, trials, seed, tol)


def check_condition_iii(spec, n, trials, seed, tol=DEFAULT_TOL):
    return check_condition("III", spec, n, trials, seed, tol)


def check_condition_iv(spec, n, trials, seed, tol=DEFAULT_TOL):
    return check_condition("IV", spec, n, trials, seed, tol)


@dataclass
class EquivalenceReport:
    spec: dict
    label: str
    n: int
    trials: int
    seed: int
    tol: float
    verdicts: list = field(default_factory=list)
    affine: bool = False

    @property
    def agree(self) -> bool:
        return len({v.passed for v in self.verdicts}) <= 1

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def status(self) -> str:
        if self.affine:
            return "affine"
        if not self.agree:
            return "anomaly"
        return "member" if self.all_passed else "violation"

    def to_json(self) -> dict:
        return {
            "spec": self.spec,
            "label": self.label,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "status": self.status,
            "agree": self.agree,
            "verdicts": [v.to_json() for v in self.verdicts],
        }


def cross_equivalence(spec: PhiFunction, n: int, trials: int, seed: int, tol: float = DEFAULT_TOL) -> EquivalenceReport:
    """Run all four checkers on one shared seed.

    Disagreement is reported as a numerical anomaly (status ``"anomaly"``),
    never as a refutation of the equivalence.
    """
    report = EquivalenceReport(spec.to_json(), spec.label, n, trials, int(seed), tol, affine=spec.is_affine)
    report.verdicts = [check_condition(c, spec, n, trials, seed, tol) for c in CONDITIONS]
    return report


# -- counterexample search --------------------------------------------------


@dataclass
class ViolationReport:
    spec: dict
    condition: str
    n: int
    args: dict
    lhs: float
    rhs: float
    gap: float
    seed: int
    tol: float
    evaluations: int
    stage: str

    @property
    def lam(self) -> float:
        return float(self.args["lam"])

    def to_json(self) -> dict:
        return {
            "spec": self.spec,
            "condition": self.condition,
            "n": self.n,
            "seed": self.seed,
            "tol": self.tol,
            "lambda": self.lam,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "evaluations": self.evaluations,
            "stage": self.stage,
            "witness": _witness_json(self.args),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ViolationReport":
        return cls(obj["spec"], obj["condition"], int(obj["n"]), _witness_from_json(obj["witness"]),
                   float(obj["lhs"]), float(obj["rhs"]), float(obj["gap"]), int(obj["seed"]),
                   float(obj["tol"]), int(obj["evaluations"]), obj["stage"])

    def replay(self) -> Slack:
        """Re-evaluate the slack at the stored witness."""
        return CONDITION_DEFS[self.condition].evaluate(spec_from_json(self.spec), self.args)

    def replay_matches(self, tol: float = REPLAY_TOL) -> bool:
        return abs(self.replay().gap - self.gap) <= tol


def _is_pd(m) -> bool:
    return bool(eigvalsh(m)[0] > 0)


def _perturb(args: dict, cond: Condition, rng, step: float) -> dict:
    out = dict(args)
    keys = list(cond.positive) + list(cond.hermitian)
    key = keys[int(rng.integers(len(keys)))]
    m = out[key].copy()
    n = m.shape[0]
    i, j = int(rng.integers(n)), int(rng.integers(n))
    size = step * max(np.linalg.norm(m) / n, 1e-2)
    if i == j:
        m[i, i] += size * rng.standard_normal()
    else:
        z = size * complex(rng.standard_normal(), rng.standard_normal())
        m[i, j] += z
        m[j, i] += np.conj(z)
    out[key] = m
    return out


def search_counterexample(spec: PhiFunction, n_max: int = 2, budget: int = 10_000, seed: int = 0,
                          tol: float = DEFAULT_TOL, condition: str = "III") -> Optional[ViolationReport]:
    """Escalating random search for a violation of one membership condition.

    For each dimension ``1..n_max`` half of that dimension's share of the
    ``budget`` (counted in candidate evaluations) goes to independent random
    draws; the rest hill-climbs from the most negative relative slack seen,
    perturbing one matrix entry at a time.  Returns the first violation, or
    ``None`` when the budget runs out.
    """
    if spec.is_affine:
        return None
    _require_checkable(spec)
    cond = CONDITION_DEFS[condition]
    used = 0

    def report(n, args, sl, stage):
        return ViolationReport(spec.to_json(), condition, n, args, sl.lhs, sl.rhs, sl.gap, int(seed), tol, used, stage)

    for n in range(1, n_max + 1):
        share = (budget - used) // (n_max - n + 1)
        best_args, best = None, None
        for k in range(share // 2):
            args = cond.draw(n, trial_rng(seed, n, k), k)
            used += 1
            try:
                sl = cond.evaluate(spec, args)
            except SingularDifferentialError:
                continue
            if sl.violates(tol):
                return report(n, args, sl, "random")
            if best is None or sl.relative < best.relative:
                best_args, best = args, sl
        if best_args is None:
            continue
        rng = trial_rng(seed, n, 2**32)
        step = 0.1
        for _ in range(share - share // 2):
            cand = _perturb(best_args, cond, rng, step)
            used += 1
            if not all(_is_pd(cand[key]) for key in cond.positive):
                step = max(step * 0.5, 1e-8)
                continue
            try:
                sl = cond.evaluate(spec, cand)
            except SingularDifferentialError:
                continue
            if sl.violates(tol):
                return report(n, cand, sl, "refine")
            if sl.relative < best.relative:
                best_args, best = cand, sl
                step = min(step * 1.5, 1.0)
            else:
                step = step * 0.8 if step > 1e-6 else 0.1
    return None


# -- suites -----------------------------------------------------------------

MEMBER_POWERS = (1.0, 1.25, 1.5, 1.75, 2.0)
NON_MEMBER_POWERS = (2.5, 3.0)


def known_members() -> list:
    return [Affine(1.0, 2.0), StandardEntropy(), *(Power(p) for p in MEMBER_POWERS)]


def random_canonicals(count: int, seed: int) -> list:
    return [random_canonical(trial_rng(seed, 7, k)) for k in range(count)]


def equivalence_suite_specs(seed: int, canonical_count: int = 20) -> list:
    """Known members, random canonical measures, and non-member powers 2.5, 3 and 4."""
    return [*known_members(), *random_canonicals(canonical_count, seed), *(Power(p) for p in (*NON_MEMBER_POWERS, 4.0))]


def backend() -> str:
    return _kernels.BACKEND
