"""The iteration engine: starting points, the update rule, stop rules, and
full trajectory recording.

The update is

    U_{k+1} = U_k - eta_k * grad f(U_k U_k^T) @ U_k

with eta_k chosen by a StepPolicy: the anchored fixed step, the exact
per-iteration optimal step (optionally with synthetic distance-estimation
noise), or the practical variant. A run records one IterateRecord per
iterate, including the final one, whose eta is the step that would have been
taken next.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import stepsize
from .errors import MissingGroundTruthError, NumericalBlowupError
from .geometry import as_factor, dist, sigma_min_positive, spectral_norm
from .objectives import Objective
from .stepsize import ADAPTIVE_EXACT, FIXED_FGD, SIGMA_FROM_XSTAR, StepContext, StepPolicy

__all__ = [
    "TERMINATED_TOLERANCE",
    "TERMINATED_MAX_ITERS",
    "TERMINATED_STATIONARY",
    "TERMINATED_DIVERGED",
    "Problem",
    "make_problem",
    "IterateRecord",
    "Trajectory",
    "InitCheck",
    "start_radius",
    "check_init_condition",
    "within_start_radius",
    "init_near",
    "init_far",
    "RunState",
    "prepare",
    "step",
    "run",
]

TERMINATED_TOLERANCE = "tolerance"
TERMINATED_MAX_ITERS = "max_iters"
TERMINATED_STATIONARY = "stationary"
TERMINATED_DIVERGED = "diverged"

# ||grad f(X) U||_F^2 below this scale-aware threshold counts as stationary.
_STOP_FLOOR = 1e-28


@dataclass(frozen=True)
class Problem:
    """Objective plus starting factor, with optional ground truth.

    sigma_r_xstar and sigma1_xstar are the smallest-positive and largest
    singular values of X* = U* U*^T; they are stored so per-iteration code
    never has to decompose an n x n matrix.
    """

    objective: Objective
    u0: np.ndarray
    u_star: np.ndarray | None = None
    sigma_r_xstar: float | None = None
    sigma1_xstar: float | None = None

    @property
    def n(self) -> int:
        return self.u0.shape[0]

    @property
    def r(self) -> int:
        return self.u0.shape[1]

    @property
    def m(self) -> float:
        return self.objective.m

    @property
    def M(self) -> float:
        return self.objective.M

    @property
    def kappa(self) -> float:
        return self.objective.kappa


def make_problem(objective: Objective, u0, u_star=None) -> Problem:
    """Build a Problem, deriving the spectrum of X* from U* when given.

    The singular values of X* are the squares of those of U*, so only the
    cheap n x r decomposition is ever taken.
    """
    u0 = as_factor(u0).copy()
    sigma_r = sigma1 = None
    if u_star is not None:
        u_star = as_factor(u_star).copy()
        if u_star.shape != u0.shape:
            raise ValueError(
                f"u0 and u_star must share a shape: {u0.shape} vs {u_star.shape}")
        sigma_r = sigma_min_positive(u_star) ** 2
        sigma1 = spectral_norm(u_star) ** 2
    return Problem(objective=objective, u0=u0, u_star=u_star,
                   sigma_r_xstar=sigma_r, sigma1_xstar=sigma1)


@dataclass(frozen=True)
class IterateRecord:
    """Snapshot of one iterate: objective value, relative error, squared
    distance to the ground truth (None when unknown), the step used for the
    outgoing transition, squared gradient norm, and the injected estimation
    error."""

    k: int
    g_value: float
    rel_error: float
    dist_sq: float | None
    eta: float
    grad_norm_sq: float
    delta: float


@dataclass
class Trajectory:
    """All records of a run plus the termination reason; iterates holds the
    factor at every recorded k when the run was asked to keep them."""

    records: list[IterateRecord]
    terminated: str
    iterates: list[np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.records)

    @property
    def final(self) -> IterateRecord:
        return self.records[-1]

    def column(self, name: str) -> np.ndarray:
        """One record field across all iterates, as a float array."""
        values = [getattr(rec, name) for rec in self.records]
        return np.array([np.nan if v is None else v for v in values], dtype=float)

    def iterations_to(self, rel_tol: float):
        """First k with rel_error <= rel_tol, or None if never reached."""
        for rec in self.records:
            if rec.rel_error <= rel_tol:
                return rec.k
        return None


@dataclass(frozen=True)
class InitCheck:
    holds: bool
    lhs: float  # dist(U0, U*)
    rhs: float  # start radius


def _radius(sigma_r_xstar: float, sigma1_xstar: float, kappa: float) -> float:
    return float(np.sqrt(sigma_r_xstar) / (100.0 * kappa)
                 * sigma_r_xstar / sigma1_xstar)


def start_radius(u_star, kappa: float = 1.0) -> float:
    """Largest starting distance the contraction analysis tolerates:
    sqrt(sigma_r(X*)) / (100 kappa) * sigma_r(X*) / sigma_1(X*)."""
    u_star = as_factor(u_star)
    return _radius(sigma_min_positive(u_star) ** 2,
                   spectral_norm(u_star) ** 2, kappa)


def _problem_radius(problem: Problem) -> float:
    if problem.u_star is None:
        raise MissingGroundTruthError("start radius needs the ground-truth factor")
    return _radius(problem.sigma_r_xstar, problem.sigma1_xstar, problem.kappa)


def check_init_condition(problem: Problem) -> InitCheck:
    """Whether dist(U0, U*) is within the start radius."""
    lhs = dist(problem.u0, problem.u_star) if problem.u_star is not None else None
    if lhs is None:
        raise MissingGroundTruthError("initialization check needs the ground-truth factor")
    rhs = _problem_radius(problem)
    return InitCheck(holds=bool(lhs <= rhs), lhs=float(lhs), rhs=rhs)


def within_start_radius(problem: Problem, u) -> bool:
    """Whether an arbitrary iterate sits within the start radius of U*."""
    if problem.u_star is None:
        return False
    return dist(u, problem.u_star) <= _problem_radius(problem)


def init_near(u_star, seed, safety: float = 0.5, kappa: float = 1.0) -> np.ndarray:
    """Random start at a pinned distance from the ground truth.

    Draws a Gaussian perturbation direction and scales it so that
    dist(U0, U*) equals safety * start_radius(U*). Because the aligned
    distance is slightly below the raw perturbation norm, the scale is
    found by root bracketing rather than plain division.
    """
    u_star = as_factor(u_star)
    if not 0.0 < safety <= 1.0:
        raise ValueError("safety must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(u_star.shape)
    direction /= np.linalg.norm(direction)
    target = safety * start_radius(u_star, kappa=kappa)

    def gap(t):
        return dist(u_star + t * direction, u_star) - target

    # gap(0) = -target < 0; dist >= t - 2 ||U*||_F makes the upper end positive
    hi = target + 2.0 * float(np.linalg.norm(u_star)) + 1.0
    scale = brentq(gap, 0.0, hi, xtol=1e-30, maxiter=200)
    return u_star + scale * direction


def _nonzero_uniform(rng, shape, scale):
    # the all-zero matrix is a stationary point of every factored objective,
    # so a (measure-zero) zero draw is rejected and redrawn
    u0 = rng.uniform(-scale, scale, size=shape)
    while not np.any(u0):
        u0 = rng.uniform(-scale, scale, size=shape)
    return u0


def init_far(u_star, seed, scale: float = 1.0) -> np.ndarray:
    """Start independent of the ground truth: i.i.d. Uniform(-scale, scale)
    entries, matching the law the benchmark instances use for U* itself.
    An all-zero draw is redrawn."""
    u_star = as_factor(u_star)
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    return _nonzero_uniform(np.random.default_rng(seed), u_star.shape, scale)


@dataclass(frozen=True)
class RunState:
    """Run-level constants: the anchored fixed step, the sigma_r the policy
    reads, and the starting objective value."""

    eta0: float
    sigma_r: float | None
    g0: float


def prepare(problem: Problem, policy: StepPolicy) -> RunState:
    """Freeze the per-run quantities a policy needs before iterating."""
    x0 = problem.u0 @ problem.u0.T
    if policy.eta_override is not None:
        eta0 = policy.eta_override
    else:
        eta0 = stepsize.eta_fixed(problem.M, x0, problem.objective.grad(x0))
    sigma_r = None
    if policy.kind != FIXED_FGD:
        if problem.u_star is None:
            raise MissingGroundTruthError(
                "adaptive policies need the ground-truth factor to track the distance")
        if policy.sigma_r_source == SIGMA_FROM_XSTAR:
            sigma_r = problem.sigma_r_xstar
        else:
            sigma_r = sigma_min_positive(problem.u0) ** 2
    g0 = float(problem.objective.value(x0))
    return RunState(eta0=eta0, sigma_r=sigma_r, g0=g0)


def _step_length(policy, state, problem, u, x, grad, grad_norm_sq, dist_sq, delta):
    if policy.kind == FIXED_FGD:
        return state.eta0
    local = stepsize.eta_local(problem.M, x, grad, u) if policy.kind == ADAPTIVE_EXACT else 0.0
    ctx = StepContext(eta_fixed=state.eta0, eta_local=local, m=problem.m,
                      sigma_r=state.sigma_r, dist_sq=dist_sq,
                      grad_norm_sq=grad_norm_sq, delta=delta,
                      grad_floor=stepsize.grad_floor(u))
    if policy.kind == ADAPTIVE_EXACT:
        return stepsize.eta_estimated(ctx)
    return stepsize.eta_practical(ctx)


def step(u, objective: Objective, policy: StepPolicy, problem: Problem, *,
         state: RunState | None = None, k: int = 0, delta_rng=None):
    """One update U - eta * grad f(U U^T) @ U under the given policy.

    Returns (next factor, record of the current iterate). state carries the
    run-level constants; passing None recomputes them from the problem.
    Raises NumericalBlowupError when the update produces non-finite entries.
    """
    if state is None:
        state = prepare(problem, policy)
    u = as_factor(u)
    # overflow to inf is the divergence signal here, not a warning condition
    with np.errstate(over="ignore", invalid="ignore"):
        x = u @ u.T
        g = float(objective.value(x))
        grad = objective.grad(x)
        direction = grad @ u
        grad_norm_sq = float(np.sum(direction * direction))

    dist_sq = None
    if problem.u_star is not None:
        dist_sq = dist(u, problem.u_star) ** 2

    delta = 0.0
    if policy.kind != FIXED_FGD and policy.delta_rho > 0.0:
        if delta_rng is None:
            raise ValueError("delta_rho > 0 requires a delta_rng")
        delta = policy.delta_rho * dist_sq * float(delta_rng.uniform(-1.0, 1.0))

    eta_k = _step_length(policy, state, problem, u, x, grad,
                         grad_norm_sq, dist_sq, delta) * policy.eta_scale

    if state.g0 > 0.0:
        rel = g / state.g0
    else:
        rel = 1.0 if g == state.g0 else float("inf")
    record = IterateRecord(k=int(k), g_value=g, rel_error=float(rel),
                           dist_sq=dist_sq, eta=float(eta_k),
                           grad_norm_sq=grad_norm_sq, delta=float(delta))

    u_next = u - eta_k * direction
    if not np.all(np.isfinite(u_next)):
        raise NumericalBlowupError(f"non-finite update at iteration {k}")
    return u_next, record


def run(problem: Problem, policy: StepPolicy, max_iters: int = 1000,
        rel_tol: float = 1e-8, *, delta_seed=0, keep_iterates: bool = False) -> Trajectory:
    """Iterate until rel_error <= rel_tol, the gradient is numerically
    stationary, the update blows up, or max_iters transitions have been taken.

    delta_seed feeds the synthetic distance-estimation noise when the policy
    requests it; identical seeds and configuration reproduce the trajectory
    exactly."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if rel_tol <= 0.0:
        raise ValueError("rel_tol must be positive")
    state = prepare(problem, policy)
    delta_rng = np.random.default_rng(delta_seed)
    u = np.array(problem.u0, dtype=float)
    records: list[IterateRecord] = []
    iterates: list[np.ndarray] | None = [] if keep_iterates else None
    terminated = TERMINATED_MAX_ITERS
    for k in range(max_iters + 1):
        try:
            u_next, record = step(u, problem.objective, policy, problem,
                                  state=state, k=k, delta_rng=delta_rng)
        except NumericalBlowupError:
            terminated = TERMINATED_DIVERGED
            break
        if not np.isfinite(record.g_value):
            terminated = TERMINATED_DIVERGED
            break
        records.append(record)
        if iterates is not None:
            iterates.append(u.copy())
        if record.rel_error <= rel_tol:
            terminated = TERMINATED_TOLERANCE
            break
        if record.grad_norm_sq < _STOP_FLOOR * max(1.0, float(np.linalg.norm(u)) ** 4):
            terminated = TERMINATED_STATIONARY
            break
        if k == max_iters:
            terminated = TERMINATED_MAX_ITERS
            break
        u = u_next
    if not records:
        raise NumericalBlowupError("objective not finite at the starting point")
    return Trajectory(records=records, terminated=terminated, iterates=iterates)
