"""Executable checks of the convergence analysis on concrete trajectories.

Every check compares the two sides of a proven inequality and returns an
InequalityReport with slack = rhs - lhs; slack >= 0 up to a small floating
point tolerance means the inequality holds. Checks whose hypotheses fail at
a given iterate (start radius exceeded, step of the wrong kind, estimation
error out of range) are marked not applicable instead of failed, so sweeps
over mixed trajectories never count vacuous cases either way.

Contraction factors verified per transition, with D2 = squared distance:

* fixed step eta:       D2 shrinks by at least 1 - (3/10)  m eta       sigma_r
* local step floor:     eta_local >= (5/6) eta everywhere in the radius
* optimal step eta*:    factors  1 - (12/25) m eta_local sigma_r
                        and      1 - (3/20)  m eta*      sigma_r
* estimated step:       factor   1 - (9/80)  m eta*      sigma_r,
                        valid whenever |eta_k - eta*| <= eta* / 2
                        (guaranteed by |delta| <= D2 / 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import stepsize
from .descent import Problem, Trajectory, within_start_radius
from .errors import MissingGroundTruthError
from .geometry import as_factor, dist, procrustes_align
from .stepsize import StepContext

__all__ = [
    "TOL_ABS",
    "TOL_REL",
    "CHECK_LOCAL_STEP_FLOOR",
    "CHECK_REGULARITY",
    "CHECK_DESCENT_QUADRATIC",
    "CHECK_CONTRACTION_FIXED",
    "CHECK_CONTRACTION_ADAPTIVE",
    "CHECK_CONTRACTION_EXACT_LOCAL",
    "CHECK_CONTRACTION_EXACT_OPTIMAL",
    "CONTRACTION_VARIANTS",
    "InequalityReport",
    "make_report",
    "check_local_step_floor",
    "check_regularity",
    "dist_sq_upper_bound",
    "check_descent_bound",
    "check_contraction",
    "check_optimal_step",
    "step_context_at",
    "trajectory_reports",
]

TOL_ABS = 1e-9
TOL_REL = 1e-9

CHECK_LOCAL_STEP_FLOOR = "local_step_floor"
CHECK_REGULARITY = "regularity"
CHECK_DESCENT_QUADRATIC = "descent_quadratic"
CHECK_CONTRACTION_FIXED = "contraction_fixed_step"
CHECK_CONTRACTION_ADAPTIVE = "contraction_adaptive_step"
CHECK_CONTRACTION_EXACT_LOCAL = "contraction_exact_local"
CHECK_CONTRACTION_EXACT_OPTIMAL = "contraction_exact_optimal"

# variant argument of check_contraction -> report name
CONTRACTION_VARIANTS = {
    "fixed": CHECK_CONTRACTION_FIXED,
    "adaptive": CHECK_CONTRACTION_ADAPTIVE,
    "exact_local": CHECK_CONTRACTION_EXACT_LOCAL,
    "exact_optimal": CHECK_CONTRACTION_EXACT_OPTIMAL,
}


@dataclass(frozen=True)
class InequalityReport:
    """One inequality instance: holds iff slack >= -(tol_abs + tol_rel |rhs|)."""

    k: int
    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    applicable: bool


def make_report(k: int, name: str, lhs: float, rhs: float, applicable: bool = True,
                tol_abs: float = TOL_ABS, tol_rel: float = TOL_REL) -> InequalityReport:
    slack = rhs - lhs
    holds = bool(slack >= -(tol_abs + tol_rel * abs(rhs)))
    return InequalityReport(k=int(k), name=name, lhs=float(lhs), rhs=float(rhs),
                            slack=float(slack), holds=holds, applicable=bool(applicable))


def _anchored_eta(problem: Problem) -> float:
    x0 = problem.u0 @ problem.u0.T
    return stepsize.eta_fixed(problem.M, x0, problem.objective.grad(x0))


@dataclass(frozen=True)
class _IterateData:
    """Quantities recomputed at one iterate for the checks."""

    u: np.ndarray
    grad: np.ndarray
    direction: np.ndarray
    grad_norm_sq: float
    eta_local: float
    dist_sq: float
    aligned_error: np.ndarray  # U - U* R
    within_radius: bool


def _iterate_data(problem: Problem, u) -> _IterateData:
    if problem.u_star is None:
        raise MissingGroundTruthError("verification checks need the ground-truth factor")
    u = as_factor(u)
    x = u @ u.T
    grad = problem.objective.grad(x)
    direction = grad @ u
    aligned = problem.u_star @ procrustes_align(u, problem.u_star)
    error = u - aligned
    return _IterateData(
        u=u,
        grad=grad,
        direction=direction,
        grad_norm_sq=float(np.sum(direction * direction)),
        eta_local=stepsize.eta_local(problem.M, x, grad, u),
        dist_sq=float(np.sum(error * error)),
        aligned_error=error,
        within_radius=within_start_radius(problem, u),
    )


def check_local_step_floor(problem: Problem, u, k: int = 0) -> InequalityReport:
    """The local step at the iterate is at least 5/6 of the anchored fixed
    step. Applicable only inside the start radius."""
    data = _iterate_data(problem, u)
    lhs = (5.0 / 6.0) * _anchored_eta(problem)
    return make_report(k, CHECK_LOCAL_STEP_FLOOR, lhs=lhs, rhs=data.eta_local,
                       applicable=data.within_radius)


def check_regularity(problem: Problem, u, k: int = 0) -> InequalityReport:
    """The descent direction correlates with the aligned error at least as
    strongly as the weighted sum of gradient energy and squared distance:

        <grad f(X) U, U - U* R>  >=  0.8 eta_local ||grad f(X) U||_F^2
                                      + (3/20) m sigma_r dist^2
    """
    data = _iterate_data(problem, u)
    lhs = (0.8 * data.eta_local * data.grad_norm_sq
           + 0.15 * problem.m * problem.sigma_r_xstar * data.dist_sq)
    rhs = float(np.sum(data.direction * data.aligned_error))
    return make_report(k, CHECK_REGULARITY, lhs=lhs, rhs=rhs,
                       applicable=data.within_radius)


def dist_sq_upper_bound(eta: float, *, dist_sq: float, grad_norm_sq: float,
                        eta_local: float, m: float, sigma_r: float) -> float:
    """Quadratic-in-eta upper bound on the next squared factor distance,
    valid inside the start radius for any step length eta."""
    return (eta * eta * grad_norm_sq + dist_sq
            - 2.0 * eta * (0.8 * eta_local * grad_norm_sq
                           + 0.15 * m * sigma_r * dist_sq))


def _transition(problem: Problem, traj: Trajectory, k: int):
    if traj.iterates is None:
        raise ValueError("trajectory has no stored iterates; rerun with keep_iterates=True")
    if not 0 <= k < len(traj.records) - 1:
        raise IndexError(f"transition {k} out of range (0..{len(traj.records) - 2})")
    data = _iterate_data(problem, traj.iterates[k])
    dist_sq_next = dist(traj.iterates[k + 1], problem.u_star) ** 2
    return data, traj.records[k], dist_sq_next


def check_descent_bound(problem: Problem, traj: Trajectory, k: int) -> InequalityReport:
    """The realized next squared distance sits below the quadratic bound
    evaluated at the step actually taken."""
    data, record, dist_sq_next = _transition(problem, traj, k)
    bound = dist_sq_upper_bound(record.eta, dist_sq=data.dist_sq,
                                grad_norm_sq=data.grad_norm_sq,
                                eta_local=data.eta_local, m=problem.m,
                                sigma_r=problem.sigma_r_xstar)
    return make_report(k, CHECK_DESCENT_QUADRATIC, lhs=dist_sq_next, rhs=bound,
                       applicable=data.within_radius)


def _optimal_eta(problem: Problem, data: _IterateData) -> float:
    ctx = StepContext(eta_fixed=0.0, eta_local=data.eta_local, m=problem.m,
                      sigma_r=problem.sigma_r_xstar, dist_sq=data.dist_sq,
                      grad_norm_sq=data.grad_norm_sq,
                      grad_floor=stepsize.grad_floor(data.u))
    return stepsize.eta_optimal(ctx)


def check_contraction(problem: Problem, traj: Trajectory, k: int,
                      variant: str = "fixed") -> InequalityReport:
    """Per-transition contraction of the squared distance.

    Variants and their hypotheses, all additionally requiring the iterate to
    sit inside the start radius:

    * "fixed":         factor 1 - (3/10) m eta0 sigma_r; the step must be the
                       anchored fixed one, or within half of the optimal step.
    * "adaptive":      factor 1 - (9/80) m eta* sigma_r; the step must lie
                       within half of the optimal step (the estimation model
                       with |delta| <= dist^2 / 2 guarantees this).
    * "exact_local":   factor 1 - (12/25) m eta_local sigma_r; exact optimal
                       step only.
    * "exact_optimal": factor 1 - (3/20) m eta* sigma_r; exact optimal step
                       only.
    """
    if variant not in CONTRACTION_VARIANTS:
        raise ValueError(f"unknown contraction variant {variant!r}")
    data, record, dist_sq_next = _transition(problem, traj, k)
    m = problem.m
    sigma_r = problem.sigma_r_xstar
    eta_opt = _optimal_eta(problem, data)

    step_is_optimal = abs(record.eta - eta_opt) <= 1e-9 * eta_opt
    step_near_optimal = abs(record.eta - eta_opt) <= 0.5 * eta_opt * (1.0 + 1e-9)

    if variant == "fixed":
        eta0 = _anchored_eta(problem)
        factor = 1.0 - 0.3 * m * eta0 * sigma_r
        applicable = data.within_radius and (
            abs(record.eta - eta0) <= 1e-12 * eta0 or step_near_optimal)
    elif variant == "adaptive":
        factor = 1.0 - (9.0 / 80.0) * m * eta_opt * sigma_r
        applicable = data.within_radius and step_near_optimal
    elif variant == "exact_local":
        factor = 1.0 - (12.0 / 25.0) * m * data.eta_local * sigma_r
        applicable = data.within_radius and step_is_optimal
    else:  # exact_optimal
        factor = 1.0 - 0.15 * m * eta_opt * sigma_r
        applicable = data.within_radius and step_is_optimal

    return make_report(k, CONTRACTION_VARIANTS[variant], lhs=dist_sq_next,
                       rhs=factor * data.dist_sq, applicable=applicable)


def check_optimal_step(ctx: StepContext, grid_points: int = 41,
                       random_draws: int = 20, seed=0, tol: float = 1e-12) -> bool:
    """The optimal step really minimizes the quadratic bound: no sampled step
    in [0, 2 eta*] beats it by more than tol."""
    eta_opt = stepsize.eta_optimal(ctx)

    def bound(eta):
        return dist_sq_upper_bound(eta, dist_sq=ctx.dist_sq,
                                   grad_norm_sq=ctx.grad_norm_sq,
                                   eta_local=ctx.eta_local, m=ctx.m,
                                   sigma_r=ctx.sigma_r)

    etas = np.linspace(0.0, 2.0 * eta_opt, grid_points)
    if random_draws > 0:
        rng = np.random.default_rng(seed)
        etas = np.concatenate([etas, rng.uniform(0.0, 2.0 * eta_opt, random_draws)])
    best = bound(eta_opt)
    return bool(all(best <= bound(e) + tol for e in etas))


def step_context_at(problem: Problem, traj: Trajectory, k: int) -> StepContext:
    """Rebuild the step context at a recorded iterate (true distance, no
    estimation error), e.g. to audit the optimal-step property."""
    if traj.iterates is None:
        raise ValueError("trajectory has no stored iterates; rerun with keep_iterates=True")
    data = _iterate_data(problem, traj.iterates[k])
    return StepContext(eta_fixed=_anchored_eta(problem), eta_local=data.eta_local,
                       m=problem.m, sigma_r=problem.sigma_r_xstar,
                       dist_sq=data.dist_sq, grad_norm_sq=data.grad_norm_sq,
                       grad_floor=stepsize.grad_floor(data.u))


def trajectory_reports(problem: Problem, traj: Trajectory) -> list[InequalityReport]:
    """Every check at every recorded iterate of a trajectory.

    Point checks (step floor, regularity) run at each iterate; transition
    checks (quadratic bound, all four contraction factors) at each recorded
    transition. Requires stored iterates and a known ground truth.
    """
    if traj.iterates is None:
        raise ValueError("trajectory has no stored iterates; rerun with keep_iterates=True")
    eta0 = _anchored_eta(problem)
    reports: list[InequalityReport] = []
    last = len(traj.records) - 1
    for k, record in enumerate(traj.records):
        data = _iterate_data(problem, traj.iterates[k])
        reports.append(make_report(k, CHECK_LOCAL_STEP_FLOOR,
                                   lhs=(5.0 / 6.0) * eta0, rhs=data.eta_local,
                                   applicable=data.within_radius))
        lhs = (0.8 * data.eta_local * data.grad_norm_sq
               + 0.15 * problem.m * problem.sigma_r_xstar * data.dist_sq)
        rhs = float(np.sum(data.direction * data.aligned_error))
        reports.append(make_report(k, CHECK_REGULARITY, lhs=lhs, rhs=rhs,
                                   applicable=data.within_radius))
        if k == last:
            break
        dist_sq_next = dist(traj.iterates[k + 1], problem.u_star) ** 2
        bound = dist_sq_upper_bound(record.eta, dist_sq=data.dist_sq,
                                    grad_norm_sq=data.grad_norm_sq,
                                    eta_local=data.eta_local, m=problem.m,
                                    sigma_r=problem.sigma_r_xstar)
        reports.append(make_report(k, CHECK_DESCENT_QUADRATIC, lhs=dist_sq_next,
                                   rhs=bound, applicable=data.within_radius))

        eta_opt = _optimal_eta(problem, data)
        step_is_optimal = abs(record.eta - eta_opt) <= 1e-9 * eta_opt
        step_near_optimal = abs(record.eta - eta_opt) <= 0.5 * eta_opt * (1.0 + 1e-9)
        m, sigma_r = problem.m, problem.sigma_r_xstar
        fixed_ok = data.within_radius and (
            abs(record.eta - eta0) <= 1e-12 * eta0 or step_near_optimal)
        reports.append(make_report(k, CHECK_CONTRACTION_FIXED, lhs=dist_sq_next,
                                   rhs=(1.0 - 0.3 * m * eta0 * sigma_r) * data.dist_sq,
                                   applicable=fixed_ok))
        reports.append(make_report(k, CHECK_CONTRACTION_ADAPTIVE, lhs=dist_sq_next,
                                   rhs=(1.0 - (9.0 / 80.0) * m * eta_opt * sigma_r) * data.dist_sq,
                                   applicable=data.within_radius and step_near_optimal))
        reports.append(make_report(k, CHECK_CONTRACTION_EXACT_LOCAL, lhs=dist_sq_next,
                                   rhs=(1.0 - (12.0 / 25.0) * m * data.eta_local * sigma_r) * data.dist_sq,
                                   applicable=data.within_radius and step_is_optimal))
        reports.append(make_report(k, CHECK_CONTRACTION_EXACT_OPTIMAL, lhs=dist_sq_next,
                                   rhs=(1.0 - 0.15 * m * eta_opt * sigma_r) * data.dist_sq,
                                   applicable=data.within_radius and step_is_optimal))
    return reports
