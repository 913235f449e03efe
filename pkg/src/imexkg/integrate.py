"""Split-system time stepping with any explicit/implicit tableau pair.

A problem supplies the nonstiff tendency n, the stiff tendency s, and a
strategy for the implicit stage solves: the generic Newton iteration with a
dense stiff Jacobian, or a problem-specific reduction.  Newton convergence
is controlled by a rate-weighted update test in a weighted RMS norm,
stopping when the predicted next update would be negligible relative to the
supplied tolerances.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .tableau import DoubleTableau


class IntegrationError(RuntimeError):
    pass


class NewtonError(IntegrationError):
    pass


class BlowUpError(IntegrationError):
    pass


@dataclass(frozen=True)
class NewtonConfig:
    """Stage-solver tolerances; the norm weight for component l is
    eps_r * |x_l| + eps_a_l."""

    epsilon: float = 0.1
    eps_r: float = 1e-6
    eps_a: float | np.ndarray = 1e-8
    max_iters: int = 20
    rate_floor: float = 0.3

    def __post_init__(self):
        if self.epsilon <= 0 or self.eps_r <= 0 or np.any(np.asarray(self.eps_a) <= 0):
            raise ValueError("tolerances must be positive")


# A stage residual at the rounding level of its constituents is treated as
# converged outright, covering corrections that are exactly zero (balanced
# states) and linear problems solved in a single update.
RESIDUAL_ROUNDING = 1e-13


def residual_negligible(residual, *parts) -> bool:
    scale = sum(float(np.abs(np.asarray(p)).max(initial=0.0)) for p in parts)
    return float(np.abs(np.asarray(residual)).max(initial=0.0)) <= RESIDUAL_ROUNDING * scale


def wrms_norm(delta, x, eps_r: float, eps_a) -> float:
    """Root-mean-square of delta weighted by eps_r |x| + eps_a per component."""
    delta = np.asarray(delta)
    weights = eps_r * np.abs(np.asarray(x)) + np.asarray(eps_a)
    if np.any(weights <= 0):
        raise ValueError("norm weights must be positive")
    scaled = np.abs(delta) / weights
    return float(np.sqrt(np.mean(scaled * scaled)))


@dataclass
class SplitOdeProblem:
    """Additively partitioned IVP contract: full tendency = n + s.

    ``stage_solver``, when given, computes the implicit stage value for
    (E, a_jj, dt, t_stage, cfg) and returns (g, iterations); otherwise the
    generic Newton iteration with ``jac_s`` (dense stiff Jacobian) is used.
    """

    dimension: int
    n: Callable
    s: Callable
    jac_s: Callable | None = None
    stage_solver: Callable | None = None
    exact_solution: Callable | None = None
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    n_evaluations: int = 0
    s_evaluations: int = 0

    def eval_n(self, x, t):
        self.n_evaluations += 1
        return self.n(x, t)

    def eval_s(self, x, t):
        self.s_evaluations += 1
        return self.s(x, t)


class _NewtonController:
    """Rate-weighted update test: stop when R_k * ||delta_k|| < epsilon."""

    def __init__(self, cfg: NewtonConfig):
        self.cfg = cfg
        self.rate = 1.0
        self.prev_norm: float | None = None

    def converged(self, delta_norm: float) -> bool:
        if self.prev_norm is not None and self.prev_norm > 0.0:
            self.rate = max(self.cfg.rate_floor * self.rate, delta_norm / self.prev_norm)
        self.prev_norm = delta_norm
        return self.rate * delta_norm < self.cfg.epsilon


def newton_stage(
    problem: SplitOdeProblem,
    E: np.ndarray,
    a_jj: float,
    dt: float,
    t_stage: float,
    cfg: NewtonConfig | None = None,
) -> tuple[np.ndarray, int]:
    """Solve g = E + dt a_jj s(g, t_stage) for one implicit stage.

    Returns the stage value and the number of Newton updates performed
    (reported as at least 1; a residual already at rounding level converges
    without a linear solve).
    """
    if a_jj == 0.0:
        raise ValueError("newton_stage requires a nonzero implicit diagonal entry")
    cfg = cfg or problem.newton
    eps_a = np.asarray(cfg.eps_a)
    g = np.array(E, copy=True)
    ctrl = _NewtonController(cfg)
    solves = 0
    scale = a_jj * dt
    for _ in range(cfg.max_iters):
        stiff = scale * problem.eval_s(g, t_stage)
        residual = E + stiff - g
        if residual_negligible(residual, E, stiff, g):
            return g, max(solves, 1)
        if problem.jac_s is None:
            raise NewtonError("generic Newton stage solve requires jac_s")
        M = np.eye(problem.dimension, dtype=residual.dtype) - scale * problem.jac_s(
            g, t_stage
        )
        try:
            delta = np.linalg.solve(M, residual)
        except np.linalg.LinAlgError as exc:
            raise NewtonError(f"singular stage Jacobian at t = {t_stage}") from exc
        g += delta
        solves += 1
        if ctrl.converged(wrms_norm(delta, g, cfg.eps_r, eps_a)):
            return g, solves
    raise NewtonError(
        f"stage solve did not converge in {cfg.max_iters} iterations "
        f"(last update norm {ctrl.prev_norm:.3e})"
    )


@dataclass
class StepResult:
    x: np.ndarray
    newton_iterations: int
    fsal_cache: tuple[np.ndarray, np.ndarray] | None


def imex_step(
    t: DoubleTableau,
    problem: SplitOdeProblem,
    x_m: np.ndarray,
    t_m: float,
    dt: float,
    cfg: NewtonConfig | None = None,
    fsal_cache: tuple[np.ndarray, np.ndarray] | None = None,
) -> StepResult:
    """Advance one step; stages with zero implicit diagonal are explicit.

    For first-same-as-last pairs the final stage tendencies are returned so
    the next step can reuse them as its first stage.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    cfg = cfg or problem.newton
    ex, im = t.explicit_part, t.implicit_part
    r = t.r
    x_m = np.asarray(x_m)
    n_vals = [None] * r
    s_vals = [None] * r
    total_newton = 0

    for j in range(r):
        E = np.array(x_m, copy=True)
        for k in range(j):
            if ex.A[j, k] != 0.0:
                E += (dt * ex.A[j, k]) * n_vals[k]
            if im.A[j, k] != 0.0:
                E += (dt * im.A[j, k]) * s_vals[k]
        a_jj = im.A[j, j]
        t_hat = t_m + im.c[j] * dt
        if a_jj == 0.0:
            g = E
        elif problem.stage_solver is not None:
            g, iters = problem.stage_solver(E, a_jj, dt, t_hat, cfg)
            total_newton += iters
        else:
            g, iters = newton_stage(problem, E, a_jj, dt, t_hat, cfg)
            total_newton += iters
        if j == 0 and fsal_cache is not None:
            n_vals[0], s_vals[0] = fsal_cache
        else:
            n_vals[j] = problem.eval_n(g, t_m + ex.c[j] * dt)
            s_vals[j] = problem.eval_s(g, t_hat)
        last_g = g

    # Stage reuse additionally needs a trivial first stage, so that next
    # step's first stage value is exactly x_{m+1}.
    if t.fsal and not ex.A[0].any() and not im.A[0].any():
        x_next = last_g
        cache = (n_vals[-1], s_vals[-1])
    else:
        x_next = np.array(x_m, copy=True)
        for k in range(r):
            if ex.b[k] != 0.0:
                x_next += (dt * ex.b[k]) * n_vals[k]
            if im.b[k] != 0.0:
                x_next += (dt * im.b[k]) * s_vals[k]
        cache = None
    return StepResult(x_next, total_newton, cache)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), dimension)
    newton_iterations: tuple[int, ...]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


BLOWUP_FACTOR = 1e12


def integrate(
    t: DoubleTableau,
    problem: SplitOdeProblem,
    x0: np.ndarray,
    t0: float,
    t_end: float,
    dt: float,
    cfg: NewtonConfig | None = None,
) -> Trajectory:
    """March from t0 to t_end, shortening the final step if needed.

    Aborts with :class:`BlowUpError` once the state norm exceeds 1e12 times
    the initial norm, which serves as the instability detector for empirical
    stability probes.
    """
    if dt <= 0 or t_end <= t0:
        raise ValueError("need dt > 0 and t_end > t0")
    span = t_end - t0
    steps = max(1, round(span / dt))
    if abs(steps * dt - span) > 1e-9 * span:
        steps = int(np.ceil(span / dt - 1e-12))
    x = np.array(x0, copy=True)
    times = [t0]
    states = [x.copy()]
    iter_counts = []
    norm0 = max(float(np.linalg.norm(x)), 1e-300)
    cache = None
    time = t0
    for m in range(steps):
        this_dt = min(dt, t_end - time)
        try:
            result = imex_step(t, problem, x, time, this_dt, cfg, fsal_cache=cache)
        except IntegrationError as exc:
            raise IntegrationError(f"step {m}: {exc}") from exc
        x = result.x
        cache = result.fsal_cache
        time = t0 + (m + 1) * dt if m + 1 < steps else t_end
        times.append(time)
        states.append(np.array(x, copy=True))
        iter_counts.append(result.newton_iterations)
        if float(np.linalg.norm(x)) > BLOWUP_FACTOR * norm0:
            raise BlowUpError(f"solution norm exceeded blow-up threshold at step {m}")
    return Trajectory(np.array(times), np.array(states), tuple(iter_counts))


@dataclass(frozen=True, eq=False)
class ConvergenceTable:
    """Step sizes (decreasing), max-norm errors, and the fitted slope.

    ``fitted`` marks the points used for the slope: errors above a tenth of
    the reference solution's scale sit outside the asymptotic regime and are
    excluded as saturated.
    """

    dts: np.ndarray
    errors: np.ndarray
    fitted_order: float
    fitted: np.ndarray


def convergence_study(
    t: DoubleTableau,
    problem: SplitOdeProblem,
    dts,
    t_end: float,
    cfg: NewtonConfig | None = None,
    t0: float = 0.0,
    x0: np.ndarray | None = None,
    reference_refinement: int = 256,
) -> ConvergenceTable:
    """Max-norm error at t_end per step size, with a log-log slope fit.

    Uses the problem's exact solution when available; otherwise a
    self-reference computed with the smallest step divided by
    ``reference_refinement`` (at least the required factor of 100).
    """
    dts = np.array(sorted(float(d) for d in dts), dtype=float)[::-1]
    if x0 is None:
        if problem.exact_solution is None:
            raise ValueError("convergence_study needs x0 or an exact solution")
        x0 = problem.exact_solution(t0)
    if problem.exact_solution is not None:
        reference = problem.exact_solution(t_end)
    else:
        if reference_refinement < 100:
            raise ValueError("self-reference must be at least 100x finer")
        ref_dt = dts[-1] / reference_refinement
        reference = integrate(t, problem, x0, t0, t_end, ref_dt, cfg).final
    errors = []
    for dt in dts:
        final = integrate(t, problem, x0, t0, t_end, dt, cfg).final
        errors.append(float(np.abs(final - reference).max()))
    errors = np.array(errors)
    scale = max(float(np.abs(reference).max()), 1e-300)
    mask = (errors > 0) & (errors <= 0.1 * scale)
    if mask.sum() < 2:
        mask = errors > 0
    slope, _ = np.polyfit(np.log(dts[mask]), np.log(errors[mask]), 1)
    return ConvergenceTable(dts, errors, float(slope), mask)


def _component_headers(sample: np.ndarray) -> list[str]:
    if np.iscomplexobj(sample):
        headers = []
        for k in range(sample.size):
            headers += [f"u{k}.re", f"u{k}.im"]
        return headers
    return [f"u{k}" for k in range(sample.size)]


def write_trajectory_csv(traj: Trajectory, path) -> None:
    headers = _component_headers(traj.states[0])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t," + ",".join(headers) + "\n")
        for time, state in zip(traj.times, traj.states):
            cells = [f"{time:.17g}"]
            if np.iscomplexobj(state):
                for v in state:
                    cells += [f"{v.real:.17g}", f"{v.imag:.17g}"]
            else:
                cells += [f"{v:.17g}" for v in state]
            fh.write(",".join(cells) + "\n")


def write_convergence_csv(table: ConvergenceTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("dt,error\n")
        for dt, err in zip(table.dts, table.errors):
            fh.write(f"{dt:.17g},{err:.17g}\n")
