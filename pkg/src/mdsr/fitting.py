"""Population / density inversion by damped Gauss-Newton least squares.

The three ground populations are parameterized on the simplex through a
softmax map of an unconstrained 2-vector (third logit pinned to 0), and
the density through a log-sigmoid map into its bounds, so every iterate
is feasible by construction.  The Jacobian is central finite differences
in the transformed coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .spectrum import ExperimentModel, PopulationDistribution, Spectrum, synth_spectrum

FD_STEP = 1e-6
STEP_TOL = 1e-10
RESIDUAL_DECREASE_TOL = 1e-12


@dataclass(frozen=True)
class FitProblem:
    observed: Spectrum
    model_template: ExperimentModel   # non-fitted parameters fixed
    fit_density: bool = True
    init: PopulationDistribution = None
    init_density: float = None
    density_bounds: tuple = (1e9, 1e13)  # cm^-3
    max_iterations: int = 200
    multistart: bool = True

    def __post_init__(self):
        if len(self.observed) == 0:
            raise ValueError("observed spectrum is empty")
        if self.init is None:
            object.__setattr__(self, "init", PopulationDistribution(1 / 3, 1 / 3, 1 / 3))
        if self.init_density is None:
            object.__setattr__(self, "init_density", self.model_template.n_f1)
        lo, hi = self.density_bounds
        if not (0 < lo < hi):
            raise ValueError("invalid density bounds")


@dataclass(frozen=True)
class FitResult:
    pops: PopulationDistribution
    n_f1: float
    residual_rms: float
    iterations: int
    converged: bool
    jacobian_condition: float


def _model_with_density(template: ExperimentModel, n_f1: float) -> ExperimentModel:
    return replace(template, n_f1=n_f1)


def residuals(problem: FitProblem, pops: PopulationDistribution, n_f1: float) -> np.ndarray:
    """Model transmission minus observed transmission on the observed grid."""
    model = _model_with_density(problem.model_template, n_f1)
    synth = synth_spectrum(model, pops, problem.observed.detunings)
    return synth.transmission - problem.observed.transmission


def _softmax3(u1: float, u2: float) -> np.ndarray:
    z = np.array([u1, u2, 0.0])
    z -= z.max()
    e = np.exp(z)
    return e / e.sum()


def _logits(p: np.ndarray) -> tuple:
    p = np.clip(p, 1e-12, None)
    return (np.log(p[0] / p[2]), np.log(p[1] / p[2]))


def _density_from_v(v: float, lo: float, hi: float) -> float:
    s = 1.0 / (1.0 + np.exp(-v))
    return float(np.exp(np.log(lo) + s * (np.log(hi) - np.log(lo))))


def _v_from_density(n: float, lo: float, hi: float) -> float:
    n = min(max(n, lo * (1 + 1e-12)), hi * (1 - 1e-12))
    s = (np.log(n) - np.log(lo)) / (np.log(hi) - np.log(lo))
    s = min(max(s, 1e-12), 1 - 1e-12)
    return float(np.log(s / (1 - s)))


def _gauss_newton(fun, x0: np.ndarray, max_iter: int):
    """Damped (Levenberg-style) Gauss-Newton with central-difference Jacobian.

    Accepted steps never increase the residual norm.  Returns
    (x, residual_vector, iterations, converged, jacobian_condition).
    """
    x = np.asarray(x0, dtype=float)
    r = fun(x)
    cost = float(r @ r)
    lam = 1e-3
    converged = False
    cond = np.inf
    iters = 0
    for iters in range(1, max_iter + 1):
        jac = np.empty((r.size, x.size))
        for k in range(x.size):
            dx = np.zeros_like(x)
            dx[k] = FD_STEP
            jac[:, k] = (fun(x + dx) - fun(x - dx)) / (2 * FD_STEP)
        cond = np.linalg.cond(jac) if np.any(jac) else np.inf
        jtj = jac.T @ jac
        jtr = jac.T @ r
        accepted = False
        for _ in range(40):
            try:
                step = np.linalg.solve(jtj + lam * np.diag(np.maximum(np.diag(jtj), 1e-12)), -jtr)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            r_new = fun(x + step)
            cost_new = float(r_new @ r_new)
            if cost_new <= cost:
                accepted = True
                break
            lam *= 10
        if not accepted:
            break
        x = x + step
        decrease = cost - cost_new
        r, cost = r_new, cost_new
        lam = max(lam / 10, 1e-12)
        if np.linalg.norm(step) < STEP_TOL or decrease < RESIDUAL_DECREASE_TOL:
            converged = True
            break
    return x, r, iters, converged, cond


def _starts(problem: FitProblem):
    if not problem.multistart:
        return [problem.init.as_array()]
    soft = 0.9, 0.05, 0.05
    return [
        np.array([1 / 3, 1 / 3, 1 / 3]),
        np.array([soft[0], soft[1], soft[2]]),
        np.array([soft[1], soft[0], soft[2]]),
        np.array([soft[1], soft[2], soft[0]]),
    ]


def fit_populations(problem: FitProblem) -> FitResult:
    """Least-squares inversion of the observed spectrum for populations
    (and optionally density).  Deterministic: multi-starts are fixed and
    ties within 1e-12 residual go to the lowest-index start."""
    lo, hi = problem.density_bounds

    def make_fun():
        def fun(x):
            p = _softmax3(x[0], x[1])
            n = _density_from_v(x[2], lo, hi) if problem.fit_density else problem.init_density
            return residuals(problem, PopulationDistribution(*p), n)
        return fun

    fun = make_fun()
    best = None
    for idx, p0 in enumerate(_starts(problem)):
        u1, u2 = _logits(p0)
        x0 = [u1, u2]
        if problem.fit_density:
            x0.append(_v_from_density(problem.init_density, lo, hi))
        x, r, iters, converged, cond = _gauss_newton(fun, np.array(x0), problem.max_iterations)
        cost = float(r @ r)
        if best is None or cost < best[0] - 1e-12:
            best = (cost, idx, x, r, iters, converged, cond)

    cost, _idx, x, r, iters, converged, cond = best
    p = _softmax3(x[0], x[1])
    n = _density_from_v(x[2], lo, hi) if problem.fit_density else problem.init_density
    return FitResult(
        pops=PopulationDistribution(*p),
        n_f1=n,
        residual_rms=float(np.sqrt(cost / r.size)),
        iterations=iters,
        converged=converged,
        jacobian_condition=float(cond),
    )


@dataclass(frozen=True)
class ProfilePoint:
    value: float
    residual_rms: float
    converged: bool


PROFILE_PARAMS = ("p_minus", "p_zero", "p_plus", "n_f1")


def profile_scan(problem: FitProblem, param: str, grid) -> list:
    """Residual profile over one parameter, refitting the others per point."""
    if param not in PROFILE_PARAMS:
        raise ValueError(f"unknown profile parameter {param!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("profile grid is empty")
    lo, hi = problem.density_bounds
    pos = {"p_minus": 0, "p_zero": 1, "p_plus": 2}.get(param)
    out = []
    for value in grid:
        if param == "n_f1":
            def fun(x, value=value):
                p = _softmax3(x[0], x[1])
                return residuals(problem, PopulationDistribution(*p), value)
            x0 = np.array(_logits(problem.init.as_array()))
        else:
            rest = 1.0 - value

            def fun(x, value=value, rest=rest):
                w = 1.0 / (1.0 + np.exp(-x[0]))
                p = np.empty(3)
                p[pos] = value
                others = [i for i in range(3) if i != pos]
                p[others[0]] = rest * w
                p[others[1]] = rest * (1.0 - w)
                n = _density_from_v(x[1], lo, hi) if problem.fit_density else problem.init_density
                return residuals(problem, PopulationDistribution(*p), n)

            x0 = [0.0]
            if problem.fit_density:
                x0.append(_v_from_density(problem.init_density, lo, hi))
            x0 = np.array(x0)
        _x, r, _iters, converged, _cond = _gauss_newton(fun, x0, problem.max_iterations)
        out.append(ProfilePoint(float(value), float(np.sqrt((r @ r) / r.size)), converged))
    return out
