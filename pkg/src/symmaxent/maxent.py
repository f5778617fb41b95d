"""Constrained maximum-entropy estimation.

Given expectation-value constraints Tr(A_i rho) = a_i (plus optional
auxiliary symmetry constraints with target zero), the entropy-maximizing
state is the Gibbs form

    rho(lambda) = exp(sum_i lambda_i A_i) / Z,

and the multipliers are fixed by driving the squared constraint mismatch

    f(lambda) = sum_i (Tr(A_i rho(lambda)) - a_i)^2

to zero. The exponent is always Hermitian, so rho is evaluated by
eigendecomposition with the spectrum shifted by its top eigenvalue before
exponentiation; the shift cancels against the normalization and prevents
overflow when constraints push the state toward purity (diverging
multipliers).

The derivative of an expectation with respect to a multiplier runs through
the directional derivative of the matrix exponential, evaluated in the
eigenbasis with the divided-difference kernel

    Phi_ab = (e^{w_a} - e^{w_b}) / (w_a - w_b),   Phi_aa = e^{w_a}.

Three update rules are available: plain gradient descent with a fixed step,
gradient descent with Armijo backtracking (the default; the trial step is
grown after each accepted iteration, which is what makes the near-pure tail
tractable), and a damped Newton update that solves
(C + mu I) delta = -(residuals) with C the constraint susceptibility matrix.
The Newton direction is always a descent direction for f, every rule accepts
a step only if it satisfies the Armijo decrease test, and all rules stop
early when no acceptable step exists (stalled on an infeasible target set).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import HermitianOperator
from .states import DensityMatrix

STEP_RULES = ("fixed", "backtracking", "newton")
LAMBDA_INITS = ("zeros", "supplied")

# Eigenvalue gaps below this use the confluent limit of the divided
# difference (removes the 0/0).
DEGENERATE_GAP = 1e-12


@dataclass(frozen=True, eq=False)
class MaxEntProblem:
    """Measured observables with targets, plus auxiliary observables whose
    targets are implicitly zero."""

    measured: tuple[tuple[HermitianOperator, float], ...]
    auxiliary: tuple[HermitianOperator, ...]
    dim: int

    def __post_init__(self):
        object.__setattr__(
            self,
            "measured",
            tuple((op, float(t)) for op, t in self.measured),
        )
        object.__setattr__(self, "auxiliary", tuple(self.auxiliary))
        for op, t in self.measured:
            if op.dim != self.dim:
                raise ValueError(f"measured observable {op.label!r} has dim {op.dim}")
            if not np.isfinite(t):
                raise ValueError(f"target for {op.label!r} is not finite")
        for op in self.auxiliary:
            if op.dim != self.dim:
                raise ValueError(f"auxiliary observable {op.label!r} has dim {op.dim}")

    @property
    def n_constraints(self) -> int:
        return len(self.measured) + len(self.auxiliary)

    def operator_stack(self) -> np.ndarray:
        """(K, dim, dim) array of measured then auxiliary operators."""
        ops = [op.matrix for op, _ in self.measured] + [op.matrix for op in self.auxiliary]
        if not ops:
            return np.zeros((0, self.dim, self.dim), dtype=complex)
        return np.array(ops)

    def target_vector(self) -> np.ndarray:
        return np.array(
            [t for _, t in self.measured] + [0.0] * len(self.auxiliary), dtype=float
        )


@dataclass(frozen=True)
class SolverOptions:
    """Iteration controls; defaults are echoed into every result file so runs
    stay comparable."""

    tolerance: float = 1e-10
    max_iterations: int = 20000
    step_rule: str = "backtracking"
    step_init: float = 1.0
    step_shrink: float = 0.5
    step_growth: float = 2.0
    armijo_c: float = 1e-4
    min_step: float = 1e-14
    lambda_init: str = "zeros"
    lambda0: tuple[float, ...] | None = None
    record_history: bool = False

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"unknown step_rule {self.step_rule!r}")
        if self.lambda_init not in LAMBDA_INITS:
            raise ValueError(f"unknown lambda_init {self.lambda_init!r}")
        if self.lambda_init == "supplied" and self.lambda0 is None:
            raise ValueError("lambda_init='supplied' requires lambda0")


@dataclass(frozen=True, eq=False)
class MaxEntSolution:
    rho: DensityMatrix
    lambdas: np.ndarray
    objective: float
    iterations: int
    converged: bool
    history: tuple[float, ...] | None = None

    def to_jsonable(self) -> dict:
        from .observables import matrix_to_jsonable

        return {
            "rho": matrix_to_jsonable(self.rho.matrix),
            "lambdas": [float(x) for x in self.lambdas],
            "objective": float(self.objective),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }


class _Workspace:
    """Precomputed constraint arrays plus the per-lambda Gibbs evaluation."""

    def __init__(self, problem: MaxEntProblem):
        self.dim = problem.dim
        self.A = problem.operator_stack()
        self.K = self.A.shape[0]
        self.A_flat = self.A.reshape(self.K, self.dim * self.dim)
        self.targets = problem.target_vector()

    def gibbs(self, lambdas: np.ndarray):
        """rho(lambda) together with its shifted eigensystem."""
        h = np.tensordot(lambdas, self.A, axes=1)
        w, v = np.linalg.eigh(h)
        w_shifted = w - w[-1]
        expw = np.exp(w_shifted)
        z = expw.sum()
        rho = (v * expw) @ v.conj().T / z
        return rho, w_shifted, v, expw, z

    def evaluate(self, lambdas: np.ndarray):
        """(f, expectations, residuals, gibbs state tuple)."""
        state = self.gibbs(lambdas)
        rho = state[0]
        g = (self.A_flat @ rho.T.ravel()).real
        r = g - self.targets
        return float(r @ r), g, r, state

    def gradient(self, g: np.ndarray, r: np.ndarray, state) -> np.ndarray:
        """df/dlambda without forming the full susceptibility matrix.

        Uses the symmetry of the divided-difference kernel to contract the
        residual-weighted operator sum R = sum_i r_i A_i through the
        exponential derivative once, instead of once per constraint.
        """
        rho, w, v, expw, z = state
        rmat = np.tensordot(r, self.A, axes=1)
        rtil = v.conj().T @ rmat @ v
        phi = _divided_difference_kernel(w, expw)
        wmat = v @ (rtil * phi) @ v.conj().T / z
        tr_part = (self.A_flat @ wmat.T.ravel()).real
        return 2.0 * (tr_part - (r @ g) * g)

    def susceptibility(self, g: np.ndarray, state) -> np.ndarray:
        """C_ij = d<A_i>/dlambda_j: symmetric PSD; the Newton system matrix."""
        rho, w, v, expw, z = state
        atil = np.matmul(np.matmul(v.conj().T[None, :, :], self.A), v)
        phi = _divided_difference_kernel(w, expw)
        m = atil * phi[None, :, :]
        c = (atil.reshape(self.K, -1) @ m.conj().reshape(self.K, -1).T).real / z
        c -= np.outer(g, g)
        return (c + c.T) / 2.0


def _divided_difference_kernel(w: np.ndarray, expw: np.ndarray) -> np.ndarray:
    d = w[:, None] - w[None, :]
    degenerate = np.abs(d) < DEGENERATE_GAP
    d_safe = np.where(degenerate, 1.0, d)
    return np.where(
        degenerate,
        expw[:, None] * np.ones_like(d),
        (expw[:, None] - expw[None, :]) / d_safe,
    )


def _initial_lambdas(problem: MaxEntProblem, options: SolverOptions) -> np.ndarray:
    if options.lambda_init == "zeros":
        return np.zeros(problem.n_constraints)
    lam = np.asarray(options.lambda0, dtype=float)
    if lam.shape != (problem.n_constraints,):
        raise ValueError(
            f"lambda0 has shape {lam.shape}, expected ({problem.n_constraints},)"
        )
    if not np.all(np.isfinite(lam)):
        raise ValueError("lambda0 must be finite")
    return lam.copy()


def rho_of_lambda(problem: MaxEntProblem, lambdas) -> DensityMatrix:
    """The Gibbs state exp(sum lambda_i A_i)/Z for the problem's operators."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (problem.n_constraints,):
        raise ValueError(f"expected {problem.n_constraints} multipliers, got {lam.shape}")
    if not np.all(np.isfinite(lam)):
        raise ValueError("multipliers must be finite")
    ws = _Workspace(problem)
    if ws.K == 0:
        n = problem.dim.bit_length() - 1
        return DensityMatrix(np.eye(problem.dim) / problem.dim, n)
    rho = ws.gibbs(lam)[0]
    n = problem.dim.bit_length() - 1
    return DensityMatrix((rho + rho.conj().T) / 2.0, n)


def objective(problem: MaxEntProblem, lambdas) -> float:
    """Sum of squared constraint mismatches at the given multipliers."""
    lam = np.asarray(lambdas, dtype=float)
    ws = _Workspace(problem)
    if ws.K == 0:
        return 0.0
    return ws.evaluate(lam)[0]


def gradient(problem: MaxEntProblem, lambdas) -> np.ndarray:
    """Analytic gradient of :func:`objective`; matches central finite
    differences to relative 1e-5."""
    lam = np.asarray(lambdas, dtype=float)
    ws = _Workspace(problem)
    if ws.K == 0:
        return np.zeros(0)
    _, g, r, state = ws.evaluate(lam)
    return ws.gradient(g, r, state)


def susceptibility(problem: MaxEntProblem, lambdas) -> np.ndarray:
    """Full matrix of expectation derivatives d<A_i>/dlambda_j."""
    lam = np.asarray(lambdas, dtype=float)
    ws = _Workspace(problem)
    if ws.K == 0:
        return np.zeros((0, 0))
    _, g, _, state = ws.evaluate(lam)
    return ws.susceptibility(g, state)


def solve(problem: MaxEntProblem, options: SolverOptions = SolverOptions()) -> MaxEntSolution:
    """Fit the multipliers until the objective drops below tolerance.

    Returns converged=False (with the best iterate found) when the iteration
    budget runs out or no acceptable step remains; infeasible targets, for
    example estimates taken from noisy counts, stall at the least-squares
    optimum rather than raising.
    """
    ws = _Workspace(problem)
    n = problem.dim.bit_length() - 1
    if ws.K == 0:
        rho = DensityMatrix(np.eye(problem.dim) / problem.dim, n)
        hist = (0.0,) if options.record_history else None
        return MaxEntSolution(rho, np.zeros(0), 0.0, 0, True, hist)

    lam = _initial_lambdas(problem, options)
    f, g, r, state = ws.evaluate(lam)
    history = [f] if options.record_history else None

    best_f, best_lam, best_state = f, lam.copy(), state
    iterations = 0
    step = options.step_init
    mu = 1e-8

    while f >= options.tolerance and iterations < options.max_iterations:
        if options.step_rule == "newton":
            moved = _newton_step(ws, lam, f, g, r, state, options, mu)
        else:
            moved = _gradient_step(ws, lam, f, g, r, state, options, step)
        if moved is None:
            break
        lam, f, g, r, state, step, mu = moved
        iterations += 1
        if history is not None:
            history.append(f)
        if f < best_f:
            best_f, best_lam, best_state = f, lam.copy(), state

    rho_raw = best_state[0]
    rho = DensityMatrix((rho_raw + rho_raw.conj().T) / 2.0, n)
    return MaxEntSolution(
        rho=rho,
        lambdas=best_lam,
        objective=best_f,
        iterations=iterations,
        converged=bool(best_f < options.tolerance),
        history=tuple(history) if history is not None else None,
    )


def _gradient_step(ws, lam, f, g, r, state, options, step):
    grad = ws.gradient(g, r, state)
    descent = -(grad @ grad)
    if descent >= 0.0 or not np.isfinite(descent):
        return None
    if options.step_rule == "fixed":
        lam_new = lam - options.step_init * grad
        f_new, g_new, r_new, state_new = ws.evaluate(lam_new)
        if not np.isfinite(f_new):
            return None
        return lam_new, f_new, g_new, r_new, state_new, options.step_init, 1e-8

    trial = step * options.step_growth
    while trial >= options.min_step:
        lam_new = lam - trial * grad
        f_new, g_new, r_new, state_new = ws.evaluate(lam_new)
        if np.isfinite(f_new) and f_new <= f + options.armijo_c * trial * descent:
            return lam_new, f_new, g_new, r_new, state_new, trial, 1e-8
        trial *= options.step_shrink
    return None


def _newton_step(ws, lam, f, g, r, state, options, mu):
    c = ws.susceptibility(g, state)
    scale = max(float(np.trace(c)) / ws.K, 1e-300)
    grad = 2.0 * (c @ r)
    eye = np.eye(ws.K)
    for _ in range(60):
        try:
            delta = -np.linalg.solve(c + mu * scale * eye, r)
        except np.linalg.LinAlgError:
            mu *= 10.0
            continue
        descent = float(grad @ delta)
        if descent >= 0.0 or not np.isfinite(descent):
            mu *= 10.0
            continue
        f_new, g_new, r_new, state_new = ws.evaluate(lam + delta)
        if np.isfinite(f_new) and f_new <= f + options.armijo_c * descent:
            return (
                lam + delta,
                f_new,
                g_new,
                r_new,
                state_new,
                options.step_init,
                max(mu * 0.3, 1e-12),
            )
        mu *= 10.0
    return None
