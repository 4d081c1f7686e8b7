"""Minimal-norm interpolation and the iterative approximate-solver loop.

Targets are always normalized-kernel targets: a solution f satisfies
<f, k_{lambda_n}> = a_n, i.e. f(lambda_n) ||K_{lambda_n}||^{-1} = a_n.
The minimal-norm solution over a window lies in the span of the window's
normalized kernels, with coefficients solving G c = a and squared norm
a* c.  Gram systems are solved by conjugate gradients on the PSD matrix,
falling back to a full Jacobi eigendecomposition for n <= 8.

The iterative solver accepts any callable honouring the approximate
interpolation contract (given targets a, return coefficients g with
||g|| <= ||a|| and value residual <= eps/(1+eps) ||a||); it accumulates
the corrections into an exact interpolant of norm at most
(1 + eps) ||a|| plus solver tolerance, recording per-step decay.

Single-threaded per solve; distinct solves on immutable inputs may run
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .diskgeom import BlaschkeSequence, one_minus_sq
from .inner import InnerFunction, tail_kappa
from .kernels import (
    GramWindow,
    KernelCombination,
    KernelFamily,
    build_gram,
    model_family,
)
from .spectral import extremal_eigs, jacobi_eigh

__all__ = [
    "InterpolationProblem",
    "MinNormSolution",
    "IterationTrace",
    "TraceStep",
    "TransferResult",
    "NearSingularError",
    "SolverContractViolation",
    "min_norm_interpolant",
    "eis_constant",
    "EisConstant",
    "iterative_solve",
    "exact_solver",
    "scaled_solver",
    "h2_to_model_transfer",
]

_SMALL_N = 8


class NearSingularError(RuntimeError):
    """Gram window is numerically singular (non-interpolating input)."""

    def __init__(self, message: str, lambda_min: float) -> None:
        super().__init__(message)
        self.lambda_min = lambda_min


class SolverContractViolation(RuntimeError):
    """The injected approximate solver broke its norm or residual bound."""

    def __init__(self, message: str, step: int) -> None:
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class InterpolationProblem:
    """Normalized-kernel targets a_n over the window [start, stop]."""

    family: KernelFamily
    seq: BlaschkeSequence
    start: int
    stop: int
    targets: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.targets, dtype=complex)
        if t.ndim != 1 or len(t) != self.stop - self.start + 1:
            raise ValueError("targets must match the window length")
        if not np.all(np.isfinite(t.view(float))):
            raise ValueError("targets must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "targets", t)

    def gram(self) -> GramWindow:
        return build_gram(self.family, self.seq, self.start, self.stop)

    def combination(self, coeffs: np.ndarray) -> KernelCombination:
        g, a = self.seq.window(self.start, self.stop)
        return KernelCombination(family=self.family, gaps=g, args=a,
                                 coeffs=np.asarray(coeffs, dtype=complex),
                                 normalized=True)


def _solve_psd(mat: np.ndarray, rhs: np.ndarray, tol: float,
               lambda_min_hint: float | None = None) -> np.ndarray:
    """Solve the Hermitian PSD system to relative residual tol."""
    n = mat.shape[0]
    if n <= _SMALL_N:
        w, v = jacobi_eigh(mat)
        if w[0] <= 0.0:
            raise NearSingularError(
                f"Gram window numerically singular (lambda_min = {w[0]:.3e})",
                lambda_min=float(w[0]))
        return v @ ((v.conj().T @ rhs) / w)

    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        return np.zeros_like(rhs)
    x = np.zeros_like(rhs)
    r = rhs.copy()
    p = r.copy()
    rs = float(np.real(np.vdot(r, r)))
    limit = 20 * n + 100
    for _ in range(limit):
        if math.sqrt(rs) <= tol * rhs_norm:
            break
        ap = mat @ p
        denom = float(np.real(np.vdot(p, ap)))
        if denom <= 0.0:
            lam = lambda_min_hint if lambda_min_hint is not None else 0.0
            raise NearSingularError(
                "conjugate gradients broke down on a non-PSD direction "
                f"(lambda_min ~ {lam:.3e})", lambda_min=lam)
        alpha = rs / denom
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = float(np.real(np.vdot(r, r)))
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x


@dataclass(frozen=True)
class MinNormSolution:
    coeffs: np.ndarray
    norm: float
    residual: float
    lambda_min: float


def min_norm_interpolant(problem: InterpolationProblem, tol: float = 1e-10,
                         seed: int = 0) -> MinNormSolution:
    """Minimal-norm interpolant of the window targets.

    Solves G c = a; the returned norm is sqrt(a* c) and satisfies
    ||a||/sqrt(lambda_max) <= norm <= ||a||/sqrt(lambda_min).  Raises
    NearSingularError (with the lambda_min report) when the window Gram
    is not invertible at the requested tolerance.
    """
    gram = problem.gram()
    a = problem.targets
    a_norm = float(np.linalg.norm(a))
    eig = extremal_eigs(gram, tol=min(tol, 1e-10), seed=seed)
    if eig.lambda_min <= tol:
        raise NearSingularError(
            f"Gram window near-singular: lambda_min = {eig.lambda_min:.3e} <= tol",
            lambda_min=eig.lambda_min)
    if a_norm == 0.0:
        z = np.zeros_like(a)
        return MinNormSolution(coeffs=z, norm=0.0, residual=0.0,
                               lambda_min=eig.lambda_min)
    c = _solve_psd(gram.matrix, a, tol, lambda_min_hint=eig.lambda_min)
    resid = float(np.linalg.norm(gram.matrix @ c - a))
    if resid > tol * a_norm:
        c = c + _solve_psd(gram.matrix, a - gram.matrix @ c, tol,
                           lambda_min_hint=eig.lambda_min)
        resid = float(np.linalg.norm(gram.matrix @ c - a))
    norm_sq = float(np.real(np.vdot(a, c)))
    return MinNormSolution(coeffs=c, norm=math.sqrt(max(norm_sq, 0.0)),
                           residual=resid, lambda_min=eig.lambda_min)


@dataclass(frozen=True)
class EisConstant:
    """Best uniform interpolation constant over unit targets on the window:
    1/sqrt(lambda_min) of the window Gram, with upward error bar."""

    value: float
    err: float
    lambda_min: float


def eis_constant(family: KernelFamily, seq: BlaschkeSequence, start: int,
                 stop: int, tol: float = 1e-10, seed: int = 0) -> EisConstant:
    gram = build_gram(family, seq, start, stop)
    eig = extremal_eigs(gram, tol=tol, seed=seed)
    if eig.lambda_min <= tol:
        raise NearSingularError(
            f"window Gram near-singular: lambda_min = {eig.lambda_min:.3e}",
            lambda_min=eig.lambda_min)
    value = 1.0 / math.sqrt(eig.lambda_min)
    dlam = eig.residual_min + gram.truncation_certificate
    lo = max(eig.lambda_min - dlam, np.finfo(float).tiny)
    return EisConstant(value=value, err=1.0 / math.sqrt(lo) - value,
                       lambda_min=eig.lambda_min)


# ---------------------------------------------------------------------------
# Iterative correction loop
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    k: int
    target_norm: float
    f_norm: float
    residual_after: float


@dataclass(frozen=True)
class IterationTrace:
    steps: tuple[TraceStep, ...]
    final_norm: float
    final_residual: float


ApproxSolver = Callable[[np.ndarray], np.ndarray]


def exact_solver(problem: InterpolationProblem, tol: float = 1e-12,
                 seed: int = 0) -> ApproxSolver:
    """The exact min-norm solver as an approximate-solver contract."""

    gram = problem.gram()
    eig = extremal_eigs(gram, tol=min(tol, 1e-10), seed=seed)
    if eig.lambda_min <= tol:
        raise NearSingularError("window not invertible", lambda_min=eig.lambda_min)

    def solve(a: np.ndarray) -> np.ndarray:
        return _solve_psd(gram.matrix, np.asarray(a, dtype=complex), tol,
                          lambda_min_hint=eig.lambda_min)

    return solve


def scaled_solver(problem: InterpolationProblem, rel_residual: float,
                  tol: float = 1e-12, seed: int = 0) -> ApproxSolver:
    """Min-norm solver with an injected relative value residual: returns the
    exact solution scaled by (1 - rel_residual), so each call leaves a
    residual of exactly rel_residual times the incoming target norm."""
    if not (0.0 <= rel_residual < 1.0):
        raise ValueError("rel_residual must lie in [0, 1)")
    base = exact_solver(problem, tol=tol, seed=seed)

    def solve(a: np.ndarray) -> np.ndarray:
        return (1.0 - rel_residual) * base(a)

    return solve


def iterative_solve(problem: InterpolationProblem, approx: ApproxSolver,
                    epsilon: float, max_iter: int = 200, tol: float = 1e-10,
                    seed: int = 0) -> tuple[MinNormSolution, IterationTrace]:
    """Accumulate approximate solves into an exact interpolant.

    The contract for `approx`: given targets a it returns window
    coefficients g over normalized kernels with ||g|| <= ||a|| and
    ||values(g) - a|| <= eps/(1+eps) ||a||.  Violations raise
    SolverContractViolation identifying the step.  On success the summed
    solution F interpolates the original targets to tol * ||a|| and
    ||F|| <= (1 + eps) ||a|| + tol.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie in (0, 1)")
    gram = problem.gram()
    mat = gram.matrix
    ratio = epsilon / (1.0 + epsilon)
    a0_norm = float(np.linalg.norm(problem.targets))
    total = np.zeros_like(problem.targets)
    if a0_norm == 0.0:
        return (MinNormSolution(coeffs=total, norm=0.0, residual=0.0,
                                lambda_min=math.nan),
                IterationTrace(steps=(), final_norm=0.0, final_residual=0.0))

    # float slack on the contract checks; the per-step ratio bound itself
    # cannot be exact in binary arithmetic
    slack = 1.0 + 1e-9
    a = problem.targets.copy()
    steps: list[TraceStep] = []
    for k in range(max_iter):
        a_norm = float(np.linalg.norm(a))
        if a_norm <= tol * a0_norm:
            break
        c = np.asarray(approx(a), dtype=complex)
        f_norm = math.sqrt(max(float(np.real(np.vdot(c, mat @ c))), 0.0))
        if f_norm > a_norm * slack:
            raise SolverContractViolation(
                f"step {k}: ||g|| = {f_norm:.6e} exceeds ||a|| = {a_norm:.6e}",
                step=k)
        values = mat @ c
        resid = a - values
        r_norm = float(np.linalg.norm(resid))
        if r_norm > ratio * a_norm * slack:
            raise SolverContractViolation(
                f"step {k}: residual {r_norm:.6e} exceeds "
                f"eps/(1+eps) ||a|| = {ratio * a_norm:.6e}", step=k)
        total = total + c
        steps.append(TraceStep(k=k, target_norm=a_norm, f_norm=f_norm,
                               residual_after=r_norm))
        a = resid
    final_residual = float(np.linalg.norm(mat @ total - problem.targets))
    if final_residual > tol * a0_norm:
        raise SolverContractViolation(
            f"no convergence in {max_iter} steps: residual {final_residual:.3e}",
            step=max_iter)
    final_norm = math.sqrt(max(float(np.real(np.vdot(total, mat @ total))), 0.0))
    return (MinNormSolution(coeffs=total, norm=final_norm,
                            residual=final_residual, lambda_min=math.nan),
            IterationTrace(steps=tuple(steps), final_norm=final_norm,
                           final_residual=final_residual))


# ---------------------------------------------------------------------------
# Hardy -> model space transfer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransferResult:
    """Model-space solution obtained by solving the rescaled Hardy problem
    and projecting.  residual is the achieved model-target mismatch;
    residual_bound is the a-priori estimate
    kappa/sqrt(1-kappa^2) sqrt(lambda_max) ||f0|| + tol ||a||."""

    coeffs: np.ndarray  # over normalized model kernels
    residual: float
    residual_bound: float
    kappa: float
    hardy_norm: float
    degraded: bool


def h2_to_model_transfer(problem: InterpolationProblem, theta: InnerFunction,
                         tol: float = 1e-10, seed: int = 0) -> TransferResult:
    """Solve a model-space interpolation problem through the Hardy space.

    The Hardy targets are a_n (1 - |theta(lambda_n)|^2)^{1/2}; the solution
    is projected onto the model space, which multiplies the normalized
    coefficients by (1 - |theta(lambda_n)|^2)^{1/2} again.  When theta
    vanishes on the window the transfer is exact; otherwise the residual
    is of order kappa_N.
    """
    if problem.family.is_model:
        raise ValueError("transfer starts from a Hardy-family problem")
    g, arr = problem.seq.window(problem.start, problem.stop)
    tnorm = theta.one_minus_mod_sq_many(g, arr)
    _, _, thigh = theta.eval_many(g, arr)
    kappa = float(thigh.max())
    if kappa >= 1.0:
        raise ValueError("kappa >= 1 on the window; transfer impossible")
    degraded = kappa > 0.999

    scale = np.sqrt(tnorm)
    hardy_problem = InterpolationProblem(
        family=problem.family, seq=problem.seq, start=problem.start,
        stop=problem.stop, targets=problem.targets * scale)
    sol = min_norm_interpolant(hardy_problem, tol=tol, seed=seed)

    # P_T(sum c_j k_j) has normalized model coefficients c_j sqrt(1-|T_j|^2)
    model_coeffs = sol.coeffs * scale
    fam = model_family(theta)
    mgram = build_gram(fam, problem.seq, problem.start, problem.stop)
    model_values = mgram.matrix @ model_coeffs
    residual = float(np.linalg.norm(model_values - problem.targets))

    hgram = build_gram(problem.family, problem.seq, problem.start, problem.stop)
    heig = extremal_eigs(hgram, tol=tol, seed=seed)
    a_norm = float(np.linalg.norm(problem.targets))
    bound = (kappa / math.sqrt(1.0 - kappa * kappa)
             * math.sqrt(heig.lambda_max) * sol.norm + tol * a_norm)
    return TransferResult(coeffs=model_coeffs, residual=residual,
                          residual_bound=bound, kappa=kappa,
                          hardy_norm=sol.norm, degraded=degraded)
