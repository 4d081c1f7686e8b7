"""Extremal eigenvalues of Hermitian PSD matrices and Riesz bounds.

lambda_max comes from power iteration with random restarts and Rayleigh
quotients; lambda_min from power iteration on s I - G with s = lambda_max
+ 1 (no linear solves, so near-singular Grams from non-interpolating
inputs are harmless).  Both carry residual certificates ||G v - t v||;
for a Hermitian matrix the Rayleigh estimate then lies within the
residual of a true eigenvalue.  Matrices of size <= 8 are cross-checked
against a full cyclic Jacobi diagonalization automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diskgeom import BlaschkeSequence
from .kernels import GramWindow, KernelFamily, build_gram

__all__ = [
    "ExtremalEigen",
    "RieszBounds",
    "ConvergenceError",
    "jacobi_eigh",
    "extremal_eigs",
    "riesz_bounds",
]

DEFAULT_TOL = 1e-10
MAX_ITER = 100_000
RESTARTS = 3
_JACOBI_CROSSCHECK_N = 8
# Grams whose spectrum clusters tighter than the certificate tolerance make
# plain power iteration stall at the cluster width; those fall back to the
# (linear-solve-free) Jacobi diagonalization up to this size.
_JACOBI_FALLBACK_N = 512
# Stop a restart early when 400 iterations improve the residual by under
# 3 percent: any run that could still certify within max_iter decays at
# least 11 percent per span, so only cluster-floored runs are abandoned.
_STALL_SPAN = 400
_STALL_FACTOR = 0.97


class ConvergenceError(RuntimeError):
    """Power iteration failed to certify within max_iter; carries the best
    iterate found."""

    def __init__(self, message: str, best_value: float, best_residual: float,
                 iterations: int) -> None:
        super().__init__(message)
        self.best_value = best_value
        self.best_residual = best_residual
        self.iterations = iterations


@dataclass(frozen=True)
class ExtremalEigen:
    lambda_min: float
    lambda_max: float
    residual_min: float
    residual_max: float
    iterations: int
    fallback: bool = False


def jacobi_eigh(a: np.ndarray, tol: float = 1e-13,
                max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns (eigenvalues ascending, unitary V) with a = V diag V*.  Complex
    rotations: the (p, q) plane rotation absorbs the phase of a_pq and then
    applies the classical symmetric Jacobi angle.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    v = np.eye(n, dtype=complex)
    if n == 1:
        return np.array([a[0, 0].real]), v

    scale = max(float(np.linalg.norm(a)), 1.0)
    mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        # measured on the off-diagonal entries themselves; subtracting the
        # diagonal mass from the total cancels below sqrt(eps) * ||A||
        off = float(np.linalg.norm(a[mask]))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                phase = apq / abs(apq)
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * abs(apq))
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # columns: [p, q] <- [c*p - s*conj(phase) q, s*phase*p + c*q]
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * np.conj(phase) * cq
                a[:, q] = s * phase * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * phase * rq
                a[q, :] = s * np.conj(phase) * rp + c * rq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(phase) * vq
                v[:, q] = s * phase * vp + c * vq
    w = np.real(np.diag(a))
    order = np.argsort(w)
    return w[order], v[:, order]


def _power_top(a: np.ndarray, tol: float, max_iter: int, restarts: int,
               rng: np.random.Generator) -> tuple[float, float, int, bool]:
    """Largest eigenvalue of a Hermitian PSD matrix by power iteration.

    Returns (value, residual, iterations, converged).  A restart is
    abandoned once its residual stalls (cluster floor reached).
    """
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0].real), 0.0, 0, True
    best_val, best_res = 0.0, math.inf
    total = 0
    for _ in range(restarts):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        stall_mark = math.inf
        stalled = False
        for it in range(max_iter):
            total += 1
            w = a @ v
            lam = float(np.real(np.vdot(v, w)))
            res = float(np.linalg.norm(w - lam * v))
            if res < best_res:
                best_val, best_res = lam, res
            if res <= tol:
                return lam, res, total, True
            if it % _STALL_SPAN == _STALL_SPAN - 1:
                if res > _STALL_FACTOR * stall_mark:
                    stalled = True
                    break
                stall_mark = res
            nw = np.linalg.norm(w)
            if nw == 0.0:  # v in the kernel; the matrix restricted there is 0
                return 0.0, 0.0, total, True
            v = w / nw
        if stalled:
            # the residual floor is a property of the spectrum, not of the
            # start vector; more restarts cannot help
            break
    return best_val, best_res, total, False


def extremal_eigs(gram: GramWindow | np.ndarray, tol: float = DEFAULT_TOL,
                  seed: int = 0, max_iter: int = MAX_ITER,
                  restarts: int = RESTARTS) -> ExtremalEigen:
    """Extremal eigenvalues of a Hermitian PSD matrix with certificates.

    lambda_min is found by running the same iteration on the spectrum
    reflected about s = lambda_max + 1.  For n <= 8 the result is
    cross-checked against jacobi_eigh and a disagreement beyond
    max(100 tol, 1e-8) raises ConvergenceError.

    When the spectrum clusters tighter than tol (deep thin windows), the
    power residual floors at the cluster width; the computation then falls
    back to the full Jacobi diagonalization (still no linear solves) and the
    returned certificates are the Ritz residuals of its extremal vectors.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    a = gram.matrix if isinstance(gram, GramWindow) else np.asarray(gram, dtype=complex)
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    if n == 1:
        lam = float(a[0, 0].real)
        return ExtremalEigen(lam, lam, 0.0, 0.0, 0)

    lam_max, res_max, it1, ok_max = _power_top(a, tol, max_iter, restarts, rng)
    shift = lam_max + 1.0
    b = shift * np.eye(n, dtype=complex) - a
    mu, res_min, it2, ok_min = _power_top(b, tol, max_iter, restarts, rng)
    lam_min = min(shift - mu, lam_max)
    fallback = False

    if not (ok_max and ok_min):
        if n > _JACOBI_FALLBACK_N:
            raise ConvergenceError(
                f"power iteration stalled at residuals ({res_max:.3e}, {res_min:.3e}) "
                f"after {it1 + it2} steps and the matrix is too large for the "
                "Jacobi fallback",
                best_value=lam_max, best_residual=max(res_max, res_min),
                iterations=it1 + it2)
        w, v = jacobi_eigh(a)
        lam_min, lam_max = float(w[0]), float(w[-1])
        res_min = float(np.linalg.norm(a @ v[:, 0] - lam_min * v[:, 0]))
        res_max = float(np.linalg.norm(a @ v[:, -1] - lam_max * v[:, -1]))
        fallback = True
        if max(res_min, res_max) > tol:
            raise ConvergenceError(
                f"Jacobi fallback residuals ({res_max:.3e}, {res_min:.3e}) "
                f"exceed tol {tol:.1e}",
                best_value=lam_max, best_residual=max(res_max, res_min),
                iterations=it1 + it2)
        return ExtremalEigen(lambda_min=lam_min, lambda_max=lam_max,
                             residual_min=res_min, residual_max=res_max,
                             iterations=it1 + it2, fallback=True)

    if n <= _JACOBI_CROSSCHECK_N:
        w, _ = jacobi_eigh(a)
        gate = max(100.0 * tol, 1e-8) * max(1.0, abs(w[-1]))
        if abs(lam_max - w[-1]) > gate or abs(lam_min - w[0]) > gate:
            raise ConvergenceError(
                "power iteration disagrees with Jacobi cross-check: "
                f"max {lam_max} vs {w[-1]}, min {lam_min} vs {w[0]}",
                best_value=lam_max, best_residual=res_max,
                iterations=it1 + it2)
    return ExtremalEigen(lambda_min=lam_min, lambda_max=lam_max,
                         residual_min=res_min, residual_max=res_max,
                         iterations=it1 + it2, fallback=fallback)


@dataclass(frozen=True)
class RieszBounds:
    """Sharp frame bounds of the window: c_N = lambda_min, C_N = lambda_max
    of the normalized-kernel Gram, with truncation certificate.  The true
    tail constants satisfy c >= c_N - certificate and C <= C_N + certificate;
    aob_gap = ||G - I|| = max(C_N - 1, 1 - c_N) diagnoses the
    identity-plus-compact behaviour along N."""

    start: int
    stop: int
    c: float
    C: float
    certificate: float
    eigen: ExtremalEigen
    gram: GramWindow

    @property
    def aob_gap(self) -> float:
        return max(self.C - 1.0, 1.0 - self.c)


def riesz_bounds(family: KernelFamily, seq: BlaschkeSequence, start: int,
                 stop: int, tol: float = DEFAULT_TOL, seed: int = 0) -> RieszBounds:
    gram = build_gram(family, seq, start, stop)
    eig = extremal_eigs(gram, tol=tol, seed=seed)
    return RieszBounds(start=start, stop=stop, c=eig.lambda_min,
                       C=eig.lambda_max, certificate=gram.truncation_certificate,
                       eigen=eig, gram=gram)
