"""Szego and model-space reproducing kernels, Gram windows, projections.

Conventions.  All pairwise inner products are produced by one formula
family so that the model quantities collapse exactly to the Hardy ones
when theta vanishes at the points involved:

    szego_inner(l, m) = sqrt((1-|l|^2)(1-|m|^2)) / (1 - conj(l) m)
    model_inner(l, m) = (1 - conj(T(l)) T(m)) / (1 - conj(l) m) / norms

Gram matrices are assembled with entries G[i][j] = <k_j, k_i> (linear in
the first slot), the orientation for which the quadratic form c* G c is
the squared norm of sum c_j k_j and (G c)_m is <sum c_j k_j, k_m>.  G is
the matrix of the analysis operator f -> (<f, k_j>)_j composed with its
adjoint, so its extremal eigenvalues are the sharp frame bounds.

Norms of kernel combinations are always computed through these Gram
forms, never by grid integration.  Everything is pure and immutable
after construction; Gram assembly is vectorized over entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diskgeom import (
    BlaschkeSequence,
    GapPoint,
    as_point,
    one_minus_conj_prod,
    one_minus_sq,
)
from .inner import InnerFunction

__all__ = [
    "KernelFamily",
    "GramWindow",
    "KernelCombination",
    "ProjectionPair",
    "hardy_family",
    "model_family",
    "szego_inner",
    "szego_kernel",
    "model_kernel",
    "model_inner",
    "model_norm_sq",
    "build_gram",
    "project_model",
    "DegenerateKernelError",
]


class DegenerateKernelError(RuntimeError):
    """|theta| = 1 at an interior point; impossible for a valid inner
    function, so it signals a broken theta."""


@dataclass(frozen=True)
class KernelFamily:
    """Hardy-space kernels, or model-space kernels for an inner theta."""

    kind: str  # "hardy" | "model"
    theta: InnerFunction | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("hardy", "model"):
            raise ValueError(f"unknown kernel family {self.kind!r}")
        if self.kind == "model" and self.theta is None:
            raise ValueError("model family requires a nonconstant inner function")

    @property
    def is_model(self) -> bool:
        return self.kind == "model"


def hardy_family() -> KernelFamily:
    return KernelFamily(kind="hardy")


def model_family(theta: InnerFunction) -> KernelFamily:
    return KernelFamily(kind="model", theta=theta)


# ---------------------------------------------------------------------------
# Scalar kernel values
# ---------------------------------------------------------------------------

def szego_kernel(l, z) -> complex:
    """Unnormalized Szego kernel K_l(z) = 1 / (1 - conj(l) z)."""
    p, q = as_point(l), as_point(z)
    return 1.0 / complex(one_minus_conj_prod(p.gap, p.arg, q.gap, q.arg))


def szego_inner(l, m) -> complex:
    """Normalized kernel inner product
    sqrt((1-|l|^2)(1-|m|^2)) / (1 - conj(l) m), computed gap-aware."""
    p, q = as_point(l), as_point(m)
    num = np.sqrt(p.one_minus_sq * q.one_minus_sq)
    return num / complex(one_minus_conj_prod(p.gap, p.arg, q.gap, q.arg))


def _theta_at(theta: InnerFunction, p: GapPoint) -> complex:
    v, _, _ = theta.eval_many(np.array([p.gap]), np.array([p.arg]))
    return complex(v[0])


def model_kernel(theta: InnerFunction, l, z) -> complex:
    """Model-space kernel K^T_l(z) = (1 - conj(T(l)) T(z)) / (1 - conj(l) z).

    At z = l this reduces to (1 - |T(l)|^2) / (1 - |l|^2) > 0.
    """
    p, q = as_point(l), as_point(z)
    tl = _theta_at(theta, p)
    if p == q:
        return complex((1.0 - abs(tl) ** 2) / p.one_minus_sq)
    tz = _theta_at(theta, q)
    den = complex(one_minus_conj_prod(p.gap, p.arg, q.gap, q.arg))
    return (1.0 - tl.conjugate() * tz) / den


def model_norm_sq(theta: InnerFunction, l) -> float:
    """||K^T_l||^2 = (1 - |T(l)|^2) / (1 - |l|^2)."""
    p = as_point(l)
    t = abs(_theta_at(theta, p))
    if t >= 1.0 - 1e-12:
        raise DegenerateKernelError(
            f"|theta| = {t} at an interior point; inner function is invalid"
        )
    return (1.0 - t * t) / p.one_minus_sq


def model_inner(theta: InnerFunction, l, m) -> complex:
    """Normalized model-kernel inner product; unit when l = m, and equal to
    szego_inner whenever theta vanishes at both points."""
    p, q = as_point(l), as_point(m)
    if p == q:
        return 1.0 + 0.0j
    val = model_kernel(theta, p, q)
    return val / np.sqrt(model_norm_sq(theta, p) * model_norm_sq(theta, q))


# ---------------------------------------------------------------------------
# Gram windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GramWindow:
    """Hermitian PSD matrix of normalized-kernel inner products over the
    1-based inclusive window [start, stop] of a sequence.

    truncation_certificate bounds (by the Schur row-sum test) how much the
    points discarded beyond the stored window can move the extremal
    eigenvalues of the infinite Gram.  For model families the unstored part
    of that bound assumes |theta| on unstored tail points does not exceed
    the largest certified modulus seen on the stored tail.
    """

    family: KernelFamily
    seq: BlaschkeSequence
    start: int
    stop: int
    matrix: np.ndarray
    truncation_certificate: float

    @property
    def size(self) -> int:
        return self.stop - self.start + 1


def _pairwise_omcp(g, a):
    """Matrix 1 - conj(lambda_j) lambda_i over a point set.

    This orientation makes G[i][j] = <k_j, k_i> (inner products linear in
    the first slot), so that c* G c equals the squared L2 norm of
    sum c_j k_j; the transposed orientation has the same spectrum but the
    wrong quadratic form for points off the real axis.
    """
    return one_minus_conj_prod(g[None, :], a[None, :], g[:, None], a[:, None])


def _hardy_gram(g, a) -> np.ndarray:
    s = np.sqrt(one_minus_sq(g))
    return (s[:, None] * s[None, :]) / _pairwise_omcp(g, a)


def _model_gram(g, a, tvals, tnorm) -> np.ndarray:
    # tnorm[i] = 1 - |theta(lambda_i)|^2; entries <k^T_j, k^T_i>
    s = np.sqrt(one_minus_sq(g) / tnorm)
    num = 1.0 - np.conj(tvals)[None, :] * tvals[:, None]
    return num * (s[:, None] * s[None, :]) / _pairwise_omcp(g, a)


def build_gram(family: KernelFamily, seq: BlaschkeSequence,
               start: int, stop: int) -> GramWindow:
    """Assemble the normalized-kernel Gram over [start, stop] and its
    truncation certificate."""
    g, a = seq.window(start, stop)
    if family.is_model:
        assert family.theta is not None
        tvals, tlow, thigh = family.theta.eval_many(g, a)
        tnorm = family.theta.one_minus_mod_sq_many(g, a)
        if np.any(thigh >= 1.0) or np.any(tnorm <= 0.0):
            raise DegenerateKernelError("|theta| reaches 1 inside the disk")
        mat = _model_gram(g, a, tvals, tnorm)
    else:
        mat = _hardy_gram(g, a)
    mat = 0.5 * (mat + mat.conj().T)
    np.fill_diagonal(mat, 1.0)

    if np.abs(mat).max() > 1.0 + 1e-12:
        raise DegenerateKernelError("normalized Gram entry exceeds 1")

    cert = _truncation_certificate(family, seq, start, stop)
    return GramWindow(family=family, seq=seq, start=start, stop=stop,
                      matrix=mat, truncation_certificate=cert)


def _truncation_certificate(family: KernelFamily, seq: BlaschkeSequence,
                            start: int, stop: int) -> float:
    g, a = seq.window(start, stop)
    n_stored = len(seq)
    stored_part = 0.0
    kappa_cap = 0.0
    if stop < n_stored:
        gt, at = seq.window(stop + 1, n_stored)
        if family.is_model:
            assert family.theta is not None
            tvals, _, _ = family.theta.eval_many(g, a)
            tnorm = 1.0 - np.abs(tvals) ** 2
            ttails, _, thigh = family.theta.eval_many(gt, at)
            kappa_cap = float(thigh.max())
            if kappa_cap >= 1.0 - 1e-12:
                return float("inf")
            ttnorm = 1.0 - np.abs(ttails) ** 2
            s_win = np.sqrt(one_minus_sq(g) / tnorm)
            s_tail = np.sqrt(one_minus_sq(gt) / ttnorm)
            num = 1.0 - np.conj(tvals)[:, None] * ttails[None, :]
            block = num * (s_win[:, None] * s_tail[None, :]) / one_minus_conj_prod(
                g[:, None], a[:, None], gt[None, :], at[None, :])
        else:
            s_win = np.sqrt(one_minus_sq(g))
            s_tail = np.sqrt(one_minus_sq(gt))
            block = (s_win[:, None] * s_tail[None, :]) / one_minus_conj_prod(
                g[:, None], a[:, None], gt[None, :], at[None, :])
        stored_part = float(np.abs(block).sum(axis=1).max())

    # Unstored tail: |<k_j, k_k>| <= 2 sqrt(gap_k / gap_j), so the row sum is
    # bounded by 2 * tail_sqrt_gap_sum / sqrt(min window gap).  Model kernels
    # pick up at most 2 / sqrt((1 - kappa_win^2)(1 - kappa_cap^2)).
    unstored = 2.0 * seq.tail_sqrt_gap_sum / np.sqrt(g.min())
    if family.is_model and unstored > 0.0:
        assert family.theta is not None
        _, _, whigh = family.theta.eval_many(g, a)
        kappa_win = float(whigh.max())
        kmax = max(kappa_win, kappa_cap)
        if kmax >= 1.0 - 1e-12:
            return float("inf")
        unstored *= 2.0 / ((1.0 - kappa_win ** 2) ** 0.5 * (1.0 - kmax ** 2) ** 0.5)
    return stored_part + float(unstored)


# ---------------------------------------------------------------------------
# Kernel combinations and the model-space projection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelCombination:
    """f = sum_j c_j k_{lambda_j} over the given points, either in the
    Hardy or a model family, with normalized or unnormalized kernels."""

    family: KernelFamily
    gaps: np.ndarray
    args: np.ndarray
    coeffs: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        gaps = np.asarray(self.gaps, dtype=float)
        args = np.asarray(self.args, dtype=float)
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if not (gaps.shape == args.shape == coeffs.shape) or gaps.ndim != 1:
            raise ValueError("gaps, args, coeffs must be parallel 1-d arrays")
        for arr in (gaps, args, coeffs):
            arr.setflags(write=False)
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "coeffs", coeffs)

    def _theta_values(self) -> np.ndarray | None:
        if not self.family.is_model:
            return None
        assert self.family.theta is not None
        v, _, _ = self.family.theta.eval_many(self.gaps, self.args)
        return v

    def evaluate_many(self, gaps, args) -> np.ndarray:
        """Pointwise values at the points (gaps, args)."""
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        omcp = one_minus_conj_prod(self.gaps[:, None], self.args[:, None],
                                   gaps[None, :], args[None, :])
        kern = 1.0 / omcp
        if self.family.is_model:
            assert self.family.theta is not None
            tpts = self._theta_values()
            tz, _, _ = self.family.theta.eval_many(gaps, args)
            kern = (1.0 - np.conj(tpts)[:, None] * tz[None, :]) * kern
        weights = self.coeffs.copy()
        if self.normalized:
            if self.family.is_model:
                tpts = self._theta_values()
                nrm = np.sqrt((1.0 - np.abs(tpts) ** 2) / one_minus_sq(self.gaps))
            else:
                nrm = 1.0 / np.sqrt(one_minus_sq(self.gaps))
            weights = weights / nrm
        return np.tensordot(weights, kern, axes=(0, 0))

    def evaluate(self, z) -> complex:
        p = as_point(z)
        return complex(self.evaluate_many([p.gap], [p.arg])[0])

    def _own_gram(self) -> np.ndarray:
        if self.family.is_model:
            assert self.family.theta is not None
            tv = self._theta_values()
            tn = 1.0 - np.abs(tv) ** 2
            mat = _model_gram(self.gaps, self.args, tv, tn)
            if not self.normalized:
                nrm = np.sqrt(tn / one_minus_sq(self.gaps))
                mat = mat * (nrm[:, None] * nrm[None, :])
        else:
            mat = _hardy_gram(self.gaps, self.args)
            if not self.normalized:
                nrm = 1.0 / np.sqrt(one_minus_sq(self.gaps))
                mat = mat * (nrm[:, None] * nrm[None, :])
        return mat

    def norm_sq(self) -> float:
        """Squared Hilbert-space norm via the Gram quadratic form."""
        G = self._own_gram()
        q = float(np.real(np.vdot(self.coeffs, G @ self.coeffs)))
        return max(q, 0.0)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def normalized_values(self) -> np.ndarray:
        """<f, k_m> at the combination's own points (normalized kernels)."""
        if not self.normalized:
            raise ValueError("normalized_values requires a normalized combination")
        return self._own_gram() @ self.coeffs


@dataclass(frozen=True)
class ProjectionPair:
    """P_T f = sum c_j K^T_j together with T_conj(theta) f, so that
    f = P_T f + theta * (T_conj(theta) f) holds pointwise."""

    model: KernelCombination
    toeplitz: KernelCombination


def project_model(combo: KernelCombination, theta: InnerFunction) -> ProjectionPair:
    """Orthogonal projection of a combination of unnormalized Szego kernels
    onto the model space of theta.

    P_T(sum c_j K_j) = sum c_j K^T_j exactly, and the Toeplitz part
    T_conj(theta)(sum c_j K_j) = sum c_j conj(theta(lambda_j)) K_j.
    """
    if combo.family.is_model or combo.normalized:
        raise ValueError("projection expects unnormalized Hardy-kernel coefficients")
    tv, _, _ = theta.eval_many(combo.gaps, combo.args)
    model = KernelCombination(
        family=model_family(theta), gaps=combo.gaps, args=combo.args,
        coeffs=combo.coeffs, normalized=False)
    toeplitz = KernelCombination(
        family=hardy_family(), gaps=combo.gaps, args=combo.args,
        coeffs=combo.coeffs * np.conj(tv), normalized=False)
    return ProjectionPair(model=model, toeplitz=toeplitz)
