"""Embedding constants for the discrete sequence measures.

Three measures over a tail window [N, M] of a sequence:

    mu:    weights 1 - |lambda_k|^2            (Hardy embeddings)
    nu:    weights (1 - |lambda_k|^2)/delta_k  (reproducing-kernel embeddings)
    sigma: weights (1 - |lambda_k|^2)/(1 - |theta(lambda_k)|^2)
                                               (model-space embeddings)

Because the mu and sigma weights are exactly the inverse squared kernel
norms, the Carleson embedding constant of the windowed measure equals the
top eigenvalue of the matching normalized-kernel Gram; carleson_constant
reports that value, which is a lower bound for the constant of the full
tail measure, with the Gram truncation certificate as the upward error
bar.  The kernel embedding constants are reported squared (for both the
Hardy and the model family) and are computed by maximizing over a polar
grid united with the tail's own points, plus local refinement.

Grid evaluation parallelizes trivially over points; everything here is
pure.  The general two-weight embedding problem is out of scope: only the
three sequence measures above are supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .diskgeom import (
    BlaschkeSequence,
    DeltaProfile,
    delta_profile,
    one_minus_conj_prod,
    one_minus_sq,
    rho_components,
)
from .inner import InnerFunction
from .kernels import KernelFamily, build_gram
from .spectral import extremal_eigs

__all__ = [
    "DiscreteMeasure",
    "GridSpec",
    "ReproducingResult",
    "MeasureFamilyError",
    "mu_measure",
    "nu_measure",
    "sigma_measure",
    "carleson_constant",
    "reproducing_constant",
    "weierstrass_gap",
    "maximize_on_disk",
    "polar_grid",
]


class MeasureFamilyError(ValueError):
    """Measure kind and kernel family do not match."""


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point masses on the tail window [start, stop] (1-based,
    inclusive, possibly empty when stop < start).  weight_high bounds the
    weights from above when they depend on certified quantities (delta for
    nu, |theta| for sigma)."""

    kind: str  # "mu" | "nu" | "sigma"
    seq: BlaschkeSequence
    start: int
    stop: int
    weights: np.ndarray
    weight_high: np.ndarray
    theta: InnerFunction | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("mu", "nu", "sigma"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.stop >= self.start:
            if not (1 <= self.start and self.stop <= len(self.seq)):
                raise IndexError("window outside stored points")
            if np.any(self.weights <= 0.0) or not np.all(np.isfinite(self.weights)):
                raise ValueError("weights must be positive and finite")

    @property
    def empty(self) -> bool:
        return self.stop < self.start

    def window(self):
        return self.seq.window(self.start, self.stop)


def mu_measure(seq: BlaschkeSequence, start: int, stop: int) -> DiscreteMeasure:
    """mu_N restricted to the stored window: weights 1 - |lambda_k|^2."""
    if stop < start:
        return DiscreteMeasure("mu", seq, start, stop, np.empty(0), np.empty(0))
    g, _ = seq.window(start, stop)
    w = one_minus_sq(g)
    return DiscreteMeasure("mu", seq, start, stop, w, w.copy())


def nu_measure(seq: BlaschkeSequence, start: int, stop: int,
               profile: DeltaProfile | None = None) -> DiscreteMeasure:
    """nu_N restricted to the stored window: weights (1-|lambda_k|^2)/delta_k
    with delta_k over the whole stored sequence (plus tail certificate)."""
    if stop < start:
        return DiscreteMeasure("nu", seq, start, stop, np.empty(0), np.empty(0))
    if profile is None:
        profile = delta_profile(seq, j_max=stop, tail_tol=math.inf)
    g, _ = seq.window(start, stop)
    m = one_minus_sq(g)
    deltas = np.array([profile.entry(k).value for k in range(start, stop + 1)])
    lowers = np.array([profile.entry(k).lower for k in range(start, stop + 1)])
    if np.any(lowers <= 0.0):
        lowers = np.maximum(lowers, np.finfo(float).tiny)
    return DiscreteMeasure("nu", seq, start, stop, m / deltas, m / lowers)


def sigma_measure(seq: BlaschkeSequence, start: int, stop: int,
                  theta: InnerFunction) -> DiscreteMeasure:
    """sigma_N restricted to the stored window: weights equal to the inverse
    squared model-kernel norms (1-|lambda_k|^2)/(1-|theta(lambda_k)|^2)."""
    if stop < start:
        return DiscreteMeasure("sigma", seq, start, stop, np.empty(0), np.empty(0),
                               theta=theta)
    g, a = seq.window(start, stop)
    m = one_minus_sq(g)
    _, low, high = theta.eval_many(g, a)
    tnorm = theta.one_minus_mod_sq_many(g, a)
    if np.any(high >= 1.0) or np.any(tnorm <= 0.0):
        raise ValueError("|theta| reaches 1 on the window")
    w = m / tnorm
    w_high = m / np.maximum(1.0 - high ** 2, np.finfo(float).tiny)
    return DiscreteMeasure("sigma", seq, start, stop, w, w_high, theta=theta)


def carleson_constant(measure: DiscreteMeasure, family: KernelFamily,
                      tol: float = 1e-10, seed: int = 0) -> tuple[float, float]:
    """Carleson embedding constant of the windowed measure.

    Equals the top eigenvalue of the window Gram of normalized kernels
    (Hardy Gram for mu, model Gram for sigma).  Returns (value, err): the
    window value is a lower bound for the full tail constant and the true
    value is at most value + err.
    """
    if measure.empty:
        raise ValueError("carleson constant needs a nonempty window (M >= N)")
    if measure.kind == "mu":
        if family.is_model:
            raise MeasureFamilyError("mu pairs with the Hardy family")
    elif measure.kind == "sigma":
        if not family.is_model:
            raise MeasureFamilyError("sigma pairs with a model family")
        if family.theta is not measure.theta:
            raise MeasureFamilyError("sigma measure built for a different theta")
    else:
        raise MeasureFamilyError(
            "nu has no Gram reduction; use reproducing_constant")
    gram = build_gram(family, measure.seq, measure.start, measure.stop)
    eig = extremal_eigs(gram, tol=tol, seed=seed)
    value = eig.lambda_max
    if value < 1.0 - tol:
        raise RuntimeError(f"unit-diagonal Gram produced lambda_max = {value}")
    return value, gram.truncation_certificate + eig.residual_max


# ---------------------------------------------------------------------------
# Grid search for the kernel embedding constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Polar search grid: radii 1 - 2^-i for i <= max_depth (plus the
    origin), n_angles angles, then refine_passes local refinements of the
    incumbent, each shrinking the search box by refine_shrink."""

    max_depth: int = 40
    n_angles: int = 256
    refine_passes: int = 3
    refine_points: int = 9
    refine_shrink: float = 4.0

    def __post_init__(self) -> None:
        if self.max_depth < 1 or self.n_angles < 8:
            raise ValueError("grid too coarse")


@dataclass(frozen=True)
class ReproducingResult:
    value: float
    err: float
    argmax_gap: float
    argmax_arg: float


def polar_grid(spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    depths = np.arange(1, spec.max_depth + 1, dtype=float)
    gaps = 2.0 ** (-depths)
    angles = np.linspace(0.0, 2.0 * math.pi, spec.n_angles, endpoint=False)
    gg, aa = np.meshgrid(gaps, angles, indexing="ij")
    g = np.concatenate([[1.0], gg.ravel()])  # gap 1 is the origin
    a = np.concatenate([[0.0], aa.ravel()])
    return g, a


def maximize_on_disk(score, spec: GridSpec,
                     extra: tuple[np.ndarray, np.ndarray] | None = None
                     ) -> tuple[float, float, float]:
    """Maximize score(gaps, args) over the polar grid united with extra
    points, with local refinement around the incumbent.

    Returns (value, gap, arg) of the best point seen; deterministic.
    """
    g, a = polar_grid(spec)
    if extra is not None and len(extra[0]):
        g = np.concatenate([g, np.asarray(extra[0], dtype=float)])
        a = np.concatenate([a, np.asarray(extra[1], dtype=float)])
    vals = score(g, a)
    best = int(np.argmax(vals))
    best_val, best_g, best_a = float(vals[best]), float(g[best]), float(a[best])

    dlog = math.log(2.0)  # one grid step in log-gap
    dang = 2.0 * math.pi / spec.n_angles
    m = spec.refine_points
    for _ in range(spec.refine_passes):
        logs = math.log(best_g) + np.linspace(-dlog, dlog, m)
        gg = np.minimum(np.exp(logs), 1.0)
        aa = best_a + np.linspace(-dang, dang, m)
        gmesh, amesh = np.meshgrid(gg, aa, indexing="ij")
        gf, af = gmesh.ravel(), amesh.ravel()
        vals = score(gf, af)
        k = int(np.argmax(vals))
        if float(vals[k]) > best_val:
            best_val, best_g, best_a = float(vals[k]), float(gf[k]), float(af[k])
        dlog /= spec.refine_shrink
        dang /= spec.refine_shrink
    return best_val, best_g, best_a


def _hardy_score(measure: DiscreteMeasure, weights: np.ndarray):
    # sum_k w_k |k_z(lambda_k)|^2 with |k_z(w)|^2 = (1-|z|^2)/|1 - conj(z) w|^2
    gs, as_ = measure.window()

    def score(g, a):
        total = np.zeros(np.shape(g), dtype=float)
        mz = one_minus_sq(np.asarray(g, dtype=float))
        for gk, ak, wk in zip(gs, as_, weights):
            omc = one_minus_conj_prod(g, a, gk, ak)
            total += wk * mz / (omc.real ** 2 + omc.imag ** 2)
        return total

    return score


def _model_score(measure: DiscreteMeasure, weights: np.ndarray,
                 theta: InnerFunction):
    # |k^T_z(w)|^2 = |1 - conj(T(z)) T(w)|^2 (1-|z|^2) /
    #                (|1 - conj(z) w|^2 (1-|T(z)|^2))
    gs, as_ = measure.window()
    tv, _, _ = theta.eval_many(gs, as_)

    def score(g, a):
        g = np.asarray(g, dtype=float)
        a = np.asarray(a, dtype=float)
        tz, _, _ = theta.eval_many(g, a)
        tz_norm = theta.one_minus_mod_sq_many(g, a)
        mz = one_minus_sq(g)
        total = np.zeros(g.shape, dtype=float)
        for gk, ak, wk, tk in zip(gs, as_, weights, tv):
            omc = one_minus_conj_prod(g, a, gk, ak)
            num = np.abs(1.0 - np.conj(tz) * tk) ** 2
            total += wk * num * mz / ((omc.real ** 2 + omc.imag ** 2) * tz_norm)
        return total

    return score


def reproducing_constant(measure: DiscreteMeasure, family: KernelFamily,
                         grid: GridSpec | None = None) -> ReproducingResult:
    """Squared embedding constant of the measure on normalized reproducing
    kernels: sup over z of sum_k w_k |k_z(lambda_k)|^2.

    The supremum is searched over the polar grid united with all sequence
    points from the window start onward, then refined locally; the reported
    value is a certified lower bound of the windowed supremum.  err covers
    the weight uncertainty (delta certificates for nu, |theta| intervals
    for sigma) at the maximizer.
    """
    if measure.empty:
        return ReproducingResult(value=0.0, err=0.0, argmax_gap=1.0, argmax_arg=0.0)
    needs_model = measure.kind == "sigma"
    if needs_model != family.is_model:
        raise MeasureFamilyError(
            f"{measure.kind} measure does not pair with {family.kind} kernels")
    grid = grid or GridSpec()
    if family.is_model:
        assert family.theta is not None
        score = _model_score(measure, measure.weights, family.theta)
        score_high = _model_score(measure, measure.weight_high, family.theta)
    else:
        score = _hardy_score(measure, measure.weights)
        score_high = _hardy_score(measure, measure.weight_high)

    seq_tail = measure.seq.window(measure.start, len(measure.seq))
    value, g, a = maximize_on_disk(score, grid, extra=seq_tail)
    high = float(score_high(np.array([g]), np.array([a]))[0])
    return ReproducingResult(value=value, err=max(0.0, high - value),
                             argmax_gap=g, argmax_arg=a)


# ---------------------------------------------------------------------------
# Weierstrass inequality diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeierstrassGap:
    product_side: float
    one_minus_sum_side: float

    @property
    def slack(self) -> float:
        return self.product_side - self.one_minus_sum_side


def weierstrass_gap(seq: BlaschkeSequence, start: int, probe: int,
                    stop: int | None = None) -> WeierstrassGap:
    """Both sides of prod (1 - x_k) >= 1 - sum x_k over the window, where
    x_k = (1-|lambda_k|^2)(1-|lambda_probe|^2)/|1 - conj(lambda_k) lambda_probe|^2
    and the product runs over k in [start, stop], k != probe.  The product
    side equals the squared Blaschke tail product at the probe point.
    """
    stop = len(seq) if stop is None else stop
    if not (start <= probe <= stop):
        raise IndexError(f"probe {probe} outside window [{start}, {stop}]")
    g, a = seq.window(start, stop)
    gp, ap = seq.gaps[probe - 1], seq.args[probe - 1]
    _, x = rho_components(gp, ap, g, a)
    x = np.delete(x, probe - start)
    product = float(np.exp(np.sum(np.log1p(-np.minimum(x, 1.0)))))
    return WeierstrassGap(product_side=product,
                          one_minus_sum_side=1.0 - float(np.sum(x)))
