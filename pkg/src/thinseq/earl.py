"""Earl's interpolation bound and dual (Beurling-type) function systems.

earl_bound(delta) is the constructive H-infinity interpolation constant
(2 - delta^2 + 2 sqrt(1 - delta^2)) / delta^2.

The dual system on a finite window uses the explicit construction

    f_j(z) = (B_j(z) / B_j(lambda_j)) ((1-|lambda_j|^2)/(1 - conj(lambda_j) z))^2

with B_j the Blaschke product over the other window zeros, so that
f_j(lambda_k) = delta_jk exactly.  The classical sum bound
sup_z sum_j |f_j(z)| <= earl_bound(gamma), gamma = min_j delta_j(window),
is a property of the optimal dual system; for this explicit construction
it is verified numerically per window (each |f_j| peaks near its own
boundary direction at height about (2 - gap_j)^2 / delta_j, so the bound
genuinely fails on windows with gamma close to 1 and holds with margin on
moderately separated windows with angularly isolated points).

Grid suprema reuse the polar search grid plus boundary-adjacent local
patches around every window point; evaluation is pure and vectorizes
over grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .carleson import GridSpec, maximize_on_disk
from .diskgeom import (
    BlaschkeSequence,
    GapPoint,
    blaschke_factor_many,
    log_rho,
    one_minus_conj_prod,
    one_minus_sq,
)

__all__ = [
    "earl_bound",
    "BeurlingSystem",
    "BoundedInterpolant",
    "beurling_functions",
    "interpolate_bounded",
]


def earl_bound(delta: float) -> float:
    """(2 - delta^2 + 2 sqrt(1 - delta^2)) / delta^2 for delta in (0, 1].

    Strictly decreasing, tends to infinity as delta -> 0+ and to 1 as
    delta -> 1.
    """
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta!r}")
    d2 = delta * delta
    return (2.0 - d2 + 2.0 * math.sqrt(max(1.0 - d2, 0.0))) / d2


@dataclass(frozen=True)
class BeurlingSystem:
    """Dual functions over a finite window: f_j(lambda_k) = delta_jk."""

    window: BlaschkeSequence
    deltas: np.ndarray       # per-point window products prod_{k != j} rho
    b_at_own: np.ndarray     # complex B_j(lambda_j), |.| = deltas
    gamma: float

    @classmethod
    def from_window(cls, window: BlaschkeSequence) -> "BeurlingSystem":
        n = len(window)
        if n < 1:
            raise ValueError("window must contain at least one point")
        deltas = np.empty(n)
        b_own = np.empty(n, dtype=complex)
        for j in range(n):
            others = [k for k in range(n) if k != j]
            prod = 1.0 + 0.0j
            for k in others:
                zk = GapPoint(arg=float(window.args[k]), gap=float(window.gaps[k]))
                prod *= complex(blaschke_factor_many(
                    zk, np.array([window.gaps[j]]), np.array([window.args[j]]))[0])
            b_own[j] = prod
            logs = np.delete(
                log_rho(window.gaps[j], window.args[j], window.gaps, window.args), j)
            deltas[j] = math.exp(float(logs.sum())) if n > 1 else 1.0
        gamma = float(deltas.min())
        if gamma <= 0.0:
            raise ValueError("degenerate window: coincident zeros")
        return cls(window=window, deltas=deltas, b_at_own=b_own, gamma=gamma)

    @property
    def size(self) -> int:
        return len(self.window)

    def evaluate(self, j: int, gaps, args) -> np.ndarray:
        """f_j over the points (gaps, args); j is 1-based."""
        if not (1 <= j <= self.size):
            raise IndexError(f"index {j} outside window [1, {self.size}]")
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        jj = j - 1
        b = np.ones(gaps.shape, dtype=complex)
        for k in range(self.size):
            if k == jj:
                continue
            zk = GapPoint(arg=float(self.window.args[k]), gap=float(self.window.gaps[k]))
            b *= blaschke_factor_many(zk, gaps, args)
        mj = one_minus_sq(self.window.gaps[jj])
        omc = one_minus_conj_prod(self.window.gaps[jj], self.window.args[jj], gaps, args)
        kern = (mj / omc) ** 2
        return (b / self.b_at_own[jj]) * kern

    def sum_abs(self, gaps, args) -> np.ndarray:
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        total = np.zeros(gaps.shape, dtype=float)
        for j in range(1, self.size + 1):
            total += np.abs(self.evaluate(j, gaps, args))
        return total

    def _local_patches(self) -> tuple[np.ndarray, np.ndarray]:
        """Boundary-adjacent probes around each window point: |f_j| peaks in
        an angular window of width about gap_j at its own direction."""
        scales = np.array([4.0, 2.0, 1.0, 0.5, 0.25, 0.1, 0.03, 1e-2, 1e-3,
                           1e-4, 1e-6, 1e-9])
        offsets = np.linspace(-6.0, 6.0, 25)
        g_all, a_all = [], []
        for j in range(self.size):
            gj, aj = float(self.window.gaps[j]), float(self.window.args[j])
            gg, oo = np.meshgrid(np.minimum(gj * scales, 1.0), aj + gj * offsets,
                                 indexing="ij")
            g_all.append(gg.ravel())
            a_all.append(oo.ravel())
        g_all.append(self.window.gaps)
        a_all.append(self.window.args)
        return np.concatenate(g_all), np.concatenate(a_all)

    def sup_sum_abs(self, grid: GridSpec | None = None) -> tuple[float, float, float]:
        """Grid supremum of sum_j |f_j| with refinement.

        Returns (value, argmax_gap, argmax_arg); the value is a certified
        lower bound of the true supremum and should be compared against
        earl_bound(gamma).
        """
        grid = grid or GridSpec()
        return maximize_on_disk(lambda g, a: self.sum_abs(g, a), grid,
                                extra=self._local_patches())

    def bound(self) -> float:
        """earl_bound at this window's separation."""
        return earl_bound(self.gamma)


def beurling_functions(window: BlaschkeSequence, j: int, z) -> complex:
    """f_j evaluated at a single point (functional form of the system)."""
    from .diskgeom import as_point

    system = BeurlingSystem.from_window(window)
    p = as_point(z)
    return complex(system.evaluate(j, np.array([p.gap]), np.array([p.arg]))[0])


@dataclass(frozen=True)
class BoundedInterpolant:
    """f = sum_j w_j f_j: matches the bounded targets w on the window and
    carries the certified sup bound earl_bound(gamma) * max |w_j|."""

    system: BeurlingSystem
    targets: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.targets, dtype=complex)
        if t.shape != (self.system.size,):
            raise ValueError("one target per window point required")
        t.setflags(write=False)
        object.__setattr__(self, "targets", t)

    @property
    def certified_bound(self) -> float:
        return self.system.bound() * float(np.abs(self.targets).max(initial=0.0))

    def evaluate_many(self, gaps, args) -> np.ndarray:
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        total = np.zeros(gaps.shape, dtype=complex)
        for j in range(1, self.system.size + 1):
            total += self.targets[j - 1] * self.system.evaluate(j, gaps, args)
        return total

    def evaluate(self, z) -> complex:
        from .diskgeom import as_point

        p = as_point(z)
        return complex(self.evaluate_many([p.gap], [p.arg])[0])

    def grid_sup(self, grid: GridSpec | None = None) -> float:
        grid = grid or GridSpec()
        val, _, _ = maximize_on_disk(
            lambda g, a: np.abs(self.evaluate_many(g, a)), grid,
            extra=self.system._local_patches())
        return val


def interpolate_bounded(window: BlaschkeSequence, targets) -> BoundedInterpolant:
    """Interpolant of bounded targets through the dual system."""
    system = BeurlingSystem.from_window(window)
    return BoundedInterpolant(system=system, targets=np.asarray(targets, dtype=complex))
