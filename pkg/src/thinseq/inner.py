"""Computable inner functions and the tail suprema kappa_m.

The family is closed under finite products of three factor kinds: finite
Blaschke products, atomic singular factors exp(-m (zeta + z)/(zeta - z)),
and truncated Blaschke products carrying a certified bound for the omitted
tail.  Evaluations return the complex value together with a certified
modulus interval; intervals propagate multiplicatively through products.
All evaluation is pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .diskgeom import (
    BlaschkeSequence,
    GapPoint,
    as_point,
    blaschke_factor_many,
    one_minus_conj_prod,
    one_minus_sq,
    rho_components,
)

__all__ = [
    "FiniteBlaschke",
    "AtomicSingular",
    "TruncatedBlaschke",
    "InnerFunction",
    "InnerValue",
    "monomial",
    "truncated_blaschke",
    "tail_kappa",
]


@dataclass(frozen=True)
class InnerValue:
    """Evaluation result: complex value and certified modulus interval."""

    value: complex
    mod_low: float
    mod_high: float


@dataclass(frozen=True)
class FiniteBlaschke:
    """Finite Blaschke product vanishing exactly on `zeros`."""

    zeros: tuple[GapPoint, ...]

    def eval_many(self, gaps, args):
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        out = np.ones(gaps.shape, dtype=complex)
        for a in self.zeros:
            out *= blaschke_factor_many(a, gaps, args)
        mods = np.abs(out)
        return out, mods, mods

    def log_mod_sq_many(self, gaps, args):
        total = np.zeros(np.shape(gaps), dtype=float)
        with np.errstate(divide="ignore"):
            for a in self.zeros:
                _, omr = rho_components(a.gap, a.arg, gaps, args)
                total += np.log1p(-np.minimum(omr, 1.0))
        return total


@dataclass(frozen=True)
class AtomicSingular:
    """Atomic singular factor exp(-mass (zeta + z)/(zeta - z)), zeta on the
    circle at angle boundary_arg.  Its modulus is exp(-mass (1-|z|^2)/|zeta-z|^2)."""

    mass: float
    boundary_arg: float = 0.0

    def __post_init__(self) -> None:
        if not (self.mass > 0.0):
            raise ValueError(f"mass must be positive, got {self.mass!r}")

    def eval_many(self, gaps, args):
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        # |zeta - z|^2 = |1 - conj(zeta) z|^2, via the gap-aware helper with
        # the boundary point entered as gap -> 0.
        omc = one_minus_conj_prod(0.0, self.boundary_arg, gaps, args)
        den = omc.real * omc.real + omc.imag * omc.imag
        r = 1.0 - gaps
        zc = r * np.cos(args) + 1j * r * np.sin(args)
        zeta_conj = complex(math.cos(self.boundary_arg), -math.sin(self.boundary_arg))
        re = -self.mass * one_minus_sq(gaps) / den
        im = -self.mass * 2.0 * (zc * zeta_conj).imag / den
        mods = np.exp(re)
        out = mods * (np.cos(im) + 1j * np.sin(im))
        return out, mods, mods

    def log_mod_sq_many(self, gaps, args):
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        omc = one_minus_conj_prod(0.0, self.boundary_arg, gaps, args)
        den = omc.real * omc.real + omc.imag * omc.imag
        return -2.0 * self.mass * one_minus_sq(gaps) / den


@dataclass(frozen=True)
class TruncatedBlaschke:
    """Truncated infinite Blaschke product over the first `cutoff` points of
    a sequence.  tail_sum bounds the gap sum of every omitted zero (stored
    beyond the cutoff plus the sequence's own unstored tail); the certified
    modulus interval is [v * max(0, 1 - 2 tail_sum/gap_z), v]."""

    seq: BlaschkeSequence
    cutoff: int
    tail_sum: float

    def __post_init__(self) -> None:
        if not (1 <= self.cutoff <= len(self.seq)):
            raise ValueError(f"cutoff {self.cutoff} outside stored range")
        if self.tail_sum < 0.0:
            raise ValueError("tail_sum must be nonnegative")

    def eval_many(self, gaps, args):
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        out = np.ones(gaps.shape, dtype=complex)
        for j in range(1, self.cutoff + 1):
            out *= blaschke_factor_many(self.seq.point(j), gaps, args)
        mods = np.abs(out)
        tail_low = np.maximum(0.0, 1.0 - 2.0 * self.tail_sum / gaps)
        return out, mods * tail_low, mods

    def log_mod_sq_many(self, gaps, args):
        total = np.zeros(np.shape(gaps), dtype=float)
        with np.errstate(divide="ignore"):
            for j in range(1, self.cutoff + 1):
                p = self.seq.point(j)
                _, omr = rho_components(p.gap, p.arg, gaps, args)
                total += np.log1p(-np.minimum(omr, 1.0))
        return total


def truncated_blaschke(seq: BlaschkeSequence, cutoff: int) -> TruncatedBlaschke:
    """Build a TruncatedBlaschke whose tail_sum covers both the stored
    points beyond the cutoff and the sequence's certified unstored tail."""
    stored_tail = float(seq.gaps[cutoff:].sum())
    return TruncatedBlaschke(seq=seq, cutoff=cutoff,
                             tail_sum=stored_tail + seq.tail_gap_sum)


Factor = Union[FiniteBlaschke, AtomicSingular, TruncatedBlaschke]


@dataclass(frozen=True)
class InnerFunction:
    """Finite product of inner factors."""

    factors: tuple[Factor, ...]

    def eval_many(self, gaps, args) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Evaluate at points given by parallel gap/arg arrays.

        Returns (values, mod_low, mod_high) arrays; the true (untruncated)
        modulus lies within [mod_low, mod_high] entrywise.
        """
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        vals = np.ones(gaps.shape, dtype=complex)
        low = np.ones(gaps.shape, dtype=float)
        high = np.ones(gaps.shape, dtype=float)
        for f in self.factors:
            v, lo, hi = f.eval_many(gaps, args)
            vals *= v
            low *= lo
            high *= hi
        return vals, low, high

    def eval(self, z) -> InnerValue:
        p = as_point(z)
        v, lo, hi = self.eval_many(np.array([p.gap]), np.array([p.arg]))
        return InnerValue(value=complex(v[0]), mod_low=float(lo[0]), mod_high=float(hi[0]))

    def one_minus_mod_sq_many(self, gaps, args) -> np.ndarray:
        """1 - |theta(z)|^2, cancellation-free even when |theta| rounds to 1.

        Accumulates log |f|^2 per factor through stable per-factor forms
        (1 - rho^2 for Blaschke factors, the exponent itself for atomic
        factors) and returns -expm1 of the sum.  For truncated factors the
        center (finite-product) modulus is used.
        """
        gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
        args = np.atleast_1d(np.asarray(args, dtype=float))
        total = np.zeros(gaps.shape, dtype=float)
        for f in self.factors:
            total += f.log_mod_sq_many(gaps, args)
        return -np.expm1(total)

    def eval_points(self, seq: BlaschkeSequence, start: int, stop: int):
        g, a = seq.window(start, stop)
        return self.eval_many(g, a)


def monomial(power: int) -> InnerFunction:
    """The inner function z^power (a finite Blaschke product with a zero of
    the given order at the origin)."""
    if power < 1:
        raise ValueError("power must be >= 1")
    zero = GapPoint(arg=0.0, gap=1.0)
    return InnerFunction(factors=(FiniteBlaschke(zeros=(zero,) * power),))


def tail_kappa(theta: InnerFunction, seq: BlaschkeSequence, m: int) -> float:
    """kappa_m = sup over stored n >= m of the certified upper end of
    |theta(lambda_n)|.  Nonincreasing in m by construction."""
    if not (1 <= m <= len(seq)):
        raise IndexError(f"index {m} outside stored window [1, {len(seq)}]")
    g, a = seq.window(m, len(seq))
    _, _, hi = theta.eval_many(g, a)
    return float(hi.max())
