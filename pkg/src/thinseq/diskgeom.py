"""Pseudohyperbolic geometry of the unit disk.

Points are stored as (argument, gap) pairs with gap = 1 - |z|, so that the
quantities that control everything near the boundary (1 - |z|^2 and
1 - conj(w) z) are computed without cancellation even when the gap is as
small as 1e-300.  All functions here are pure; the module is safe for
concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "GapPoint",
    "BlaschkeSequence",
    "SequenceSpec",
    "DeltaEntry",
    "DeltaProfile",
    "DegenerateSequenceError",
    "NonInterpolatingError",
    "as_point",
    "pseudo_distance",
    "blaschke_factor",
    "delta_profile",
    "generate_sequence",
    "one_minus_conj_prod",
    "rho_components",
]

# Gaps below this underflow double precision; generators stop there.
UNDERFLOW_GAP = 1e-300

# log of the smallest positive normal double; products below this are
# reported as non-interpolating degenerations.
_LOG_UNDERFLOW = math.log(UNDERFLOW_GAP)


class DegenerateSequenceError(ValueError):
    """Raised when a sequence contains coincident points (rho = 0)."""


class NonInterpolatingError(ValueError):
    """Raised when a thinness product underflows to zero."""


@dataclass(frozen=True)
class GapPoint:
    """A point of the open unit disk, stored as argument and boundary gap.

    The modulus is 1 - gap and the complex value is (1 - gap) e^{i arg}.
    1 - |z|^2 is reconstructed as gap (2 - gap), never from the modulus.
    """

    arg: float
    gap: float

    def __post_init__(self) -> None:
        if not (0.0 < self.gap <= 1.0):
            raise ValueError(f"gap must lie in (0, 1], got {self.gap!r}")
        if not math.isfinite(self.arg):
            raise ValueError(f"argument must be finite, got {self.arg!r}")

    @property
    def modulus(self) -> float:
        return 1.0 - self.gap

    @property
    def value(self) -> complex:
        r = 1.0 - self.gap
        return complex(r * math.cos(self.arg), r * math.sin(self.arg))

    @property
    def one_minus_sq(self) -> float:
        """1 - |z|^2 = gap (2 - gap), cancellation-free."""
        return self.gap * (2.0 - self.gap)

    @classmethod
    def from_complex(cls, z: complex) -> "GapPoint":
        """Coerce a complex point.  The gap representation resolves the
        boundary to full relative precision but the modulus only to
        absolute machine precision: |z| below about 1e-16 collapses to the
        origin.  Construct GapPoints directly when that matters."""
        r = abs(z)
        if r >= 1.0:
            raise ValueError(f"point must lie in the open unit disk, |z| = {r}")
        return cls(arg=math.atan2(z.imag, z.real) if r > 0 else 0.0, gap=1.0 - r)


def as_point(z) -> GapPoint:
    """Coerce a GapPoint, complex number, or real into a GapPoint."""
    if isinstance(z, GapPoint):
        return z
    return GapPoint.from_complex(complex(z))


# ---------------------------------------------------------------------------
# Low-level stable arithmetic.  These accept floats or numpy arrays and
# broadcast; gaps g in (0, 1], arguments a in radians.
# ---------------------------------------------------------------------------

def one_minus_sq(g):
    """1 - (1-g)^2 = g (2 - g)."""
    return g * (2.0 - g)


def one_minus_conj_prod(g1, a1, g2, a2):
    """1 - conj(z1) z2 for z = (1-g) e^{ia}, without cancellation.

    Real part is (g1 + g2 - g1 g2) + r1 r2 * 2 sin^2(d/2) with d = a2 - a1;
    both terms are nonnegative, so the result keeps full relative precision
    even when both points sit exponentially close to the boundary.
    """
    r1 = 1.0 - np.asarray(g1, dtype=float)
    r2 = 1.0 - np.asarray(g2, dtype=float)
    d = np.asarray(a2, dtype=float) - np.asarray(a1, dtype=float)
    rr = r1 * r2
    s = np.sin(0.5 * d)
    re = (g1 + g2 - g1 * g2) + rr * (2.0 * s * s)
    im = -rr * np.sin(d)
    return re + 1j * im


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def abs2_diff(g1, a1, g2, a2):
    """|z1 - z2|^2 = (g2 - g1)^2 + 4 r1 r2 sin^2((a1 - a2)/2)."""
    r1 = 1.0 - np.asarray(g1, dtype=float)
    r2 = 1.0 - np.asarray(g2, dtype=float)
    dg = np.asarray(g2, dtype=float) - np.asarray(g1, dtype=float)
    s = np.sin(0.5 * (np.asarray(a1, dtype=float) - np.asarray(a2, dtype=float)))
    return dg * dg + 4.0 * r1 * r2 * s * s


def rho_components(g1, a1, g2, a2):
    """Return (rho^2, 1 - rho^2) for the pseudohyperbolic distance.

    Both entries are computed directly from gap-aware formulas, so rho^2 is
    accurate near 0 and 1 - rho^2 is accurate near 0 (rho near 1).
    """
    den = _abs2(one_minus_conj_prod(g1, a1, g2, a2))
    rho_sq = abs2_diff(g1, a1, g2, a2) / den
    omr = one_minus_sq(np.asarray(g1, dtype=float)) * one_minus_sq(np.asarray(g2, dtype=float)) / den
    return rho_sq, omr


def log_rho(g1, a1, g2, a2):
    """log rho, accumulated stably: uses log1p(-(1 - rho^2)) when rho is
    near 1 and log(rho^2)/2 when rho is small.  Coincident points give -inf.
    """
    rho_sq, omr = rho_components(g1, a1, g2, a2)
    rho_sq = np.asarray(rho_sq, dtype=float)
    omr = np.asarray(omr, dtype=float)
    near_one = omr < 0.5
    out = np.empty(np.broadcast(rho_sq, omr).shape, dtype=float)
    with np.errstate(divide="ignore"):
        out[near_one] = 0.5 * np.log1p(-np.minimum(omr[near_one], 1.0))
        out[~near_one] = 0.5 * np.log(rho_sq[~near_one])
    return out


def pseudo_distance(z, w) -> float:
    """Pseudohyperbolic distance |z - w| / |1 - conj(w) z| on the disk.

    Symmetric, zero iff z = w, and Moebius invariant.  Raises if either
    point lies outside the open disk.
    """
    p, q = as_point(z), as_point(w)
    rho_sq, omr = rho_components(p.gap, p.arg, q.gap, q.arg)
    if rho_sq <= 0.5:
        return float(np.sqrt(rho_sq))
    return float(np.sqrt(max(0.0, 1.0 - omr)))


def blaschke_factor(a, z) -> complex:
    """One Blaschke factor (-conj(a)/|a|) (z - a) / (1 - conj(a) z).

    By convention the factor is z itself when a = 0.  Vanishes exactly at
    z = a and has modulus below 1 on the disk.
    """
    pa, pz = as_point(a), as_point(z)
    if pa.gap == 1.0:
        return pz.value
    av = pa.value
    unit = -av.conjugate() / abs(av)
    den = complex(one_minus_conj_prod(pa.gap, pa.arg, pz.gap, pz.arg))
    return unit * (pz.value - av) / den


def blaschke_factor_many(a: GapPoint, gaps, args) -> np.ndarray:
    """Vectorized Blaschke factor of `a` over points (gaps, args)."""
    gaps = np.asarray(gaps, dtype=float)
    args = np.asarray(args, dtype=float)
    r = 1.0 - gaps
    zv = r * np.cos(args) + 1j * r * np.sin(args)
    if a.gap == 1.0:
        return zv
    av = a.value
    unit = -av.conjugate() / abs(av)
    den = one_minus_conj_prod(a.gap, a.arg, gaps, args)
    return unit * (zv - av) / den


# ---------------------------------------------------------------------------
# Sequences and generators
# ---------------------------------------------------------------------------

_RADIAL_KINDS = ("radial-geometric", "radial-factorial", "radial-superexp")
_KINDS = _RADIAL_KINDS + ("explicit",)


@dataclass(frozen=True)
class SequenceSpec:
    """Descriptor of a sequence generator.

    kind is one of radial-geometric (gap_n = q^n), radial-factorial
    (gap_n = 1/n!), radial-superexp (gap_n = q^(n^2)) or explicit
    (points given as (arg, gap) pairs).
    """

    kind: str
    count: int = 0
    q: float | None = None
    points: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind: unknown kind {self.kind!r}")
        if self.kind == "explicit":
            if not self.points:
                raise ValueError("points: explicit spec needs at least one point")
        else:
            if self.count < 1:
                raise ValueError(f"count: must be >= 1, got {self.count}")
        if self.kind in ("radial-geometric", "radial-superexp"):
            if self.q is None or not (0.0 < self.q < 1.0):
                raise ValueError(f"q: must lie in (0, 1), got {self.q!r}")

    def describe(self) -> str:
        if self.kind == "explicit":
            return f"explicit({len(self.points or ())} points)"
        if self.kind == "radial-factorial":
            return f"radial-factorial(n={self.count})"
        return f"{self.kind}(q={self.q}, n={self.count})"


@dataclass(frozen=True)
class BlaschkeSequence:
    """Ordered sequence of disk points with certified tail bounds.

    gaps/args are parallel arrays (index 0 is the first point).  For
    generator-backed sequences, tail_gap_sum and tail_sqrt_gap_sum are
    certified upper bounds on sum(gap_k) and sum(sqrt(gap_k)) over the
    *unstored* tail of the infinite family; both are 0 for explicit lists.
    """

    gaps: np.ndarray
    args: np.ndarray
    spec: SequenceSpec | None = None
    truncated: bool = False
    tail_gap_sum: float = 0.0
    tail_sqrt_gap_sum: float = 0.0

    def __post_init__(self) -> None:
        gaps = np.asarray(self.gaps, dtype=float)
        args = np.asarray(self.args, dtype=float)
        if gaps.ndim != 1 or gaps.shape != args.shape:
            raise ValueError("gaps and args must be parallel 1-d arrays")
        if len(gaps) == 0:
            raise ValueError("sequence must contain at least one point")
        if np.any(gaps <= 0.0) or np.any(gaps > 1.0):
            raise ValueError("every gap must lie in (0, 1]")
        gaps.setflags(write=False)
        args.setflags(write=False)
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "args", args)
        self._check_distinct()

    def _check_distinct(self) -> None:
        n = len(self.gaps)
        if n > 1:
            same_gap = self.gaps[:, None] == self.gaps[None, :]
            # same gap and same point value means coincident; different gaps
            # are always distinct points.
            if np.any(same_gap):
                vals = self.values()
                eq = same_gap & (vals[:, None] == vals[None, :])
                eq[np.diag_indices(n)] = False
                if np.any(eq):
                    i, j = np.argwhere(eq)[0]
                    raise DegenerateSequenceError(
                        f"points {i + 1} and {j + 1} coincide (rho = 0)"
                    )

    def __len__(self) -> int:
        return len(self.gaps)

    def point(self, j: int) -> GapPoint:
        """Return the j-th point, 1-based."""
        if not (1 <= j <= len(self)):
            raise IndexError(f"index {j} outside stored window [1, {len(self)}]")
        return GapPoint(arg=float(self.args[j - 1]), gap=float(self.gaps[j - 1]))

    def points(self) -> Iterator[GapPoint]:
        for j in range(1, len(self) + 1):
            yield self.point(j)

    def values(self) -> np.ndarray:
        r = 1.0 - self.gaps
        return r * np.cos(self.args) + 1j * r * np.sin(self.args)

    @property
    def blaschke_sum(self) -> float:
        """Sum of stored gaps (the Blaschke condition sum)."""
        return float(self.gaps.sum())

    def window(self, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        """Gap/arg arrays for the 1-based inclusive window [start, stop]."""
        if not (1 <= start <= stop <= len(self)):
            raise IndexError(
                f"window [{start}, {stop}] outside stored range [1, {len(self)}]"
            )
        return self.gaps[start - 1 : stop], self.args[start - 1 : stop]


def _generator_tail_bounds(kind: str, q: float | None, gaps: list[float]) -> tuple[float, float]:
    """Certified upper bounds on sum(gap) and sum(sqrt(gap)) beyond the
    stored points, from elementary ratio comparisons."""
    n = len(gaps)
    if kind == "radial-geometric":
        assert q is not None
        s = math.sqrt(q)
        return q ** (n + 1) / (1.0 - q), s ** (n + 1) / (1.0 - s)
    if kind == "radial-factorial":
        first = gaps[-1] / (n + 1)  # 1/(n+1)!
        gap_sum = first * (n + 2) / (n + 1)
        sq = math.sqrt(first)
        sqrt_sum = sq / (1.0 - 1.0 / math.sqrt(n + 2))
        return gap_sum, sqrt_sum
    if kind == "radial-superexp":
        assert q is not None
        first = q ** ((n + 1) ** 2)
        ratio = q ** (2 * n + 3)
        sq_ratio = q ** (n + 1.5)
        return first / (1.0 - ratio), math.sqrt(first) / (1.0 - sq_ratio)
    return 0.0, 0.0


def generate_sequence(spec: SequenceSpec) -> BlaschkeSequence:
    """Materialize a sequence from its descriptor.

    Generation stops (with the truncation flag set) before any gap would
    underflow below 1e-300; the certified tail bounds then cover everything
    past the last stored point.
    """
    if spec.kind == "explicit":
        pts = spec.points or ()
        args = np.array([a for a, _ in pts], dtype=float)
        gaps = np.array([g for _, g in pts], dtype=float)
        return BlaschkeSequence(gaps=gaps, args=args, spec=spec)

    gaps: list[float] = []
    truncated = False
    for n in range(1, spec.count + 1):
        if spec.kind == "radial-geometric":
            g = spec.q ** n  # type: ignore[operator]
        elif spec.kind == "radial-factorial":
            g = gaps[-1] / n if gaps else 1.0
        else:  # radial-superexp
            g = spec.q ** (n * n)  # type: ignore[operator]
        if g < UNDERFLOW_GAP:
            truncated = True
            break
        gaps.append(g)
    tail_sum, tail_sqrt = _generator_tail_bounds(spec.kind, spec.q, gaps)
    return BlaschkeSequence(
        gaps=np.array(gaps, dtype=float),
        args=np.zeros(len(gaps), dtype=float),
        spec=spec,
        truncated=truncated,
        tail_gap_sum=tail_sum,
        tail_sqrt_gap_sum=tail_sqrt,
    )


# ---------------------------------------------------------------------------
# Thinness profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaEntry:
    """delta_j over the stored points, with a certified lower bound for the
    unstored tail: the true infinite product lies in [lower, value]."""

    j: int
    value: float
    lower: float
    certified: bool

    @property
    def error(self) -> float:
        return self.value - self.lower


@dataclass(frozen=True)
class DeltaProfile:
    entries: tuple[DeltaEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, j: int) -> DeltaEntry:
        e = self.entries[j - 1]
        assert e.j == j
        return e

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.entries])

    @property
    def lowers(self) -> np.ndarray:
        return np.array([e.lower for e in self.entries])

    @property
    def all_certified(self) -> bool:
        return all(e.certified for e in self.entries)


def delta_profile(seq: BlaschkeSequence, j_max: int | None = None,
                  tail_tol: float = 0.01) -> DeltaProfile:
    """Thinness profile delta_j = prod_{k != j} rho(lambda_j, lambda_k).

    Products run over all stored points and are accumulated in log space.
    The unstored tail is covered by the certified factor
    1 - 2 * tail_gap_sum / gap_j, which follows from the elementary bound
    1 - rho(lambda_j, lambda_k) <= 2 gap_k / gap_j and the Weierstrass
    inequality; entries whose tail correction exceeds tail_tol are flagged
    uncertified rather than rejected.
    """
    if len(seq) < 2:
        raise ValueError("profile needs at least 2 points")
    if tail_tol <= 0.0:
        raise ValueError("tail_tol must be positive")
    j_max = len(seq) if j_max is None else j_max
    if not (1 <= j_max <= len(seq)):
        raise IndexError(f"j_max {j_max} outside stored range [1, {len(seq)}]")

    entries = []
    for j in range(1, j_max + 1):
        g, a = seq.gaps[j - 1], seq.args[j - 1]
        logs = np.delete(log_rho(g, a, seq.gaps, seq.args), j - 1)
        if np.any(np.isneginf(logs)):
            raise DegenerateSequenceError(
                f"delta_{j} has a vanishing factor (coincident points)"
            )
        total = float(logs.sum())
        if total < _LOG_UNDERFLOW:
            raise NonInterpolatingError(
                f"delta_{j} underflows (log delta = {total:.3g}); "
                "sequence is not interpolating at working precision"
            )
        value = math.exp(total)
        tail_low = max(0.0, 1.0 - 2.0 * seq.tail_gap_sum / g)
        entries.append(DeltaEntry(
            j=j,
            value=value,
            lower=value * tail_low,
            certified=(1.0 - tail_low) <= tail_tol,
        ))
    return DeltaProfile(entries=tuple(entries))
