"""Verification suites T1 - T7 over a configured corpus.

Each suite checks one cluster of the library's quantitative claims on
sequences tagged with an expectation (thin or non-thin) and reports
computed values against fixed thresholds.  The thresholds target the
"constants tend to 1" behaviour: a rapidly thinning sequence passes the
thin-side checks, and a geometric sequence serves as negative control.

One deliberate adjustment: profile monotonicity is checked from the
second index on.  The first point of a one-sided accumulating sequence
has neighbours on one side only, so delta_1 generically exceeds delta_2
and the all-index check would reject every radial family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .carleson import GridSpec, mu_measure, reproducing_constant, sigma_measure
from .config import CorpusEntry, Tolerances, VerifyConfig
from .diskgeom import BlaschkeSequence, GapPoint, SequenceSpec, delta_profile, generate_sequence
from .earl import BeurlingSystem, earl_bound
from .inner import AtomicSingular, InnerFunction, monomial, tail_kappa
from .interpolation import InterpolationProblem, iterative_solve, scaled_solver
from .kernels import (
    KernelCombination,
    hardy_family,
    model_family,
    project_model,
)
from .spectral import riesz_bounds

__all__ = [
    "SuiteResult",
    "run_suites",
    "default_verify_config",
    "default_beurling_window",
    "SUITE_NAMES",
    "run_iterative_contract_check",
    "run_toeplitz_identity_check",
    "run_beurling_check",
]

SUITE_NAMES = ("T1", "T2", "T3", "T4", "T5", "T6", "T7")

# Thresholds for the thin-side checks.
DELTA_TARGET_INDEX = 12
DELTA_TARGET = 0.999
NONTHIN_DELTA_CAP = 0.9
CARLESON_TARGET_N = 10
CARLESON_TARGET = 0.05
NONTHIN_CARLESON_FLOOR = 0.1
NONTHIN_CARLESON_RANGE = 20
EIS_TARGET_N = 10
EIS_TARGET = 1.05
KAPPA_TARGET_N = 10
KAPPA_TARGET = 1e-3
RATIO_LO, RATIO_HI = 0.95, 1.05
ITER_RESIDUAL = 0.25
ITER_EPSILON = 1.0 / 3.0
ITER_VECTORS = 100
ITER_STEP_SLACK = 1e-11
IDENTITY_TRIPLES = 1000
IDENTITY_TOL = 1e-12
BEURLING_KRONECKER_TOL = 1e-12
BEURLING_SUP_SLACK = 0.01


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    details: tuple[str, ...]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# Reusable check runners (corpus-independent cores)
# ---------------------------------------------------------------------------

def run_iterative_contract_check(seq: BlaschkeSequence, start: int, stop: int,
                                 seed: int, n_vectors: int = ITER_VECTORS,
                                 ) -> tuple[bool, list[str]]:
    """Injected-residual iterative interpolation: geometric decay of the
    per-step targets against the independent geometric-series bound."""
    details: list[str] = []
    n = stop - start + 1
    rng = np.random.default_rng(seed)
    ratio = ITER_RESIDUAL
    ok = True
    worst_step, worst_norm, worst_final = 0.0, 0.0, 0.0
    for _ in range(n_vectors):
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        prob = InterpolationProblem(hardy_family(), seq, start, stop, a)
        sol, trace = iterative_solve(prob, scaled_solver(prob, ratio),
                                     epsilon=ITER_EPSILON)
        na = float(np.linalg.norm(a))
        for s in trace.steps:
            if s.k > 10:
                break
            bound = ratio ** s.k * na * (1.0 + ITER_STEP_SLACK)
            worst_step = max(worst_step, s.target_norm / bound)
        worst_final = max(worst_final, trace.final_residual / na)
        worst_norm = max(worst_norm,
                         sol.norm - (1.0 + ITER_EPSILON) * na)
    if worst_step > 1.0:
        ok = False
        details.append(f"per-step decay bound violated by factor {_fmt(worst_step)}")
    if worst_final > 1e-10:
        ok = False
        details.append(f"final residual {_fmt(worst_final)} ||a|| exceeds 1e-10 ||a||")
    if worst_norm > 1e-8:
        ok = False
        details.append(f"final norm exceeds (1+eps)||a|| by {_fmt(worst_norm)}")
    details.append(
        f"{n_vectors} random targets on window [{start},{stop}]: "
        f"worst step ratio {_fmt(worst_step)}, worst final residual "
        f"{_fmt(worst_final)} ||a||")
    return ok, details


def _default_identity_thetas() -> list[InnerFunction]:
    return [
        monomial(1),
        monomial(3),
        InnerFunction(factors=(AtomicSingular(mass=1.0),)),
        InnerFunction(factors=(AtomicSingular(mass=0.5, boundary_arg=math.pi / 3),)),
        InnerFunction(factors=(
            AtomicSingular(mass=0.7),
            monomial(2).factors[0],
        )),
    ]


def run_toeplitz_identity_check(thetas: list[InnerFunction], seed: int,
                                n_triples: int = IDENTITY_TRIPLES,
                                ) -> tuple[bool, list[str]]:
    """Pointwise f = P_T f + theta T_conj(theta) f on random kernel
    combinations, plus the projection norm contraction via Gram forms."""
    rng = np.random.default_rng(seed)
    worst_id, worst_contract = 0.0, 0.0
    for i in range(n_triples):
        theta = thetas[i % len(thetas)]
        n = int(rng.integers(1, 5))
        gaps = rng.uniform(0.1, 1.0, n)
        args = rng.uniform(0.0, 2.0 * math.pi, n)
        coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        combo = KernelCombination(hardy_family(), gaps, args, coeffs,
                                  normalized=False)
        pair = project_model(combo, theta)
        zg, za = rng.uniform(0.05, 1.0), rng.uniform(0.0, 2.0 * math.pi)
        f = combo.evaluate_many([zg], [za])[0]
        fm = pair.model.evaluate_many([zg], [za])[0]
        ft = pair.toeplitz.evaluate_many([zg], [za])[0]
        tz, _, _ = theta.eval_many(np.array([zg]), np.array([za]))
        worst_id = max(worst_id, abs(f - fm - tz[0] * ft))
        worst_contract = max(worst_contract,
                             pair.model.norm() - combo.norm() * (1 + 1e-12))
    ok = worst_id <= IDENTITY_TOL and worst_contract <= 1e-12
    details = [f"{n_triples} triples: worst identity defect {_fmt(worst_id)}, "
               f"worst contraction excess {_fmt(max(worst_contract, 0.0))}"]
    return ok, details


def default_beurling_window() -> SequenceSpec:
    """Early window of a thin sequence built from paired clusters: four
    boundary directions, two points per cluster, pair separation growing
    along the sequence (so the infinite continuation is thin) while the
    window's own separation stays moderate."""
    phi = 2.399963229728653  # golden angle
    pts = []
    for n in range(1, 5):
        h = 2.0 * 10.0 ** (-(n + 1))
        th = (n * phi) % (2.0 * math.pi)
        c = 2.0 ** (n - 1)
        pts.append((th, h))
        pts.append((th + c * h, h))
    return SequenceSpec(kind="explicit", points=tuple(pts))


def run_beurling_check(window_spec: SequenceSpec, grid: GridSpec,
                       ) -> tuple[bool, list[str]]:
    """Dual-system checks: Kronecker property, Earl bound value, and the
    grid supremum of sum |f_j| against earl_bound(gamma)."""
    ok = True
    details: list[str] = []
    ref = earl_bound(1.0 / math.sqrt(2.0))
    if abs(ref - (3.0 + 2.0 * math.sqrt(2.0))) > 1e-12:
        ok = False
        details.append(f"earl_bound(1/sqrt 2) = {ref!r} != 3 + 2 sqrt 2")
    window = generate_sequence(window_spec)
    system = BeurlingSystem.from_window(window)
    worst = 0.0
    for j in range(1, system.size + 1):
        vals = system.evaluate(j, window.gaps, window.args)
        target = np.zeros(system.size)
        target[j - 1] = 1.0
        worst = max(worst, float(np.abs(vals - target).max()))
    if worst > BEURLING_KRONECKER_TOL:
        ok = False
        details.append(f"Kronecker defect {_fmt(worst)} exceeds 1e-12")
    sup, _, _ = system.sup_sum_abs(grid)
    bound = system.bound()
    if sup > bound + BEURLING_SUP_SLACK:
        ok = False
        details.append(f"grid sup {_fmt(sup)} exceeds bound {_fmt(bound)} + 0.01")
    details.append(
        f"window gamma {_fmt(system.gamma)}: sup sum|f_j| = {_fmt(sup)}, "
        f"bound {_fmt(bound)}")
    return ok, details


# ---------------------------------------------------------------------------
# Corpus-driven suites
# ---------------------------------------------------------------------------

def _suite_t1(config: VerifyConfig) -> SuiteResult:
    ok = True
    details = []
    for entry in config.corpus:
        seq = generate_sequence(entry.sequence)
        profile = delta_profile(seq, tail_tol=math.inf)
        vals = profile.values
        lows = profile.lowers
        if entry.expect == "thin":
            mono = bool(np.all(np.diff(vals[1:]) >= 0.0))
            if not mono:
                ok = False
                details.append(f"{entry.name}: profile not nondecreasing for j >= 2")
            if len(seq) >= DELTA_TARGET_INDEX:
                d12 = lows[DELTA_TARGET_INDEX - 1]
                if not d12 > DELTA_TARGET:
                    ok = False
                details.append(
                    f"{entry.name}: delta_{DELTA_TARGET_INDEX} = {_fmt(d12)} "
                    f"(target > {DELTA_TARGET})")
            else:
                ok = False
                details.append(f"{entry.name}: fewer than {DELTA_TARGET_INDEX} points")
        else:
            mx = float(vals.max())
            if not mx < NONTHIN_DELTA_CAP:
                ok = False
            details.append(f"{entry.name}: max delta_j = {_fmt(mx)} "
                           f"(cap {NONTHIN_DELTA_CAP})")
    return SuiteResult("T1", ok, tuple(details))


def _carleson_series(entry: CorpusEntry, config: VerifyConfig, n_max: int):
    seq = generate_sequence(entry.sequence)
    m = len(seq)
    out = []
    for n in range(1, min(n_max, m) + 1):
        rb = riesz_bounds(hardy_family(), seq, n, m,
                          tol=config.tolerances.eig, seed=config.seed + n)
        out.append((n, rb.C, rb.certificate + rb.eigen.residual_max))
    return out


def _suite_t2(config: VerifyConfig) -> SuiteResult:
    ok = True
    details = []
    for entry in config.corpus:
        if entry.expect == "thin":
            series = _carleson_series(entry, config, CARLESON_TARGET_N)
            values = [v for _, v, _ in series]
            if not all(b <= a + 1e-12 for a, b in zip(values, values[1:])):
                ok = False
                details.append(f"{entry.name}: C(mu_N) not nonincreasing")
            n, v, err = series[-1]
            if n < CARLESON_TARGET_N or not (v - 1.0 + err) < CARLESON_TARGET:
                ok = False
            details.append(
                f"{entry.name}: C(mu_{n}) - 1 + err = {_fmt(v - 1.0 + err)} "
                f"(target < {CARLESON_TARGET})")
        else:
            series = _carleson_series(entry, config, NONTHIN_CARLESON_RANGE)
            floor = min(v - 1.0 for _, v, _ in series)
            if not floor > NONTHIN_CARLESON_FLOOR:
                ok = False
            details.append(f"{entry.name}: min C(mu_N) - 1 = {_fmt(floor)} "
                           f"(floor {NONTHIN_CARLESON_FLOOR})")
    return SuiteResult("T2", ok, tuple(details))


def _suite_t3(config: VerifyConfig) -> SuiteResult:
    ok = True
    details = []
    hf = hardy_family()
    for entry in config.corpus:
        seq = generate_sequence(entry.sequence)
        m = len(seq)
        for n in (1, min(EIS_TARGET_N, m - 1)):
            rb = riesz_bounds(hf, seq, n, m, tol=config.tolerances.eig,
                              seed=config.seed + n)
            eis = 1.0 / math.sqrt(rb.c)
            defect = abs(eis * eis * rb.c - 1.0)
            if defect > 1e-10:
                ok = False
                details.append(f"{entry.name}: duality defect {defect:.3e} at N={n}")
        if entry.expect == "thin":
            n = min(EIS_TARGET_N, m - 1)
            rb = riesz_bounds(hf, seq, n, m, tol=config.tolerances.eig,
                              seed=config.seed + n)
            eis = 1.0 / math.sqrt(rb.c)
            if n < EIS_TARGET_N or not eis < EIS_TARGET:
                ok = False
            details.append(f"{entry.name}: eis(N={n}) = {_fmt(eis)} "
                           f"(target < {EIS_TARGET})")
    return SuiteResult("T3", ok, tuple(details))


def _suite_t4(config: VerifyConfig) -> SuiteResult:
    ok = True
    details = []
    ran = False
    for entry in config.corpus:
        theta = entry.theta()
        if entry.expect != "thin" or theta is None:
            continue
        ran = True
        seq = generate_sequence(entry.sequence)
        m = len(seq)
        if m <= KAPPA_TARGET_N:
            ok = False
            details.append(f"{entry.name}: fewer than {KAPPA_TARGET_N + 1} points")
            continue
        kappa = tail_kappa(theta, seq, KAPPA_TARGET_N)
        if not kappa < KAPPA_TARGET:
            ok = False
        details.append(f"{entry.name}: kappa_{KAPPA_TARGET_N} = {kappa:.3e} "
                       f"(target < {KAPPA_TARGET})")
        mf = model_family(theta)
        worst_ratio_lo, worst_ratio_hi = 1.0, 1.0
        chain_ok = True
        for n in range(1, m + 1):
            rbh = riesz_bounds(hardy_family(), seq, n, m,
                               tol=config.tolerances.eig, seed=config.seed + n)
            rbm = riesz_bounds(mf, seq, n, m,
                               tol=config.tolerances.eig, seed=config.seed + n)
            rs = reproducing_constant(sigma_measure(seq, n, m, theta), mf,
                                      config.grid)
            if not (1.0 - 1e-10 <= rs.value <= rbm.C * (1.0 + 1e-10) + 1e-12):
                chain_ok = False
            if n >= KAPPA_TARGET_N:
                ratio = rbm.C / rbh.C
                worst_ratio_lo = min(worst_ratio_lo, ratio)
                worst_ratio_hi = max(worst_ratio_hi, ratio)
        if not (RATIO_LO <= worst_ratio_lo and worst_ratio_hi <= RATIO_HI):
            ok = False
        details.append(
            f"{entry.name}: C_theta(sigma)/C(mu) in "
            f"[{_fmt(worst_ratio_lo)}, {_fmt(worst_ratio_hi)}] for N >= "
            f"{KAPPA_TARGET_N} (target [{RATIO_LO}, {RATIO_HI}])")
        if not chain_ok:
            ok = False
            details.append(f"{entry.name}: chain 1 <= R2 <= C violated")
    if not ran:
        ok = False
        details.append("no thin corpus entry carries an inner function")
    return SuiteResult("T4", ok, tuple(details))


def _suite_t5(config: VerifyConfig) -> SuiteResult:
    for entry in config.corpus:
        if entry.expect != "thin":
            continue
        seq = generate_sequence(entry.sequence)
        if len(seq) < 10:
            continue
        ok, details = run_iterative_contract_check(seq, 3, 10, config.seed)
        return SuiteResult("T5", ok, (f"{entry.name}:", *details))
    return SuiteResult("T5", False, ("no thin corpus entry with >= 10 points",))


def _suite_t6(config: VerifyConfig) -> SuiteResult:
    thetas = _default_identity_thetas()
    for entry in config.corpus:
        theta = entry.theta()
        if theta is not None:
            thetas.append(theta)
    ok, details = run_toeplitz_identity_check(thetas, config.seed)
    return SuiteResult("T6", ok, tuple(details))


def _suite_t7(config: VerifyConfig) -> SuiteResult:
    spec = config.beurling_window or default_beurling_window()
    ok, details = run_beurling_check(spec, config.grid)
    return SuiteResult("T7", ok, tuple(details))


_SUITES = {
    "T1": _suite_t1,
    "T2": _suite_t2,
    "T3": _suite_t3,
    "T4": _suite_t4,
    "T5": _suite_t5,
    "T6": _suite_t6,
    "T7": _suite_t7,
}


def run_suites(config: VerifyConfig) -> list[SuiteResult]:
    from .config import ConfigError

    names = config.suites if config.suites is not None else SUITE_NAMES
    if not config.corpus or not names:
        raise ConfigError("corpus", "no suites selected")
    unknown = [n for n in names if n not in _SUITES]
    if unknown:
        raise ConfigError("suites", f"unknown suite names {unknown}")
    return [_SUITES[name](config) for name in names]


def default_verify_config(seed: int = 0) -> VerifyConfig:
    """Built-in corpus: a rapidly thinning sequence with an atomic inner
    function, and a geometric negative control."""
    from .config import CorpusEntry

    thin = CorpusEntry(
        name="superexp-thin",
        sequence=SequenceSpec(kind="radial-superexp", q=0.5, count=15),
        theta_dict={"factors": [{"kind": "atomic-singular", "mass": 1.0,
                                 "boundary_arg": 0.0}]},
        expect="thin")
    control = CorpusEntry(
        name="geometric-control",
        sequence=SequenceSpec(kind="radial-geometric", q=0.5, count=30),
        theta_dict=None,
        expect="non-thin")
    return VerifyConfig(corpus=(thin, control),
                        beurling_window=default_beurling_window(),
                        suites=None, tolerances=Tolerances(),
                        grid=GridSpec(), seed=seed)
