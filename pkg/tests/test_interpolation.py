import math

import numpy as np
import pytest

from thinseq.diskgeom import BlaschkeSequence, SequenceSpec, generate_sequence
from thinseq.inner import AtomicSingular, InnerFunction, truncated_blaschke
from thinseq.interpolation import (
    InterpolationProblem,
    NearSingularError,
    SolverContractViolation,
    eis_constant,
    exact_solver,
    h2_to_model_transfer,
    iterative_solve,
    min_norm_interpolant,
    scaled_solver,
)
from thinseq.kernels import build_gram, hardy_family, model_family
from thinseq.spectral import extremal_eigs, riesz_bounds


@pytest.fixture(scope="module")
def factorial_seq():
    return generate_sequence(SequenceSpec(kind="radial-factorial", count=15))


@pytest.fixture(scope="module")
def superexp_seq():
    return generate_sequence(SequenceSpec(kind="radial-superexp", q=0.5, count=15))


@pytest.fixture(scope="module")
def atomic():
    return InnerFunction(factors=(AtomicSingular(1.0, 0.0),))


class TestMinNorm:
    def test_single_point(self, factorial_seq):
        p = InterpolationProblem(hardy_family(), factorial_seq, 5, 5,
                                 np.array([1.0 + 0j]))
        sol = min_norm_interpolant(p)
        assert sol.coeffs[0] == pytest.approx(1.0)
        assert sol.norm == pytest.approx(1.0)

    def test_two_point_closed_form(self):
        # oracle: 2x2 with off-diagonal sqrt(1-r^2); at r = 1/2 and targets
        # (1, 0) the squared norm is 1/r^2 = 4
        seq = BlaschkeSequence(gaps=np.array([1.0, 0.5]), args=np.zeros(2))
        p = InterpolationProblem(hardy_family(), seq, 1, 2,
                                 np.array([1.0, 0.0], dtype=complex))
        sol = min_norm_interpolant(p)
        g = math.sqrt(0.75)
        expected = np.array([1.0, -g]) / (1 - g * g)
        assert np.allclose(sol.coeffs, expected, atol=1e-12)
        assert sol.norm == pytest.approx(2.0, abs=1e-12)

    def test_residual_and_norm_bracket(self, superexp_seq):
        rng = np.random.default_rng(0)
        gram = build_gram(hardy_family(), superexp_seq, 2, 12)
        eig = extremal_eigs(gram)
        for _ in range(20):
            a = rng.standard_normal(11) + 1j * rng.standard_normal(11)
            p = InterpolationProblem(hardy_family(), superexp_seq, 2, 12, a)
            sol = min_norm_interpolant(p)
            na = np.linalg.norm(a)
            assert sol.residual <= 1e-10 * na
            assert na / math.sqrt(eig.lambda_max) <= sol.norm * (1 + 1e-9)
            assert sol.norm <= na / math.sqrt(eig.lambda_min) * (1 + 1e-9)

    def test_norm_minimal_among_feasible_perturbations(self, superexp_seq):
        # the min-norm interpolant over finitely many constraints lies in
        # the window span; any interpolant drawn from a larger span that
        # still matches the targets cannot have smaller norm
        rng = np.random.default_rng(1)
        start, stop, extra_stop = 3, 9, 12
        a = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        p = InterpolationProblem(hardy_family(), superexp_seq, start, stop, a)
        sol = min_norm_interpolant(p)
        big = build_gram(hardy_family(), superexp_seq, start, extra_stop).matrix
        nwin = stop - start + 1
        for _ in range(300):
            d = np.zeros(extra_stop - start + 1, dtype=complex)
            d[nwin:] = rng.standard_normal(extra_stop - stop) \
                + 1j * rng.standard_normal(extra_stop - stop)
            # correct the window values back to the targets
            values = big @ d
            corr = np.linalg.solve(
                build_gram(hardy_family(), superexp_seq, start, stop).matrix,
                a - values[:nwin])
            d[:nwin] += corr
            norm_sq = float(np.real(np.vdot(d, big @ d)))
            assert norm_sq >= sol.norm ** 2 * (1 - 1e-9)

    def test_zero_targets(self, factorial_seq):
        p = InterpolationProblem(hardy_family(), factorial_seq, 3, 8,
                                 np.zeros(6, dtype=complex))
        sol = min_norm_interpolant(p)
        assert sol.norm == 0.0 and np.all(sol.coeffs == 0)

    def test_near_singular_reports_lambda_min(self):
        seq = BlaschkeSequence(gaps=np.array([0.5, 0.5]),
                               args=np.array([0.0, 1e-9]))
        p = InterpolationProblem(hardy_family(), seq, 1, 2,
                                 np.array([1.0, 0.0], dtype=complex))
        with pytest.raises(NearSingularError) as err:
            min_norm_interpolant(p)
        assert err.value.lambda_min < 1e-10


class TestEisConstant:
    def test_single_point(self, factorial_seq):
        e = eis_constant(hardy_family(), factorial_seq, 9, 9)
        assert e.value == 1.0

    def test_duality_identity(self, factorial_seq):
        for n in (1, 4, 8):
            rb = riesz_bounds(hardy_family(), factorial_seq, n, 15)
            e = eis_constant(hardy_family(), factorial_seq, n, 15)
            assert abs(e.value ** 2 * rb.c - 1.0) <= 1e-10

    def test_factorial_sweep_nonincreasing(self, factorial_seq):
        vals = [eis_constant(hardy_family(), factorial_seq, n, 15).value
                for n in range(1, 11)]
        assert all(b <= a + 1e-10 for a, b in zip(vals, vals[1:]))

    def test_superexp_sweep_approaches_one(self, superexp_seq):
        vals = [eis_constant(hardy_family(), superexp_seq, n, 15).value
                for n in range(1, 11)]
        assert all(b <= a + 1e-10 for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1.05

    def test_geometric_bounded_away_from_one(self):
        seq = generate_sequence(SequenceSpec(kind="radial-geometric", q=0.5,
                                             count=30))
        vals = [eis_constant(hardy_family(), seq, n, 30).value
                for n in (1, 5, 10, 15)]
        assert min(vals) > 1.5


class TestIterativeSolve:
    def test_exact_solver_single_step(self, superexp_seq):
        # symmetric targets keep the exact interpolant inside the norm
        # contract; convergence in one step with zero residual
        p = InterpolationProblem(hardy_family(), superexp_seq, 9, 10,
                                 np.array([1.0, 1.0], dtype=complex))
        sol, trace = iterative_solve(p, exact_solver(p), epsilon=1 / 3)
        assert len(trace.steps) == 1
        assert trace.final_residual <= 1e-12

    def test_zero_targets(self, superexp_seq):
        p = InterpolationProblem(hardy_family(), superexp_seq, 3, 10,
                                 np.zeros(8, dtype=complex))
        sol, trace = iterative_solve(p, exact_solver(p), epsilon=1 / 3)
        assert sol.norm == 0.0 and len(trace.steps) == 0

    def test_injected_residual_geometric_decay(self, superexp_seq):
        rng = np.random.default_rng(7)
        ratio = 0.25  # matches eps = 1/3 through eps/(1+eps)
        for _ in range(25):
            a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            p = InterpolationProblem(hardy_family(), superexp_seq, 3, 10, a)
            sol, trace = iterative_solve(p, scaled_solver(p, ratio), epsilon=1 / 3)
            na = float(np.linalg.norm(a))
            for s in trace.steps:
                assert s.target_norm <= ratio ** s.k * na * (1 + 1e-11)
                if s.k > 0:
                    assert s.target_norm / trace.steps[s.k - 1].target_norm \
                        <= ratio + 1e-12
            assert trace.final_residual <= 1e-10 * na
            assert sol.norm <= (1 + 1 / 3) * na + 1e-8

    def test_norm_contract_violation_detected(self, superexp_seq):
        p = InterpolationProblem(hardy_family(), superexp_seq, 3, 10,
                                 np.ones(8, dtype=complex))
        with pytest.raises(SolverContractViolation) as err:
            iterative_solve(p, lambda a: 5.0 * np.asarray(a), epsilon=1 / 3)
        assert err.value.step == 0

    def test_residual_contract_violation_detected(self, superexp_seq):
        # returning half the exact solution leaves residual 0.5 ||a||,
        # above the eps/(1+eps) = 0.25 contract
        p = InterpolationProblem(hardy_family(), superexp_seq, 3, 10,
                                 np.ones(8, dtype=complex))
        with pytest.raises(SolverContractViolation) as err:
            iterative_solve(p, scaled_solver(p, 0.5), epsilon=1 / 3)
        assert "residual" in str(err.value)

    def test_epsilon_validation(self, superexp_seq):
        p = InterpolationProblem(hardy_family(), superexp_seq, 3, 10,
                                 np.ones(8, dtype=complex))
        with pytest.raises(ValueError):
            iterative_solve(p, exact_solver(p), epsilon=1.5)


class TestTransfer:
    def test_vanishing_theta_exact(self, factorial_seq):
        theta = InnerFunction(factors=(truncated_blaschke(factorial_seq, 15),))
        rng = np.random.default_rng(3)
        a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        p = InterpolationProblem(hardy_family(), factorial_seq, 3, 10, a)
        t = h2_to_model_transfer(p, theta)
        assert t.kappa == 0.0
        assert t.residual <= 1e-9 * np.linalg.norm(a)

    def test_atomic_residual_within_kappa_scale(self, factorial_seq, atomic):
        # window starting at 3: kappa_3 = exp(-11) < 1e-3
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            p = InterpolationProblem(hardy_family(), factorial_seq, 3, 10, a)
            t = h2_to_model_transfer(p, atomic)
            na = float(np.linalg.norm(a))
            assert t.kappa < 1e-3
            assert t.residual <= 10.0 * t.kappa * na
            assert t.residual <= t.residual_bound

    def test_zero_targets(self, factorial_seq, atomic):
        p = InterpolationProblem(hardy_family(), factorial_seq, 3, 10,
                                 np.zeros(8, dtype=complex))
        t = h2_to_model_transfer(p, atomic)
        assert t.residual == 0.0
        assert np.all(t.coeffs == 0)

    def test_model_problem_rejected(self, factorial_seq, atomic):
        p = InterpolationProblem(model_family(atomic), factorial_seq, 3, 10,
                                 np.zeros(8, dtype=complex))
        with pytest.raises(ValueError):
            h2_to_model_transfer(p, atomic)

    def test_transfer_consistency_of_constants(self, factorial_seq, atomic):
        # model min-norm constant <= hardy constant / sqrt(1 - kappa^2)
        from thinseq.inner import tail_kappa

        eh = eis_constant(hardy_family(), factorial_seq, 3, 10)
        em = eis_constant(model_family(atomic), factorial_seq, 3, 10)
        kap = tail_kappa(atomic, factorial_seq, 3)
        assert em.value <= eh.value / math.sqrt(1 - kap * kap) * (1 + 1e-9)

    def test_matches_direct_model_solution(self, factorial_seq, atomic):
        rng = np.random.default_rng(9)
        a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        ph = InterpolationProblem(hardy_family(), factorial_seq, 3, 10, a)
        t = h2_to_model_transfer(ph, atomic)
        pm = InterpolationProblem(model_family(atomic), factorial_seq, 3, 10, a)
        direct = min_norm_interpolant(pm)
        # kappa is tiny on this window, so the transferred solution is the
        # direct minimal-norm solution up to O(kappa)
        assert abs(t.hardy_norm - direct.norm) <= 20 * t.kappa * direct.norm
