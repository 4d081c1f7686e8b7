import math

import numpy as np
import pytest

from thinseq.diskgeom import BlaschkeSequence, GapPoint, SequenceSpec, generate_sequence
from thinseq.inner import AtomicSingular, InnerFunction, monomial, truncated_blaschke
from thinseq.kernels import (
    DegenerateKernelError,
    KernelCombination,
    build_gram,
    hardy_family,
    model_family,
    model_inner,
    model_kernel,
    project_model,
    szego_inner,
    szego_kernel,
)
from thinseq.spectral import jacobi_eigh


@pytest.fixture(scope="module")
def factorial_seq():
    return generate_sequence(SequenceSpec(kind="radial-factorial", count=15))


@pytest.fixture(scope="module")
def mixed_theta():
    return InnerFunction(factors=(AtomicSingular(1.0, 0.0),
                                  monomial(1).factors[0]))


class TestSzego:
    def test_normalization_at_equal_points(self):
        z = GapPoint(0.8, 0.3)
        assert szego_inner(z, z) == pytest.approx(1.0, abs=1e-15)

    def test_origin_against_hand_value(self):
        for r in (0.3, 0.6, 0.9):
            assert szego_inner(0.0, r) == pytest.approx(
                math.sqrt(1 - r * r), rel=1e-14)

    def test_antipodal_hand_value(self):
        for r in (0.3, 0.6):
            assert szego_inner(r, -r) == pytest.approx(
                (1 - r * r) / (1 + r * r), rel=1e-14)


class TestModelKernel:
    def test_monomial_collapses_to_constant(self):
        theta = monomial(1)
        for lam, z in ((0.2, 0.5), (complex(0.1, 0.3), complex(-0.4, 0.2))):
            assert model_kernel(theta, lam, z) == pytest.approx(1.0, abs=1e-13)

    def test_cube_against_geometric_sum(self):
        theta = monomial(3)
        rng = np.random.default_rng(2)
        for _ in range(50):
            lam = rng.uniform(0, 0.9) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            z = rng.uniform(0, 0.9) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            lc = lam.conjugate()
            expected = 1 + lc * z + lc ** 2 * z ** 2
            assert model_kernel(theta, lam, z) == pytest.approx(expected, rel=1e-12)

    def test_vanishing_theta_collapses_to_szego(self, factorial_seq):
        theta = InnerFunction(factors=(truncated_blaschke(factorial_seq, 15),))
        lam = factorial_seq.point(3)
        z = factorial_seq.point(7)
        assert model_kernel(theta, lam, z) == pytest.approx(
            szego_kernel(lam, z), rel=1e-13)

    def test_diagonal_positive(self, mixed_theta):
        lam = GapPoint(1.0, 0.4)
        v = model_kernel(mixed_theta, lam, lam)
        assert v.imag == 0.0 and v.real > 0.0


class TestModelInner:
    def test_unit_diagonal(self, mixed_theta):
        lam = GapPoint(0.5, 0.2)
        assert model_inner(mixed_theta, lam, lam) == pytest.approx(1.0, abs=1e-15)

    def test_square_monomial_hand_value(self):
        theta = monomial(2)
        for r in (0.3, 0.7):
            assert model_inner(theta, 0.0, r) == pytest.approx(
                1.0 / math.sqrt(1 + r * r), rel=1e-13)

    def test_collapse_when_theta_vanishes(self, factorial_seq):
        theta = InnerFunction(factors=(truncated_blaschke(factorial_seq, 15),))
        a, b = factorial_seq.point(2), factorial_seq.point(9)
        assert model_inner(theta, a, b) == pytest.approx(
            szego_inner(a, b), rel=1e-13)


class TestDecomposition:
    def test_pointwise_identity_random(self, factorial_seq, mixed_theta):
        thetas = [monomial(2), mixed_theta,
                  InnerFunction(factors=(AtomicSingular(0.5, 1.0),)),
                  InnerFunction(factors=(truncated_blaschke(factorial_seq, 8),))]
        rng = np.random.default_rng(4)
        worst = 0.0
        for i in range(400):
            theta = thetas[i % len(thetas)]
            lam = GapPoint(rng.uniform(0, 2 * np.pi), rng.uniform(0.1, 1.0))
            z = GapPoint(rng.uniform(0, 2 * np.pi), rng.uniform(0.1, 1.0))
            k = szego_kernel(lam, z)
            kt = model_kernel(theta, lam, z)
            tl = theta.eval(lam).value
            tz = theta.eval(z).value
            worst = max(worst, abs(k - kt - tz * tl.conjugate() * k))
        assert worst <= 1e-12


class TestGramWindow:
    def test_single_point(self, factorial_seq):
        gw = build_gram(hardy_family(), factorial_seq, 4, 4)
        assert gw.matrix.shape == (1, 1)
        assert gw.matrix[0, 0] == 1.0

    def test_two_point_offdiagonal(self):
        seq = BlaschkeSequence(gaps=np.array([1.0, 0.5]), args=np.zeros(2))
        gw = build_gram(hardy_family(), seq, 1, 2)
        assert gw.matrix[0, 1] == pytest.approx(math.sqrt(0.75), rel=1e-14)

    def test_factorial_window_offdiagonal_max(self, factorial_seq):
        # oracle: scan of the direct normalized inner products; the maximum
        # sits on the first adjacent pair, 2 sqrt(x)/(1+x) with x = 1/6up
        gw = build_gram(hardy_family(), factorial_seq, 5, 15)
        off = np.abs(gw.matrix - np.eye(gw.size))
        oracle = max(
            abs(szego_inner(factorial_seq.point(i), factorial_seq.point(j)))
            for i in range(5, 16) for j in range(i + 1, 16))
        assert off.max() == pytest.approx(oracle, rel=1e-12)
        assert off.max() == pytest.approx(0.698984244501269, rel=1e-12)

    def test_hermitian_unit_diagonal_psd(self, factorial_seq, mixed_theta):
        for fam in (hardy_family(), model_family(mixed_theta)):
            gw = build_gram(fam, factorial_seq, 2, 12)
            m = gw.matrix
            assert np.allclose(m, m.conj().T, atol=1e-14)
            assert np.all(np.diag(m) == 1.0)
            assert np.abs(m).max() <= 1.0 + 1e-12
            w, _ = jacobi_eigh(m)
            assert w[0] >= -1e-10

    def test_certificate_nonnegative_and_monotone_in_cutoff(self, factorial_seq):
        c_early = build_gram(hardy_family(), factorial_seq, 2, 8).truncation_certificate
        c_late = build_gram(hardy_family(), factorial_seq, 2, 14).truncation_certificate
        assert c_early > c_late >= 0.0

    def test_explicit_sequence_has_small_certificate(self):
        seq = generate_sequence(SequenceSpec(
            kind="explicit", points=((0.0, 0.5), (1.0, 0.25), (2.0, 0.125))))
        gw = build_gram(hardy_family(), seq, 1, 3)
        assert gw.truncation_certificate == 0.0


class TestProjection:
    def _random_combo(self, rng, n=3):
        gaps = rng.uniform(0.2, 1.0, n)
        args = rng.uniform(0, 2 * math.pi, n)
        coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return KernelCombination(hardy_family(), gaps, args, coeffs,
                                 normalized=False)

    def test_identity_when_theta_vanishes(self, factorial_seq):
        theta = InnerFunction(factors=(truncated_blaschke(factorial_seq, 15),))
        g, a = factorial_seq.window(3, 6)
        combo = KernelCombination(hardy_family(), g, a,
                                  np.array([1.0, -0.5j, 0.25, 2.0]),
                                  normalized=False)
        pair = project_model(combo, theta)
        for z in (0.1, complex(0.2, 0.3), complex(-0.5, 0.1)):
            assert pair.model.evaluate(z) == pytest.approx(
                combo.evaluate(z), rel=1e-12)

    def test_single_kernel_monomial_projection(self):
        # P with theta = z sends K_r to the constant 1, and the pointwise
        # identity K_r(z) = 1 + z r K_r(z) holds on a grid
        r = 0.6
        combo = KernelCombination(hardy_family(), np.array([1 - r]),
                                  np.array([0.0]), np.array([1.0 + 0j]),
                                  normalized=False)
        pair = project_model(combo, monomial(1))
        for z in np.linspace(-0.9, 0.9, 21):
            assert pair.model.evaluate(z) == pytest.approx(1.0, abs=1e-13)
            k = 1.0 / (1.0 - r * z)
            assert k == pytest.approx(1.0 + z * r * k, rel=1e-13)

    def test_pointwise_toeplitz_identity(self, mixed_theta):
        rng = np.random.default_rng(9)
        for _ in range(100):
            combo = self._random_combo(rng)
            pair = project_model(combo, mixed_theta)
            zg = rng.uniform(0.05, 1.0)
            za = rng.uniform(0, 2 * math.pi)
            f = combo.evaluate_many([zg], [za])[0]
            fm = pair.model.evaluate_many([zg], [za])[0]
            ft = pair.toeplitz.evaluate_many([zg], [za])[0]
            tz, _, _ = mixed_theta.eval_many(np.array([zg]), np.array([za]))
            assert abs(f - fm - tz[0] * ft) <= 1e-12

    def test_orthogonal_split_of_norms(self, mixed_theta):
        # Pythagoras through Gram forms: ||f||^2 = ||P f||^2 + ||theta T f||^2
        # with multiplication by an inner function isometric; this is the
        # quadratic form of projecting twice equalling projecting once
        rng = np.random.default_rng(11)
        for _ in range(50):
            combo = self._random_combo(rng)
            pair = project_model(combo, mixed_theta)
            total = pair.model.norm_sq() + pair.toeplitz.norm_sq()
            assert total == pytest.approx(combo.norm_sq(), rel=1e-12)

    def test_norm_contraction(self, mixed_theta):
        rng = np.random.default_rng(13)
        for _ in range(50):
            combo = self._random_combo(rng)
            pair = project_model(combo, mixed_theta)
            assert pair.model.norm() <= combo.norm() * (1 + 1e-12)

    def test_requires_unnormalized_hardy(self, mixed_theta):
        combo = KernelCombination(hardy_family(), np.array([0.5]),
                                  np.array([0.0]), np.array([1.0 + 0j]),
                                  normalized=True)
        with pytest.raises(ValueError):
            project_model(combo, mixed_theta)


class TestCombinationNorms:
    def test_norm_matches_direct_gram_quadratic(self):
        rng = np.random.default_rng(17)
        gaps = rng.uniform(0.3, 0.9, 4)
        args = rng.uniform(0, 2 * math.pi, 4)
        coeffs = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        combo = KernelCombination(hardy_family(), gaps, args, coeffs,
                                  normalized=True)
        seq = BlaschkeSequence(gaps=gaps, args=args)
        gram = build_gram(hardy_family(), seq, 1, 4).matrix
        direct = float(np.real(np.vdot(coeffs, gram @ coeffs)))
        assert combo.norm_sq() == pytest.approx(direct, rel=1e-12)

    def test_normalized_values_are_gram_action(self):
        rng = np.random.default_rng(19)
        gaps = rng.uniform(0.3, 0.9, 3)
        args = rng.uniform(0, 2 * math.pi, 3)
        coeffs = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        combo = KernelCombination(hardy_family(), gaps, args, coeffs,
                                  normalized=True)
        seq = BlaschkeSequence(gaps=gaps, args=args)
        gram = build_gram(hardy_family(), seq, 1, 3).matrix
        assert np.allclose(combo.normalized_values(), gram @ coeffs, atol=1e-13)
