import math

import numpy as np
import pytest

from thinseq.diskgeom import BlaschkeSequence, GapPoint, SequenceSpec, generate_sequence
from thinseq.inner import (
    AtomicSingular,
    FiniteBlaschke,
    InnerFunction,
    TruncatedBlaschke,
    monomial,
    tail_kappa,
    truncated_blaschke,
)


@pytest.fixture(scope="module")
def factorial_seq():
    return generate_sequence(SequenceSpec(kind="radial-factorial", count=15))


@pytest.fixture(scope="module")
def atomic():
    return InnerFunction(factors=(AtomicSingular(mass=1.0, boundary_arg=0.0),))


def corpus_thetas(factorial_seq):
    return [
        monomial(1),
        monomial(3),
        InnerFunction(factors=(AtomicSingular(1.0, 0.0),)),
        InnerFunction(factors=(AtomicSingular(0.5, math.pi / 2),)),
        InnerFunction(factors=(FiniteBlaschke(zeros=(GapPoint(0.3, 0.4),
                                                     GapPoint(2.0, 0.7))),)),
        InnerFunction(factors=(truncated_blaschke(factorial_seq, 10),)),
        InnerFunction(factors=(AtomicSingular(0.7, 1.0),
                               monomial(2).factors[0])),
    ]


class TestEvaluation:
    def test_monomial_factor(self):
        assert monomial(1).eval(0.3).value == pytest.approx(0.3, abs=1e-15)

    def test_atomic_scalar_formula(self):
        # direct scalar oracle exp(-(1+r)/(1-r)) on the radius
        theta = InnerFunction(factors=(AtomicSingular(1.0, 0.0),))
        assert theta.eval(0.0).value == pytest.approx(math.exp(-1.0), abs=1e-15)
        for r in (0.1, 0.5, 0.9):
            expected = math.exp(-(1 + r) / (1 - r))
            v = theta.eval(r)
            assert abs(v.value) == pytest.approx(expected, rel=1e-13)
            assert v.mod_low == pytest.approx(v.mod_high, rel=0)

    def test_zero_of_blaschke_factor(self):
        z = GapPoint(arg=0.4, gap=0.35)
        theta = InnerFunction(factors=(FiniteBlaschke(zeros=(z,)), ))
        out = theta.eval(z)
        assert out.value == 0.0
        assert out.mod_low == 0.0 and out.mod_high == 0.0

    def test_monomial_power(self):
        z = complex(0.4, 0.2)
        assert monomial(3).eval(z).value == pytest.approx(z ** 3, abs=1e-15)

    def test_max_modulus_on_random_grid(self, factorial_seq):
        rng = np.random.default_rng(0)
        gaps = rng.uniform(1e-6, 1.0, 10_000)
        args = rng.uniform(0, 2 * math.pi, 10_000)
        for theta in corpus_thetas(factorial_seq):
            _, _, hi = theta.eval_many(gaps, args)
            assert hi.max() <= 1.0 + 1e-12

    def test_product_of_factors(self):
        a = InnerFunction(factors=(AtomicSingular(0.5, 0.0),
                                   monomial(2).factors[0]))
        z = complex(0.3, -0.1)
        expected = (cmathexp := np.exp(-0.5 * (1 + z) / (1 - z))) * z ** 2
        assert a.eval(z).value == pytest.approx(expected, rel=1e-13)


class TestTruncated:
    def test_interval_contains_longer_product(self):
        long = generate_sequence(SequenceSpec(kind="radial-factorial", count=30))
        short_factor = truncated_blaschke(long, 12)
        theta_short = InnerFunction(factors=(short_factor,))
        theta_long = InnerFunction(factors=(truncated_blaschke(long, 30),))
        rng = np.random.default_rng(3)
        gaps = rng.uniform(0.05, 1.0, 200)
        args = rng.uniform(0, 2 * math.pi, 200)
        _, lo, hi = theta_short.eval_many(gaps, args)
        _, _, ref_hi = theta_long.eval_many(gaps, args)
        # the 30-point product still omits an (even smaller) tail; its
        # modulus must sit inside the 12-point certificate
        assert np.all(ref_hi <= hi + 1e-12)
        assert np.all(ref_hi >= lo - 1e-12)

    def test_tail_sum_covers_stored_and_unstored(self, factorial_seq):
        f = truncated_blaschke(factorial_seq, 10)
        stored = float(factorial_seq.gaps[10:].sum())
        assert f.tail_sum == pytest.approx(stored + factorial_seq.tail_gap_sum)

    def test_cutoff_validation(self, factorial_seq):
        with pytest.raises(ValueError):
            TruncatedBlaschke(seq=factorial_seq, cutoff=99, tail_sum=0.0)


class TestTailKappa:
    def test_atomic_on_factorial(self, factorial_seq, atomic):
        # sup attained at the first point since |theta| decreases radially
        k1 = tail_kappa(atomic, factorial_seq, 1)
        assert k1 == pytest.approx(math.exp(-1.0), rel=1e-13)

    def test_vanishing_theta(self, factorial_seq):
        theta = InnerFunction(factors=(truncated_blaschke(factorial_seq, 15),))
        assert tail_kappa(theta, factorial_seq, 1) == 0.0

    def test_last_index_single_element(self, factorial_seq, atomic):
        m = len(factorial_seq)
        v = atomic.eval(factorial_seq.point(m))
        assert tail_kappa(atomic, factorial_seq, m) == pytest.approx(v.mod_high)

    def test_nonincreasing_in_m(self, factorial_seq, atomic):
        vals = [tail_kappa(atomic, factorial_seq, m)
                for m in range(1, len(factorial_seq) + 1)]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_kappa_to_zero_regime(self, factorial_seq, atomic):
        # kappa_3 = exp(-11) for the atomic factor on the factorial sequence
        assert tail_kappa(atomic, factorial_seq, 3) == pytest.approx(
            math.exp(-11.0), rel=1e-12)
        assert tail_kappa(atomic, factorial_seq, 3) < 1e-3

    def test_kappa_bounded_away_regime(self, factorial_seq):
        # zeros at proportional gaps (gap_k / 2.5) sit at a fixed
        # pseudohyperbolic distance from the sequence: kappa stays in a
        # band strictly inside (0, 1) instead of tending to 0
        zeros = BlaschkeSequence(
            gaps=factorial_seq.gaps / 2.5,
            args=np.zeros(len(factorial_seq)),
            tail_gap_sum=factorial_seq.tail_gap_sum / 2.5)
        theta = InnerFunction(factors=(truncated_blaschke(zeros, len(zeros)),))
        kappas = [tail_kappa(theta, factorial_seq, m)
                  for m in range(2, len(factorial_seq) + 1)]
        assert min(kappas) > 0.1
        assert max(kappas) < 0.9

    def test_out_of_window(self, factorial_seq, atomic):
        with pytest.raises(IndexError):
            tail_kappa(atomic, factorial_seq, 16)


class TestStableModulus:
    def test_one_minus_mod_sq_matches_direct(self, factorial_seq):
        rng = np.random.default_rng(5)
        gaps = rng.uniform(0.2, 1.0, 100)
        args = rng.uniform(0, 2 * math.pi, 100)
        for theta in corpus_thetas(factorial_seq):
            v, _, _ = theta.eval_many(gaps, args)
            direct = 1.0 - np.abs(v) ** 2
            stable = theta.one_minus_mod_sq_many(gaps, args)
            assert np.allclose(stable, direct, atol=1e-12)

    def test_stable_near_boundary(self):
        # atomic factor: |theta|^2 rounds to 1 at tiny gaps off-axis, the
        # stable path keeps the true size (1-|z|^2)/|zeta-z|^2 * 2m
        theta = InnerFunction(factors=(AtomicSingular(1.0, 0.0),))
        g = np.array([1e-14])
        a = np.array([math.pi])
        v = theta.one_minus_mod_sq_many(g, a)
        expected = 2.0 * (2e-14) / 4.0  # 2 m (1-|z|^2)/|zeta-z|^2
        assert v[0] == pytest.approx(expected, rel=1e-2)
        assert v[0] > 0.0

    def test_mass_validation(self):
        with pytest.raises(ValueError):
            AtomicSingular(mass=0.0)
