import math

import numpy as np
import pytest

from muntzquad.errors import (
    DomainError,
    InadmissibleExponentError,
    InadmissibleSequenceError,
    LengthMismatchError,
    PoleHitError,
)
from muntzquad.muntz import (
    EvalConfig,
    admissible,
    eval_all,
    eval_all_weighted,
    moment_general,
    moments,
    rational_kernel,
    scaled_derivatives,
    select_theta,
)
from muntzquad.numerics import adaptive_integrate


def example1_prefix(length):
    lam = np.empty(length)
    lam[0::2] = np.arange((length + 1) // 2) + 2.0 / 3.0
    lam[1::2] = np.arange(length // 2) - 2.0 / 3.0
    return lam


class TestRationalKernel:
    def test_single_factor(self):
        assert rational_kernel([0.0], 2.0) == pytest.approx(0.5)

    def test_two_term_product(self):
        assert rational_kernel([0.0, 1.0], 2.0) == pytest.approx(1.5)

    def test_pole_hit(self):
        with pytest.raises(PoleHitError):
            rational_kernel([0.0, 1.0], 1.0)


class TestSelectTheta:
    def test_matches_grid_search(self):
        grid = np.arange(1e-5, 10.0, 1e-5)
        values = math.e / grid + np.exp(grid) / np.sqrt(grid)
        best = grid[np.argmin(values)]
        chosen = select_theta([0.0], 1.0)
        assert abs(chosen.theta - best) <= 1e-4

    def test_positivity(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            lam = np.sort(rng.uniform(-0.45, 3.0, size=6))
            omega = float(rng.uniform(0.01, 30.0))
            assert select_theta(lam, omega).theta > 0.0

    def test_descent_from_start(self):
        lam = np.array([0.0, 1.0, 2.0])
        omega = 2.0
        lam_min = 0.0
        sel = select_theta(lam, omega)

        def objective(theta):
            ratios = np.abs(theta - omega * (lam_min + lam[:-1] + 1.0)) / np.abs(
                theta + omega * (lam_min + lam[:-1])
            )
            return math.exp(math.sqrt(omega)) * np.prod(ratios) / abs(
                theta + omega * (lam_min + lam[-1])
            ) + math.exp(theta) / math.sqrt(theta)

        assert objective(sel.theta) <= objective(1.0) + 1e-12

    def test_rejects_bad_omega(self):
        with pytest.raises(DomainError):
            select_theta([0.0, 1.0], 0.0)


class TestEvalAll:
    def test_exactly_one_at_right_endpoint(self):
        values = eval_all([0.3, 1.7, 2.5, 2.5], 1.0).values
        assert np.all(values == 1.0)

    def test_first_degree_element(self):
        values = eval_all([0.0, 1.0], 0.3).values
        assert values[0] == pytest.approx(1.0, abs=1e-15)
        assert values[1] == pytest.approx(-0.4, abs=1e-14)

    def test_repeated_exponent_log_element(self):
        grid = np.linspace(0.02, 0.99, 50)
        for x in grid:
            value = eval_all([0.5, 0.5], x).values[1]
            exact = math.sqrt(x) * (1.0 + 2.0 * math.log(x))
            assert abs(value - exact) <= 1e-11

    def test_single_exponent_short_circuit(self):
        assert eval_all([1.7], 0.42).values[0] == pytest.approx(0.42**1.7, abs=0)

    def test_domain_errors(self):
        for x in (0.0, -0.5, 1.0000001):
            with pytest.raises(DomainError):
                eval_all([0.0, 1.0], x)

    def test_integer_ladder_matches_shifted_legendre(self):
        lam = np.arange(16.0)
        for x in (0.07, 0.37, 0.81):
            values = eval_all(lam, x).values
            y = 2 * x - 1
            ref = [1.0, y]
            for k in range(1, 15):
                ref.append(((2 * k + 1) * y * ref[k] - k * ref[k - 1]) / (k + 1))
            assert np.abs(values - np.array(ref)).max() <= 1e-10

    def test_config_consistency(self):
        lam = example1_prefix(21)
        cfg_a = EvalConfig(panel_width=1.0, panel_count=32, panel_order=24)
        cfg_b = EvalConfig(panel_width=0.5, panel_count=64, panel_order=32)
        for x in (1e-6, 1e-3, 0.1, 0.5, 0.9):
            va = eval_all(lam, x, cfg_a).values
            vb = eval_all(lam, x, cfg_b).values
            assert np.abs(va - vb).max() <= 1e-12


class TestEvalAllWeighted:
    def test_zero_beta_degenerates(self):
        lam = [0.2, 1.1, 2.3]
        a = eval_all(lam, 0.6).values
        b = eval_all_weighted(lam, 0.0, 0.6).values
        assert np.abs(a - b).max() <= 1e-14

    def test_exactly_one_at_right_endpoint(self):
        values = eval_all_weighted([0.1, 0.9, 2.2], 1.4, 1.0).values
        assert np.all(values == 1.0)

    def test_weighted_first_element(self):
        # residue expansion of the shifted pair {1/2, 3/2}: -2 sqrt(x) + 3 x^(3/2)
        value = eval_all_weighted([0.0, 1.0], 1.0, 0.5).values[1]
        assert value == pytest.approx(-0.5, abs=1e-13)

    def test_weighted_orthogonality_oracle(self):
        lam, beta = [0.0, 1.0], 1.0
        product = adaptive_integrate(
            lambda x: np.prod(eval_all_weighted(lam, beta, x).values) * x**beta, 1e-10
        )
        assert abs(product) <= 1e-9

    def test_inadmissible(self):
        with pytest.raises(InadmissibleSequenceError):
            eval_all_weighted([0.0, 1.0], -1.0, 0.5)


class TestScaledDerivatives:
    def test_monomial(self):
        values = eval_all([2.0], 0.5).values
        assert scaled_derivatives(values, [2.0])[0] == pytest.approx(0.5, abs=1e-14)

    def test_first_degree(self):
        values = eval_all([0.0, 1.0], 0.3).values
        out = scaled_derivatives(values, [0.0, 1.0])
        assert out[1] == pytest.approx(0.6, abs=1e-13)

    def test_value_at_right_endpoint(self):
        lam = np.array([0.4, 1.3, 2.9, 0.7])
        beta = 0.8
        values = np.ones(lam.size)  # L_n(1) = 1 for every n
        out = scaled_derivatives(values, lam, beta)
        for n in range(lam.size):
            # shifted-basis derivative at 1: (lam_n + beta/2) + sum over
            # earlier k of (2 lam_k + beta + 1)
            expected = lam[n] + beta / 2 + sum(2 * lam[k] + beta + 1 for k in range(n))
            assert out[n] == pytest.approx(expected, rel=1e-13)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            scaled_derivatives(np.ones(3), [0.0, 1.0])


class TestMoments:
    def test_integer_ladder_kills_tail(self):
        m = moments(np.arange(6.0), 0.0)
        assert m[0] == 1.0
        assert np.abs(m[1:]).max() == 0.0

    def test_half_integer_pair(self):
        m = moments([0.5, 1.5], 0.0)
        assert m[0] == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert m[1] == pytest.approx(-2.0 / 15.0, rel=1e-15)

    def test_single_element_any_beta(self):
        assert moments([0.7], 0.4)[0] == pytest.approx(1.0 / 2.1, rel=1e-15)

    def test_oracle_agreement(self):
        lam, beta = np.array([0.3, 1.4, 0.9, 2.2]), -0.2
        m = moments(lam, beta)
        for n in range(lam.size):
            oracle = adaptive_integrate(
                lambda x, n=n: eval_all_weighted(lam[: n + 1], beta, x).values[n] * x**beta,
                1e-12,
            )
            assert abs(m[n] - oracle) <= max(1e-9 * abs(m[n]), 3e-13)

    def test_inadmissible(self):
        with pytest.raises(InadmissibleSequenceError):
            moments([-0.8, 1.0], -0.3)
        assert not admissible([-0.8, 1.0], -0.3)
        assert admissible([-0.8, 1.0], 0.0)


class TestMomentGeneral:
    def test_base_case(self):
        assert moment_general([0.5], 0.0) == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_orthogonal_to_leading_power(self):
        assert moment_general([0.5, 1.5], 0.5) == 0.0

    def test_matches_recurrence(self):
        assert moment_general([0.5, 1.5], 0.0) == pytest.approx(-2.0 / 15.0, rel=1e-14)

    def test_inadmissible_exponent(self):
        with pytest.raises(InadmissibleExponentError):
            moment_general([0.5, 1.5], -1.6)


class TestOrthogonalityFamily:
    def test_pairwise_orthogonality_and_norms(self):
        lam = np.array([0.4, 1.2, 2.1, 2.8])
        beta = 0.6
        basis_cache = {}

        def basis(xs):
            key = xs.tobytes()
            if key not in basis_cache:
                from muntzquad.muntz import _basis_batch

                vals, _, _, _ = _basis_batch(lam + beta / 2, xs, EvalConfig())
                basis_cache[key] = vals * xs[None, :] ** (-beta / 2)
            return basis_cache[key]

        for n in range(lam.size):
            for m in range(n + 1):
                value = adaptive_integrate(
                    lambda xs, n=n, m=m: basis(xs)[n] * basis(xs)[m] * xs**beta,
                    1e-10,
                    vectorized=True,
                )
                if n == m:
                    exact = 1.0 / (2 * lam[n] + beta + 1)
                    assert abs(value - exact) <= 1e-8 * abs(exact)
                else:
                    assert abs(value) <= 1e-8


class TestPartitionOfUnity:
    def test_near_right_endpoint(self):
        rng = np.random.default_rng(19)
        for _ in range(5):
            size = int(rng.integers(2, 41))
            lam = rng.uniform(-0.45, 0.4, size=size)
            beta = float(rng.uniform(-0.5, 0.4))
            values = eval_all_weighted(lam, beta, 1.0 - 1e-8).values
            assert np.abs(values - 1.0).max() <= 1e-6
            assert np.all(eval_all_weighted(lam, beta, 1.0).values == 1.0)
