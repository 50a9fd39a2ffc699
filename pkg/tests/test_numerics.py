import math

import numpy as np
import pytest

from muntzquad.errors import SingularMatrixError, ToleranceNotMetError
from muntzquad.numerics import (
    adaptive_integrate,
    nelder_mead_min,
    solve_dense,
    sym_tridiag_eigen,
)


class TestSolveDense:
    def test_identity(self):
        p = solve_dense(np.eye(3), [1.0, 2.0, 3.0])
        assert np.allclose(p, [1.0, 2.0, 3.0], rtol=0, atol=1e-15)

    def test_two_by_two(self):
        p = solve_dense([[2.0, 1.0], [1.0, 3.0]], [3.0, 5.0])
        assert np.allclose(p, [0.8, 1.4], rtol=1e-14)

    def test_rank_deficient_raises(self):
        with pytest.raises(SingularMatrixError):
            solve_dense([[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            solve_dense(np.ones((2, 3)), [1.0, 2.0])

    def test_random_well_conditioned_residual(self):
        rng = np.random.default_rng(42)
        for n in (5, 20, 100):
            a = rng.standard_normal((n, n)) + n * np.eye(n)
            assert np.linalg.cond(a) < 1e6
            b = rng.standard_normal(n)
            p = solve_dense(a, b)
            residual = np.abs(a @ p - b).max() / np.abs(b).max()
            assert residual <= 1e-12


class TestSymTridiagEigen:
    def test_one_by_one(self):
        values, first = sym_tridiag_eigen([5.0], [])
        assert values[0] == 5.0
        assert abs(first[0]) == 1.0

    def test_two_by_two_closed_form(self):
        values, first = sym_tridiag_eigen([0.0, 0.0], [1.0])
        assert np.allclose(values, [-1.0, 1.0], atol=1e-15)
        assert np.allclose(np.abs(first), [1 / math.sqrt(2)] * 2, atol=1e-15)

    def test_decoupled_diagonal(self):
        diag = [3.0, -1.0, 2.0]
        values, _ = sym_tridiag_eigen(diag, [0.0, 0.0])
        assert np.allclose(values, sorted(diag), atol=0)

    def test_trace_and_numpy_oracle(self):
        rng = np.random.default_rng(7)
        for n in (4, 16, 48):
            d = rng.standard_normal(n)
            e = rng.standard_normal(n - 1)
            values, first = sym_tridiag_eigen(d, e)
            norm = np.abs(d).max() + 2 * np.abs(e).max()
            assert abs(values.sum() - d.sum()) <= 1e-12 * max(norm, 1.0) * n
            dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
            ref_values, ref_vectors = np.linalg.eigh(dense)
            assert np.abs(values - ref_values).max() <= 1e3 * np.finfo(float).eps * norm
            assert np.abs(np.abs(first) - np.abs(ref_vectors[0])).max() <= 1e-10

    def test_quadratic_formula_two_by_two(self):
        a, b, c = 1.3, -0.4, 2.1
        values, _ = sym_tridiag_eigen([a, c], [b])
        mean = (a + c) / 2
        gap = math.hypot((a - c) / 2, b)
        assert np.allclose(values, [mean - gap, mean + gap], atol=1e-14)


class TestNelderMead:
    def test_shifted_quadratic(self):
        result = nelder_mead_min(lambda v: (v[0] - 3.0) ** 2, [0.5], tolerance=1e-8)
        assert abs(result.x[0] - 3.0) <= 1e-6
        assert result.converged

    def test_offset_quadratic(self):
        result = nelder_mead_min(lambda v: v[0] ** 2 + 1.0, [2.0], tolerance=1e-8)
        assert abs(result.x[0]) <= 1e-6
        assert abs(result.fx - 1.0) <= 1e-10

    def test_against_grid_search(self):
        def f(v):
            theta = v[0]
            return math.e / theta + math.exp(theta) / math.sqrt(theta)

        grid = np.arange(1e-5, 10.0, 1e-5)
        values = math.e / grid + np.exp(grid) / np.sqrt(grid)
        best = grid[np.argmin(values)]
        result = nelder_mead_min(f, [1.0], tolerance=1e-8, lower=[1e-8])
        assert abs(result.x[0] - best) <= 1e-4

    def test_never_leaves_bounds(self):
        seen = []

        def f(v):
            seen.append(v[0])
            return 1.0 / v[0] + v[0]

        nelder_mead_min(f, [0.5], lower=[0.05], upper=[4.0], tolerance=1e-6)
        assert min(seen) >= 0.05
        assert max(seen) <= 4.0

    def test_best_never_worse_than_start(self):
        def rough(v):
            return abs(math.sin(17 * v[0])) + 0.1 * v[0] ** 2

        result = nelder_mead_min(rough, [1.7], max_evals=40)
        assert result.fx <= rough(np.array([1.7]))

    def test_two_dimensional(self):
        result = nelder_mead_min(lambda v: (v[0] - 1) ** 2 + (v[1] + 2) ** 2, [0.0, 0.0])
        assert np.allclose(result.x, [1.0, -2.0], atol=1e-5)


class TestAdaptiveIntegrate:
    def test_linear(self):
        assert abs(adaptive_integrate(lambda x: x, 1e-12) - 0.5) <= 1e-12

    def test_log(self):
        assert abs(adaptive_integrate(math.log, 1e-12) + 1.0) <= 1e-11

    def test_inverse_sqrt(self):
        assert abs(adaptive_integrate(lambda x: x**-0.5, 1e-12) - 2.0) <= 1e-11

    @pytest.mark.parametrize("a", [-0.4, -0.25, 0.0, 0.5, 2.0])
    @pytest.mark.parametrize("j", [0, 1, 2])
    def test_power_log_family(self, a, j):
        exact = (-1.0) ** j * math.factorial(j) / (1.0 + a) ** (j + 1)
        value = adaptive_integrate(lambda x: x**a * math.log(x) ** j, 1e-12)
        assert abs(value - exact) <= 1e-10 * abs(exact)

    def test_vectorized_integrand(self):
        value = adaptive_integrate(lambda x: np.sqrt(x), 1e-12, vectorized=True)
        assert abs(value - 2.0 / 3.0) <= 1e-12

    def test_mirrored_singularity_moderate_tolerance(self):
        value = adaptive_integrate(lambda x: (1.0 - x) ** -0.5, 1e-6)
        assert abs(value - 2.0) <= 1e-6

    def test_mirrored_singularity_beyond_representable(self):
        # resolving (1-x)^(-1/2) to 1e-12 needs points closer to 1 than
        # doubles can represent; this must fail loudly, not silently
        with pytest.raises(ToleranceNotMetError):
            adaptive_integrate(lambda x: (1.0 - x) ** -0.5, 1e-12)

    def test_refinement_cap(self):
        with pytest.raises(ToleranceNotMetError):
            adaptive_integrate(lambda x: x**-0.9, 1e-12, max_levels=4)
