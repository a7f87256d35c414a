import math

import numpy as np
import pytest

from orlicz_qha.errors import ConstraintViolated, GridMismatch, ZeroDilation
from orlicz_qha.phase_space import (
    DilationSpec,
    GridFunction,
    check_tj_constraint,
    convolve,
    dilate,
    dilated_convolve,
    gaussian,
    grid_l1,
    grid_lp_norm,
    grid_orlicz_norm,
    grid_weak_orlicz_norm,
)
from orlicz_qha.young import Power, PowerLog


def gauss_exact(X, Y, center, width, amplitude=1.0):
    return amplitude * np.exp(
        -((X - center[0]) ** 2 + (Y - center[1]) ** 2) / (2 * width)
    )


class TestGaussianFixture:
    def test_peak_value(self):
        g = gaussian(1, 12.0, 128, width=1.0)
        assert g.values[64, 64] == pytest.approx(1.0)

    def test_integral_closed_form(self):
        g = gaussian(1, 12.0, 256, width=1.3, amplitude=0.7)
        assert g.integral().real == pytest.approx(0.7 * 2 * math.pi * 1.3, rel=1e-9)

    def test_width_must_be_positive(self):
        with pytest.raises(ValueError):
            gaussian(1, 12.0, 64, width=0.0)


class TestConvolve:
    def test_gaussian_closed_form(self):
        # e^{-|z|^2/2a} * e^{-|z|^2/2b} = (2 pi a b/(a+b)) e^{-|z|^2/2(a+b)}
        L, n, a, b = 12.0, 256, 1.0, 0.7
        f = gaussian(1, L, n, width=a)
        g = gaussian(1, L, n, width=b)
        c = convolve(f, g)
        ax = f.axis()
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        exact = (2 * np.pi * a * b / (a + b)) * np.exp(
            -(X**2 + Y**2) / (2 * (a + b))
        )
        assert np.max(np.abs(c.values - exact)) <= 1e-8

    def test_against_direct_sum_quadrature(self, rng):
        # independent oracle: direct Riemann sums at probe points using the
        # analytic Gaussian translate (no fast transform involved)
        L, n = 12.0, 128
        f = gaussian(1, L, n, center=(0.5, -0.3), width=0.9)
        g_center, g_width = (-0.4, 0.2), 1.1
        g = gaussian(1, L, n, center=g_center, width=g_width)
        c = convolve(f, g)
        ax = f.axis()
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        for _ in range(20):
            i, j = rng.integers(n // 4, 3 * n // 4, size=2)
            w = (ax[i], ax[j])
            direct = np.sum(
                f.values.real
                * gauss_exact(w[0] - X, w[1] - Y, g_center, g_width)
            ) * f.cell_volume
            assert c.values[i, j].real == pytest.approx(direct, rel=1e-10)

    def test_near_delta_identity(self):
        L, n = 12.0, 256
        f = gaussian(1, L, n, center=(1.0, 0.5), width=1.0)
        delta = gaussian(1, L, n, width=0.003)
        delta = delta.with_values(delta.values / delta.integral().real)
        out = convolve(f, delta)
        assert np.max(np.abs(out.values - f.values)) <= 5e-3

    def test_commutativity(self):
        f = gaussian(1, 12.0, 128, center=(1.0, 0.0), width=0.8)
        g = gaussian(1, 12.0, 128, center=(0.0, -1.0), width=1.2)
        a = convolve(f, g)
        b = convolve(g, f)
        assert np.max(np.abs(a.values - b.values)) <= 1e-12

    def test_translation_covariance(self):
        L, n = 12.0, 128
        f = gaussian(1, L, n, width=1.0)
        g = gaussian(1, L, n, width=0.7)
        base = convolve(f, g)
        shift = 8  # grid-aligned translation
        f2 = f.with_values(np.roll(f.values, shift, axis=0))
        moved = convolve(f2, g)
        assert np.max(
            np.abs(moved.values - np.roll(base.values, shift, axis=0))
        ) <= 1e-10

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatch):
            convolve(gaussian(1, 12.0, 128), gaussian(1, 12.0, 64))

    def test_young_l1_contraction(self, rng):
        f = gaussian(1, 12.0, 128, center=(0.5, 0.5), width=0.8, amplitude=1.3)
        g = gaussian(1, 12.0, 128, center=(-0.5, 0.0), width=1.1)
        assert grid_l1(convolve(f, g)) <= grid_l1(f) * grid_l1(g) + 1e-6


class TestDilate:
    def test_quadratic_scaling(self):
        L, n = 12.0, 128
        ax = -L + (2 * L / n) * np.arange(n)
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        f = GridFunction(1, L, n, X**2 + Y**2)
        out = dilate(f, 2.0)
        # interior region where 2z stays on the grid
        sel = (np.abs(X) < L / 2 - 1) & (np.abs(Y) < L / 2 - 1)
        assert np.max(np.abs(out.values - 4 * f.values)[sel]) <= 1e-9

    def test_identity(self):
        f = gaussian(1, 12.0, 128, center=(0.3, 0.1), width=1.0)
        assert dilate(f, 1.0) is f

    def test_reflection(self):
        f = gaussian(1, 12.0, 128, center=(1.0, -0.5), width=0.9)
        out = dilate(f, -1.0)
        # beta_-(f)(z) = f(-z): exact on the grid away from the open edge
        reflected = np.zeros_like(f.values)
        reflected[1:, 1:] = f.values[1:, 1:][::-1, ::-1]
        assert np.max(np.abs(out.values - reflected)[1:, 1:]) <= 1e-12

    def test_zero_dilation(self):
        with pytest.raises(ZeroDilation):
            dilate(gaussian(1, 12.0, 64), 0.0)

    def test_composition_converges_quadratically(self):
        # dilate(dilate(f, s), t) vs dilate(f, s t): linear interpolation
        # commits O(h^2) error, so the defect must shrink ~4x per refinement
        errs = []
        for n in (128, 256):
            f = gaussian(1, 12.0, n, width=1.0)
            lhs = dilate(dilate(f, 1.3), 1.4)
            rhs = dilate(f, 1.3 * 1.4)
            errs.append(float(np.max(np.abs(lhs.values - rhs.values))))
        assert errs[0] <= 0.02
        assert errs[1] <= errs[0] / 2.5


class TestTjConstraint:
    def test_examples(self):
        s2 = math.sqrt(2)
        assert check_tj_constraint((s2, s2), (1, 1))
        assert check_tj_constraint((1 / s2, 1.0), (1, -1))
        assert not check_tj_constraint((1.0, s2), (1, 1))

    def test_zero_scale_rejected(self):
        with pytest.raises(ValueError):
            check_tj_constraint((0.0, 1.0), (1, 1))

    def test_spec_validation(self):
        s2 = math.sqrt(2)
        DilationSpec((s2, s2), (1, 1), (1.0, 1.0), 1.0)
        with pytest.raises(ConstraintViolated):
            DilationSpec((1.0, s2), (1, 1), (1.0, 1.0), 1.0)
        with pytest.raises(ConstraintViolated):
            # exponent relation broken: 1/2+1/2 != 1 + 1/2
            DilationSpec((1 / s2, 1.0), (1, -1), (2.0, 2.0), 2.0)


class TestDilatedConvolve:
    def test_gaussian_closed_form(self):
        # both factors e^{-|z|^2/2} dilated by sqrt2: the corrected chain
        # gives (pi/2) e^{-|z|^2/2}; the only resampling is the final
        # sqrt2 dilation, so accuracy is interpolation-limited O(h^2)
        errs = []
        for n in (128, 256):
            spec = DilationSpec((math.sqrt(2), math.sqrt(2)), (1, 1), (1, 1), 1.0)
            g = gaussian(1, 12.0, n, width=1.0)
            out = dilated_convolve(spec, [g, g])
            ax = g.axis()
            X, Y = np.meshgrid(ax, ax, indexing="ij")
            exact = (np.pi / 2) * np.exp(-(X**2 + Y**2) / 2)
            errs.append(float(np.max(np.abs(out.values - exact))))
        assert errs[0] <= 1e-2
        assert errs[1] <= errs[0] / 2.5

    def test_two_path_consistency(self):
        # identity-based chain vs direct dilate-then-convolve; both paths
        # interpolate, so agreement is O(h^2) with quadratic refinement
        spec = DilationSpec((math.sqrt(2), math.sqrt(2)), (1, 1), (1, 1), 1.0)
        errs = []
        for n in (128, 256):
            f = gaussian(1, 12.0, n, center=(0.4, -0.2), width=0.9)
            g = gaussian(1, 12.0, n, center=(-0.3, 0.1), width=1.1)
            chain = dilated_convolve(spec, [f, g])
            direct = convolve(dilate(f, math.sqrt(2)), dilate(g, math.sqrt(2)))
            errs.append(float(np.max(np.abs(chain.values - direct.values))))
        assert errs[0] <= 0.02
        assert errs[1] <= errs[0] / 2.5

    def test_single_factor_is_dilate(self):
        spec = DilationSpec((1.0,), (1,), (2.0,), 2.0)
        f = gaussian(1, 12.0, 128, width=1.0)
        out = dilated_convolve(spec, [f])
        assert np.max(np.abs(out.values - f.values)) == 0.0

    def test_length_mismatch(self):
        spec = DilationSpec((math.sqrt(2), math.sqrt(2)), (1, 1), (1, 1), 1.0)
        with pytest.raises(GridMismatch):
            dilated_convolve(spec, [gaussian(1, 12.0, 64)])


class TestGridNorms:
    def test_lp_matches_numpy(self):
        f = gaussian(1, 12.0, 128, width=1.0, amplitude=1.4)
        direct = (np.sum(np.abs(f.values) ** 2) * f.cell_volume) ** 0.5
        assert grid_lp_norm(f, 2.0) == pytest.approx(direct, rel=1e-12)
        assert grid_orlicz_norm(f, Power(2)) == pytest.approx(direct, rel=1e-9)

    def test_weak_le_strong(self):
        f = gaussian(1, 12.0, 96, width=0.9)
        phi = PowerLog(2, 1)
        assert grid_weak_orlicz_norm(f, phi) <= grid_orlicz_norm(f, phi) * (
            1 + 1e-9
        )

    def test_prop_bound_on_random_trials(self, rng):
        # |f*g| in the Orlicz norm against 2 p/(q-1) |g|_Phi |f|_1
        phi = PowerLog(2, 1)
        q, p = phi.exponents()
        kappa = 2 * p / (q - 1)
        for _ in range(5):
            f = gaussian(
                1, 12.0, 96,
                center=rng.uniform(-1.5, 1.5, 2), width=rng.uniform(0.6, 1.2),
            )
            g = gaussian(
                1, 12.0, 96,
                center=rng.uniform(-1.5, 1.5, 2), width=rng.uniform(0.6, 1.2),
            )
            lhs = grid_orlicz_norm(convolve(f, g), phi)
            assert lhs <= kappa * grid_orlicz_norm(g, phi) * grid_l1(f) * (1 + 1e-6)


class TestSerialization:
    def test_binary_roundtrip(self):
        f = gaussian(1, 10.6, 32, center=(0.5, -1.0), width=0.8, amplitude=1 + 2j)
        back = GridFunction.from_bytes(f.to_bytes())
        assert back.same_grid(f)
        np.testing.assert_array_equal(back.values, f.values)

    def test_binary_tag_checked(self):
        with pytest.raises(ValueError):
            GridFunction.from_bytes(b"BOGUS123" + b"\x00" * 64)

    def test_csv_roundtrip(self):
        f = gaussian(1, 10.6, 8, width=1.0, amplitude=0.3 - 0.1j)
        back = GridFunction.from_csv(f.to_csv())
        assert back.same_grid(f)
        np.testing.assert_allclose(back.values, f.values, rtol=1e-15)

    def test_boundary_decay_measure(self):
        tight = gaussian(1, 12.0, 64, width=0.5)
        assert tight.boundary_decay() <= 1e-12
        wide = gaussian(1, 12.0, 64, width=20.0)
        assert wide.boundary_decay() > 1e-3
