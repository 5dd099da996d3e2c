import numpy as np
import pytest

from conftest import SX, SZ, full_space_lmg, kron_site
from cdwork.errors import OutOfWindow, UnsupportedSize
from cdwork.models import (
    LZ,
    IsingChain,
    LMG,
    RampProfile,
    build_h0,
    dh0_dg,
    dimension,
    ramp_rate,
    ramp_value,
)

FIG1_RAMP = RampProfile("linear", -10.0, 20.0, 1.0)
FIG2_RAMP = RampProfile("sine", 2.0, -1.2, 1.0)


class TestRamps:
    def test_linear_crosses_zero_at_midpoint(self):
        assert ramp_value(FIG1_RAMP, 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_sine_endpoint_value(self):
        assert ramp_value(FIG2_RAMP, 1.0) == pytest.approx(0.8, abs=1e-12)

    def test_sine_starts_at_offset(self):
        assert ramp_value(FIG2_RAMP, 0.0) == 2.0

    def test_linear_rate_is_constant(self):
        for t in (0.0, 0.21, 1.0):
            assert ramp_rate(FIG1_RAMP, t) == pytest.approx(20.0, abs=1e-12)

    def test_sine_rate_vanishes_at_endpoints(self):
        assert ramp_rate(FIG2_RAMP, 0.0) == 0.0
        assert ramp_rate(FIG2_RAMP, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_sine_rate_against_finite_difference(self):
        assert ramp_rate(FIG2_RAMP, 0.5) == pytest.approx(-1.2 * np.pi / 2.0, abs=1e-12)
        step = 1e-6
        for t in (0.3, 0.5, 0.77):
            numeric = (ramp_value(FIG2_RAMP, t + step)
                       - ramp_value(FIG2_RAMP, t - step)) / (2.0 * step)
            assert ramp_rate(FIG2_RAMP, t) == pytest.approx(numeric, abs=1e-6)

    def test_outside_window_rejected(self):
        for t in (-0.1, 1.1):
            with pytest.raises(OutOfWindow):
                ramp_value(FIG1_RAMP, t)
            with pytest.raises(OutOfWindow):
                ramp_rate(FIG1_RAMP, t)

    def test_bad_profiles_rejected(self):
        with pytest.raises(ValueError):
            RampProfile("cubic", 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            RampProfile("linear", 0.0, 1.0, 0.0)


class TestTwoLevel:
    def test_matrix_at_zero_field(self):
        h = build_h0(LZ(0.5), 0.0)
        assert np.allclose(h, [[0.0, 0.25], [0.25, 0.0]], atol=1e-15)

    def test_matrix_without_gap(self):
        h = build_h0(LZ(0.0), 2.0)
        assert np.allclose(h, np.diag([1.0, -1.0]), atol=1e-15)

    def test_field_derivative(self):
        assert np.allclose(dh0_dg(LZ(0.5)), [[0.5, 0.0], [0.0, -0.5]], atol=1e-15)

    def test_negative_gap_rejected(self):
        with pytest.raises(ValueError):
            LZ(-0.1)


class TestIsing:
    def test_small_chains_rejected(self):
        with pytest.raises(UnsupportedSize):
            IsingChain(2)

    def test_field_derivative_counts_spins(self):
        length = 3
        derivative = dh0_dg(IsingChain(length))
        assert np.allclose(derivative, np.diag(np.diag(derivative)), atol=1e-15)
        for index in range(2 ** length):
            ups = sum((index >> bit) & 1 == 0 for bit in range(length))
            downs = length - ups
            assert derivative[index, index].real == pytest.approx(-(ups - downs))

    def test_matches_explicit_kron_sum(self):
        length, g = 4, 1.3
        expected = np.zeros((16, 16), dtype=complex)
        for i in range(length):
            expected -= g * kron_site(SZ, i, length)
            expected += kron_site(SX, i, length) @ kron_site(SX, (i + 1) % length, length)
        assert np.max(np.abs(build_h0(IsingChain(length), g) - expected)) <= 1e-13

    @pytest.mark.parametrize("length", [3, 4, 5, 6])
    def test_spectrum_invariant_under_cyclic_relabeling(self, length):
        dim = 2 ** length
        permutation = np.zeros((dim, dim))
        for index in range(dim):
            # site i holds bit (length-1-i); a cyclic shift rotates the bits
            shifted = ((index << 1) | (index >> (length - 1))) & (dim - 1)
            permutation[shifted, index] = 1.0
        h = build_h0(IsingChain(length), 1.4)
        conjugated = permutation @ h @ permutation.T
        original = np.linalg.eigvalsh(h)
        relabeled = np.linalg.eigvalsh(conjugated)
        assert np.max(np.abs(original - relabeled)) <= 1e-10


class TestLMG:
    def test_small_systems_rejected(self):
        with pytest.raises(UnsupportedSize):
            LMG(1)

    def test_dimension_is_sector_size(self):
        assert dimension(LMG(8)) == 9

    @pytest.mark.parametrize("length", [2, 3, 4, 5, 6])
    @pytest.mark.parametrize("g", [0.0, 0.8, 2.0])
    def test_sector_spectrum_inside_full_space_spectrum(self, length, g):
        sector = np.linalg.eigvalsh(build_h0(LMG(length), g))
        full = np.linalg.eigvalsh(full_space_lmg(length, g))
        for value in sector:
            assert np.min(np.abs(full - value)) <= 1e-10

    def test_affine_difference_at_two_fields(self):
        model = LMG(6)
        lhs = build_h0(model, 2.0) - build_h0(model, 0.0)
        assert np.max(np.abs(lhs - 2.0 * dh0_dg(model))) <= 1e-12


@pytest.mark.parametrize("model", [LZ(0.5), IsingChain(4), LMG(5)])
def test_field_dependence_is_affine(model):
    rng = np.random.default_rng(31)
    for _ in range(5):
        g1, g2 = rng.uniform(-5.0, 5.0, size=2)
        direct = build_h0(model, g2) - build_h0(model, g1)
        predicted = (g2 - g1) * dh0_dg(model)
        assert np.max(np.abs(direct - predicted)) <= 1e-12 * (1.0 + abs(g2 - g1))


def test_dimensions():
    assert dimension(LZ(0.5)) == 2
    assert dimension(IsingChain(5)) == 32
    assert dimension(LMG(32)) == 33


def test_non_finite_field_rejected():
    with pytest.raises(ValueError):
        build_h0(LZ(0.5), np.nan)
