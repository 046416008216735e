"""Mid-rise quantizer model and AGC full-scale estimation."""

import math

import numpy as np
import pytest

from annmimo.adc import AdcConfig, estimate_full_scale, quantize, quantize_block


class TestAdcConfig:
    def test_perfect_label(self):
        assert AdcConfig(None).is_perfect
        assert AdcConfig(None).label == "Perfect"
        assert AdcConfig(3).label == "3"

    @pytest.mark.parametrize("bits", [0, 17, -1])
    def test_bits_range(self, bits):
        with pytest.raises(ValueError):
            AdcConfig(bits)

    def test_clip_factor_positive(self):
        with pytest.raises(ValueError):
            AdcConfig(4, clip_factor=0.0)


class TestFullScale:
    def test_hand_computed(self):
        # parts {1, 0, -1, 0}: RMS = sqrt(1/2), A = 3/sqrt(2)
        a = estimate_full_scale(np.array([1 + 0j, -1 + 0j]), 3.0)
        assert a == pytest.approx(3 / math.sqrt(2))

    def test_zero_block_fallback(self):
        assert estimate_full_scale(np.zeros(8, dtype=complex), 3.0) == 1.0

    def test_homogeneous_in_scale(self):
        rng = np.random.default_rng(3)
        block = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        a = estimate_full_scale(block, 3.0)
        assert estimate_full_scale(2.5 * block, 3.0) == pytest.approx(2.5 * a)

    def test_empty_block(self):
        with pytest.raises(ValueError):
            estimate_full_scale(np.array([]), 3.0)


class TestQuantize:
    def test_one_bit_is_half_scale_sign(self):
        cfg = AdcConfig(1)
        got = quantize(np.array([0.7 + 0j, -0.01 + 0j]), cfg, 1.0)
        assert np.array_equal(got.real, [0.5, -0.5])
        # mid-rise has no zero level: a 0 rail lands on +step/2
        assert np.array_equal(got.imag, [0.5, 0.5])
        rng = np.random.default_rng(4)
        block = rng.standard_normal(100) + 1j * rng.standard_normal(100)
        got = quantize(block, cfg, 2.0)
        assert np.allclose(got.real, np.sign(block.real), atol=0)
        assert np.allclose(got.imag, np.sign(block.imag), atol=0)

    def test_two_bit_hand_values(self):
        cfg = AdcConfig(2)
        got = quantize(np.array([0.6, 0.2, -0.9], dtype=complex), cfg, 1.0)
        assert np.array_equal(got.real, [0.75, 0.25, -0.75])

    def test_perfect_passthrough(self):
        block = np.array([0.123 + 4.5j, -2 + 0j])
        assert np.array_equal(quantize(block, AdcConfig(None), 1.0), block)
        assert np.array_equal(quantize_block(block, AdcConfig(None)), block)

    def test_level_count(self):
        rng = np.random.default_rng(5)
        block = 3 * (rng.standard_normal(5000) + 1j * rng.standard_normal(5000))
        for bits in (1, 2, 3, 4):
            got = quantize(block, AdcConfig(bits), 1.5)
            assert len(np.unique(got.real)) <= 2 ** bits
            assert len(np.unique(got.imag)) <= 2 ** bits

    def test_monotone(self):
        u = np.sort(np.random.default_rng(6).uniform(-3, 3, 1000))
        q = quantize(u.astype(complex), AdcConfig(3), 1.0).real
        assert np.all(np.diff(q) >= 0)

    def test_granular_error_bound(self):
        bits = 4
        full_scale = 2.0
        step = 2 * full_scale / 2 ** bits
        u = np.random.default_rng(7).uniform(-full_scale, full_scale, 2000)
        q = quantize(u.astype(complex), AdcConfig(bits), full_scale).real
        assert np.max(np.abs(q - u)) <= step / 2 + 1e-12

    def test_output_clamped_inside_full_scale(self):
        q = quantize(np.array([100.0, -100.0], dtype=complex), AdcConfig(2), 1.0)
        assert np.array_equal(q.real, [0.75, -0.75])

    def test_full_scale_must_be_positive(self):
        with pytest.raises(ValueError):
            quantize(np.ones(2, dtype=complex), AdcConfig(2), 0.0)

    def test_rails_quantized_independently(self):
        z = np.array([0.6 - 0.9j], dtype=complex)
        got = quantize(z, AdcConfig(2), 1.0)
        assert got[0] == 0.75 - 0.75j
