"""Low-resolution ADC model: per-rail mid-rise uniform quantization.

The quantizer acts independently on the real and imaginary rails of the
time-domain receive samples, with a per-block automatic gain control:
full scale A = clip_factor x RMS over all rails of the block. ``bits=None``
is the perfect (infinite-resolution) ADC and passes samples through.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PERFECT = None


@dataclass(frozen=True)
class AdcConfig:
    """Resolution in bits (None = perfect) and the AGC clip factor."""

    bits: int | None = PERFECT
    clip_factor: float = 3.0

    def __post_init__(self):
        if self.bits is not None and not 1 <= self.bits <= 16:
            raise ValueError("bits must be in 1..16 (or None for perfect)")
        if self.clip_factor <= 0:
            raise ValueError("clip_factor must be > 0")

    @property
    def is_perfect(self) -> bool:
        return self.bits is None

    @property
    def label(self) -> str:
        return "Perfect" if self.bits is None else str(self.bits)


def estimate_full_scale(samples: np.ndarray, clip_factor: float) -> float:
    """AGC full scale: clip_factor x RMS over all real and imaginary parts.

    Falls back to A = 1 on an all-zero block; raises on an empty one.
    """
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("cannot estimate full scale of an empty block")
    rms = np.sqrt((np.mean(np.real(samples) ** 2)
                   + np.mean(np.imag(samples) ** 2)) / 2.0)
    if rms == 0.0:
        return 1.0
    return clip_factor * rms


def _quantize_rail(u: np.ndarray, bits: int, full_scale: float) -> np.ndarray:
    step = 2.0 * full_scale / 2 ** bits
    clipped = np.clip(u, -full_scale, full_scale)
    levels = step * (np.floor(clipped / step) + 0.5)
    return np.clip(levels, -full_scale + step / 2.0, full_scale - step / 2.0)


def quantize(samples: np.ndarray, cfg: AdcConfig, full_scale: float) -> np.ndarray:
    """Mid-rise quantization of both rails; perfect ADC returns the input."""
    samples = np.asarray(samples, dtype=complex)
    if cfg.is_perfect:
        return samples
    if full_scale <= 0:
        raise ValueError("full_scale must be > 0")
    return (_quantize_rail(samples.real, cfg.bits, full_scale)
            + 1j * _quantize_rail(samples.imag, cfg.bits, full_scale))


def quantize_block(samples: np.ndarray, cfg: AdcConfig) -> np.ndarray:
    """AGC + quantize in one step (the receiver's per-frame path)."""
    if cfg.is_perfect:
        return np.asarray(samples, dtype=complex)
    return quantize(samples, cfg, estimate_full_scale(samples, cfg.clip_factor))
