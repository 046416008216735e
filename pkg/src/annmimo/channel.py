"""Flat Rayleigh MIMO channel, AWGN, and the SNR-to-noise convention.

SNR convention (the reference text leaves it open): with unit-energy
symbols and unit-variance channel entries, the average post-FFT signal
power per receive antenna equals n_tx, so

    sigma2 = n_tx / 10**(snr_db / 10)

is the total complex noise variance per received frequency-domain sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def draw_channel(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. circularly-symmetric complex Gaussian M x N matrix, unit variance."""
    if m < 1 or n < 1:
        raise ValueError("channel dimensions must be >= 1")
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2.0)


def noise_variance_for_snr(snr_db: float, n_tx: int) -> float:
    """Total complex noise variance for the per-receive-antenna SNR convention."""
    if n_tx < 1:
        raise ValueError("n_tx must be >= 1")
    return n_tx / 10.0 ** (snr_db / 10.0)


@dataclass(frozen=True)
class NoiseModel:
    """Noise variance paired with the SNR it was derived from.

    sigma2 == 0 is the explicit noiseless setting used by oracle tests; any
    finite SNR yields sigma2 > 0.
    """

    sigma2: float
    snr_db: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")
        if np.isfinite(self.snr_db) and self.sigma2 == 0:
            raise ValueError("finite SNR requires sigma2 > 0")

    @classmethod
    def for_snr(cls, snr_db: float, n_tx: int) -> "NoiseModel":
        return cls(noise_variance_for_snr(snr_db, n_tx), snr_db)

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls(0.0, np.inf)


def apply_channel(h: np.ndarray, x: np.ndarray, noise: NoiseModel,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """y = H x + n with per-entry complex noise variance noise.sigma2.

    ``x`` may be a vector (n_tx,) or a block (n_tx, n_samples); the same H
    multiplies every column (flat fading).
    """
    h = np.asarray(h)
    x = np.asarray(x)
    if x.shape[0] != h.shape[1]:
        raise ValueError(f"x has {x.shape[0]} rows, H expects {h.shape[1]}")
    y = h @ x
    if noise.sigma2 > 0:
        if rng is None:
            raise ValueError("a random source is required when sigma2 > 0")
        scale = np.sqrt(noise.sigma2 / 2.0)
        y = y + scale * (rng.standard_normal(y.shape)
                         + 1j * rng.standard_normal(y.shape))
    return y
