"""Bit mapping, symbol slicing, and OFDM (de)modulation.

Frame conventions: frequency-domain frames are complex arrays of shape
(n_antennas, n_subcarriers); time-domain frames are
(n_antennas, n_subcarriers + cp_len) with the cyclic prefix prepended.

The transmit IFFT is unnormalized (sum over subcarriers) and the receive
FFT carries the 1/n_subcarriers factor, so modulate -> demodulate is an
exact identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_QPSK_SCALE = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Modulation:
    """A named constellation with unit average symbol energy.

    ``points[i]`` is the symbol for bit group ``i`` (MSB first); QPSK uses
    Gray mapping with the first bit selecting the real sign and the second
    the imaginary sign.
    """

    name: str
    points: np.ndarray
    bits_per_symbol: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.ndim != 1 or len(pts) != 2 ** self.bits_per_symbol:
            raise ValueError("constellation size does not match bits_per_symbol")
        if len(np.unique(pts)) != len(pts):
            raise ValueError("constellation points must be distinct")
        object.__setattr__(self, "points", pts)

    def __eq__(self, other):
        if not isinstance(other, Modulation):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.name, self.bits_per_symbol))


def bpsk() -> Modulation:
    """Binary PSK: bit 0 -> +1, bit 1 -> -1."""
    return Modulation("bpsk", np.array([1.0 + 0.0j, -1.0 + 0.0j]), 1)


def qpsk() -> Modulation:
    """Gray-mapped QPSK on (+-1 +-1j)/sqrt(2)."""
    pts = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) * _QPSK_SCALE
    return Modulation("qpsk", pts, 2)


_SCHEMES = {"bpsk": bpsk, "qpsk": qpsk}


def modulation_by_name(name: str) -> Modulation:
    try:
        return _SCHEMES[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown modulation scheme {name!r}") from None


@dataclass(frozen=True)
class PhyConfig:
    """Link dimensions and modulation.

    ``carrier_hz`` and ``sampling_hz`` are carried as metadata only; the
    simulation is pure baseband.
    """

    n_tx: int = 2
    n_rx: int = 2
    n_subcarriers: int = 64
    cp_len: int = 16
    scheme: Modulation = field(default_factory=bpsk)
    carrier_hz: float = 5e9
    sampling_hz: float = 3e6

    def __post_init__(self):
        if self.n_tx < 1:
            raise ValueError("n_tx must be >= 1")
        if self.n_rx < self.n_tx:
            raise ValueError("n_rx must be >= n_tx")
        n = self.n_subcarriers
        if n < 2 or n & (n - 1):
            raise ValueError("n_subcarriers must be a power of two >= 2")
        if not 0 <= self.cp_len < n:
            raise ValueError("cp_len must satisfy 0 <= cp_len < n_subcarriers")

    @property
    def symbols_per_frame(self) -> int:
        return self.n_tx * self.n_subcarriers


def map_bits(bits, scheme: Modulation) -> np.ndarray:
    """Map a flat bit sequence to constellation symbols.

    Raises ValueError if the length is not a multiple of bits per symbol.
    """
    bits = np.asarray(bits, dtype=int)
    k = scheme.bits_per_symbol
    if bits.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    if bits.size % k:
        raise ValueError(
            f"bit count {bits.size} not divisible by {k} ({scheme.name})")
    groups = bits.reshape(-1, k)
    index = np.zeros(len(groups), dtype=int)
    for b in range(k):
        index = (index << 1) | groups[:, b]
    return scheme.points[index]


def demap_symbols(symbols, scheme: Modulation) -> np.ndarray:
    """Invert map_bits via nearest-point decisions (exact on clean symbols)."""
    idx = slice_to_index(symbols, scheme)
    k = scheme.bits_per_symbol
    bits = np.empty((idx.size, k), dtype=int)
    for b in range(k):
        bits[:, k - 1 - b] = (idx >> b) & 1
    return bits.reshape(-1)


def slice_to_index(z, scheme: Modulation) -> np.ndarray:
    """Index of the nearest constellation point; ties go to the lowest index."""
    z = np.asarray(z, dtype=complex)
    d = np.abs(z[..., None] - scheme.points) ** 2
    return np.argmin(d, axis=-1)


def slice_symbol(z, scheme: Modulation):
    """Hard decision to the nearest constellation point.

    Accepts a scalar or an array; the output has the input's shape.
    """
    idx = slice_to_index(z, scheme)
    out = scheme.points[idx]
    if np.isscalar(z) or np.ndim(z) == 0:
        return complex(out)
    return out


def ofdm_modulate(freq: np.ndarray, cfg: PhyConfig) -> np.ndarray:
    """Unnormalized IFFT per antenna row, then cyclic-prefix insertion."""
    freq = np.asarray(freq, dtype=complex)
    if freq.shape[-1] != cfg.n_subcarriers:
        raise ValueError(
            f"frame has {freq.shape[-1]} subcarriers, config says {cfg.n_subcarriers}")
    body = np.fft.ifft(freq, axis=-1) * cfg.n_subcarriers
    if cfg.cp_len == 0:
        return body
    return np.concatenate([body[..., -cfg.cp_len:], body], axis=-1)


def ofdm_demodulate(time: np.ndarray, cfg: PhyConfig) -> np.ndarray:
    """Cyclic-prefix removal, then the 1/n_subcarriers-scaled FFT."""
    time = np.asarray(time, dtype=complex)
    expected = cfg.n_subcarriers + cfg.cp_len
    if time.shape[-1] != expected:
        raise ValueError(
            f"frame has {time.shape[-1]} samples, config says {expected}")
    body = time[..., cfg.cp_len:]
    return np.fft.fft(body, axis=-1) / cfg.n_subcarriers
