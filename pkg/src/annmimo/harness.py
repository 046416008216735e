"""Monte-Carlo SER sweeps, detector timing, and CSV persistence.

Randomness is counter-based: every frame, block, and training run derives
its own generator from (master_seed, purpose, indices) via SeedSequence
spawn keys, so results are bit-identical regardless of worker count, and
operating points share channel/data/noise realizations (common random
numbers), which makes cross-detector and cross-SNR comparisons sharp.

Channel coherence: H is redrawn every ``block_frames`` test frames
(default 1 = independent H per frame; 0 = one block for the whole
operating point). The neural detector trains once per block on
``n_train_frames`` extra frames that never enter the SER count.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .adc import AdcConfig, quantize_block
from .annd import AnnDetector, TargetMode, annd_train
from .channel import noise_variance_for_snr, draw_channel
from .config import ExperimentConfig
from .detectors import (MLDetector, MMSEDetector, SingularChannelError,
                        ZFDetector, check_conditioning, ml_detect,
                        mmse_detect, zf_detect)
from .phy import map_bits, ofdm_demodulate, ofdm_modulate

SER_CSV_HEADER = "detector,snr_db,adc_bits,ser,symbol_errors,symbols_tested,wall_time_s"
TIMING_CSV_HEADER = "detector,mean_detect_time_s,relative_to_ml"

LOW_ERROR_COUNT = 100  # below this, the SER estimate is flagged high-variance

# seed-stream purposes
_CHANNEL, _DATA, _NOISE, _TRAIN_DATA, _TRAIN_NOISE, _ANND_INIT, _REDRAW, _BENCH = range(8)


def _stream(master_seed: int, purpose: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(purpose, *key))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SerRecord:
    """One (detector, SNR, ADC) measurement row."""

    detector: str
    snr_db: float
    adc_bits: int | None
    ser: float
    symbol_errors: int
    symbols_tested: int
    wall_time_s: float = 0.0

    def __post_init__(self):
        if self.symbols_tested < 1 or not 0 <= self.symbol_errors <= self.symbols_tested:
            raise ValueError("inconsistent error accounting")
        if self.ser != self.symbol_errors / self.symbols_tested:
            raise ValueError("ser must equal symbol_errors / symbols_tested")

    @property
    def stderr(self) -> float:
        """Binomial standard error of the SER estimate."""
        return float(np.sqrt(self.ser * (1.0 - self.ser) / self.symbols_tested))


@dataclass(frozen=True)
class TimingRecord:
    """Mean seconds per subcarrier detection, and the ratio to ML."""

    detector: str
    mean_detect_time: float
    relative_to_ml: float

    def __post_init__(self):
        if self.mean_detect_time <= 0:
            raise ValueError("mean_detect_time must be > 0")


def _tx_frame(phy, rng: np.random.Generator) -> np.ndarray:
    n_bits = phy.n_tx * phy.n_subcarriers * phy.scheme.bits_per_symbol
    bits = rng.integers(0, 2, size=n_bits)
    return map_bits(bits, phy.scheme).reshape(phy.n_tx, phy.n_subcarriers)


def _receive(tx_freq: np.ndarray, h: np.ndarray, sigma2: float, adc: AdcConfig,
             phy, rng: np.random.Generator) -> np.ndarray:
    """Time-domain channel + AWGN + ADC + FFT; returns the (n_rx, n_sc) grid.

    The noise draw is unit-variance and scaled afterwards, so different
    SNR points reuse the same underlying realizations. The time-domain
    noise variance is n_subcarriers * sigma2, which yields exactly sigma2
    per frequency-domain sample after the 1/n_subcarriers FFT.
    """
    t = ofdm_modulate(tx_freq, phy)
    unit = rng.standard_normal((2, h.shape[0], t.shape[-1]))
    scale = np.sqrt(phy.n_subcarriers * sigma2 / 2.0)
    y = h @ t + scale * (unit[0] + 1j * unit[1])
    return ofdm_demodulate(quantize_block(y, adc), phy)


def _block_channel(cfg: ExperimentConfig, block: int) -> tuple[np.ndarray, int]:
    """Draw the block's channel, redrawing (and counting) singular ones."""
    phy = cfg.phy
    h = draw_channel(phy.n_rx, phy.n_tx, _stream(cfg.master_seed, _CHANNEL, block))
    redraws = 0
    while True:
        try:
            check_conditioning(h)
            return h, redraws
        except SingularChannelError:
            redraws += 1
            h = draw_channel(phy.n_rx, phy.n_tx,
                             _stream(cfg.master_seed, _REDRAW, block, redraws))


def _train_block_model(cfg: ExperimentConfig, snr_db: float, adc: AdcConfig,
                       block: int, h: np.ndarray) -> AnnDetector:
    phy = cfg.phy
    sigma2 = noise_variance_for_snr(snr_db, phy.n_tx)
    rx, tx = [], []
    for j in range(cfg.n_train_frames):
        frame = _tx_frame(phy, _stream(cfg.master_seed, _TRAIN_DATA, block, j))
        rx.append(_receive(frame, h, sigma2, adc, phy,
                           _stream(cfg.master_seed, _TRAIN_NOISE, block, j)))
        tx.append(frame)
    init_seed = np.random.SeedSequence(entropy=cfg.master_seed,
                                       spawn_key=(_ANND_INIT, block))
    return annd_train(
        np.stack(rx), phy.scheme, h=h,
        tx_frames=np.stack(tx) if cfg.target_mode is TargetMode.PILOT else None,
        mode=cfg.target_mode, random_state=init_seed,
        hidden_units=cfg.hidden_units, phi0=cfg.phi0,
        target_error=cfg.target_error, max_epochs=cfg.max_epochs,
        phi_down=cfg.phi_down, phi_up=cfg.phi_up, phi_max=cfg.phi_max,
        val_fraction=cfg.val_fraction)


def _fit_classical(name: str, scheme, h: np.ndarray, sigma2: float):
    if name == "ZF":
        return ZFDetector(scheme).fit(h)
    if name == "MMSE":
        return MMSEDetector(scheme).fit(h, sigma2)
    if name == "ML":
        return MLDetector(scheme).fit(h)
    raise ValueError(f"unknown detector {name!r}")


def _count_frame_errors(cfg: ExperimentConfig, detector: str, snr_db: float,
                        adc: AdcConfig, h: np.ndarray,
                        model: AnnDetector | None, frames: range) -> int:
    """Symbol errors over a contiguous run of test frames in one block."""
    phy = cfg.phy
    sigma2 = noise_variance_for_snr(snr_db, phy.n_tx)
    # ML serves as the perfect-ADC benchmark curve unless ml_quantized is set
    gen_adc = adc
    if detector == "ML" and not cfg.ml_quantized:
        gen_adc = AdcConfig(None, adc.clip_factor)
    est = model if detector == "ANND" else _fit_classical(detector, phy.scheme, h, sigma2)

    errors = 0
    for f in frames:
        tx = _tx_frame(phy, _stream(cfg.master_seed, _DATA, f))
        rx = _receive(tx, h, sigma2, gen_adc, phy,
                      _stream(cfg.master_seed, _NOISE, f))
        decided = est.predict(rx.T)
        errors += int(np.sum(decided != tx.T))
    return errors


def _chunks(frames: range, n_chunks: int):
    size = max(1, -(-len(frames) // n_chunks))
    for start in range(frames.start, frames.stop, size):
        yield range(start, min(start + size, frames.stop))


def estimate_ser(detector: str, snr_db: float, adc: AdcConfig,
                 cfg: ExperimentConfig, workers: int = 1,
                 pool: ProcessPoolExecutor | None = None) -> SerRecord:
    """SER at one operating point over cfg.n_test_frames frames.

    Counts per-antenna symbol errors against the transmitted frames;
    symbols_tested = n_test_frames * n_subcarriers * n_tx always (no early
    stopping; points with fewer than 100 errors are flagged by a warning).
    """
    phy = cfg.phy
    t0 = time.perf_counter()
    per_block = cfg.frames_per_block()
    n_blocks = -(-cfg.n_test_frames // per_block)
    if detector == "ANND" and n_blocks > 10:
        warnings.warn(f"ANND retrains per coherence block ({n_blocks} blocks at "
                      "this point); set block_frames = 0 for one block per point")

    errors = 0
    redraws = 0
    for block in range(n_blocks):
        frames = range(block * per_block, min(cfg.n_test_frames, (block + 1) * per_block))
        h, block_redraws = _block_channel(cfg, block)
        redraws += block_redraws
        model = None
        if detector == "ANND":
            model = _train_block_model(cfg, snr_db, adc, block, h)
        if pool is not None and workers > 1 and len(frames) > 1:
            futures = [pool.submit(_count_frame_errors, cfg, detector, snr_db,
                                   adc, h, model, chunk)
                       for chunk in _chunks(frames, workers * 4)]
            errors += sum(f.result() for f in futures)
        else:
            errors += _count_frame_errors(cfg, detector, snr_db, adc, h, model, frames)

    symbols_tested = cfg.n_test_frames * phy.n_subcarriers * phy.n_tx
    wall = time.perf_counter() - t0 if cfg.record_timing else 0.0
    if redraws:
        warnings.warn(f"{redraws} singular channel draw(s) erased and redrawn")
    if errors < LOW_ERROR_COUNT:
        label = "Perfect ADC" if adc.bits is None else f"{adc.label}-bit ADC"
        warnings.warn(f"{detector} @ {snr_db} dB / {label}: only "
                      f"{errors} symbol errors; SER estimate is high-variance")
    return SerRecord(detector, float(snr_db), adc.bits,
                     errors / symbols_tested, errors, symbols_tested, wall)


def run_ser_sweep(cfg: ExperimentConfig, workers: int = 1,
                  progress=None) -> list[SerRecord]:
    """All detector x SNR x ADC records, in deterministic config order."""
    records = []
    pool = None
    try:
        if workers > 1:
            pool = ProcessPoolExecutor(max_workers=workers)
        for detector in cfg.detectors:
            for snr_db in cfg.snr_db:
                for adc in cfg.adc:
                    rec = estimate_ser(detector, snr_db, adc, cfg,
                                       workers=workers, pool=pool)
                    if progress is not None:
                        progress(rec)
                    records.append(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return records


def benchmark_detectors(cfg: ExperimentConfig, n_detections: int = 10_000,
                        warmup: int = 500) -> list[TimingRecord]:
    """Per-subcarrier detection timing for ZF, MMSE, ML, and the neural net.

    Each timed call is a self-contained single-vector detection on a
    pre-admitted channel: ZF/MMSE include their filter formation, ML its
    hypothesis enumeration and search, and the neural detector one forward
    pass per antenna (inference only; training happens beforehand and the
    forward cost does not depend on the learned values). All detectors see
    the identical vector sequence, measured round-robin in small rounds so
    clock drift cancels across detectors.
    """
    phy = cfg.phy
    snr_db = cfg.snr_db[len(cfg.snr_db) // 2]
    sigma2 = noise_variance_for_snr(snr_db, phy.n_tx)
    rng = _stream(cfg.master_seed, _BENCH, 0)
    h = draw_channel(phy.n_rx, phy.n_tx, rng)
    check_conditioning(h)
    perfect = AdcConfig(None)

    n_frames = -(-(n_detections + warmup) // phy.n_subcarriers)
    vectors = []
    for _ in range(n_frames):
        rx = _receive(_tx_frame(phy, rng), h, sigma2, perfect, phy, rng)
        vectors.extend(rx.T)
    warm = vectors[:warmup]
    timed = vectors[warmup:warmup + n_detections]

    quick = ExperimentConfig(phy=phy, snr_db=(snr_db,), adc=(perfect,),
                             detectors=("ANND",), n_train_frames=20,
                             n_test_frames=1, master_seed=cfg.master_seed,
                             target_mode=TargetMode.PILOT, max_epochs=100)
    model = _train_block_model(quick, snr_db, perfect, 0, h)

    calls = {
        "ZF": lambda y: zf_detect(h, y, phy.scheme, check=False),
        "MMSE": lambda y: mmse_detect(h, y, sigma2, phy.scheme),
        "ML": lambda y: ml_detect(h, y, phy.scheme),
        "ANND": lambda y: model.detect(y),
    }
    for call in calls.values():
        for y in warm:
            call(y)
    totals = dict.fromkeys(calls, 0.0)
    round_size = 100
    for start in range(0, len(timed), round_size):
        chunk = timed[start:start + round_size]
        for name, call in calls.items():
            t0 = time.perf_counter()
            for y in chunk:
                call(y)
            totals[name] += time.perf_counter() - t0
    means = {name: totals[name] / len(timed) for name in calls}

    return [TimingRecord(name, means[name], means[name] / means["ML"])
            for name in ("ML", "MMSE", "ZF", "ANND")]


def _fmt(value: float) -> str:
    return repr(float(value))


def write_records(records, path) -> None:
    """SER records as CSV with the fixed header, full-precision floats."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(SER_CSV_HEADER + "\n")
        for r in records:
            label = "Perfect" if r.adc_bits is None else str(r.adc_bits)
            fh.write(f"{r.detector},{_fmt(r.snr_db)},{label},{_fmt(r.ser)},"
                     f"{r.symbol_errors},{r.symbols_tested},{_fmt(r.wall_time_s)}\n")


def read_records(path) -> list[SerRecord]:
    """Parse a CSV produced by write_records."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        if header != SER_CSV_HEADER:
            raise ValueError(f"{path}:1: unexpected header {header!r}")
        records = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 7:
                raise ValueError(f"{path}:{lineno}: expected 7 fields")
            records.append(SerRecord(
                parts[0], float(parts[1]),
                None if parts[2] == "Perfect" else int(parts[2]),
                float(parts[3]), int(parts[4]), int(parts[5]), float(parts[6])))
    return records


def write_timing_records(records, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(TIMING_CSV_HEADER + "\n")
        for r in records:
            fh.write(f"{r.detector},{_fmt(r.mean_detect_time)},{_fmt(r.relative_to_ml)}\n")
