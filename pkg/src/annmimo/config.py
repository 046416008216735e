"""Experiment configuration and its flat key-value file format.

The file is plain text, one ``key = value`` per line; blank lines and
``#`` comments are allowed. Unknown keys are a hard error (with the line
number), as are malformed values. ``save_config`` -> ``load_config``
round trips to an equal config.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .adc import AdcConfig
from .annd import TargetMode
from .phy import PhyConfig, modulation_by_name

KNOWN_DETECTORS = ("ML", "MMSE", "ZF", "ANND")


class ConfigError(ValueError):
    """Raised on unknown keys or malformed values, naming the location."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs: link, operating points, budgets, seed."""

    phy: PhyConfig = field(default_factory=PhyConfig)
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    adc: tuple = (AdcConfig(),)
    detectors: tuple = KNOWN_DETECTORS
    n_train_frames: int = 200
    n_test_frames: int = 200
    block_frames: int = 1
    master_seed: int = 1
    target_mode: TargetMode = TargetMode.ML_ESTIMATE
    ml_quantized: bool = False
    hidden_units: int = 7
    phi0: float = 0.35
    target_error: float = 1e-3
    max_epochs: int = 1000
    phi_down: float = 0.1
    phi_up: float = 2.0
    phi_max: float = 1e10
    val_fraction: float = 0.2
    record_timing: bool = False

    def __post_init__(self):
        if not self.snr_db:
            raise ConfigError("snr_db list must be non-empty")
        if any(prev >= nxt for prev, nxt in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("snr_db list must be strictly increasing")
        if not self.adc:
            raise ConfigError("adc list must be non-empty")
        for name in self.detectors:
            if name not in KNOWN_DETECTORS:
                raise ConfigError(f"unknown detector {name!r}")
        if self.n_test_frames < 1:
            raise ConfigError("n_test_frames must be >= 1")
        if self.n_train_frames < 1:
            raise ConfigError("n_train_frames must be >= 1")
        if self.block_frames < 0:
            raise ConfigError("block_frames must be >= 0 (0 = one block per point)")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("master_seed must fit in 64 bits")

    def frames_per_block(self) -> int:
        """block_frames, with 0 meaning one channel block per operating point."""
        return self.block_frames or self.n_test_frames


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_adc_bits(text: str) -> int | None:
    if text.lower() == "perfect":
        return None
    return int(text)


# key -> parser for the raw string value
_SCALAR_KEYS = {
    "n_tx": int,
    "n_rx": int,
    "n_subcarriers": int,
    "cp_len": int,
    "scheme": str,
    "carrier_hz": float,
    "sampling_hz": float,
    "clip_factor": float,
    "n_train_frames": int,
    "n_test_frames": int,
    "block_frames": int,
    "master_seed": int,
    "target_mode": str,
    "ml_quantized": _parse_bool,
    "hidden_units": int,
    "phi0": float,
    "target_error": float,
    "max_epochs": int,
    "phi_down": float,
    "phi_up": float,
    "phi_max": float,
    "val_fraction": float,
    "record_timing": _parse_bool,
}
_LIST_KEYS = {
    "snr_db": float,
    "adc_bits": _parse_adc_bits,
    "detectors": str,
}


def load_config(path) -> ExperimentConfig:
    """Parse a key-value config file into an ExperimentConfig."""
    raw = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
            key, _, value = text.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _SCALAR_KEYS and key not in _LIST_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in raw:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                if key in _SCALAR_KEYS:
                    raw[key] = _SCALAR_KEYS[key](value)
                else:
                    items = [v.strip() for v in value.split(",") if v.strip()]
                    raw[key] = tuple(_LIST_KEYS[key](v) for v in items)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None

    try:
        phy = PhyConfig(
            n_tx=raw.pop("n_tx", 2),
            n_rx=raw.pop("n_rx", 2),
            n_subcarriers=raw.pop("n_subcarriers", 64),
            cp_len=raw.pop("cp_len", 16),
            scheme=modulation_by_name(raw.pop("scheme", "bpsk")),
            carrier_hz=raw.pop("carrier_hz", 5e9),
            sampling_hz=raw.pop("sampling_hz", 3e6),
        )
        clip = raw.pop("clip_factor", 3.0)
        bits = raw.pop("adc_bits", (None,))
        adc = tuple(AdcConfig(b, clip) for b in bits)
        detectors = tuple(d.upper() for d in raw.pop("detectors", KNOWN_DETECTORS))
        mode = TargetMode.from_name(raw.pop("target_mode", "ml"))
        return ExperimentConfig(phy=phy, adc=adc, detectors=detectors,
                                target_mode=mode, **raw)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def save_config(cfg: ExperimentConfig, path) -> None:
    """Write a config file that load_config parses back to an equal config."""
    phy = cfg.phy
    lines = [
        f"n_tx = {phy.n_tx}",
        f"n_rx = {phy.n_rx}",
        f"n_subcarriers = {phy.n_subcarriers}",
        f"cp_len = {phy.cp_len}",
        f"scheme = {phy.scheme.name}",
        f"carrier_hz = {phy.carrier_hz!r}",
        f"sampling_hz = {phy.sampling_hz!r}",
        "snr_db = " + ",".join(repr(v) for v in cfg.snr_db),
        "adc_bits = " + ",".join(a.label.lower() for a in cfg.adc),
        f"clip_factor = {cfg.adc[0].clip_factor!r}",
        "detectors = " + ",".join(cfg.detectors),
        f"ml_quantized = {str(cfg.ml_quantized).lower()}",
        f"n_train_frames = {cfg.n_train_frames}",
        f"n_test_frames = {cfg.n_test_frames}",
        f"block_frames = {cfg.block_frames}",
        f"master_seed = {cfg.master_seed}",
        f"target_mode = {cfg.target_mode.value}",
        f"hidden_units = {cfg.hidden_units}",
        f"phi0 = {cfg.phi0!r}",
        f"target_error = {cfg.target_error!r}",
        f"max_epochs = {cfg.max_epochs}",
        f"phi_down = {cfg.phi_down!r}",
        f"phi_up = {cfg.phi_up!r}",
        f"phi_max = {cfg.phi_max!r}",
        f"val_fraction = {cfg.val_fraction!r}",
        f"record_timing = {str(cfg.record_timing).lower()}",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
