"""Blind neural detection: per-transmit-antenna perceptrons on received features.

One network per transmit antenna maps the interleaved real/imaginary
parts of a received frequency-domain vector (2 * n_rx features) to the
(real, imag) pair of that antenna's symbol. For a 2x2 link this is the
4-input / 7-hidden / 2-output shape. Detection needs no channel matrix;
channel knowledge is only used (optionally) to synthesize training
targets via ML estimation during the training phase.
"""

from __future__ import annotations

import enum

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import neural
from .detectors import DetectionResult, ml_detect
from .phy import Modulation, modulation_by_name, slice_symbol


class TargetMode(enum.Enum):
    """Where training targets come from: known pilots or ML estimates."""

    PILOT = "pilot"
    ML_ESTIMATE = "ml"

    @classmethod
    def from_name(cls, name: str) -> "TargetMode":
        for mode in cls:
            if mode.value == name.lower():
                return mode
        raise ValueError(f"unknown target mode {name!r} (use 'pilot' or 'ml')")


def complex_to_features(y: np.ndarray) -> np.ndarray:
    """Interleave (Re y_1, Im y_1, ..., Re y_M, Im y_M).

    Works on a vector (M,) or a batch (n_samples, M); the feature axis is
    always last.
    """
    y = np.asarray(y, dtype=complex)
    feats = np.empty(y.shape[:-1] + (2 * y.shape[-1],), dtype=float)
    feats[..., 0::2] = y.real
    feats[..., 1::2] = y.imag
    return feats


def features_to_complex(feats: np.ndarray) -> np.ndarray:
    """Inverse pairing of complex_to_features."""
    feats = np.asarray(feats, dtype=float)
    return feats[..., 0::2] + 1j * feats[..., 1::2]


def frames_to_samples(frames: np.ndarray) -> np.ndarray:
    """Stack frames (n_frames, n_ant, n_subcarriers) into (n_samples, n_ant) rows."""
    frames = np.asarray(frames)
    if frames.ndim == 2:
        frames = frames[None]
    return frames.transpose(0, 2, 1).reshape(-1, frames.shape[1])


def build_training_set(rx_frames: np.ndarray, scheme: Modulation,
                       h: np.ndarray | None = None,
                       tx_frames: np.ndarray | None = None,
                       mode: TargetMode = TargetMode.ML_ESTIMATE,
                       antenna: int = 0) -> neural.TrainingBatch:
    """One training pattern per (frame, subcarrier) for one transmit antenna.

    PILOT targets are the true transmitted symbols (tx_frames required);
    ML_ESTIMATE targets are ML-detected symbols using the channel matrix
    (h required) - the channel is only consulted here, never at detection.
    """
    rx = frames_to_samples(rx_frames)
    if mode is TargetMode.PILOT:
        if tx_frames is None:
            raise ValueError("pilot mode requires the transmitted frames")
        targets_c = frames_to_samples(tx_frames)[:, antenna]
    elif mode is TargetMode.ML_ESTIMATE:
        if h is None:
            raise ValueError("ML-estimate mode requires the channel matrix")
        detected = ml_detect(h, rx.T, scheme).symbols
        targets_c = detected[antenna]
    else:
        raise ValueError(f"unsupported target mode {mode}")
    inputs = complex_to_features(rx)
    targets = np.column_stack([targets_c.real, targets_c.imag])
    return neural.TrainingBatch(inputs, targets)


class AnnDetector(BaseEstimator):
    """Per-antenna MLPs trained with the adaptive-damping least-squares loop.

    Parameters
    ----------
    scheme : Modulation
        Constellation used to slice the network outputs.
    hidden_units : int
        Hidden-layer width of every per-antenna network.
    phi0, target_error, max_epochs, phi_down, phi_up, phi_max, max_rejects :
        Trainer knobs, see neural.LmConfig.
    val_fraction : float
        Trailing fraction of the training patterns held out for the
        validation MSE reported per network.
    random_state : int, SeedSequence, Generator, or None
        Seeds the per-antenna weight initializations.

    Attributes (after fit)
    ----------------------
    nets_ : list of neural.MlpWeights, one per transmit antenna.
    reports_ : list of neural.TrainReport.
    n_rx_, n_tx_ : link dimensions learned from the training arrays.
    """

    def __init__(self, scheme: Modulation | None = None, hidden_units: int = 7,
                 phi0: float = 0.35, target_error: float = 1e-3,
                 max_epochs: int = 1000, phi_down: float = 0.1,
                 phi_up: float = 2.0, phi_max: float = 1e10,
                 max_rejects: int = 30, val_fraction: float = 0.2,
                 random_state=None):
        self.scheme = scheme
        self.hidden_units = hidden_units
        self.phi0 = phi0
        self.target_error = target_error
        self.max_epochs = max_epochs
        self.phi_down = phi_down
        self.phi_up = phi_up
        self.phi_max = phi_max
        self.max_rejects = max_rejects
        self.val_fraction = val_fraction
        self.random_state = random_state

    def _lm_config(self) -> neural.LmConfig:
        return neural.LmConfig(
            phi0=self.phi0, target_error=self.target_error,
            max_epochs=self.max_epochs, phi_down=self.phi_down,
            phi_up=self.phi_up, phi_max=self.phi_max,
            max_rejects=self.max_rejects)

    def fit(self, rx: np.ndarray, tx: np.ndarray):
        """Train one network per transmit antenna.

        rx : (n_samples, n_rx) received frequency-domain vectors.
        tx : (n_samples, n_tx) target symbols (pilots or ML estimates).
        """
        rx = np.asarray(rx, dtype=complex)
        tx = np.asarray(tx, dtype=complex)
        if rx.ndim != 2 or tx.ndim != 2 or len(rx) != len(tx):
            raise ValueError("rx and tx must be 2-D with matching sample counts")
        if len(rx) < 1:
            raise ValueError("at least one training sample is required")

        n_samples, n_rx = rx.shape
        n_tx = tx.shape[1]
        n_val = int(round(self.val_fraction * n_samples))
        n_train = n_samples - n_val
        if n_train < 1:
            raise ValueError("val_fraction leaves no training samples")

        seed_root = self.random_state
        if not isinstance(seed_root, np.random.SeedSequence):
            seed_root = np.random.SeedSequence(seed_root)
        inputs = complex_to_features(rx)
        cfg = self._lm_config()

        self.nets_ = []
        self.reports_ = []
        for antenna, child in enumerate(seed_root.spawn(n_tx)):
            targets = np.column_stack([tx[:, antenna].real, tx[:, antenna].imag])
            batch = neural.TrainingBatch(inputs[:n_train], targets[:n_train])
            rng = np.random.Generator(np.random.PCG64(child))
            w0 = neural.init_weights(2 * n_rx, self.hidden_units, 2, rng)
            net, report = neural.lm_train(w0, batch, cfg)
            if n_val:
                preds, _ = neural.mlp_forward_batch(net, inputs[n_train:])
                val_mse = float(np.mean((targets[n_train:] - preds) ** 2))
                report = neural.attach_validation(report, val_mse)
            self.nets_.append(net)
            self.reports_.append(report)
        self.n_rx_ = n_rx
        self.n_tx_ = n_tx
        return self

    def _check_fitted(self):
        if not hasattr(self, "nets_"):
            raise NotFittedError("this AnnDetector is not fitted yet")

    def predict_soft(self, y: np.ndarray) -> np.ndarray:
        """Network outputs as complex estimates, shape (n_samples, n_tx)."""
        self._check_fitted()
        y = np.asarray(y, dtype=complex)
        squeeze = y.ndim == 1
        rows = y[None, :] if squeeze else y
        if rows.shape[1] != self.n_rx_:
            raise ValueError(f"expected {self.n_rx_} receive antennas, got {rows.shape[1]}")
        feats = complex_to_features(rows)
        soft = np.empty((len(rows), self.n_tx_), dtype=complex)
        for i, net in enumerate(self.nets_):
            out, _ = neural.mlp_forward_batch(net, feats)
            soft[:, i] = out[:, 0] + 1j * out[:, 1]
        return soft[0] if squeeze else soft

    def predict(self, y: np.ndarray) -> np.ndarray:
        """Sliced symbol decisions, shape (n_samples, n_tx)."""
        return slice_symbol(self.predict_soft(y), self.scheme)

    def detect(self, y: np.ndarray) -> DetectionResult:
        """Single received vector (n_rx,) -> DetectionResult."""
        soft = self.predict_soft(np.asarray(y, dtype=complex))
        return DetectionResult(slice_symbol(soft, self.scheme), soft)


def annd_train(rx_frames: np.ndarray, scheme: Modulation,
               h: np.ndarray | None = None,
               tx_frames: np.ndarray | None = None,
               mode: TargetMode = TargetMode.ML_ESTIMATE,
               random_state=None, **trainer_kwargs) -> AnnDetector:
    """Train a detector from stacked frames (n_frames, n_ant, n_subcarriers)."""
    rx_frames = np.asarray(rx_frames, dtype=complex)
    if rx_frames.ndim == 2:
        rx_frames = rx_frames[None]
    if rx_frames.shape[0] < 1 or rx_frames.size == 0:
        raise ValueError("at least one training frame is required")
    rx = frames_to_samples(rx_frames)
    if mode is TargetMode.PILOT:
        if tx_frames is None:
            raise ValueError("pilot mode requires the transmitted frames")
        tx = frames_to_samples(tx_frames)
    else:
        if h is None:
            raise ValueError("ML-estimate mode requires the channel matrix")
        tx = ml_detect(h, rx.T, scheme).symbols.T
    det = AnnDetector(scheme=scheme, random_state=random_state, **trainer_kwargs)
    return det.fit(rx, tx)


def annd_detect(model: AnnDetector, y: np.ndarray) -> DetectionResult:
    """Blind detection of one received vector; uses only (model, y)."""
    return model.detect(y)


def save_annd_model(model: AnnDetector, path) -> None:
    """Envelope header `annd n_tx n_rx scheme`, then one flat net per antenna."""
    model._check_fitted()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"annd {model.n_tx_} {model.n_rx_} {model.scheme.name}\n")
        for net in model.nets_:
            fh.write(f"mlp {net.n_in} {net.n_hidden} {net.n_out}\n")
            for value in net.to_vector():
                fh.write(repr(float(value)) + "\n")


def load_annd_model(path) -> AnnDetector:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "annd":
            raise ValueError(f"{path}: expected header 'annd n_tx n_rx scheme'")
        n_tx, n_rx = int(header[1]), int(header[2])
        scheme = modulation_by_name(header[3])
        nets = []
        for _ in range(n_tx):
            net_header = fh.readline().split()
            if len(net_header) != 4 or net_header[0] != "mlp":
                raise ValueError(f"{path}: missing per-antenna network header")
            n_in, n_hidden, n_out = (int(v) for v in net_header[1:])
            count = n_hidden * n_in + n_hidden + n_out * n_hidden + n_out
            values = np.array([float(fh.readline()) for _ in range(count)])
            nets.append(neural.MlpWeights.from_vector(values, n_in, n_hidden, n_out))
    model = AnnDetector(scheme=scheme, hidden_units=nets[0].n_hidden)
    model.nets_ = nets
    model.n_tx_ = n_tx
    model.n_rx_ = n_rx
    return model
