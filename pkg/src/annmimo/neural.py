"""Single-hidden-layer perceptron and its Levenberg-Marquardt trainer.

The network is tanh-hidden, linear-output:

    hidden = tanh(W_h u + b_h)        # tanh(x) = (e^{2x}-1)/(e^{2x}+1)
    output = W_o hidden + b_o

Biases strictly generalize the bias-free reference equations (zero biases
recover them). Training minimizes the half-sum of squared residuals
E(w) = 0.5 * sum((target - output)^2) over the whole batch, with damped
Gauss-Newton steps

    (J^T J + phi I) delta = -J^T e,

where J = d(residual)/d(weights) and e = target - output. Because
J = -d(output)/d(weights), the minus sign makes delta a descent step.

Flat weight-vector order (used by the Jacobian columns, update steps, and
the save format): W_h row-major, b_h, W_o row-major, b_o.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve


@dataclass(frozen=True)
class MlpWeights:
    """All weights and biases of a 2-layer perceptron."""

    w_hidden: np.ndarray  # (n_hidden, n_in)
    b_hidden: np.ndarray  # (n_hidden,)
    w_out: np.ndarray     # (n_out, n_hidden)
    b_out: np.ndarray     # (n_out,)

    def __post_init__(self):
        n_hidden, n_in = self.w_hidden.shape
        n_out = self.w_out.shape[0]
        if self.w_out.shape != (n_out, n_hidden):
            raise ValueError("output weights do not match hidden layer size")
        if self.b_hidden.shape != (n_hidden,) or self.b_out.shape != (n_out,):
            raise ValueError("bias shapes do not match layer sizes")
        for arr in (self.w_hidden, self.b_hidden, self.w_out, self.b_out):
            if not np.all(np.isfinite(arr)):
                raise ValueError("weights must be finite")

    @property
    def n_in(self) -> int:
        return self.w_hidden.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.w_hidden.shape[0]

    @property
    def n_out(self) -> int:
        return self.w_out.shape[0]

    @property
    def n_weights(self) -> int:
        return (self.n_hidden * self.n_in + self.n_hidden
                + self.n_out * self.n_hidden + self.n_out)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.w_hidden.ravel(), self.b_hidden,
                               self.w_out.ravel(), self.b_out])

    @classmethod
    def from_vector(cls, vec: np.ndarray, n_in: int, n_hidden: int,
                    n_out: int) -> "MlpWeights":
        vec = np.asarray(vec, dtype=float)
        sizes = [n_hidden * n_in, n_hidden, n_out * n_hidden, n_out]
        if vec.shape != (sum(sizes),):
            raise ValueError("weight vector length does not match shape")
        parts = np.split(vec, np.cumsum(sizes)[:-1])
        return cls(parts[0].reshape(n_hidden, n_in), parts[1],
                   parts[2].reshape(n_out, n_hidden), parts[3])


def init_weights(n_in: int, n_hidden: int, n_out: int,
                 rng: np.random.Generator) -> MlpWeights:
    """Uniform init in [-0.5, 0.5] for every weight and bias."""
    total = n_hidden * n_in + n_hidden + n_out * n_hidden + n_out
    return MlpWeights.from_vector(rng.uniform(-0.5, 0.5, size=total),
                                  n_in, n_hidden, n_out)


@dataclass(frozen=True)
class TrainingBatch:
    """Input rows and their desired output rows."""

    inputs: np.ndarray   # (n_patterns, n_in)
    targets: np.ndarray  # (n_patterns, n_out)

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        targets = np.atleast_2d(np.asarray(self.targets, dtype=float))
        if len(inputs) != len(targets) or len(inputs) < 1:
            raise ValueError("inputs and targets must have the same nonzero length")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    @property
    def n_patterns(self) -> int:
        return len(self.inputs)


def mlp_forward(w: MlpWeights, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward pass for one input vector; returns (output, hidden)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (w.n_in,):
        raise ValueError(f"input shape {x.shape} does not match n_in={w.n_in}")
    hidden = np.tanh(w.w_hidden @ x + w.b_hidden)
    return w.w_out @ hidden + w.b_out, hidden


def mlp_forward_batch(w: MlpWeights, inputs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward pass for (n_patterns, n_in) inputs; returns (outputs, hiddens)."""
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != w.n_in:
        raise ValueError(f"inputs shape {inputs.shape} does not match n_in={w.n_in}")
    hidden = np.tanh(inputs @ w.w_hidden.T + w.b_hidden)
    return hidden @ w.w_out.T + w.b_out, hidden


def batch_error(w: MlpWeights, batch: TrainingBatch) -> float:
    """E(w) = 0.5 * sum of squared residuals over the batch."""
    outputs, _ = mlp_forward_batch(w, batch.inputs)
    resid = batch.targets - outputs
    return 0.5 * float(np.sum(resid * resid))


def mlp_jacobian(w: MlpWeights, batch: TrainingBatch) -> tuple[np.ndarray, np.ndarray]:
    """Analytic residual Jacobian and residual vector for a batch.

    Rows are pattern-major ((pattern, output) flattened); columns follow
    the flat weight order. residuals[p*R + r] = target - output, and
    jac is its derivative, i.e. minus the output derivative.
    """
    inputs = batch.inputs
    outputs, hidden = mlp_forward_batch(w, inputs)
    resid = (batch.targets - outputs).ravel()

    n_p = batch.n_patterns
    n_out, n_hidden, n_in = w.n_out, w.n_hidden, w.n_in
    sech2 = 1.0 - hidden * hidden  # (P, n_hidden)

    d_wh = np.einsum("rj,pj,pi->prji", w.w_out, sech2, inputs)
    d_bh = np.einsum("rj,pj->prj", w.w_out, sech2)
    d_wo = np.zeros((n_p, n_out, n_out, n_hidden))
    rng_r = np.arange(n_out)
    d_wo[:, rng_r, rng_r, :] = hidden[:, None, :]
    d_bo = np.broadcast_to(np.eye(n_out), (n_p, n_out, n_out))

    rows = n_p * n_out
    jac = -np.concatenate([
        d_wh.reshape(rows, n_hidden * n_in),
        d_bh.reshape(rows, n_hidden),
        d_wo.reshape(rows, n_out * n_hidden),
        d_bo.reshape(rows, n_out),
    ], axis=1)
    return jac, resid


def _solve_damped(jtj: np.ndarray, jte: np.ndarray, phi: float) -> np.ndarray:
    a = jtj + phi * np.eye(len(jtj))
    return cho_solve(cho_factor(a, lower=True), -jte)


def lm_step(jac: np.ndarray, residuals: np.ndarray, phi: float) -> np.ndarray:
    """One damped Gauss-Newton step: solve (J^T J + phi I) delta = -J^T e."""
    if phi < 0:
        raise ValueError("phi must be >= 0")
    jac = np.asarray(jac, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    return _solve_damped(jac.T @ jac, jac.T @ residuals, phi)


@dataclass
class LmState:
    """Mutable trainer state: damping factor, last error, epoch counter."""

    phi: float
    last_error: float
    epoch: int = 0


@dataclass(frozen=True)
class LmConfig:
    """Damping schedule and stopping rules for the trainer."""

    phi0: float = 0.35
    target_error: float = 1e-3
    max_epochs: int = 1000
    phi_down: float = 0.1
    phi_up: float = 2.0
    phi_max: float = 1e10
    max_rejects: int = 30
    phi_min: float = 1e-12  # keeps the damped system well-posed after long accept runs
    # ftol-style floor: stop after rel_patience consecutive accepted epochs
    # whose relative error decrease is below min_rel_decrease (0 disables).
    # With noisy targets E plateaus above target_error and would otherwise
    # crawl until max_epochs for no statistical gain.
    min_rel_decrease: float = 1e-5
    rel_patience: int = 3

    def __post_init__(self):
        if self.phi0 <= 0:
            raise ValueError("phi0 must be > 0")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


@dataclass(frozen=True)
class TrainReport:
    """Outcome of one training run."""

    final_error: float
    epochs_used: int
    error_history: np.ndarray
    converged: bool
    final_mse: float
    val_mse: float | None = None


def lm_train(w0: MlpWeights, batch: TrainingBatch,
             cfg: LmConfig = LmConfig()) -> tuple[MlpWeights, TrainReport]:
    """Adaptive-damping training loop.

    Each epoch builds the Jacobian once, then proposes steps: an accepted
    step (strictly smaller E) multiplies phi by phi_down; a rejection
    multiplies it by phi_up and retries with the same Jacobian. Stops on
    E < target_error, max_epochs, phi > phi_max, or max_rejects
    consecutive rejections (stall). Deterministic for fixed inputs.
    """
    shape = (w0.n_in, w0.n_hidden, w0.n_out)
    if batch.inputs.shape[1] != w0.n_in or batch.targets.shape[1] != w0.n_out:
        raise ValueError("batch dimensions do not match the network shape")

    wvec = w0.to_vector()
    error = batch_error(w0, batch)
    if not np.isfinite(error):
        raise ValueError("non-finite error at the initial weights")
    state = LmState(phi=cfg.phi0, last_error=error)
    history = [error]
    small_steps = 0

    while (state.last_error >= cfg.target_error
           and state.epoch < cfg.max_epochs
           and state.phi <= cfg.phi_max):
        w = MlpWeights.from_vector(wvec, *shape)
        jac, resid = mlp_jacobian(w, batch)
        jtj = jac.T @ jac
        jte = jac.T @ resid

        accepted = False
        rejects = 0
        while not accepted:
            delta = _solve_damped(jtj, jte, state.phi)
            trial_vec = wvec + delta
            trial_error = batch_error(
                MlpWeights.from_vector(trial_vec, *shape), batch)
            if not np.isfinite(trial_error):
                raise ValueError("training diverged to a non-finite error")
            if trial_error < state.last_error:
                decrease = (state.last_error - trial_error) / state.last_error
                wvec = trial_vec
                state.last_error = trial_error
                state.phi = max(state.phi * cfg.phi_down, cfg.phi_min)
                accepted = True
            else:
                state.phi *= cfg.phi_up
                rejects += 1
                if state.phi > cfg.phi_max or rejects >= cfg.max_rejects:
                    break
        if not accepted:
            break
        state.epoch += 1
        history.append(state.last_error)
        if cfg.min_rel_decrease > 0:
            small_steps = small_steps + 1 if decrease < cfg.min_rel_decrease else 0
            if small_steps >= cfg.rel_patience:
                break

    final = MlpWeights.from_vector(wvec, *shape)
    n_terms = batch.n_patterns * w0.n_out
    report = TrainReport(
        final_error=state.last_error,
        epochs_used=state.epoch,
        error_history=np.array(history),
        converged=state.last_error < cfg.target_error,
        final_mse=2.0 * state.last_error / n_terms,
    )
    return final, report


def attach_validation(report: TrainReport, val_mse: float) -> TrainReport:
    return replace(report, val_mse=val_mse)


def save_weights(w: MlpWeights, path) -> None:
    """Flat text format: header `mlp n_in n_hidden n_out`, one value per line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"mlp {w.n_in} {w.n_hidden} {w.n_out}\n")
        for value in w.to_vector():
            fh.write(repr(float(value)) + "\n")


def load_weights(path) -> MlpWeights:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "mlp":
            raise ValueError(f"{path}: expected header 'mlp n_in n_hidden n_out'")
        n_in, n_hidden, n_out = (int(v) for v in header[1:])
        values = [float(line) for line in fh if line.strip()]
    return MlpWeights.from_vector(np.array(values), n_in, n_hidden, n_out)
