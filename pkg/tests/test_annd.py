"""Blind neural detector: features, training-set assembly, fit/detect."""

import numpy as np
import pytest
from sklearn.exceptions import NotFittedError

from annmimo.adc import AdcConfig
from annmimo.annd import (AnnDetector, TargetMode, annd_detect, annd_train,
                          build_training_set, complex_to_features,
                          features_to_complex, frames_to_samples,
                          load_annd_model, save_annd_model)
from annmimo.channel import draw_channel, noise_variance_for_snr
from annmimo.config import ExperimentConfig
from annmimo.harness import (_block_channel, _count_frame_errors, _receive,
                             _stream, _train_block_model, _tx_frame,
                             _TRAIN_DATA, _TRAIN_NOISE)
from annmimo.phy import PhyConfig, bpsk, qpsk


class TestFeatures:
    def test_interleaved_order(self):
        got = complex_to_features(np.array([1 + 2j, 3 - 4j]))
        assert np.array_equal(got, [1, 2, 3, -4])

    def test_real_input(self):
        assert np.array_equal(complex_to_features(np.array([5 + 0j, -5 + 0j])),
                              [5, 0, -5, 0])

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        y = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert np.array_equal(features_to_complex(complex_to_features(y)), y)

    def test_batch_axis(self):
        y = np.array([[1 + 1j, 2 - 2j], [0 + 3j, -1 + 0j]])
        got = complex_to_features(y)
        assert got.shape == (2, 4)
        assert np.array_equal(got[0], [1, 1, 2, -2])


def _pilot_frames(seed=0, n_frames=3, snr_db=20.0, scheme=None):
    phy = PhyConfig(scheme=scheme or bpsk())
    rng = np.random.default_rng(seed)
    h = draw_channel(2, 2, rng)
    sigma2 = noise_variance_for_snr(snr_db, 2)
    rx, tx = [], []
    for j in range(n_frames):
        frame = _tx_frame(phy, _stream(seed, _TRAIN_DATA, 0, j))
        rx.append(_receive(frame, h, sigma2, AdcConfig(None), phy,
                           _stream(seed, _TRAIN_NOISE, 0, j)))
        tx.append(frame)
    return np.stack(rx), np.stack(tx), h, phy


class TestBuildTrainingSet:
    def test_pattern_count_and_shapes(self):
        phy = PhyConfig(n_subcarriers=4, cp_len=1)
        rx = np.zeros((1, 2, 4), dtype=complex)
        tx = np.zeros((1, 2, 4), dtype=complex)
        batch = build_training_set(rx, phy.scheme, tx_frames=tx,
                                   mode=TargetMode.PILOT)
        assert batch.n_patterns == 4
        assert batch.inputs.shape == (4, 4) and batch.targets.shape == (4, 2)

    def test_inputs_identical_across_modes(self):
        rx, tx, h, phy = _pilot_frames()
        pilot = build_training_set(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT)
        ml = build_training_set(rx, phy.scheme, h=h, mode=TargetMode.ML_ESTIMATE)
        assert np.array_equal(pilot.inputs, ml.inputs)

    def test_ml_targets_nearly_true_at_high_snr(self):
        # at 30 dB the ML estimates almost always equal the pilots
        for seed in range(3):
            rx, tx, h, phy = _pilot_frames(seed=seed, n_frames=20, snr_db=30.0)
            pilot = build_training_set(rx, phy.scheme, tx_frames=tx,
                                       mode=TargetMode.PILOT, antenna=0)
            ml = build_training_set(rx, phy.scheme, h=h,
                                    mode=TargetMode.ML_ESTIMATE, antenna=0)
            agree = np.mean(np.all(pilot.targets == ml.targets, axis=1))
            assert agree > 0.99

    def test_antenna_selects_target_column(self):
        rx, tx, _, phy = _pilot_frames()
        b1 = build_training_set(rx, phy.scheme, tx_frames=tx,
                                mode=TargetMode.PILOT, antenna=1)
        want = frames_to_samples(tx)[:, 1]
        assert np.array_equal(b1.targets[:, 0] + 1j * b1.targets[:, 1], want)

    def test_pilot_mode_requires_tx(self):
        rx, _, h, phy = _pilot_frames()
        with pytest.raises(ValueError, match="transmitted frames"):
            build_training_set(rx, phy.scheme, h=h, mode=TargetMode.PILOT)

    def test_ml_mode_requires_channel(self):
        rx, tx, _, phy = _pilot_frames()
        with pytest.raises(ValueError, match="channel"):
            build_training_set(rx, phy.scheme, tx_frames=tx,
                               mode=TargetMode.ML_ESTIMATE)


class TestAnnDetector:
    def test_table_shape_for_2x2(self):
        rx, tx, h, phy = _pilot_frames(n_frames=5)
        model = annd_train(rx, phy.scheme, h=h, random_state=0, max_epochs=5)
        assert len(model.nets_) == 2
        for net in model.nets_:
            assert (net.n_in, net.n_hidden, net.n_out) == (4, 7, 2)

    def test_training_deterministic(self):
        rx, tx, _, phy = _pilot_frames(n_frames=5)
        a = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                       random_state=3, max_epochs=20)
        b = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                       random_state=3, max_epochs=20)
        for na, nb in zip(a.nets_, b.nets_):
            assert np.array_equal(na.to_vector(), nb.to_vector())
        for ra, rb in zip(a.reports_, b.reports_):
            assert ra.final_error == rb.final_error

    def test_memorizes_noiseless_training_set(self):
        # converged noiseless fit reproduces its own training targets
        rng = np.random.default_rng(4)
        h = draw_channel(2, 2, rng)
        phy = PhyConfig(n_subcarriers=8, cp_len=2)
        tx = np.stack([_tx_frame(phy, np.random.default_rng(100 + j))
                       for j in range(8)])
        rx = np.stack([h @ f for f in tx])  # no noise
        model = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                           random_state=1, val_fraction=0.0)
        samples = frames_to_samples(rx)
        want = frames_to_samples(tx)
        assert all(r.converged for r in model.reports_)
        assert np.array_equal(model.predict(samples), want)

    def test_zero_weight_model_outputs_tiebreak_point(self):
        rx, tx, _, phy = _pilot_frames(n_frames=2)
        model = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                           random_state=0, max_epochs=1)
        from annmimo.neural import MlpWeights
        model.nets_ = [MlpWeights(np.zeros((7, 4)), np.zeros(7),
                                  np.zeros((2, 7)), np.zeros(2))] * 2
        res = model.detect(np.array([0.3 + 1j, -2 - 1j]))
        assert np.array_equal(res.soft, [0, 0])
        assert np.array_equal(res.symbols, [phy.scheme.points[0]] * 2)

    def test_per_antenna_decomposability(self):
        rx, tx, _, phy = _pilot_frames(n_frames=5)
        model = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                           random_state=5, max_epochs=10)
        samples = frames_to_samples(rx)
        before = model.predict(samples)
        retrained = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                               random_state=99, max_epochs=10)
        model.nets_ = [retrained.nets_[0], model.nets_[1]]
        after = model.predict(samples)
        assert np.array_equal(before[:, 1], after[:, 1])

    def test_detect_is_channel_free(self):
        # blind inference: detect consumes (model, y) only
        rx, tx, _, phy = _pilot_frames(n_frames=3)
        model = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                           random_state=0, max_epochs=5)
        res = annd_detect(model, np.array([0.1 + 0.2j, -0.3 + 0.4j]))
        assert res.symbols.shape == (2,)
        assert np.array_equal(res.symbols,
                              model.predict(np.array([[0.1 + 0.2j, -0.3 + 0.4j]]))[0])

    def test_validation_mse_reported(self):
        rx, tx, _, phy = _pilot_frames(n_frames=10)
        model = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                           random_state=2, max_epochs=10, val_fraction=0.2)
        assert all(r.val_mse is not None and r.val_mse >= 0 for r in model.reports_)

    def test_empty_training_rejected(self):
        with pytest.raises(ValueError):
            annd_train(np.zeros((0, 2, 4), dtype=complex), bpsk(), h=np.eye(2))
        with pytest.raises(ValueError):
            AnnDetector(scheme=bpsk()).fit(np.zeros((0, 2)), np.zeros((0, 2)))

    def test_unfitted_predict_raises(self):
        with pytest.raises(NotFittedError):
            AnnDetector(scheme=bpsk()).predict(np.ones((1, 2), dtype=complex))

    def test_wrong_width_rejected(self):
        rx, tx, _, phy = _pilot_frames(n_frames=2)
        model = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                           random_state=0, max_epochs=1)
        with pytest.raises(ValueError, match="receive antennas"):
            model.predict(np.ones((1, 3), dtype=complex))


class TestTrainedPerformance:
    def test_high_snr_block_ser_small(self):
        # fixed block: train and test at 20 dB on the same channel;
        # pre-build runs measured SER = 0 over 1e4+ symbols for 10/10 seeds
        cfg = ExperimentConfig(
            phy=PhyConfig(scheme=bpsk()), snr_db=(20.0,), adc=(AdcConfig(None),),
            detectors=("ANND",), n_test_frames=79, block_frames=0,
            n_train_frames=200, master_seed=0, target_mode=TargetMode.PILOT)
        h, _ = _block_channel(cfg, 0)
        model = _train_block_model(cfg, 20.0, cfg.adc[0], 0, h)
        errors = _count_frame_errors(cfg, "ANND", 20.0, cfg.adc[0], h, model,
                                     range(cfg.n_test_frames))
        assert errors / (79 * 64 * 2) <= 0.01

    def test_nets_converge_at_20db(self):
        # 200 pilot frames at 20 dB reach the sum-squared-error target
        cfg = ExperimentConfig(
            phy=PhyConfig(scheme=bpsk()), snr_db=(20.0,), adc=(AdcConfig(None),),
            detectors=("ANND",), n_test_frames=1, block_frames=0,
            n_train_frames=200, master_seed=1, target_mode=TargetMode.PILOT)
        h, _ = _block_channel(cfg, 0)
        model = _train_block_model(cfg, 20.0, cfg.adc[0], 0, h)
        assert all(r.converged for r in model.reports_)
        assert all(r.final_error < 1e-3 for r in model.reports_)

    def test_beats_zf_on_same_block_at_10db(self):
        from annmimo.harness import estimate_ser
        cfg = ExperimentConfig(
            phy=PhyConfig(scheme=bpsk()), snr_db=(10.0,), adc=(AdcConfig(None),),
            detectors=("ANND", "ZF"), n_test_frames=79, block_frames=0,
            n_train_frames=200, master_seed=0, target_mode=TargetMode.PILOT)
        annd = estimate_ser("ANND", 10.0, cfg.adc[0], cfg)
        zf = estimate_ser("ZF", 10.0, cfg.adc[0], cfg)
        slack = 3 * np.sqrt(annd.stderr ** 2 + zf.stderr ** 2)
        assert annd.ser <= zf.ser + slack


class TestModelIO:
    def test_save_load_round_trip(self, tmp_path):
        rx, tx, _, phy = _pilot_frames(n_frames=3, scheme=qpsk())
        model = annd_train(rx, phy.scheme, tx_frames=tx, mode=TargetMode.PILOT,
                           random_state=0, max_epochs=5)
        path = tmp_path / "model.txt"
        save_annd_model(model, path)
        back = load_annd_model(path)
        assert back.scheme.name == "qpsk"
        assert (back.n_tx_, back.n_rx_) == (2, 2)
        for a, b in zip(model.nets_, back.nets_):
            assert np.array_equal(a.to_vector(), b.to_vector())
        y = np.array([[0.5 - 0.5j, 1 + 0.25j]])
        assert np.array_equal(model.predict(y), back.predict(y))

    def test_header_validated(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("model 2 2 bpsk\n")
        with pytest.raises(ValueError, match="header"):
            load_annd_model(path)
