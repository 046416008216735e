"""MIMO-OFDM link simulation with blind neural detection.

Submodules: phy (mapping/OFDM), channel (flat Rayleigh + AWGN), adc
(low-resolution quantization), detectors (ZF/MMSE/ML), neural (perceptron
+ Levenberg-Marquardt trainer), annd (the blind neural detector),
config/harness (experiments), cli.
"""

from .adc import AdcConfig, estimate_full_scale, quantize, quantize_block
from .annd import (AnnDetector, TargetMode, annd_detect, annd_train,
                   build_training_set, complex_to_features, load_annd_model,
                   save_annd_model)
from .channel import NoiseModel, apply_channel, draw_channel, noise_variance_for_snr
from .config import ConfigError, ExperimentConfig, load_config, save_config
from .detectors import (DetectionResult, MLDetector, MMSEDetector,
                        SingularChannelError, ZFDetector, ml_detect,
                        mmse_detect, zf_detect)
from .harness import (SerRecord, TimingRecord, benchmark_detectors,
                      estimate_ser, read_records, run_ser_sweep,
                      write_records, write_timing_records)
from .neural import (LmConfig, MlpWeights, TrainingBatch, TrainReport,
                     init_weights, lm_step, lm_train, load_weights,
                     mlp_forward, mlp_jacobian, save_weights)
from .phy import (Modulation, PhyConfig, bpsk, demap_symbols, map_bits,
                  modulation_by_name, ofdm_demodulate, ofdm_modulate, qpsk,
                  slice_symbol)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
