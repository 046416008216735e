"""Command-line front end: sweep, bench, train, detect."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .annd import load_annd_model, save_annd_model
from .config import ConfigError, load_config
from .harness import (_block_channel, _count_frame_errors, _train_block_model,
                      SerRecord, benchmark_detectors, run_ser_sweep,
                      write_records, write_timing_records)


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    return cfg


def _first_point(cfg):
    return cfg.snr_db[0], cfg.adc[0]


def cmd_sweep(args) -> int:
    cfg = _load(args)
    progress = None
    if not args.quiet:
        def progress(rec):
            label = "Perfect" if rec.adc_bits is None else f"{rec.adc_bits}-bit"
            print(f"{rec.detector:5s} {rec.snr_db:6.1f} dB  {label:8s} "
                  f"SER {rec.ser:.6f} ({rec.symbol_errors}/{rec.symbols_tested})")
    records = run_ser_sweep(cfg, workers=args.workers, progress=progress)
    write_records(records, args.out)
    if not args.quiet:
        print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_bench(args) -> int:
    cfg = _load(args)
    records = benchmark_detectors(cfg)
    write_timing_records(records, args.out)
    if not args.quiet:
        for r in records:
            print(f"{r.detector:5s} {r.mean_detect_time * 1e6:9.2f} us/detection "
                  f"(x{r.relative_to_ml:.4f} of ML)")
        print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_train(args) -> int:
    """Train the neural detector at the config's first operating point."""
    cfg = _load(args)
    snr_db, adc = _first_point(cfg)
    h, _ = _block_channel(cfg, 0)
    model = _train_block_model(cfg, snr_db, adc, 0, h)
    save_annd_model(model, args.model_out)
    if not args.quiet:
        for i, rep in enumerate(model.reports_):
            val = f", val MSE {rep.val_mse:.3e}" if rep.val_mse is not None else ""
            print(f"antenna {i}: E {rep.final_error:.3e} after {rep.epochs_used} "
                  f"epochs (MSE {rep.final_mse:.3e}{val})")
        print(f"saved model to {args.model_out}")
    return 0


def cmd_detect(args) -> int:
    """Blind-detect the first operating point's test frames with a saved model."""
    cfg = _load(args)
    model = load_annd_model(args.model)
    snr_db, adc = _first_point(cfg)
    h, _ = _block_channel(cfg, 0)  # same block the model was trained against
    errors = _count_frame_errors(cfg, "ANND", snr_db, adc, h, model,
                                 range(cfg.n_test_frames))
    tested = cfg.n_test_frames * cfg.phy.n_subcarriers * cfg.phy.n_tx
    rec = SerRecord("ANND", float(snr_db), adc.bits, errors / tested, errors, tested)
    print(f"ANND {rec.snr_db:.1f} dB {adc.label}-bit ADC: "
          f"SER {rec.ser:.6f} ({rec.symbol_errors}/{rec.symbols_tested})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annmimo",
        description="MIMO-OFDM detection experiments: SER sweeps, timing, "
                    "neural-detector training")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="key-value config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's master_seed")
        p.add_argument("--quiet", action="store_true", help="suppress progress")

    p = sub.add_parser("sweep", help="Monte-Carlo SER sweep to CSV")
    common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel worker processes (results are identical)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="per-detection timing benchmark to CSV")
    common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("train", help="train the neural detector, save weights")
    common(p)
    p.add_argument("--model-out", required=True, help="output model path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("detect", help="run a saved neural detector, print SER")
    common(p)
    p.add_argument("--model", required=True, help="saved model path")
    p.set_defaults(func=cmd_detect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
