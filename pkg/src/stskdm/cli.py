"""Command-line entry point.

    stskdm ser --config run.cfg --snr 0,5,10 --out ser.csv --threads 4
    stskdm capacity --config run.cfg --out cap.csv
    stskdm gains
    stskdm verify [--config run.cfg]
    stskdm export-dms --config run.cfg --out dms.txt

Exit status is 0 on success, 1 when a verification check fails and 2 for
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dispersion import format_dm_set
from .harness import (
    ConfigError,
    SimConfig,
    apply_overrides,
    build_codebook,
    build_dms,
    capacity_csv,
    load_config,
    run_capacity_campaign,
    run_gain_table,
    run_ser_campaign,
    run_verify,
    ser_csv,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors already; keep messages on stderr
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, snr=True, threads=True):
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    if snr:
        p.add_argument("--snr", help="comma-separated SNR grid in dB")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    if threads:
        p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key; repeatable")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="stskdm", description="CSTSK dispersion-matrix design and simulation")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("ser", help="Monte-Carlo SER campaign, CSV output"))
    _common(sub.add_parser("capacity", help="DCMC capacity campaign, CSV output"))
    _common(sub.add_parser("gains", help="coding gain and diversity table"), snr=False, threads=False)
    _common(sub.add_parser("verify", help="decomposition and invariant checks"), snr=False, threads=False)
    _common(sub.add_parser("export-dms", help="write the configured DM set"), snr=False, threads=False)
    return ap


def _config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    pairs = list(args.overrides)
    if args.seed is not None:
        pairs.append(f"master_seed={args.seed}")
    if getattr(args, "snr", None):
        pairs.append(f"snr_grid_db={args.snr}")
    return apply_overrides(cfg, pairs)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = getattr(args, "threads", 1)
    if threads < 1:
        print("stskdm: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _config(args)
        if args.command == "ser":
            cb = build_codebook(cfg)
            _emit(ser_csv(run_ser_campaign(cfg, threads, cb), cfg), args.out)
        elif args.command == "capacity":
            cb = build_codebook(cfg)
            _emit(capacity_csv(run_capacity_campaign(cfg, threads, cb), cfg), args.out)
        elif args.command == "gains":
            rows = run_gain_table() if args.config is None and not args.overrides else None
            if rows is None:
                rows = run_gain_table([(cfg.dm_family, cfg, None)])
            _emit("".join(r.line() + "\n" for r in rows), args.out)
            if any(r.error for r in rows):
                return EXIT_FAIL
        elif args.command == "verify":
            explicit = args.config is not None or bool(args.overrides)
            checks = run_verify(cfg if explicit else None)
            _emit("".join(f"{c}\n" for c in checks), args.out)
            if not all(c.passed for c in checks):
                return EXIT_FAIL
        elif args.command == "export-dms":
            _emit(format_dm_set(build_dms(cfg)), args.out)
    except ConfigError as exc:
        print(f"stskdm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
