"""Command-line entry points: run experiments, print spectra, self-check.

Exit codes: 0 success, 1 failed verification/check, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import effham, harness
from .harness import ExperimentConfig, emit_outputs, run_experiment
from .verify import verify_suite


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--system", default="zrv", choices=harness.SYSTEMS)
    p.add_argument("--functional", default="hse", choices=harness.FUNCTIONALS)
    p.add_argument("--mode", default="ground", choices=("ground", "excited"))
    p.add_argument("--steps", type=int, default=4, dest="n_steps")
    p.add_argument("--m0", type=float, default=0.8)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--p2", type=float, default=harness.DEFAULT_P2)
    p.add_argument("--spam", type=float, default=harness.DEFAULT_SPAM)
    p.add_argument("--unencoded", action="store_true")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--seed", type=int, default=20240901)
    p.add_argument("--config", type=Path, default=None, help="key = value defaults file")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--formats", default="csv,json", help="comma list of csv,json,svg")


def _config_from_args(args) -> ExperimentConfig:
    overrides = dict(
        system=args.system,
        functional=args.functional,
        mode=args.mode,
        n_steps=args.n_steps,
        m0=args.m0,
        shots=args.shots,
        p2=args.p2,
        spam=args.spam,
        encoded=not args.unencoded,
        threshold=args.threshold,
        seed=args.seed,
    )
    if overrides["threshold"] is None:
        del overrides["threshold"]
    if args.config is not None:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig(**overrides)


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    report = run_experiment(cfg)
    print(f"system {cfg.system}/{cfg.functional} mode {cfg.mode} "
          f"{'encoded' if cfg.encoded else 'bare'} shots {cfg.shots}")
    print(f"  two-qubit gates: {report.gate_counts['total_2q']} "
          f"(per step {report.gate_counts['per_step_2q']})")
    print(f"  noiseless total success: {report.noiseless_ptot[-1]:.4f} "
          f"(ideal overlap {report.ideal_overlap:.4f})")
    print(f"  noiseless fidelity vs reference: {report.noiseless_fidelity:.4f}")
    if cfg.shots > 0:
        print(f"  discard rate: {report.discard_rate:.4f}")
        print(f"  total success estimate: {[round(p, 4) for p in report.ptot_est]}")
        print(f"  fidelity vs reference: {report.fidelity_fci:.4f}")
    if args.out is not None:
        formats = set(args.formats.split(","))
        files = emit_outputs(report, formats, args.out)
        for f in files:
            print(f"  wrote {f}")
    return 0


def cmd_fci(args) -> int:
    params = harness.load_params(args.system, args.functional)
    h = effham.to_ks_basis(effham.build_wannier_hamiltonian(params))
    res = effham.fci_diagonalize(h, args.electrons, None)
    table = effham.excitation_table(res)
    print(f"{args.system}/{args.functional}: N={args.electrons}, all-Sz spectrum")
    for key, gaps in table.rows.items():
        shown = " ".join(f"{g:.3f}" for g in gaps)
        print(f"  {key:10s} {shown} eV")
    if args.json:
        payload = {
            "system": args.system,
            "functional": args.functional,
            "energies": res.energies.tolist(),
            "s2": res.s2_values.tolist(),
            "rows": {k: list(v) for k, v in table.rows.items()},
            "coefficients": res.eigenvectors.tolist(),
        }
        Path(args.json).write_text(json.dumps(payload, indent=1))
        print(f"  wrote {args.json}")
    return 0


def cmd_verify(args) -> int:
    return 0 if verify_suite(fast=not args.full) else 1


def cmd_emit(args) -> int:
    data = json.loads(Path(args.report).read_text())
    report = harness.ExperimentReport(**data)
    files = emit_outputs(report, set(args.formats.split(",")), args.out)
    for f in files:
        print(f"wrote {f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pitesim",
        description="Simulate error-detected probabilistic imaginary-time evolution "
        "for spin-defect model Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment configuration")
    _add_run_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_fci = sub.add_parser("fci", help="exact spectrum and excitation table")
    p_fci.add_argument("--system", default="zrv", choices=harness.SYSTEMS)
    p_fci.add_argument("--functional", default="hse", choices=harness.FUNCTIONALS)
    p_fci.add_argument("--electrons", type=int, default=4)
    p_fci.add_argument("--json", type=Path, default=None)
    p_fci.set_defaults(func=cmd_fci)

    p_ver = sub.add_parser("verify", help="run the self-check suite")
    p_ver.add_argument("--full", action="store_true", help="include sampled-run checks")
    p_ver.set_defaults(func=cmd_verify)

    p_emit = sub.add_parser("emit", help="re-render outputs from a report.json")
    p_emit.add_argument("--report", type=Path, required=True)
    p_emit.add_argument("--out", type=Path, required=True)
    p_emit.add_argument("--formats", default="csv,svg")
    p_emit.set_defaults(func=cmd_emit)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
