"""``qdelete run|sweep|verify``.

Exit codes: 0 success, 1 usage or config error, 2 invariant / consistency failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import checks, protocol, report
from .config import ConfigError, ScenarioConfig, load_config, with_overrides
from .core import phase_residual
from .machines import LinearChannel
from .resources import expand_two_singlets, two_singlets

log = logging.getLogger("qdelete")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2


def _reduced_state(device, basis):
    if isinstance(device, LinearChannel):
        return protocol.channel_reduced_state(device, basis)
    return protocol.bob_reduced_state(device, basis)


def build_report(cfg: ScenarioConfig) -> tuple[dict, bool]:
    """Report document plus a flag that is True when a linear channel signalled."""
    device = cfg.build()
    grid = cfg.grid()
    rhos = [_reduced_state(device, b) for b in grid]

    states, herm, trace_err, min_eig, expansion = [], 0.0, 0.0, np.inf, 0.0
    reference_state = two_singlets()
    for b, rho in zip(grid, rhos):
        M = rho.matrix
        herm = max(herm, float(np.max(np.abs(M - M.conj().T))))
        trace_err = max(trace_err, abs(float(np.trace(M).real) - 1.0))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(M).min()))
        expansion = max(expansion, phase_residual(reference_state, expand_two_singlets(b)))
        states.append(report.state_doc(b, rho, protocol.pauli_decompose(rho), protocol.encoded_bit(b)))

    pairs, linear_violation = [], False
    for i in range(len(grid)):
        for j in range(i + 1, len(grid)):
            r = protocol.compare(grid[i], grid[j], rhos[i], rhos[j], cfg.tolerance)
            pairs.append(report.pair_doc(i, j, r))
            if isinstance(device, LinearChannel) and r.distance >= protocol.SIGNAL_TOL:
                linear_violation = True

    reference = cfg.reference_basis()
    ref_rho = _reduced_state(device, reference)
    sweep_reports = tuple(protocol.compare(reference, b, ref_rho, rho, cfg.tolerance)
                          for b, rho in zip(grid, rhos))
    best = protocol.argmax_distance([r.distance for r in sweep_reports])
    sweep = protocol.Sweep(sweep_reports, best, sweep_reports[best].distance)

    any_signal = any(p["verdict"] == "signalling" for p in pairs) or any(
        r.verdict == "signalling" for r in sweep_reports)
    doc = report.run_document(
        config=cfg.resolved(),
        seed=cfg.seed,
        states=states,
        pairs=pairs,
        sweep=report.sweep_doc(sweep, reference),
        invariants={
            "hermiticity_residual": herm,
            "trace_residual": trace_err,
            "min_eigenvalue": min_eig,
            "expansion_identity_residual": expansion,
            "linear_channel_signalled": linear_violation,
        },
        verdict="signalling" if any_signal else "no-signalling",
    )
    return doc, linear_violation


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config)
    return with_overrides(cfg, output=args.output, seed=args.seed,
                          tolerance=args.tolerance, grid_points=args.grid_points)


def cmd_run(args) -> int:
    cfg = _load(args)
    doc, violated = build_report(cfg)
    _write(report.dumps(doc), cfg.output_path)
    if violated:
        log.error("linear channel produced basis-dependent reduced states")
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    result = protocol.sweep(cfg.build(), cfg.grid(), cfg.reference_basis(), cfg.tolerance)
    _write(report.sweep_csv(result.reports), cfg.output_path)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = checks.run_checks(seed=args.seed or 0)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        for r in failed:
            print(f"invariant {r.name} failed: residual {r.residual:.3e}", file=sys.stderr)
        return EXIT_INVARIANT
    print(f"all {len(results)} invariants pass")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the report/table here instead of stdout")
    common.add_argument("--seed", type=int, help="seed for random channels (and verify sampling)")
    common.add_argument("--tolerance", type=float, help="signalling threshold on trace distance")
    common.add_argument("--grid-points", type=int, help="replace the basis grid by N uniform theta points")

    parser = argparse.ArgumentParser(prog="qdelete", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="full signalling report as JSON")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("sweep", parents=[common], help="distance vs reference basis as CSV")
    p.add_argument("config")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(name)s: %(levelname)s: %(message)s")
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except ValueError as exc:
        log.error("invalid machine configuration: %s", exc)
        return EXIT_CONFIG
    except protocol.ConsistencyError as exc:
        log.error("consistency failure: %s", exc)
        return EXIT_INVARIANT
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
