"""Command line: ``run``, ``generate`` and ``verify``.

Exit codes: 0 success, 1 runtime failure or verification discrepancy,
2 invalid config, scenario name or log.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from centerstone import audit, config, consensus, scenarios, trajectory

log = logging.getLogger("centerstone")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="centerstone", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and write its trajectory and metrics")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="scenario JSON file")
    src.add_argument("--scenario", help="built-in scenario name")
    run.add_argument("--method", help="centerpoint | tverberg | iterated-radon[:r]")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path, default=Path("."))
    run.add_argument("--svg", action="store_true", help="also write trajectory.svg")

    gen = sub.add_parser("generate", help="print a built-in scenario config")
    gen.add_argument("name")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, help="write to this file instead of stdout")

    ver = sub.add_parser("verify", help="re-check a trajectory log with the brute-force oracle")
    ver.add_argument("--log", type=Path, required=True)
    ver.add_argument("--depth-checks", type=int, default=5, metavar="K", help="number of sampled steps (0 = no-op)")
    return p


def _load_config(args) -> config.ScenarioConfig:
    if args.scenario:
        seed = args.seed if args.seed is not None else 0
        cfg = scenarios.generate_scenario(args.scenario, seed)
    else:
        cfg = config.load(args.config)
    seed = args.seed if args.seed is not None else cfg.resolved_seed()
    return cfg.with_overrides(method=args.method, seed=seed)


def cmd_run(args) -> int:
    try:
        cfg = _load_config(args)
    except (ValueError, OSError) as exc:  # config, scenario name or override rejected
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        reports = consensus.run(cfg)
        args.out.mkdir(parents=True, exist_ok=True)
        trajectory.write_log(args.out / "trajectory.csv", cfg, reports)
        data = trajectory.metrics(cfg, reports)
        trajectory.write_metrics(args.out / "metrics.json", data)
        if args.svg:
            (args.out / "trajectory.svg").write_text(trajectory.render_svg(cfg, reports))
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 1
        log.exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(
        f"{cfg.name}: {data['steps']} steps, final diameter {data['final_diameter']:.3e}, "
        f"steps_to_epsilon {data['steps_to_epsilon']}, safety violations {data['safety_violations']}"
    )
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        cfg = scenarios.generate_scenario(args.name, args.seed)
    except scenarios.UnknownScenario as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        config.save(cfg, args.out)
    else:
        sys.stdout.write(config.dumps(cfg) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        parsed = trajectory.read_log(args.log)
    except (trajectory.LogError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = audit.audit(parsed, args.depth_checks)
    for line in report.discrepancies[:50]:
        print(f"discrepancy: {line}")
    print(
        f"{len(report.discrepancies)} discrepancies; {report.hull_checks} hull checks, "
        f"{report.depth_checks} depth checks, {report.skipped_depth} depth checks over oracle limits"
    )
    return EXIT_OK if report.ok else EXIT_FAIL


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    return {"run": cmd_run, "generate": cmd_generate, "verify": cmd_verify}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
