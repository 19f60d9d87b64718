"""Command-line entry point: ``gradedk1 COMMAND JOB.toml [flags]``."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .errors import GradedK1Error
from .jobs import COMMANDS, FORMATS, load_job
from .runner import EXIT_INPUT, emit_report, run_job


class _Parser(argparse.ArgumentParser):
    # usage errors are input rejections; argparse's own 2 means truncation here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gradedk1", description="Graded K1 computations over finite graded rings.")
    p.add_argument("command", choices=COMMANDS + ("run",), help="computation to run; 'run' uses the job's command")
    p.add_argument("job", help="path to a TOML job file")
    p.add_argument("--level", type=int, help="stabilization level (overrides the job)")
    p.add_argument("--cap", type=int, help="closure cap in elements (overrides the job)")
    p.add_argument("--format", choices=FORMATS, help="output format (overrides the job)")
    p.add_argument("--seed", type=int, help="seed for sampled instances")
    p.add_argument("--workers", type=int, help="threads for closure frontiers")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    fmt = args.format or "text"
    try:
        spec = load_job(args.job, None if args.command == "run" else args.command)
        for name in ("level", "cap", "seed", "workers"):
            value = getattr(args, name)
            if value is not None:
                if name != "seed" and value < 1:
                    raise GradedK1Error(f"--{name} must be >= 1")
                setattr(spec, name, value)
        if args.format:
            spec.format = args.format
        fmt = spec.format
    except GradedK1Error as exc:
        report = {"command": args.command, "status": "rejected", "error": exc.to_dict()}
        sys.stdout.buffer.write(emit_report(report, fmt))
        return EXIT_INPUT
    code, report = run_job(spec)
    sys.stdout.buffer.write(emit_report(report, fmt))
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
