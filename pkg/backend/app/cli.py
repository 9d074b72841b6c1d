"""
Batch front-end.

    python -m app.cli analyze problem.json --seed 3
    python -m app.cli corpus --seed 0 --count 50

Reports go to stdout as sorted-key JSON; logs go to stderr. Exit codes:
0 all certifications pass, 2 a certification failed, 1 input or usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.agents.analyze import AnalyzeAgent
from app.agents.corpus import CorpusAgent
from app.agents.ibc import IBCAgent
from app.agents.reduce import ReduceAgent
from app.agents.strip import StripAgent
from app.agents.validate import ValidateAgent
from app.config import get_settings
from app.core.errors import ProblemFileError
from app.services.problem_io import ProblemFile, load_problem, resolve_options
from app.utils.helpers import pretty_json
from app.utils.logger import setup_logger

logger = logging.getLogger(__name__)

EXIT_CODES = {"pass": 0, "fail": 2}
FILE_COMMANDS = ("validate", "analyze", "reduce", "strip", "ibc")
REQUIRED_PAYLOAD = {"strip": "strip", "ibc": "ibc"}


def exit_code(report: Dict[str, Any]) -> int:
    return EXIT_CODES.get(report.get("status"), 1)


def _candidates(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="germcoh", description="Exact germ cohomology of holomorphic complex families")
    parser.add_argument("--log-level", default=None, help="overrides GERMCOH_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--fast", action="store_true", help="skip representative-perturbation and diagram checks")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--format", choices=["json"], default="json")

    for name in FILE_COMMANDS:
        cmd = sub.add_parser(name, parents=[common])
        cmd.add_argument("file", type=Path)
        cmd.add_argument("--depth", type=int, default=None)
        cmd.add_argument("--degree", type=int, default=None)
        cmd.add_argument("--order", type=int, default=None)
        cmd.add_argument("--candidates", type=_candidates, default=None, help="comma-separated exact scalars")

    corpus = sub.add_parser("corpus", parents=[common])
    corpus.add_argument("file", type=Path, nargs="?", default=None, help="problem file with a generator payload")
    corpus.add_argument("--count", type=int, default=50)
    return parser


def _load(path: Path) -> ProblemFile:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemFileError(f"cannot read {path}: {e}")
    return load_problem(text)


def run_command(args: argparse.Namespace) -> Dict[str, Any]:
    settings = get_settings()
    checked = False if args.fast else None
    try:
        if args.command == "corpus":
            problem = _load(args.file) if args.file else None
            options = resolve_options(problem, settings, seed=args.seed, checked=checked, workers=args.workers)
            count = args.count
            if problem is not None:
                if problem.generator is None or problem.generator.count is None:
                    raise ProblemFileError("corpus needs a generator payload with a count")
                count = problem.generator.count
                if args.seed is None:
                    options.seed = problem.generator.seed
            return CorpusAgent().run(options.seed, count, options.checked, options.workers)

        problem = _load(args.file)
        required = REQUIRED_PAYLOAD.get(args.command)
        if required and problem.kind != required:
            raise ProblemFileError(f"{args.command} needs a {required} payload, got {problem.kind}")
        options = resolve_options(
            problem,
            settings,
            depth=args.depth,
            seed=args.seed,
            checked=checked,
            candidates=args.candidates,
            degree=args.degree,
            order=args.order,
            workers=args.workers,
        )
    except ProblemFileError as e:
        logger.error(f"Error loading problem: {e}")
        return {"command": args.command, "status": "error", **e.to_dict()}

    if args.command == "validate":
        return ValidateAgent().validate(problem, options)
    if args.command == "analyze":
        return AnalyzeAgent().analyze(problem, options)
    if args.command == "reduce":
        return ReduceAgent().reduce(problem, options)
    if args.command == "strip":
        return StripAgent().strip(problem, options)
    return IBCAgent().ibc(problem, options)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    setup_logger(args.log_level or get_settings().log_level, stream=sys.stderr)
    report = run_command(args)
    sys.stdout.write(pretty_json(report) + "\n")
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
