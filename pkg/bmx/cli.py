"""The ``bmx`` command line.

Exit codes: 0 on success, 1 when a verification ran and failed, 2 when the
input could not be read or the computation could not be carried out.
"""

import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from bmx import __version__
from bmx.base_command import Command, parse_complex
from bmx.commands import (
    BlockCommand,
    DirsumCommand,
    GenOrthogonalCommand,
    KronCommand,
    MapCommand,
    OrbitCommand,
    ProductBgCommand,
    ProductCommand,
    RotateCommand,
    SvdCommand,
    TransposeCommand,
    VerifyCommand,
)
from bmx.config import Settings
from bmx.documents import write_atomic
from bmx.errors import BmxError, CommandNotFoundError
from bmx.models import CommandResult, VerificationReport
from bmx.report import ReportLog

log = logging.getLogger(__name__)

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def shared_options() -> argparse.ArgumentParser:
    """Flags every subcommand accepts."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--tol", type=float, default=None, help="Tolerance")
    parser.add_argument(
        "--gauge", type=parse_complex, default=None, help="Preferred gauge value"
    )
    parser.add_argument("--seed", type=int, default=None, help="Random seed")
    parser.add_argument("--report", type=Path, default=None, help="Report path")
    parser.add_argument("-o", "--output", type=Path, default=None, help="Output path")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="More log output"
    )
    return parser


def configure_logging(verbosity: int) -> None:
    level = LOG_LEVELS[min(verbosity, len(LOG_LEVELS) - 1)]
    logging.basicConfig(
        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    logging.getLogger("bmx").setLevel(level)


def _one_line(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        error = exc.errors()[0]
        where = ".".join(str(part) for part in error["loc"])
        return f"{where}: {error['msg']}" if where else error["msg"]
    return str(exc).splitlines()[0] if str(exc) else type(exc).__name__


def format_report(report: VerificationReport) -> str:
    status = "passed" if report.passed else "FAILED"
    worst = max(report.residuals.values(), default=0.0)
    return f"{report.check}: {status} (max residual {worst:.3g})"


class Runner:
    def __init__(self, commands: list[Command] | None = None) -> None:
        self.commands = self.setup_base_commands()
        if commands:
            self.commands.extend(commands)
        self.reports = ReportLog()

    def setup_base_commands(self) -> list[Command]:
        return [
            ProductCommand(),
            ProductBgCommand(),
            TransposeCommand(),
            RotateCommand(),
            SvdCommand(),
            VerifyCommand(),
            GenOrthogonalCommand(),
            KronCommand(),
            DirsumCommand(),
            MapCommand(),
            OrbitCommand(),
            BlockCommand(),
        ]

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="bmx", description="BM hypermatrix algebra toolkit"
        )
        parser.add_argument("--version", action="version", version=__version__)
        subparsers = parser.add_subparsers(dest="command", required=True)
        parents = [shared_options()]
        for command in self.commands:
            command.add_parser(subparsers, parents)
        return parser

    def get_command(self, name: str) -> Command:
        command = next((c for c in self.commands if c.name == name), None)
        if not command:
            raise CommandNotFoundError(f"Command '{name}' not found")
        return command

    def execute_command(self, name: str, settings: Settings, **kwargs) -> CommandResult:
        """Execute a command and collect its reports."""
        result = self.get_command(name).execute(settings, **kwargs)
        for report in result.reports:
            self.reports.add_report(report)
        return result

    def _command_kwargs(self, args: argparse.Namespace) -> dict:
        command = self.get_command(args.command)
        dests = [kwargs.get("dest", flags[0]) for flags, kwargs in command.arguments]
        return {dest: getattr(args, dest) for dest in dests}

    def _emit(self, result: CommandResult, settings: Settings) -> None:
        lines = [*result.summary, *(format_report(r) for r in result.reports)]
        to_stdout = result.output is None or settings.output is not None
        if result.output is not None:
            if settings.output is not None:
                write_atomic(settings.output, result.output)
            else:
                sys.stdout.write(result.output)
        for line in lines:
            print(line, file=sys.stdout if to_stdout else sys.stderr)
        if settings.report is not None:
            write_atomic(settings.report, self.reports.dump())

    def run(self, argv: list[str] | None = None) -> int:
        parser = self.build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return exc.code if isinstance(exc.code, int) else 0
        configure_logging(args.verbose)
        self.reports.clear()
        try:
            settings = Settings.from_env(
                tol=args.tol,
                gauge=args.gauge,
                seed=args.seed,
                report=args.report,
                output=args.output,
                verbosity=args.verbose,
            )
            result = self.execute_command(
                args.command, settings, **self._command_kwargs(args)
            )
            self._emit(result, settings)
        except (BmxError, ValidationError, OSError) as exc:
            log.debug("Command %s failed", args.command, exc_info=True)
            print(f"bmx: error: {_one_line(exc)}", file=sys.stderr)
            return 2
        return 0 if result.passed else 1


def run_cli(argv: list[str] | None = None) -> int:
    return Runner().run(argv)


def main() -> None:
    sys.exit(run_cli())
