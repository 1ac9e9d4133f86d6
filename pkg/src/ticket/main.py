"""Command-line entry point for the lottery ticket constructor.

Exit codes: 0 success, 1 pruning failure (the probability-delta event),
2 invalid input, 3 internal error or a failed reproduction check.
"""

import argparse
import logging
import sys
import uuid
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from ticket import __version__
from ticket.bounds.propagation import BoundInputs, SpectralMode
from ticket.bounds.sampling_bounds import compute_bound_report
from ticket.config import (
    ConfigLoadError,
    ExperimentsConfig,
    Settings,
    get_settings,
    load_experiments_config,
)
from ticket.construction.container import load_container, save_container
from ticket.construction.large import PruneMode, build_large
from ticket.construction.prune import prune
from ticket.construction.pruned import verify_sup_error
from ticket.errors import NetworkFormatError, ParameterError, PruningFailure
from ticket.experiments.manifest import build_manifest, dump_json, write_json, write_manifest
from ticket.experiments.pipeline import layer_summaries, run_end_to_end
from ticket.experiments.repro import repro_examples
from ticket.experiments.subsums import SubsumConfig, SubsumMode, subsum_analysis, write_subsum_csv
from ticket.network.core import Architecture, InputDomain, TargetNetwork, f_max, spectral_norm
from ticket.network.io import load_network
from ticket.observability import AuditLogger, configure_audit_logging
from ticket.sampling.streams import uniform_inputs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PRUNING_FAILURE = 1
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3


def _widths(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per operation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--arch", type=Path, help="target network JSON file")
    common.add_argument("--widths", type=_widths, help="all-ReLU widths n_0,..,n_l (no weights)")
    common.add_argument("--eps", type=float, help="network-level accuracy")
    common.add_argument("--delta", type=float, help="failure probability")
    common.add_argument("--wmax", type=float, help="target weight bound")
    common.add_argument("--fmax", type=float, help="largest non-output activation")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument(
        "--mode",
        type=PruneMode,
        choices=list(PruneMode),
        default=PruneMode.THM1,
        metavar="{thm1,recycle}",
    )
    common.add_argument(
        "--spectral",
        type=SpectralMode,
        choices=list(SpectralMode),
        default=SpectralMode.UNIT,
        metavar="{unit,worst,explicit}",
    )
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--inputs", type=int, help="number of verification inputs")
    common.add_argument("--large", type=Path, help="LFG1 container input")
    common.add_argument("--config", type=Path, help="experiments YAML file")

    parser = argparse.ArgumentParser(prog="ticket", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bounds", parents=[common], help="evaluate the closed-form sample bounds")
    sub.add_parser("build", parents=[common], help="sample the large network")
    sub.add_parser("prune", parents=[common], help="prune a sampled large network")
    sub.add_parser("verify", parents=[common], help="measure the sup error of a pruned network")
    sub.add_parser("run", parents=[common], help="build, prune and verify in one go")
    subsums = sub.add_parser("subsums", parents=[common], help="sub-sum gap analysis")
    subsums.add_argument(
        "--subsum-mode",
        type=SubsumMode,
        choices=list(SubsumMode),
        default=SubsumMode.HYPERBOLIC_SUBSUMS,
        metavar="{" + ",".join(m.value for m in SubsumMode) + "}",
    )
    subsums.add_argument("--count", type=int, help="number of base samples")
    sub.add_parser("repro", parents=[common], help="reproduce the published per-weight counts")
    return parser


def load_config(path: Path | None) -> ExperimentsConfig:
    """Experiments config; an explicit path must load, the default one may fall back."""
    if path is not None:
        return load_experiments_config(path)
    try:
        return load_experiments_config()
    except ConfigLoadError as e:
        logger.warning("Using built-in experiment defaults: %s", e)
        return ExperimentsConfig()


class Context:
    """Resolved arguments shared by the subcommands."""

    def __init__(self, args: argparse.Namespace, settings: Settings, config: ExperimentsConfig):
        defaults = config.end_to_end
        self.args = args
        self.settings = settings
        self.config = config
        self.eps: float = args.eps if args.eps is not None else defaults.eps
        self.delta: float = args.delta if args.delta is not None else defaults.delta
        self.seed: int = args.seed if args.seed is not None else settings.default_seed
        self.inputs: int = args.inputs if args.inputs is not None else defaults.num_inputs
        self.out: Path = args.out if args.out is not None else Path(settings.output_dir)
        self._w_max: float | None = args.wmax
        self._default_w_max = defaults.w_max

    def target(self) -> TargetNetwork:
        if self.args.arch is None:
            raise ParameterError("--arch is required for this command", "arch")
        return load_network(self.args.arch)

    def architecture(self) -> tuple[Architecture, TargetNetwork | None]:
        """Architecture from --arch, or an all-ReLU one from --widths."""
        if self.args.arch is not None:
            target = load_network(self.args.arch)
            return target.arch, target
        if self.args.widths is not None:
            return Architecture.uniform(self.args.widths), None
        raise ParameterError("One of --arch or --widths is required", "arch")

    def w_max(self, target: TargetNetwork | None) -> float:
        if self._w_max is not None:
            return self._w_max
        return target.w_max if target is not None else self._default_w_max

    def spectral_norms(self, target: TargetNetwork | None) -> tuple[float, ...] | None:
        """Norms of |W*_i| in explicit mode."""
        if self.args.spectral is not SpectralMode.EXPLICIT:
            return None
        if target is None:
            raise ParameterError("Explicit spectral mode needs --arch with weights", "spectral")
        tol = self.settings.spectral_tol
        return tuple(spectral_norm(np.abs(w), tol) for w in target.weights)

    def f_max(self, target: TargetNetwork | None) -> float:
        """--fmax, else measured over the seeded inputs, else 1."""
        if self.args.fmax is not None:
            return self.args.fmax
        if target is None:
            return 1.0
        inputs = uniform_inputs(target.arch.widths[0], self.inputs, self.seed)
        return f_max(target, InputDomain(inputs))


def _finish(
    ctx: Context,
    command: str,
    files: list[str],
    parameters: dict[str, Any],
    audit: AuditLogger,
) -> None:
    manifest = build_manifest(command, ctx.out, files, parameters, ctx.seed)
    write_manifest(manifest, ctx.out)
    for name in files:
        audit.log_artifact_written(str(ctx.out / name), manifest.artifacts[name])


def cmd_bounds(ctx: Context, audit: AuditLogger) -> int:
    arch, target = ctx.architecture()
    inputs = BoundInputs(
        arch=arch,
        eps=ctx.eps,
        delta=ctx.delta,
        w_max=ctx.w_max(target),
        f_max=ctx.f_max(target),
        spectral_mode=ctx.args.spectral,
        spectral_norms=ctx.spectral_norms(target),
    )
    report = compute_bound_report(inputs)
    print(dump_json(report.model_dump(mode="json")), end="")
    if ctx.args.out is not None:
        ctx.out.mkdir(parents=True, exist_ok=True)
        write_json(ctx.out / "bounds.json", report.model_dump(mode="json"))
        _finish(ctx, "bounds", ["bounds.json"], {"eps": ctx.eps, "delta": ctx.delta}, audit)
    return EXIT_OK


def cmd_build(ctx: Context, audit: AuditLogger) -> int:
    arch, target = ctx.architecture()
    large = build_large(
        arch,
        ctx.eps,
        ctx.delta,
        ctx.w_max(target),
        ctx.args.mode,
        ctx.seed,
        f_max=ctx.f_max(target),
        spectral_mode=ctx.args.spectral,
        spectral_norms=ctx.spectral_norms(target),
    )
    for i, m_i in enumerate(large.M, start=1):
        audit.log_layer_built(i, m_i)
    ctx.out.mkdir(parents=True, exist_ok=True)
    save_container(ctx.out / "large.lfg", large)
    parameters = {"eps": ctx.eps, "delta": ctx.delta, "mode": ctx.args.mode.value}
    _finish(ctx, "build", ["large.lfg"], parameters, audit)
    print(f"Built large network with M={list(large.M)} -> {ctx.out / 'large.lfg'}")
    return EXIT_OK


def cmd_prune(ctx: Context, audit: AuditLogger) -> int:
    if ctx.args.large is None:
        raise ParameterError("--large is required for prune", "large")
    target = ctx.target()
    large, _ = load_container(ctx.args.large)
    try:
        result = prune(large, target)
    except PruningFailure as e:
        audit.log_pruning_failed(e.layer, e.pair, e.category, e.mode)
        raise
    for summary in layer_summaries(large, result):
        audit.log_layer_pruned(summary.layer, summary.kept, summary.consumed)
    ctx.out.mkdir(parents=True, exist_ok=True)
    save_container(ctx.out / "pruned.lfg", large, result)
    _finish(ctx, "prune", ["pruned.lfg"], {"mode": large.plan.mode.value}, audit)
    print(f"Kept {result.kept_neurons} intermediate neurons -> {ctx.out / 'pruned.lfg'}")
    return EXIT_OK


def cmd_verify(ctx: Context, audit: AuditLogger) -> int:
    if ctx.args.large is None:
        raise ParameterError("--large is required for verify", "large")
    target = ctx.target()
    large, result = load_container(ctx.args.large)
    if result is None:
        raise NetworkFormatError(f"{ctx.args.large} holds no masks; run prune first")
    domain = InputDomain(uniform_inputs(target.arch.widths[0], ctx.inputs, ctx.seed))
    report = verify_sup_error(
        target, large, result, domain, large.plan.eps, ctx.settings.spectral_tol
    )
    print(dump_json(report.model_dump(mode="json")), end="")
    ctx.out.mkdir(parents=True, exist_ok=True)
    write_json(ctx.out / "verify.json", report.model_dump(mode="json"))
    _finish(ctx, "verify", ["verify.json"], {"inputs": ctx.inputs}, audit)
    return EXIT_OK


def cmd_run(ctx: Context, audit: AuditLogger) -> int:
    if ctx.args.arch is None:
        raise ParameterError("--arch is required for run", "arch")
    report, _ = run_end_to_end(
        ctx.args.arch,
        ctx.eps,
        ctx.delta,
        ctx.seed,
        ctx.args.mode,
        ctx.inputs,
        ctx.out,
        w_max=ctx.args.wmax,
        audit=audit,
        tol=ctx.settings.spectral_tol,
    )
    print(dump_json(report.model_dump(mode="json")), end="")
    return EXIT_OK


def cmd_subsums(ctx: Context, audit: AuditLogger) -> int:
    mode: SubsumMode = ctx.args.subsum_mode
    defaults = ctx.config.subsums
    count = ctx.args.count
    if count is None:
        count = defaults.subsum_count if mode.enumerates else defaults.uniform_count
    cfg = SubsumConfig(mode=mode, count=count, seed=ctx.seed, w_max=defaults.w_max)
    table = subsum_analysis(cfg)
    ctx.out.mkdir(parents=True, exist_ok=True)
    name = f"subsums_{mode.value}.csv"
    write_subsum_csv(table, ctx.out / name)
    _finish(ctx, "subsums", [name], {"mode": mode.value, "count": count}, audit)
    print(
        f"{mode.value}: {table.values.size} values, max gap {table.max_gap_covered:.6g} "
        f"over [{table.covered_lo:.6g}, {table.covered_hi:.6g}] -> {ctx.out / name}"
    )
    return EXIT_OK


def cmd_repro(ctx: Context, audit: AuditLogger) -> int:
    report = repro_examples(ctx.config.repro)
    print(report.to_table())
    if ctx.args.out is not None:
        ctx.out.mkdir(parents=True, exist_ok=True)
        write_json(ctx.out / "repro.json", report.model_dump(mode="json"))
        _finish(ctx, "repro", ["repro.json"], {}, audit)
    return EXIT_OK if report.all_passed else EXIT_INTERNAL


COMMANDS: dict[str, Callable[[Context, AuditLogger], int]] = {
    "bounds": cmd_bounds,
    "build": cmd_build,
    "prune": cmd_prune,
    "verify": cmd_verify,
    "run": cmd_run,
    "subsums": cmd_subsums,
    "repro": cmd_repro,
}


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, run one subcommand and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    settings = get_settings()

    logging.basicConfig(
        level=getattr(logging, settings.log_level.value),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    configure_audit_logging(settings.audit_log_level.value)
    audit = AuditLogger(
        run_id=uuid.uuid4().hex[:12], command=args.command, enabled=settings.audit_enabled
    )

    exit_code = EXIT_INTERNAL
    try:
        ctx = Context(args, settings, load_config(args.config))
        audit.log_run_started(**{k: str(v) for k, v in vars(args).items() if v is not None})
        exit_code = COMMANDS[args.command](ctx, audit)
    except PruningFailure as e:
        logger.error("Pruning failed: %s", e)
        exit_code = EXIT_PRUNING_FAILURE
    except (ConfigLoadError, ValidationError, ValueError, OSError) as e:
        # ParameterError, NetworkFormatError and the other input errors are ValueErrors
        logger.error("Invalid input: %s", e)
        audit.log_validation_failed(str(e))
        exit_code = EXIT_INVALID_INPUT
    except Exception:
        logger.exception("Internal error")
        exit_code = EXIT_INTERNAL
    finally:
        audit.log_run_completed(exit_code)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
