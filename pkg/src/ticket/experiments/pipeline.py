"""End-to-end build, prune and verify runs.

The pipeline draws its verification inputs first, measures F_max over them
and uses the norms of |W*_i| as explicit spectral factors. Those norms
dominate the pruned network's, since every virtual weight is bounded by its
target weight in magnitude.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict

from ticket import __version__
from ticket.bounds.propagation import SpectralMode
from ticket.construction.container import save_container
from ticket.construction.large import LargeNetwork, PruneMode, build_large
from ticket.construction.prune import prune
from ticket.construction.pruned import PruneResult, VerifyReport, verify_sup_error
from ticket.errors import ParameterError, PruningFailure
from ticket.experiments.manifest import (
    RunManifest,
    build_manifest,
    write_json,
    write_manifest,
)
from ticket.network.core import InputDomain, TargetNetwork, f_max, spectral_norm
from ticket.network.io import load_network, save_network
from ticket.observability.audit import AuditLogger
from ticket.sampling.streams import uniform_inputs

logger = logging.getLogger(__name__)

TARGET_FILE = "target.json"
CONTAINER_FILE = "large.lfg"
REPORT_FILE = "report.json"


class LayerSummary(BaseModel):
    """Per-layer sizes of one run."""

    model_config = ConfigDict(frozen=True)

    layer: int
    sampled: int
    kept: int
    consumed: int | None


class RunReport(BaseModel):
    """Deterministic summary of an end-to-end run; no timestamps."""

    model_config = ConfigDict(frozen=True)

    tool_version: str = __version__
    widths: list[int]
    mode: PruneMode
    eps: float
    delta: float
    w_max: float
    seed: int
    f_max: float
    spectral_norms: list[float]
    eps_w: float
    k: int
    layers: list[LayerSummary]
    verify: VerifyReport


@dataclass
class RunOutcome:
    """Everything a pipeline run produced."""

    target: TargetNetwork
    large: LargeNetwork
    result: PruneResult
    domain: InputDomain
    report: RunReport


def layer_summaries(large: LargeNetwork, result: PruneResult) -> list[LayerSummary]:
    """Sampled, kept and consumed neurons per target layer."""
    consumed = result.neurons_consumed
    return [
        LayerSummary(
            layer=i + 1,
            sampled=large.M[i],
            kept=int(np.count_nonzero(mask.any(axis=1))),
            consumed=consumed[i] if consumed is not None else None,
        )
        for i, mask in enumerate(result.in_masks)
    ]


def run_pipeline(
    target: TargetNetwork,
    eps: float,
    delta: float,
    seed: int,
    mode: PruneMode,
    num_inputs: int,
    w_max: float | None = None,
    audit: AuditLogger | None = None,
    tol: float = 1e-9,
) -> RunOutcome:
    """Build G for target, prune it and measure the sup error.

    Args:
        target: The network to approximate.
        eps: Network-level accuracy.
        delta: Failure probability.
        seed: Master seed for G and the verification inputs.
        mode: thm1 (batch) or recycle.
        num_inputs: Number of uniform verification inputs in [-1, 1]^n_0.
        w_max: Weight bound; defaults to the target's own.
        audit: Optional audit trail for layer events.
        tol: Power-iteration tolerance.

    Raises:
        ParameterError: If w_max does not bound the target's weights.
        PruningFailure: If G cannot represent the target (probability <= delta).
    """
    w_max = target.w_max if w_max is None else w_max
    largest = max(float(np.max(np.abs(w), initial=0.0)) for w in target.weights)
    if largest > w_max:
        raise ParameterError(
            f"w_max={w_max} is below the largest target weight {largest}", "w_max"
        )

    domain = InputDomain(uniform_inputs(target.arch.widths[0], num_inputs, seed))
    fm = f_max(target, domain)
    norms = tuple(spectral_norm(np.abs(w), tol) for w in target.weights)
    logger.info("Run inputs: %d, F_max=%.6g, norms=%s", num_inputs, fm, norms)

    large = build_large(
        target.arch,
        eps,
        delta,
        w_max,
        mode,
        seed,
        f_max=fm,
        spectral_mode=SpectralMode.EXPLICIT,
        spectral_norms=norms,
    )
    if audit:
        for i, m_i in enumerate(large.M, start=1):
            audit.log_layer_built(i, m_i)

    try:
        result = prune(large, target)
    except PruningFailure as e:
        logger.warning("Pruning failed at layer %d (%s): %s", e.layer, e.mode, e)
        if audit:
            audit.log_pruning_failed(e.layer, e.pair, e.category, e.mode)
        raise

    layers = layer_summaries(large, result)
    if audit:
        for summary in layers:
            audit.log_layer_pruned(summary.layer, summary.kept, summary.consumed)

    verify = verify_sup_error(target, large, result, domain, eps, tol)
    report = RunReport(
        widths=list(target.arch.widths),
        mode=mode,
        eps=eps,
        delta=delta,
        w_max=w_max,
        seed=seed,
        f_max=fm,
        spectral_norms=list(norms),
        eps_w=large.plan.eps_w,
        k=large.plan.k,
        layers=layers,
        verify=verify,
    )
    return RunOutcome(target=target, large=large, result=result, domain=domain, report=report)


def run_end_to_end(
    arch_file: str | Path,
    eps: float,
    delta: float,
    seed: int,
    mode: PruneMode,
    num_inputs: int,
    out_dir: str | Path,
    w_max: float | None = None,
    audit: AuditLogger | None = None,
    tol: float = 1e-9,
) -> tuple[RunReport, RunManifest]:
    """Run the pipeline on a network file and write its artifacts.

    Writes target.json, large.lfg (with masks), report.json and manifest.json
    into out_dir. Identical arguments produce byte-identical files.

    Raises:
        NetworkFormatError: If the network file is malformed.
        PruningFailure: If pruning fails; nothing is written in that case.
    """
    target = load_network(arch_file)
    outcome = run_pipeline(target, eps, delta, seed, mode, num_inputs, w_max, audit, tol)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_network(outcome.target, out / TARGET_FILE)
    save_container(out / CONTAINER_FILE, outcome.large, outcome.result)
    write_json(out / REPORT_FILE, outcome.report.model_dump(mode="json"))

    files = [TARGET_FILE, CONTAINER_FILE, REPORT_FILE]
    manifest = build_manifest(
        "run",
        out,
        files,
        parameters={
            "eps": eps,
            "delta": delta,
            "mode": mode.value,
            "inputs": num_inputs,
            "w_max": outcome.report.w_max,
        },
        seed=seed,
    )
    write_manifest(manifest, out)
    if audit:
        for name in files:
            audit.log_artifact_written(str(out / name), manifest.artifacts[name])
    logger.info(
        "Run finished: sup error %.6g (eps %g) -> %s",
        outcome.report.verify.sup_error,
        eps,
        out,
    )
    return outcome.report, manifest

