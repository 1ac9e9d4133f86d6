"""Experiments: bound reproduction, sub-sum analysis and end-to-end runs."""

from ticket.experiments.manifest import (
    MANIFEST_NAME,
    RunManifest,
    build_manifest,
    dump_json,
    sha256_file,
    verify_manifest,
    write_json,
    write_manifest,
)
from ticket.experiments.pipeline import (
    LayerSummary,
    RunOutcome,
    RunReport,
    run_end_to_end,
    run_pipeline,
)
from ticket.experiments.repro import ReproReport, ReproRow, repro_examples
from ticket.experiments.subsums import (
    SubsumConfig,
    SubsumMode,
    SubsumTable,
    enumerate_subsums,
    subsum_analysis,
    write_subsum_csv,
)

__all__ = [
    "MANIFEST_NAME",
    "LayerSummary",
    "ReproReport",
    "ReproRow",
    "RunManifest",
    "RunOutcome",
    "RunReport",
    "SubsumConfig",
    "SubsumMode",
    "SubsumTable",
    "build_manifest",
    "dump_json",
    "enumerate_subsums",
    "repro_examples",
    "run_end_to_end",
    "run_pipeline",
    "sha256_file",
    "subsum_analysis",
    "verify_manifest",
    "write_json",
    "write_manifest",
    "write_subsum_csv",
]
