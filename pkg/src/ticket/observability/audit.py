"""Structured audit logging for CLI runs.

Events go to the ``ticket.audit`` logger as JSON, never into artifact
files, so artifacts stay byte-identical across reruns.
"""

import json
import logging
from datetime import datetime, timezone
from typing import Any

from ticket.observability.models import AuditEvent, AuditEventType

UTC = timezone.utc

AUDIT_LOGGER_NAME = "ticket.audit"
MAX_ERROR_CHARS = 500

audit_logger = logging.getLogger(AUDIT_LOGGER_NAME)


class AuditLogger:
    """One JSON line per construction event of a single CLI invocation.

    Every line carries event_type, an ISO 8601 timestamp, the run_id shared
    by the invocation and the subcommand, followed by the event's own fields.

    Usage:
        audit = AuditLogger(run_id="3f9c0a7e21bd", command="run")
        audit.log_run_started(seed="0", mode="thm1")
        audit.log_layer_pruned(layer=1, kept=120, consumed=3100)
    """

    def __init__(self, run_id: str, command: str, enabled: bool = True) -> None:
        self._run_id = run_id
        self._command = command
        self._enabled = enabled

    def _emit(self, event_type: AuditEventType, **fields: Any) -> None:
        if not self._enabled:
            return
        event = AuditEvent(
            event_type=event_type,
            timestamp=datetime.now(UTC),
            run_id=self._run_id,
            command=self._command,
            metadata=fields,
        )
        try:
            audit_logger.info(json.dumps(event.to_dict(), default=str))
        except Exception as e:
            logging.getLogger(__name__).warning("Dropped %s audit event: %s", event_type.value, e)

    def log_run_started(self, **parameters: Any) -> None:
        """Record the arguments of the invocation."""
        self._emit(AuditEventType.RUN_STARTED, parameters=parameters)

    def log_layer_built(self, layer: int, neurons: int) -> None:
        """Record the intermediate width sampled for one target layer."""
        self._emit(AuditEventType.LAYER_BUILT, layer=layer, neurons=neurons)

    def log_layer_pruned(self, layer: int, kept: int, consumed: int | None = None) -> None:
        """Record how many neurons one layer kept and how many it looked at.

        Args:
            layer: Target layer, counted from 1.
            kept: Unmasked intermediate neurons.
            consumed: Neurons examined by the prune procedure, if known.
        """
        fields: dict[str, Any] = {"layer": layer, "kept": kept}
        if consumed is not None:
            fields["consumed"] = consumed
        self._emit(AuditEventType.LAYER_PRUNED, **fields)

    def log_pruning_failed(
        self,
        layer: int,
        pair: tuple[int, int] | None,
        category: str | None,
        mode: str | None,
    ) -> None:
        """Record where the sampled network could not represent the target."""
        fields: dict[str, Any] = {"layer": layer, "mode": mode}
        if pair is not None:
            fields["pair"] = list(pair)
        if category is not None:
            fields["category"] = category
        self._emit(AuditEventType.PRUNING_FAILED, **fields)

    def log_artifact_written(self, path: str, sha256: str) -> None:
        """Record an output file and its digest."""
        self._emit(AuditEventType.ARTIFACT_WRITTEN, path=path, sha256=sha256)

    def log_run_completed(self, exit_code: int, **summary: Any) -> None:
        self._emit(AuditEventType.RUN_COMPLETED, exit_code=exit_code, **summary)

    def log_validation_failed(self, error: str) -> None:
        """Record rejected input, keeping the first 500 characters of the message."""
        self._emit(AuditEventType.VALIDATION_FAILED, error=error[:MAX_ERROR_CHARS])


def configure_audit_logging(level: str = "INFO") -> None:
    """Send audit events to stderr at the given level, apart from the root logger."""
    resolved = getattr(logging, level.upper(), logging.INFO)
    audit_logger.setLevel(resolved)
    if not audit_logger.handlers:
        handler = logging.StreamHandler()
        handler.setLevel(resolved)
        handler.setFormatter(logging.Formatter("%(asctime)s %(name)s %(message)s"))
        audit_logger.addHandler(handler)
    audit_logger.propagate = False
