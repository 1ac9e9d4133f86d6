"""Audit event types and the event record."""

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any


class AuditEventType(str, Enum):
    """Milestones of a CLI invocation."""

    RUN_STARTED = "run_started"
    LAYER_BUILT = "layer_built"
    LAYER_PRUNED = "layer_pruned"
    PRUNING_FAILED = "pruning_failed"
    ARTIFACT_WRITTEN = "artifact_written"
    RUN_COMPLETED = "run_completed"
    VALIDATION_FAILED = "validation_failed"


@dataclass
class AuditEvent:
    """One audit line before JSON encoding.

    Attributes:
        event_type: Which milestone this is.
        timestamp: Emission time, timezone-aware.
        run_id: Shared by all events of one invocation.
        command: CLI subcommand.
        metadata: Fields specific to the event type, flattened into the line.
    """

    event_type: AuditEventType
    timestamp: datetime
    run_id: str
    command: str
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Flat mapping with the fixed keys first."""
        return {
            "event_type": self.event_type.value,
            "timestamp": self.timestamp.isoformat(),
            "run_id": self.run_id,
            "command": self.command,
            **self.metadata,
        }
