"""Observability module: structured JSON audit trail of CLI runs."""

from ticket.observability.audit import AuditLogger, configure_audit_logging
from ticket.observability.models import AuditEvent, AuditEventType

__all__ = [
    "AuditEvent",
    "AuditEventType",
    "AuditLogger",
    "configure_audit_logging",
]
