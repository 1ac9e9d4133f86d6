"""Build the large random network and prune it down to a target."""

from ticket.construction.batch import prune_batch
from ticket.construction.categories import Side, categorize_product, category_codes
from ticket.construction.container import (
    load_container,
    read_container,
    save_container,
    write_container,
)
from ticket.construction.large import (
    LargeNetwork,
    LargePlan,
    PruneMode,
    build_large,
    derive_plan,
    plan_large,
    sample_large,
)
from ticket.construction.prune import prune
from ticket.construction.pruned import (
    PruneResult,
    SlotKey,
    VerifyReport,
    evaluate_pruned,
    sup_error,
    verify_sup_error,
    virtual_response,
)
from ticket.construction.recycle import prune_recycle, recycle_schedule

__all__ = [
    "LargeNetwork",
    "LargePlan",
    "PruneMode",
    "PruneResult",
    "Side",
    "SlotKey",
    "VerifyReport",
    "build_large",
    "categorize_product",
    "category_codes",
    "derive_plan",
    "evaluate_pruned",
    "load_container",
    "plan_large",
    "prune",
    "prune_batch",
    "prune_recycle",
    "read_container",
    "recycle_schedule",
    "sample_large",
    "save_container",
    "sup_error",
    "verify_sup_error",
    "virtual_response",
    "write_container",
]
