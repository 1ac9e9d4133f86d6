"""Dispatch to the prune procedure a large network was planned for."""

from ticket.construction.batch import prune_batch
from ticket.construction.large import LargeNetwork, PruneMode
from ticket.construction.pruned import PruneResult
from ticket.construction.recycle import prune_recycle
from ticket.network.core import TargetNetwork


def prune(large: LargeNetwork, target: TargetNetwork) -> PruneResult:
    """Run prune_recycle for recycle plans and prune_batch otherwise."""
    if large.plan.mode is PruneMode.RECYCLE:
        return prune_recycle(large, target)
    return prune_batch(large, target)
