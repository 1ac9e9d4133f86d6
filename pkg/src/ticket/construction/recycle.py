"""Recycling prune: a neuron's unexamined entries stay fresh samples.

The decomposition of one target weight at (idx_out, idx_in) only looks at
the products out[idx_out, t] * in[t, idx_in] of the pool neurons t. Every
other entry of those neurons is still an independent draw, so the pool is
reused for further target weights with different indices. Neurons the
decomposition keeps leave the pool and are replaced with fresh ones.

Loops run over the wider side outside and the narrower side inside. With
0-based indices and n_out >= n_in, step (j, d) handles idx_in = d and
idx_out = (d + j + 1) mod n_out; with n_in > n_out the roles swap.

Each inner step keeps at most k neurons per side, and every step but the
last one replaces them, so one outer iteration draws at most
m + 2k(n_narrow - 1) neurons. The layer width max{n_i, n_{i-1}} m +
2(k - 1) n_i n_{i-1} covers that only while n_narrow <= k; wider narrow
sides can exhaust G, which surfaces as a PruningFailure.
"""

import logging

import numpy as np
from numpy.typing import NDArray

from ticket.construction.batch import check_compatible
from ticket.construction.categories import Side, unit_magnitude
from ticket.construction.large import LargeNetwork, PruneMode
from ticket.construction.pruned import PruneResult
from ticket.decomposition.grd import grd_decompose
from ticket.errors import CoverageError, ParameterError, PruningFailure
from ticket.network.core import TargetNetwork

logger = logging.getLogger(__name__)


def recycle_schedule(n_out: int, n_in: int) -> list[list[tuple[int, int]]]:
    """(idx_out, idx_in) visited in each outer iteration, in order.

    Every pair appears exactly once, and within an outer iteration no input
    or output index repeats.
    """
    wide, narrow = max(n_out, n_in), min(n_out, n_in)
    schedule = []
    for j in range(wide):
        steps = []
        for d in range(narrow):
            rotated = (d + j + 1) % wide
            steps.append((rotated, d) if n_out >= n_in else (d, rotated))
        schedule.append(steps)
    return schedule


class _NeuronSupply:
    """Hands out G's pre-sampled neurons of one layer in index order."""

    def __init__(self, layer: int, total: int) -> None:
        self.layer = layer
        self.total = total
        self.consumed = 0

    def take(self, count: int) -> list[int]:
        if self.consumed + count > self.total:
            raise PruningFailure(
                f"Layer {self.layer}: recycling needs more than the {self.total} sampled neurons",
                layer=self.layer,
                mode=PruneMode.RECYCLE.value,
                neurons_consumed=self.consumed,
            )
        start = self.consumed
        self.consumed += count
        return list(range(start, self.consumed))


def _decompose_pair(
    large: LargeNetwork,
    layer: int,
    pair: tuple[int, int],
    w_star: float,
    members: NDArray[np.int64],
    consumed: int,
) -> NDArray[np.int64]:
    """Run the plus and minus decompositions over the pool; return the kept neurons."""
    plan = large.plan
    if abs(w_star) <= plan.eps_w / 2.0:
        return np.zeros(0, dtype=np.int64)
    idx_out, idx_in = pair
    gamma = plan.grd.gamma
    outs = large.out_weights[layer - 1][idx_out, members]
    ins = large.in_weights[layer - 1][members, idx_in]
    magnitudes = unit_magnitude(outs * ins, plan.ranges, gamma)
    target_unit = min(1.0, float(unit_magnitude(w_star, plan.ranges, gamma)))
    sign = np.sign(w_star)
    patterns = {
        Side.PLUS: (outs > 0) & (np.sign(ins) == sign),
        Side.MINUS: (outs < 0) & (np.sign(ins) == -sign),
    }
    kept = []
    for side, pattern in patterns.items():
        try:
            decomposition = grd_decompose(target_unit, np.where(pattern, magnitudes, 0.0), plan.grd)
        except CoverageError as e:
            raise PruningFailure(
                f"Layer {layer}: pool has no {side.value} sample in interval {e.interval} "
                f"for pair {pair}",
                layer=layer,
                pair=pair,
                category=f"{side.value}:{e.interval}",
                mode=PruneMode.RECYCLE.value,
                neurons_consumed=consumed,
            ) from e
        kept.append(members[decomposition.mask])
    return np.concatenate(kept)


def prune_recycle(large: LargeNetwork, target: TargetNetwork) -> PruneResult:
    """Prune G with a recycled pool of m neurons per outer iteration.

    Target weights with |w*| <= eps_w / 2 get empty masks.

    Raises:
        ParameterError: If G was not planned for recycling.
        PruningFailure: If a decomposition lacks an interval or G runs out of neurons.
        RuntimeError: If an entry of some neuron would be examined twice.
    """
    check_compatible(large, target)
    plan = large.plan
    if plan.mode is not PruneMode.RECYCLE or plan.m is None:
        raise ParameterError("prune_recycle needs a network planned in recycle mode", "mode")
    in_masks = []
    out_masks = []
    consumed = []

    for layer, w_star in enumerate(target.weights, start=1):
        w_in = large.in_weights[layer - 1]
        w_out = large.out_weights[layer - 1]
        n_out, n_in = w_star.shape
        in_mask = np.zeros(w_in.shape, dtype=np.bool_)
        out_mask = np.zeros(w_out.shape, dtype=np.bool_)
        in_examined = np.zeros(w_in.shape, dtype=np.bool_)
        out_examined = np.zeros(w_out.shape, dtype=np.bool_)
        supply = _NeuronSupply(layer, w_in.shape[0])

        for steps in recycle_schedule(n_out, n_in):
            # Fresh pool for every outer iteration.
            pool = supply.take(plan.m)
            for step, (idx_out, idx_in) in enumerate(steps):
                members = np.asarray(pool, dtype=np.int64)
                if in_examined[members, idx_in].any() or out_examined[idx_out, members].any():
                    raise RuntimeError(
                        f"Layer {layer}: entry ({idx_out}, {idx_in}) of a pool neuron was "
                        "examined twice"
                    )
                used = _decompose_pair(
                    large,
                    layer,
                    (idx_out, idx_in),
                    float(w_star[idx_out, idx_in]),
                    members,
                    supply.consumed,
                )
                in_examined[members, idx_in] = True
                out_examined[idx_out, members] = True
                if used.size == 0:
                    continue
                in_mask[used, idx_in] = True
                out_mask[idx_out, used] = True
                removed = set(used.tolist())
                pool = [t for t in pool if t not in removed]
                if step < len(steps) - 1:
                    pool.extend(supply.take(len(removed)))

        logger.debug(
            "Layer %d: recycling consumed %d of %d neurons (m=%d)",
            layer,
            supply.consumed,
            plan.M[layer - 1],
            plan.m,
        )
        in_masks.append(in_mask)
        out_masks.append(out_mask)
        consumed.append(supply.consumed)

    result = PruneResult.from_masks(
        large, in_masks, out_masks, mode=PruneMode.RECYCLE, neurons_consumed=tuple(consumed)
    )
    result.check_against(target, plan.eps_w)
    return result
