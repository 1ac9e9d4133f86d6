"""Batch pruning: all target weights of a layer share one pool of neurons.

Every non-negligible target weight needs, for each side, one product sample
in each of the k decomposition intervals. Neurons are scanned in index
order and each is given to the first open slot (pair in lexicographic
order, then the side and interval its product falls in). Once every slot is
filled the greedy decomposition picks which of a pair's samples to keep.
"""

import logging

import numpy as np

from ticket.construction.categories import Side, category_codes, describe_code, unit_magnitude
from ticket.construction.large import LargeNetwork, PruneMode
from ticket.construction.pruned import PruneResult
from ticket.decomposition.grd import grd_decompose
from ticket.errors import CoverageError, DimensionError, PruningFailure
from ticket.network.core import TargetNetwork

logger = logging.getLogger(__name__)


def check_compatible(large: LargeNetwork, target: TargetNetwork) -> None:
    """G must have been planned for target's architecture and weight bound."""
    if large.plan.arch.widths != target.arch.widths:
        raise DimensionError(
            f"G was built for widths {large.plan.arch.widths}, target has {target.arch.widths}"
        )
    if target.w_max > large.plan.w_max:
        raise DimensionError(
            f"Target w_max={target.w_max} exceeds the planned w_max={large.plan.w_max}"
        )


def prune_batch(large: LargeNetwork, target: TargetNetwork) -> PruneResult:
    """Prune G so each layer approximates target's layer to eps_w / 2 per side.

    Target weights with |w*| <= eps_w / 2 get empty masks.

    Raises:
        PruningFailure: If some slot stays empty after every neuron was scanned.
        DimensionError: If G does not match target.
    """
    check_compatible(large, target)
    plan = large.plan
    grd = plan.grd
    gamma, k = grd.gamma, grd.k
    in_masks = []
    out_masks = []
    consumed = []

    for layer, w_star in enumerate(target.weights, start=1):
        w_in = large.in_weights[layer - 1]
        w_out = large.out_weights[layer - 1]
        n_out, n_in = w_star.shape
        m_i = w_in.shape[0]
        active = np.abs(w_star) > plan.eps_w / 2.0

        codes = category_codes(w_in, w_out, w_star, plan.ranges, gamma, k)
        # filled[j_out, j_in, code]; code 0 and negligible weights need nothing.
        filled = np.ones((n_out, n_in, 2 * k + 1), dtype=np.bool_)
        filled[active, 1:] = False
        owner = np.full((n_out, n_in, 2 * k + 1), -1, dtype=np.int64)
        remaining = int(np.count_nonzero(~filled))

        scanned = 0
        for t in range(m_i):
            if remaining == 0:
                break
            scanned = t + 1
            code = codes[t]
            open_slots = ~np.take_along_axis(filled, code[:, :, None], axis=2)[:, :, 0]
            if not open_slots.any():
                continue
            j_out, j_in = divmod(int(np.argmax(open_slots)), n_in)
            slot = int(code[j_out, j_in])
            filled[j_out, j_in, slot] = True
            owner[j_out, j_in, slot] = t
            remaining -= 1

        if remaining:
            j_out, j_in, slot = (int(v) for v in np.argwhere(~filled)[0])
            logger.warning(
                "Layer %d: %d slots unfilled after %d neurons", layer, remaining, m_i
            )
            raise PruningFailure(
                f"Layer {layer}: no neuron for pair {(j_out, j_in)} category "
                f"{describe_code(slot, k)} among {m_i} samples",
                layer=layer,
                pair=(j_out, j_in),
                category=describe_code(slot, k),
                mode=PruneMode.THM1.value,
                neurons_consumed=scanned,
            )

        in_mask = np.zeros(w_in.shape, dtype=np.bool_)
        out_mask = np.zeros(w_out.shape, dtype=np.bool_)
        for j_out, j_in in np.argwhere(active).tolist():
            target_unit = min(1.0, float(unit_magnitude(w_star[j_out, j_in], plan.ranges, gamma)))
            for side_index, side in enumerate((Side.PLUS, Side.MINUS)):
                neurons = owner[j_out, j_in, 1 + side_index * k : 1 + (side_index + 1) * k]
                products = w_out[j_out, neurons] * w_in[neurons, j_in]
                try:
                    decomposition = grd_decompose(
                        target_unit, unit_magnitude(products, plan.ranges, gamma), grd
                    )
                except CoverageError as e:
                    raise PruningFailure(
                        f"Layer {layer}: decomposition of {(j_out, j_in)} lacks interval "
                        f"{e.interval}",
                        layer=layer,
                        pair=(j_out, j_in),
                        category=f"{side.value}:{e.interval}",
                        mode=PruneMode.THM1.value,
                        neurons_consumed=scanned,
                    ) from e
                kept = neurons[decomposition.mask]
                in_mask[kept, j_in] = True
                out_mask[j_out, kept] = True

        logger.debug(
            "Layer %d: filled slots with %d of %d neurons, kept %d",
            layer,
            scanned,
            m_i,
            int(np.count_nonzero(in_mask.any(axis=1))),
        )
        in_masks.append(in_mask)
        out_masks.append(out_mask)
        consumed.append(scanned)

    result = PruneResult.from_masks(
        large, in_masks, out_masks, mode=PruneMode.THM1, neurons_consumed=tuple(consumed)
    )
    result.check_against(target, plan.eps_w)
    return result
