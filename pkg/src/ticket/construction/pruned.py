"""Pruned subnetworks of G: masks, virtual weights, evaluation and verification.

A kept intermediate neuron keeps exactly one in-connection (from input j_in)
and one out-connection (to output j_out). Its path computes
out * relu(in * y), so for the target weight w* at (j_out, j_in) the kept
neurons of both sides together compute w_plus * y when y w* >= 0 and
w_minus * y otherwise. This uses y = relu(y) - relu(-y).
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from ticket.construction.categories import Side, unit_magnitude
from ticket.construction.large import LargeNetwork, PruneMode
from ticket.decomposition.grd import interval_indices
from ticket.errors import DimensionError, EmptyDomainError
from ticket.network.core import InputDomain, TargetNetwork, forward, spectral_norm

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
BoolArray = NDArray[np.bool_]

# Rounding allowance on the per-weight checks.
SLACK = 1e-9


class SlotKey(NamedTuple):
    """One mask bit of one side of one target weight; layers count from 1."""

    layer: int
    j_out: int
    j_in: int
    side: Side
    bit: int


@dataclass(frozen=True)
class PruneResult:
    """Masks over G plus the virtual weights they realise.

    Attributes:
        mode: Prune procedure that produced the masks, None if unknown.
        in_masks: Per layer, M_i x n_{i-1} booleans over G's in-weights.
        out_masks: Per layer, n_i x M_i booleans over G's out-weights.
        assignments: Kept neuron index for every used mask bit.
        virtual_plus: Per layer, n_i x n_{i-1} matrix of w_plus.
        virtual_minus: Per layer, n_i x n_{i-1} matrix of w_minus.
        neurons_consumed: Per layer, how many of G's neurons the procedure looked at.
    """

    mode: PruneMode | None
    in_masks: tuple[BoolArray, ...]
    out_masks: tuple[BoolArray, ...]
    assignments: dict[SlotKey, int]
    virtual_plus: tuple[FloatArray, ...]
    virtual_minus: tuple[FloatArray, ...]
    neurons_consumed: tuple[int, ...] | None = None

    @classmethod
    def from_masks(
        cls,
        large: LargeNetwork,
        in_masks: tuple[BoolArray, ...] | list[BoolArray],
        out_masks: tuple[BoolArray, ...] | list[BoolArray],
        mode: PruneMode | None = None,
        neurons_consumed: tuple[int, ...] | None = None,
    ) -> "PruneResult":
        """Rebuild assignments and virtual weights from masks over G.

        The side of a kept neuron is the sign of its out-weight and its bit is
        the interval of its product magnitude.

        Raises:
            DimensionError: If a mask does not match G's matrices.
            ValueError: If a kept neuron does not have exactly one in- and one
                out-connection, or two neurons claim the same mask bit.
        """
        plan = large.plan
        gamma, k = plan.grd.gamma, plan.grd.k
        widths = plan.arch.widths
        if len(in_masks) != plan.arch.depth or len(out_masks) != plan.arch.depth:
            raise DimensionError("One in-mask and one out-mask are needed per target layer")

        assignments: dict[SlotKey, int] = {}
        ins_frozen, outs_frozen, plus_all, minus_all = [], [], [], []
        for i in range(plan.arch.depth):
            in_mask = np.array(in_masks[i], dtype=np.bool_)
            out_mask = np.array(out_masks[i], dtype=np.bool_)
            if in_mask.shape != large.in_weights[i].shape:
                raise DimensionError(f"Layer {i + 1} in-mask has shape {in_mask.shape}")
            if out_mask.shape != large.out_weights[i].shape:
                raise DimensionError(f"Layer {i + 1} out-mask has shape {out_mask.shape}")

            in_counts = in_mask.sum(axis=1)
            out_counts = out_mask.sum(axis=0)
            kept = np.flatnonzero((in_counts > 0) | (out_counts > 0))
            if np.any(in_counts[kept] != 1) or np.any(out_counts[kept] != 1):
                raise ValueError(
                    f"Layer {i + 1}: every kept neuron needs exactly one in- and one out-connection"
                )
            j_in = np.argmax(in_mask[kept], axis=1)
            j_out = np.argmax(out_mask[:, kept], axis=0)
            outs = large.out_weights[i][j_out, kept]
            products = outs * large.in_weights[i][kept, j_in]
            bits = interval_indices(unit_magnitude(products, plan.ranges, gamma), gamma, k)

            plus = np.zeros((widths[i + 1], widths[i]))
            minus = np.zeros((widths[i + 1], widths[i]))
            for t, jo, ji, out_w, product, bit in zip(
                kept.tolist(),
                j_out.tolist(),
                j_in.tolist(),
                outs.tolist(),
                products.tolist(),
                bits.tolist(),
                strict=True,
            ):
                side = Side.PLUS if out_w > 0 else Side.MINUS
                key = SlotKey(i + 1, jo, ji, side, bit)
                if key in assignments:
                    raise ValueError(f"Neurons {assignments[key]} and {t} both claim {key}")
                assignments[key] = t
                if side is Side.PLUS:
                    plus[jo, ji] += product
                else:
                    minus[jo, ji] += product

            for array in (in_mask, out_mask, plus, minus):
                array.setflags(write=False)
            ins_frozen.append(in_mask)
            outs_frozen.append(out_mask)
            plus_all.append(plus)
            minus_all.append(minus)

        return cls(
            mode=mode,
            in_masks=tuple(ins_frozen),
            out_masks=tuple(outs_frozen),
            assignments=assignments,
            virtual_plus=tuple(plus_all),
            virtual_minus=tuple(minus_all),
            neurons_consumed=neurons_consumed,
        )

    @property
    def kept_neurons(self) -> int:
        """Intermediate neurons left unmasked over all layers."""
        return int(sum(np.count_nonzero(mask.any(axis=1)) for mask in self.in_masks))

    def check_against(self, target: TargetNetwork, eps_w: float) -> None:
        """Assert the sign, dominance and accuracy guarantees for target.

        Raises:
            RuntimeError: If any kept neuron or virtual weight breaks them.
        """
        half = eps_w / 2.0
        for key in self.assignments:
            sign = np.sign(target.weights[key.layer - 1][key.j_out, key.j_in])
            if sign == 0:
                raise RuntimeError(f"{key} serves a zero target weight")
        for i, w_star in enumerate(target.weights, start=1):
            for virtual in (self.virtual_plus[i - 1], self.virtual_minus[i - 1]):
                if np.any(virtual * np.sign(w_star) < -SLACK):
                    raise RuntimeError(f"Layer {i}: a virtual weight has the wrong sign")
                if np.any(np.abs(virtual) > np.abs(w_star) + SLACK):
                    raise RuntimeError(f"Layer {i}: a virtual weight exceeds |w*|")
                if np.any(np.abs(w_star - virtual) > half + SLACK):
                    raise RuntimeError(f"Layer {i}: a virtual weight misses w* by over eps_w/2")


def virtual_response(w_plus: float, w_minus: float, w_star_sign: float, y: float) -> float:
    """Output of one target weight's kept paths for the scalar input y."""
    if y * w_star_sign >= 0:
        return w_plus * y
    return w_minus * y


def evaluate_pruned(large: LargeNetwork, result: PruneResult, x: FloatArray) -> FloatArray:
    """Forward pass of the masked 2l-layer ReLU network; x is a vector or a row batch."""
    h = np.asarray(x, dtype=np.float64)
    n0 = large.plan.arch.widths[0]
    if h.ndim not in (1, 2) or h.shape[-1] != n0:
        raise DimensionError(
            f"Input has shape {h.shape}, expected last dimension {n0}",
            expected=n0,
            actual=int(h.shape[-1]) if h.ndim else None,
        )
    for w_in, w_out, m_in, m_out in zip(
        large.in_weights, large.out_weights, result.in_masks, result.out_masks, strict=True
    ):
        hidden = np.maximum(h @ np.where(m_in, w_in, 0.0).T, 0.0)
        h = np.maximum(hidden @ np.where(m_out, w_out, 0.0).T, 0.0)
    return h


class VerifyReport(BaseModel):
    """Measured network-level error of a pruned network."""

    model_config = ConfigDict(frozen=True)

    sup_error: float = Field(ge=0)
    eps_target: float
    num_inputs: int
    per_layer_spectral: list[float]
    dominating_spectral: list[float]
    passed: bool


def sup_error(reference: FloatArray, candidate: FloatArray) -> float:
    """Largest 2-norm gap between corresponding output rows."""
    ref = np.atleast_2d(reference)
    cand = np.atleast_2d(candidate)
    if ref.shape != cand.shape:
        raise DimensionError(f"Output shapes differ: {ref.shape} vs {cand.shape}")
    if ref.shape[0] == 0:
        raise EmptyDomainError("sup_error needs at least one output")
    return float(np.max(np.linalg.norm(ref - cand, axis=1)))


def verify_sup_error(
    target: TargetNetwork,
    large: LargeNetwork,
    result: PruneResult,
    domain: InputDomain,
    eps: float,
    tol: float = 1e-9,
) -> VerifyReport:
    """Compare F and the pruned G over every input of the domain.

    per_layer_spectral holds the norms of the plus-side virtual matrices and
    dominating_spectral the norms of |W*_i|, which bound both sides.

    Raises:
        EmptyDomainError: If the domain has no inputs.
    """
    if len(domain) == 0:
        raise EmptyDomainError("verify_sup_error needs at least one input")
    gap = sup_error(forward(target, domain.samples), evaluate_pruned(large, result, domain.samples))
    report = VerifyReport(
        sup_error=gap,
        eps_target=eps,
        num_inputs=len(domain),
        per_layer_spectral=[spectral_norm(v, tol) for v in result.virtual_plus],
        dominating_spectral=[spectral_norm(np.abs(w), tol) for w in target.weights],
        passed=gap <= eps,
    )
    logger.info("Verified %d inputs: sup error %.6g (target %g)", len(domain), gap, eps)
    return report
