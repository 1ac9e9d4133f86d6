"""LFG1 binary container for G and, optionally, its masks.

Layout, all little-endian:

    b"LFG1"
    u32 l, u32 n_0..n_l, u32 M_1..M_l
    u32 mode (0 thm1, 1 recycle), u32 flags (bit 0: masks present), u64 seed
    f64 alpha, beta, eps_w, w_max, eps, delta
    per layer: f64 in_weights (M_i x n_{i-1}), f64 out_weights (n_i x M_i), row-major
    if masks: per layer packbits(in_mask), packbits(out_mask), little bit order

Reading recomputes the plan from the header and rejects files whose stored
widths or ranges disagree with it, so a round trip is bit-exact.
"""

import logging
import struct
from pathlib import Path

import numpy as np

from ticket.construction.large import LargeNetwork, PruneMode, derive_plan
from ticket.construction.pruned import PruneResult
from ticket.errors import NetworkFormatError
from ticket.network.core import Architecture

logger = logging.getLogger(__name__)

MAGIC = b"LFG1"
FLAG_MASKS = 1
_MODES = {PruneMode.THM1: 0, PruneMode.RECYCLE: 1}
_TAIL = struct.Struct("<IIQ6d")


def write_container(large: LargeNetwork, result: PruneResult | None = None) -> bytes:
    """Serialise G (and the masks of result, if given)."""
    plan = large.plan
    widths = plan.arch.widths
    parts = [
        MAGIC,
        struct.pack(f"<I{len(widths)}I{len(plan.M)}I", plan.arch.depth, *widths, *plan.M),
        _TAIL.pack(
            _MODES[plan.mode],
            FLAG_MASKS if result is not None else 0,
            large.seed,
            plan.ranges.alpha,
            plan.ranges.beta,
            plan.eps_w,
            plan.w_max,
            plan.eps,
            plan.delta,
        ),
    ]
    for w_in, w_out in zip(large.in_weights, large.out_weights, strict=True):
        parts.append(np.ascontiguousarray(w_in, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(w_out, dtype="<f8").tobytes())
    if result is not None:
        for m_in, m_out in zip(result.in_masks, result.out_masks, strict=True):
            parts.append(np.packbits(m_in.ravel(), bitorder="little").tobytes())
            parts.append(np.packbits(m_out.ravel(), bitorder="little").tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def read(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise NetworkFormatError(
                f"Container truncated: need {size} bytes at offset {self.offset}, "
                f"have {len(self.data) - self.offset}"
            )
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.read(struct.calcsize(fmt)))

    def floats(self, shape: tuple[int, int]) -> np.ndarray:
        count = shape[0] * shape[1]
        return np.frombuffer(self.read(8 * count), dtype="<f8").astype(np.float64).reshape(shape)

    def bits(self, shape: tuple[int, int]) -> np.ndarray:
        count = shape[0] * shape[1]
        packed = np.frombuffer(self.read((count + 7) // 8), dtype=np.uint8)
        return np.unpackbits(packed, count=count, bitorder="little").astype(np.bool_).reshape(shape)


def read_container(data: bytes) -> tuple[LargeNetwork, PruneResult | None]:
    """Decode a container written by write_container.

    Raises:
        NetworkFormatError: On a bad magic, truncation, trailing bytes or a
            header inconsistent with the recomputed plan.
    """
    reader = _Reader(data)
    if reader.read(4) != MAGIC:
        raise NetworkFormatError("Not an LFG1 container")
    (depth,) = reader.unpack("<I")
    if depth < 1:
        raise NetworkFormatError(f"Container declares {depth} layers")
    widths = reader.unpack(f"<{depth + 1}I")
    stored_m = reader.unpack(f"<{depth}I")
    mode_code, flags, seed, alpha, beta, eps_w, w_max, eps, delta = reader.unpack(_TAIL.format)
    modes = {code: mode for mode, code in _MODES.items()}
    if mode_code not in modes:
        raise NetworkFormatError(f"Unknown prune mode code {mode_code}")

    try:
        arch = Architecture.uniform(widths)
        plan = derive_plan(arch, eps, delta, w_max, eps_w, modes[mode_code])
    except ValueError as e:
        raise NetworkFormatError(f"Container header is invalid: {e}") from e
    if plan.M != tuple(stored_m):
        raise NetworkFormatError(f"Stored widths {stored_m} disagree with the plan {plan.M}")
    if (plan.ranges.alpha, plan.ranges.beta) != (alpha, beta):
        raise NetworkFormatError("Stored sampling range disagrees with the plan")

    ins, outs = [], []
    for i, m_i in enumerate(stored_m):
        ins.append(reader.floats((m_i, widths[i])))
        outs.append(reader.floats((widths[i + 1], m_i)))
    large = LargeNetwork(plan=plan, seed=seed, in_weights=tuple(ins), out_weights=tuple(outs))

    result = None
    if flags & FLAG_MASKS:
        in_masks, out_masks = [], []
        for i, m_i in enumerate(stored_m):
            in_masks.append(reader.bits((m_i, widths[i])))
            out_masks.append(reader.bits((widths[i + 1], m_i)))
        try:
            result = PruneResult.from_masks(large, in_masks, out_masks, mode=plan.mode)
        except ValueError as e:
            raise NetworkFormatError(f"Container masks are invalid: {e}") from e
    if reader.offset != len(data):
        raise NetworkFormatError(f"{len(data) - reader.offset} trailing bytes after the container")
    return large, result


def save_container(
    path: str | Path, large: LargeNetwork, result: PruneResult | None = None
) -> Path:
    """Write a container file and return its path."""
    path = Path(path)
    path.write_bytes(write_container(large, result))
    logger.debug("Wrote container %s (masks: %s)", path, result is not None)
    return path


def load_container(path: str | Path) -> tuple[LargeNetwork, PruneResult | None]:
    """Read a container file."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise NetworkFormatError(f"Failed to read {path}: {e}") from e
    return read_container(data)
