"""Counter-based random streams.

Every consumer of randomness asks for a named stream derived from
(master seed, module tag, index). The stream is a Philox generator keyed by
a hash of that triple, so draws for one layer never depend on how many draws
another layer made, and layers can be processed in any order or in parallel.
"""

import hashlib

import numpy as np
from numpy.typing import NDArray

from ticket.errors import ParameterError


def stream_id(seed: int, tag: str, index: int = 0) -> int:
    """128-bit Philox key for the (seed, tag, index) triple."""
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}", "seed")
    if not tag:
        raise ParameterError("stream tag must be non-empty", "tag")
    digest = hashlib.sha256(f"{seed}:{tag}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:16], "little", signed=False)


def generator(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """A fresh generator positioned at counter zero of the named stream."""
    return np.random.Generator(np.random.Philox(key=stream_id(seed, tag, index)))


def uniform_inputs(dimension: int, count: int, seed: int) -> NDArray[np.float64]:
    """Verification inputs drawn uniformly from [-1, 1]^dimension."""
    if dimension < 1 or count < 1:
        raise ParameterError(f"Need dimension >= 1 and count >= 1, got {dimension}, {count}")
    return generator(seed, "inputs").uniform(-1.0, 1.0, size=(count, dimension))
