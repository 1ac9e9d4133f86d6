"""Bias-free fully-connected feed-forward networks.

Networks here never carry bias terms: layer i computes
``F_i(x) = sigma_i(W_i @ F_{i-1}(x))`` and nothing else. All types are
immutable after construction and every operation is a pure function.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from ticket.errors import DimensionError, EmptyDomainError, ParameterError

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


class ActivationKind(str, Enum):
    """Supported entrywise activations."""

    RELU = "relu"
    TANH = "tanh"
    LOGISTIC = "logistic"
    IDENTITY = "identity"

    @property
    def lipschitz(self) -> float:
        """Lipschitz factor lambda of the activation."""
        return 0.25 if self is ActivationKind.LOGISTIC else 1.0

    def apply(self, z: FloatArray) -> FloatArray:
        """Apply the activation entrywise."""
        if self is ActivationKind.RELU:
            return np.maximum(z, 0.0)
        if self is ActivationKind.TANH:
            return np.tanh(z)
        if self is ActivationKind.LOGISTIC:
            return 1.0 / (1.0 + np.exp(-z))
        return np.asarray(z, dtype=np.float64)


@dataclass(frozen=True)
class Architecture:
    """Layer count, widths n_0..n_l and activations sigma_1..sigma_l."""

    widths: tuple[int, ...]
    activations: tuple[ActivationKind, ...]

    def __post_init__(self) -> None:
        if len(self.widths) < 2:
            raise ParameterError("An architecture needs at least one layer", "widths")
        if any(int(n) < 1 for n in self.widths):
            raise ParameterError(f"All widths must be >= 1, got {self.widths}", "widths")
        if len(self.activations) != len(self.widths) - 1:
            raise ParameterError(
                f"Expected {len(self.widths) - 1} activations, got {len(self.activations)}",
                "activations",
            )
        object.__setattr__(self, "widths", tuple(int(n) for n in self.widths))
        object.__setattr__(
            self, "activations", tuple(ActivationKind(a) for a in self.activations)
        )

    @classmethod
    def uniform(
        cls,
        widths: tuple[int, ...] | list[int],
        activation: ActivationKind = ActivationKind.RELU,
    ) -> "Architecture":
        """Build an architecture using the same activation at every layer."""
        return cls(tuple(widths), tuple(activation for _ in range(len(widths) - 1)))

    @property
    def depth(self) -> int:
        """Number of layers l."""
        return len(self.widths) - 1

    @property
    def n_max(self) -> int:
        """Largest width, inputs included."""
        return max(self.widths)

    @property
    def num_weights(self) -> int:
        """N_F: total weight count sum_i n_{i-1} n_i."""
        return sum(self.widths[i - 1] * self.widths[i] for i in range(1, len(self.widths)))

    @property
    def lipschitz_factors(self) -> tuple[float, ...]:
        """Per-layer Lipschitz factors lambda_1..lambda_l."""
        return tuple(a.lipschitz for a in self.activations)

    @property
    def is_relu(self) -> bool:
        """True when every layer uses ReLU."""
        return all(a is ActivationKind.RELU for a in self.activations)


@dataclass(frozen=True)
class TargetNetwork:
    """Network F with weight matrix i shaped n_i x n_{i-1}, entries in [-w_max, w_max]."""

    arch: Architecture
    weights: tuple[FloatArray, ...]
    w_max: float

    def __post_init__(self) -> None:
        if not self.w_max > 0:
            raise ParameterError(f"w_max must be positive, got {self.w_max}", "w_max")
        if len(self.weights) != self.arch.depth:
            raise DimensionError(
                f"Expected {self.arch.depth} weight matrices, got {len(self.weights)}",
                expected=self.arch.depth,
                actual=len(self.weights),
            )
        frozen: list[FloatArray] = []
        for i, w in enumerate(self.weights, start=1):
            matrix = np.array(w, dtype=np.float64)
            expected = (self.arch.widths[i], self.arch.widths[i - 1])
            if matrix.shape != expected:
                raise DimensionError(
                    f"Layer {i} weights have shape {matrix.shape}, expected {expected}"
                )
            if not np.all(np.isfinite(matrix)):
                raise ParameterError(f"Layer {i} weights contain non-finite values", "weights")
            if np.any(np.abs(matrix) > self.w_max):
                raise ParameterError(
                    f"Layer {i} has a weight outside [-{self.w_max}, {self.w_max}]", "weights"
                )
            matrix.setflags(write=False)
            frozen.append(matrix)
        object.__setattr__(self, "weights", tuple(frozen))

    @classmethod
    def random(cls, arch: Architecture, w_max: float, rng: np.random.Generator) -> "TargetNetwork":
        """Draw every weight uniformly from [-w_max, w_max]."""
        weights = tuple(
            rng.uniform(-w_max, w_max, size=(arch.widths[i], arch.widths[i - 1]))
            for i in range(1, arch.depth + 1)
        )
        return cls(arch, weights, w_max)


@dataclass(frozen=True)
class InputDomain:
    """Finite sample of the inputs of interest, one vector per row."""

    samples: FloatArray
    dimension: int = field(init=False)

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples.reshape(1, -1) if samples.size else samples.reshape(0, 0)
        if samples.ndim != 2:
            raise DimensionError(f"Input samples must be a 2-D array, got {samples.ndim}-D")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "dimension", samples.shape[1])

    def __len__(self) -> int:
        return int(self.samples.shape[0])


def _check_input(net: TargetNetwork, x: FloatArray) -> FloatArray:
    x = np.asarray(x, dtype=np.float64)
    n0 = net.arch.widths[0]
    if x.ndim not in (1, 2) or x.shape[-1] != n0:
        raise DimensionError(
            f"Input has shape {x.shape}, expected last dimension {n0}",
            expected=n0,
            actual=int(x.shape[-1]) if x.ndim else None,
        )
    return x


def forward_trace(net: TargetNetwork, x: FloatArray) -> list[FloatArray]:
    """Return F_0(x)..F_l(x); x may be one vector or a batch with one input per row."""
    h = _check_input(net, x)
    trace = [h]
    for w, activation in zip(net.weights, net.arch.activations, strict=True):
        h = activation.apply(h @ w.T)
        trace.append(h)
    return trace


def forward(net: TargetNetwork, x: FloatArray) -> FloatArray:
    """Return the network output F_l(x)."""
    return forward_trace(net, x)[-1]


def f_max(net: TargetNetwork, domain: InputDomain) -> float:
    """Largest |activation| over the domain, inputs included and outputs excluded."""
    if len(domain) == 0:
        raise EmptyDomainError("f_max needs at least one input")
    trace = forward_trace(net, domain.samples)
    return float(max(np.max(np.abs(layer)) for layer in trace[:-1]))


def spectral_norm(matrix: FloatArray, tol: float = 1e-9) -> float:
    """Largest singular value by power iteration on M^T M.

    Two deterministic starts are used: the normalised all-ones vector and the
    unit vector of the largest-norm column. Each run yields a Rayleigh
    estimate that never exceeds sigma_max^2, sharpened by a Rayleigh-Ritz step
    over the last two iterates; the larger one is returned. The column start
    guarantees the result is at least the max-norm of M.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"spectral_norm expects a matrix, got {m.ndim}-D input")
    if m.size == 0 or not np.any(m):
        return 0.0
    rows, cols = m.shape
    max_iter = 10 * (rows + cols)
    gram = m.T @ m

    ones = np.ones(cols) / np.sqrt(cols)
    column = np.zeros(cols)
    column[int(np.argmax(np.sum(m * m, axis=0)))] = 1.0

    best = 0.0
    for start in (ones, column):
        best = max(best, _power_iteration(gram, start, tol, max_iter))
    return float(np.sqrt(best))


def _power_iteration(gram: FloatArray, start: FloatArray, tol: float, max_iter: int) -> float:
    v = start
    estimate = float(v @ gram @ v)
    for _ in range(max_iter):
        y = gram @ v
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        v = y / norm
        new_estimate = float(v @ gram @ v)
        if abs(new_estimate - estimate) <= tol * max(new_estimate, np.finfo(float).tiny):
            estimate = new_estimate
            break
        estimate = new_estimate
    else:
        logger.debug("Power iteration hit the %d-iteration cap", max_iter)
    return max(estimate, _ritz_estimate(gram, v))


def _ritz_estimate(gram: FloatArray, v: FloatArray) -> float:
    """Largest Rayleigh quotient over span{v, gram @ v}; still a lower bound of sigma_max^2."""
    basis, _ = np.linalg.qr(np.column_stack((v, gram @ v)))
    projected = basis.T @ gram @ basis
    return float(np.linalg.eigvalsh((projected + projected.T) / 2.0)[-1])
