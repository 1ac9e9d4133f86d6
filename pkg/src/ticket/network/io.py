"""Network JSON format shared by every command.

A file holds ``{"w_max": number, "layers": [...]}`` where each layer is
``{"rows", "cols", "activation", "weights"}`` and ``weights`` is the flat
row-major matrix. Unknown keys anywhere are rejected.
"""

import json
import logging
from pathlib import Path
from typing import Annotated

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ticket.errors import NetworkFormatError
from ticket.network.core import ActivationKind, Architecture, TargetNetwork

logger = logging.getLogger(__name__)


class LayerSpec(BaseModel):
    """One dense layer in the network file."""

    model_config = ConfigDict(extra="forbid")

    rows: Annotated[int, Field(ge=1)]
    cols: Annotated[int, Field(ge=1)]
    activation: ActivationKind
    weights: list[float]

    @model_validator(mode="after")
    def validate_weight_count(self) -> "LayerSpec":
        """The flat weight array must hold exactly rows * cols entries."""
        if len(self.weights) != self.rows * self.cols:
            raise ValueError(
                f"layer declares {self.rows}x{self.cols} but has {len(self.weights)} weights"
            )
        return self


class NetworkFile(BaseModel):
    """Top-level network document."""

    model_config = ConfigDict(extra="forbid")

    w_max: Annotated[float, Field(gt=0)]
    layers: Annotated[list[LayerSpec], Field(min_length=1)]

    @model_validator(mode="after")
    def validate_chaining(self) -> "NetworkFile":
        """Each layer's column count must equal the previous layer's row count."""
        for i in range(1, len(self.layers)):
            if self.layers[i].cols != self.layers[i - 1].rows:
                raise ValueError(
                    f"layer {i + 1} has {self.layers[i].cols} columns but layer {i} "
                    f"has {self.layers[i - 1].rows} rows"
                )
        return self

    def to_network(self) -> TargetNetwork:
        """Convert the validated document to a TargetNetwork."""
        widths = (self.layers[0].cols, *(layer.rows for layer in self.layers))
        arch = Architecture(widths, tuple(layer.activation for layer in self.layers))
        weights = tuple(
            np.asarray(layer.weights, dtype=np.float64).reshape(layer.rows, layer.cols)
            for layer in self.layers
        )
        return TargetNetwork(arch, weights, self.w_max)

    @classmethod
    def from_network(cls, net: TargetNetwork) -> "NetworkFile":
        """Describe a TargetNetwork as a network document."""
        layers = [
            LayerSpec(
                rows=int(w.shape[0]),
                cols=int(w.shape[1]),
                activation=activation,
                weights=[float(v) for v in w.ravel()],
            )
            for w, activation in zip(net.weights, net.arch.activations, strict=True)
        ]
        return cls(w_max=net.w_max, layers=layers)


def parse_network(text: str) -> TargetNetwork:
    """Parse and validate a network document.

    Raises:
        NetworkFormatError: On malformed JSON, schema violations or weights
            outside [-w_max, w_max].
    """
    try:
        document = NetworkFile.model_validate_json(text)
        return document.to_network()
    except ValidationError as e:
        raise NetworkFormatError(f"Invalid network document: {e}") from e
    except ValueError as e:
        raise NetworkFormatError(f"Invalid network: {e}") from e


def load_network(path: str | Path) -> TargetNetwork:
    """Read a network JSON file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise NetworkFormatError(f"Failed to read {path}: {e}") from e
    net = parse_network(text)
    logger.debug("Loaded network %s with widths %s", path, net.arch.widths)
    return net


def dump_network(net: TargetNetwork) -> str:
    """Serialise a network to its canonical JSON text."""
    return json.dumps(NetworkFile.from_network(net).model_dump(mode="json"), indent=2) + "\n"


def save_network(net: TargetNetwork, path: str | Path) -> Path:
    """Write a network JSON file and return its path."""
    path = Path(path)
    path.write_text(dump_network(net), encoding="utf-8", newline="\n")
    return path
