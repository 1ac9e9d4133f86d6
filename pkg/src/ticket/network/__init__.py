"""Network core: architectures, target networks, evaluation and norms."""

from ticket.network.core import (
    ActivationKind,
    Architecture,
    InputDomain,
    TargetNetwork,
    f_max,
    forward,
    forward_trace,
    spectral_norm,
)
from ticket.network.io import (
    LayerSpec,
    NetworkFile,
    dump_network,
    load_network,
    parse_network,
    save_network,
)

__all__ = [
    "ActivationKind",
    "Architecture",
    "InputDomain",
    "LayerSpec",
    "NetworkFile",
    "TargetNetwork",
    "dump_network",
    "f_max",
    "forward",
    "forward_trace",
    "load_network",
    "parse_network",
    "save_network",
    "spectral_norm",
]
