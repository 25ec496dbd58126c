"""Feed-forward value approximator: input -> ceil(input/2) hidden -> 1.

Both layers are sigmoid; the single output reads as the win expectation of
the side to move, strictly inside (0, 1). Weights serialize to a versioned
text format with 17 significant digits so staged artifacts round-trip
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def hidden_size_for(input_size: int) -> int:
    return math.ceil(input_size / 2)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


@dataclass
class ValueNetwork:
    w_ih: np.ndarray  # (hidden, input)
    b_h: np.ndarray   # (hidden,)
    w_ho: np.ndarray  # (hidden,)
    b_o: float

    def __post_init__(self) -> None:
        hidden, inputs = self.w_ih.shape
        if hidden != hidden_size_for(inputs):
            raise ValueError(
                f"hidden layer must have ceil(input/2) nodes: got {hidden} for {inputs} inputs"
            )
        if self.b_h.shape != (hidden,) or self.w_ho.shape != (hidden,):
            raise ValueError("bias/output weight shapes do not match the hidden layer")

    @property
    def input_size(self) -> int:
        return self.w_ih.shape[1]

    @property
    def hidden_size(self) -> int:
        return self.w_ih.shape[0]

    def copy(self) -> "ValueNetwork":
        return ValueNetwork(self.w_ih.copy(), self.b_h.copy(), self.w_ho.copy(), self.b_o)


def init_network(input_size: int, seed: int, scale: float = 0.1) -> ValueNetwork:
    """Fresh network with weights uniform in [-scale, scale] from ``seed``."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    hidden = hidden_size_for(input_size)
    return ValueNetwork(
        w_ih=rng.uniform(-scale, scale, size=(hidden, input_size)),
        b_h=rng.uniform(-scale, scale, size=hidden),
        w_ho=rng.uniform(-scale, scale, size=hidden),
        b_o=float(rng.uniform(-scale, scale)),
    )


def value(net: ValueNetwork, features: np.ndarray) -> float:
    """Forward pass for a single feature vector."""
    features = np.asarray(features, dtype=float)
    if features.shape != (net.input_size,):
        raise ValueError(f"expected {net.input_size} features, got shape {features.shape}")
    hidden = _sigmoid(net.w_ih @ features + net.b_h)
    return float(_sigmoid(net.w_ho @ hidden + net.b_o))


def batch_values(net: ValueNetwork, feature_rows: np.ndarray) -> np.ndarray:
    """Forward pass for a (rows, input) matrix of candidate features."""
    hidden = _sigmoid(feature_rows @ net.w_ih.T + net.b_h)
    return _sigmoid(hidden @ net.w_ho + net.b_o)


def value_gradient(net: ValueNetwork, features: np.ndarray):
    """Value and its gradient w.r.t. every weight and bias.

    Returns (v, grad_w_ih, grad_b_h, grad_w_ho, grad_b_o).
    """
    features = np.asarray(features, dtype=float)
    hidden = _sigmoid(net.w_ih @ features + net.b_h)
    v = float(_sigmoid(net.w_ho @ hidden + net.b_o))
    dout = v * (1.0 - v)
    dhidden = dout * net.w_ho * hidden * (1.0 - hidden)
    return v, np.outer(dhidden, features), dhidden, dout * hidden, dout


_FORMAT_MAGIC = "valuenet 1"


def network_to_text(net: ValueNetwork) -> str:
    def row(values) -> str:
        return " ".join(format(float(v), ".17g") for v in np.asarray(values).ravel())

    return "\n".join(
        [
            _FORMAT_MAGIC,
            f"dims {net.input_size} {net.hidden_size}",
            "w_ih " + row(net.w_ih),
            "b_h " + row(net.b_h),
            "w_ho " + row(net.w_ho),
            "b_o " + format(net.b_o, ".17g"),
        ]
    ) + "\n"


def network_from_text(text: str) -> ValueNetwork:
    lines = text.splitlines()
    if not lines or lines[0] != _FORMAT_MAGIC:
        raise ValueError(f"unrecognized network format: {lines[:1]}")
    fields = {}
    for line in lines[1:]:
        if line.strip():
            key, _, rest = line.partition(" ")
            fields[key] = rest
    inputs, hidden = (int(v) for v in fields["dims"].split())

    def arr(key: str, shape) -> np.ndarray:
        return np.array([float(v) for v in fields[key].split()]).reshape(shape)

    return ValueNetwork(
        w_ih=arr("w_ih", (hidden, inputs)),
        b_h=arr("b_h", hidden),
        w_ho=arr("w_ho", hidden),
        b_o=float(fields["b_o"]),
    )
