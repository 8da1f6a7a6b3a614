"""Minimal dense feed-forward approximator with backprop and Adam.

All value networks in this package (Q-networks and W-networks) are small
MLPs: rectified-linear hidden layers, linear output. Parameters live in
plain numpy arrays so runs are reproducible from a single seeded
generator, with no ambient randomness.

Snapshot format (see ``save_snapshot``): magic ``b"MLP1"``, a uint32
layer count, the layer dims as uint32, then all parameters as float64 in
layer order (weight matrix row-major, then bias vector).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from configrl.errors import ContractError, TrainingDivergenceError

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

_MAGIC = b"MLP1"


@dataclass
class Gradients:
    """Per-parameter gradients, shaped exactly like the network weights."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]


@dataclass
class AdamState:
    m_weights: list[np.ndarray]
    v_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_biases: list[np.ndarray]
    step: int = 0


@dataclass
class Network:
    """Feed-forward network parameters plus their Adam accumulators.

    ``weights[i]`` has shape ``(layer_dims[i], layer_dims[i+1])`` so the
    forward pass is ``x @ W + b`` per layer.
    """

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    adam: AdamState = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.adam is None:
            self.adam = AdamState(
                m_weights=[np.zeros_like(w) for w in self.weights],
                v_weights=[np.zeros_like(w) for w in self.weights],
                m_biases=[np.zeros_like(b) for b in self.biases],
                v_biases=[np.zeros_like(b) for b in self.biases],
            )

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the network on a single input vector or a batch.

        Accepts shape ``(input_dim,)`` or ``(batch, input_dim)`` and
        returns the matching output shape. Hidden layers are ReLU, the
        output layer is linear.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.input_dim:
            raise ContractError(
                f"input has {x.shape[-1]} features, network expects {self.input_dim}"
            )
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.maximum(h, 0.0)
        return h

    def backward(self, x: np.ndarray, target_grad: np.ndarray) -> Gradients:
        """Reverse-mode gradients of ``sum(target_grad * forward(x))``.

        ``target_grad`` is the upstream loss gradient at the output layer
        (same shape as the output). For batched inputs the returned
        gradients are summed over the batch, so pass an upstream gradient
        already scaled by ``1/batch`` when regressing a mean loss.
        """
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        g = np.atleast_2d(np.asarray(target_grad, dtype=np.float64))
        if x.shape[-1] != self.input_dim:
            raise ContractError(
                f"input has {x.shape[-1]} features, network expects {self.input_dim}"
            )
        if g.shape != (x.shape[0], self.output_dim):
            raise ContractError(
                f"target_grad shape {g.shape} does not match output ({x.shape[0]}, {self.output_dim})"
            )

        # Forward pass, keeping pre- and post-activation values per layer.
        activations = [x]
        pre_acts = []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            pre_acts.append(z)
            h = np.maximum(z, 0.0) if i < last else z
            activations.append(h)

        w_grads = [np.empty(0)] * len(self.weights)
        b_grads = [np.empty(0)] * len(self.biases)
        delta = g
        for i in range(last, -1, -1):
            if i < last:
                delta = delta * (pre_acts[i] > 0.0)
            w_grads[i] = activations[i].T @ delta
            b_grads[i] = delta.sum(axis=0)
            if i > 0:
                delta = delta @ self.weights[i].T
        return Gradients(weights=w_grads, biases=b_grads)

    def adam_step(self, grads: Gradients, lr: float) -> None:
        """Apply one bias-corrected Adam update in place."""
        for g in grads.weights + grads.biases:
            if not np.all(np.isfinite(g)):
                raise TrainingDivergenceError("non-finite gradient in Adam update")
        st = self.adam
        st.step += 1
        bc1 = 1.0 - ADAM_BETA1**st.step
        bc2 = 1.0 - ADAM_BETA2**st.step
        for params, gs, ms, vs in (
            (self.weights, grads.weights, st.m_weights, st.v_weights),
            (self.biases, grads.biases, st.m_biases, st.v_biases),
        ):
            for p, g, m, v in zip(params, gs, ms, vs):
                m *= ADAM_BETA1
                m += (1.0 - ADAM_BETA1) * g
                v *= ADAM_BETA2
                v += (1.0 - ADAM_BETA2) * np.square(g)
                p -= lr * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)


def init_network(layer_dims: list[int], rng: np.random.Generator) -> Network:
    """Build a network with Glorot-uniform weights and zero biases.

    Initialization draws come only from ``rng``, so an identical seed
    yields an identical network.
    """
    if len(layer_dims) < 2 or any(d <= 0 for d in layer_dims):
        raise ContractError(f"bad layer dims {layer_dims}")
    weights = []
    biases = []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Network(layer_dims=list(layer_dims), weights=weights, biases=biases)


def clone_into(src: Network, dst: Network) -> None:
    """Copy src parameters into dst, leaving dst's Adam state untouched."""
    if src.layer_dims != dst.layer_dims:
        raise ContractError(
            f"cannot clone {src.layer_dims} into {dst.layer_dims}"
        )
    for sw, dw in zip(src.weights, dst.weights):
        np.copyto(dw, sw)
    for sb, db in zip(src.biases, dst.biases):
        np.copyto(db, sb)


def save_snapshot(net: Network, path) -> None:
    """Write a parameter snapshot (dims header + row-major parameters)."""
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<I", len(net.layer_dims)))
        f.write(struct.pack(f"<{len(net.layer_dims)}I", *net.layer_dims))
        for w, b in zip(net.weights, net.biases):
            f.write(np.ascontiguousarray(w, dtype=np.float64).tobytes())
            f.write(np.ascontiguousarray(b, dtype=np.float64).tobytes())


def load_snapshot(path) -> Network:
    """Rebuild a network from a snapshot; Adam state starts fresh."""
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ContractError(f"{path} is not a network snapshot")
        (n_dims,) = struct.unpack("<I", f.read(4))
        dims = list(struct.unpack(f"<{n_dims}I", f.read(4 * n_dims)))
        weights = []
        biases = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            w = np.frombuffer(f.read(8 * fan_in * fan_out), dtype=np.float64)
            weights.append(w.reshape(fan_in, fan_out).copy())
            b = np.frombuffer(f.read(8 * fan_out), dtype=np.float64)
            biases.append(b.copy())
    return Network(layer_dims=dims, weights=weights, biases=biases)
