"""Dense statevector simulation of qudit circuits.

Amplitudes are held as a tensor of shape ``(p,) * n``; the axis for wire
``w`` is ``n - 1 - w``, so a C-order flatten gives index ``sum(d_w p**w)``
(wire 0 least significant).  Each gate touches only its own axes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, gate_phase_exponents, logical_to_physical
from .errors import DimensionMismatch, IndexRange, InvalidGate


@dataclass
class StateVector:
    p: int
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.p**self.n,):
            raise DimensionMismatch(
                f"expected {self.p**self.n} amplitudes, got {self.amplitudes.shape}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def dits(self, k: int) -> tuple[int, ...]:
        """Base-p digits of index ``k``, wire 0 first."""
        return tuple((k // self.p**w) % self.p for w in range(self.n))

    def to_json(self) -> str:
        return json.dumps([[float(z.real), float(z.imag)] for z in self.amplitudes])

    @classmethod
    def from_json(cls, p: int, n: int, text: str) -> StateVector:
        pairs = np.asarray(json.loads(text), dtype=float)
        return cls(p, n, pairs[:, 0] + 1j * pairs[:, 1])


def basis_state(p: int, n: int, k: int) -> StateVector:
    N = p**n
    if not 0 <= k < N:
        raise IndexRange(f"basis index {k} outside [0, {N})")
    amps = np.zeros(N, dtype=complex)
    amps[k] = 1
    return StateVector(p, n, amps)


def _axis(n: int, w: int) -> int:
    return n - 1 - w


def _phase_along(T: np.ndarray, phase: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    shape = [1] * T.ndim
    for ax in axes:
        shape[ax] = T.shape[ax]
    if len(axes) == 2 and axes[0] > axes[1]:
        phase = phase.T
    return T * phase.reshape(shape)


def apply_gate_tensor(T: np.ndarray, g: Gate, n: int) -> np.ndarray:
    """Apply ``g`` to a tensor whose first ``n`` axes are wires (extra axes batch)."""
    p = g.p
    if max(g.wires) >= n:
        raise InvalidGate(f"wire {max(g.wires)} >= n={n}")
    axes = tuple(_axis(n, w) for w in g.wires)
    if g.kind == "H":
        d = np.arange(p)
        F = np.exp(2j * np.pi * np.outer(d, d) / p) / np.sqrt(p)
        return np.moveaxis(np.tensordot(F, T, axes=([1], [axes[0]])), 0, axes[0])
    if g.kind == "Perm":
        # new[mu x] = old[x]
        src = pow(g.mu, -1, p) * np.arange(p) % p
        return np.take(T, src, axis=axes[0])
    if g.kind == "SWAP":
        return np.swapaxes(T, *axes)
    e = gate_phase_exponents(g)
    phase = np.exp(2j * np.pi * e / g.root)
    return _phase_along(T, phase, axes)


def apply_gate(psi: StateVector, g: Gate, wires: tuple[int, ...] | None = None) -> StateVector:
    """Return ``g`` applied to ``psi``; ``wires`` overrides the gate's own wires."""
    if g.p != psi.p:
        raise InvalidGate(f"gate for p={g.p} on a p={psi.p} state")
    if wires is not None:
        g = Gate(g.kind, tuple(wires), g.p, g.k, g.mult, g.mu, g.block)
    T = psi.amplitudes.reshape((psi.p,) * psi.n)
    out = apply_gate_tensor(T, g, psi.n)
    return StateVector(psi.p, psi.n, np.ascontiguousarray(out).reshape(-1))


def run_batch(c: Circuit, columns: np.ndarray) -> np.ndarray:
    """Run ``c`` on every column of a ``(p**n, B)`` array in the physical layout."""
    B = columns.shape[1]
    T = np.asarray(columns, dtype=complex).reshape((c.p,) * c.n + (B,))
    for layer in c.layers:
        for g in layer:
            T = apply_gate_tensor(T, g, c.n)
    return np.ascontiguousarray(T).reshape(c.dim, B)


def run(c: Circuit, psi: StateVector, physical: bool = False) -> StateVector:
    """Apply the layers of ``c`` in order.

    In the default logical mode the amplitude of value ``x`` is read from and
    written to the wire layout given by ``msq_in``/``msq_out``.
    """
    if (psi.p, psi.n) != (c.p, c.n):
        raise DimensionMismatch(f"state is (p={psi.p}, n={psi.n}), circuit is (p={c.p}, n={c.n})")
    amps = psi.amplitudes
    if not physical:
        phys = np.zeros_like(amps)
        phys[logical_to_physical(c.p, c.n, c.msq_in)] = amps
        amps = phys
    out = run_batch(c, amps[:, None])[:, 0]
    if not physical:
        out = out[logical_to_physical(c.p, c.n, c.msq_out)]
    return StateVector(c.p, c.n, out)
