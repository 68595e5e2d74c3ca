"""Gate-level intermediate representation for p-level qudit circuits.

Wire 0 holds the least significant dit of the physical register.  A circuit
records where its most significant qudit sits on entry and exit
(``msq_in``/``msq_out``): ``n - 1`` means the natural layout, ``0`` means the
dit order is reversed (wire ``w`` holds dit ``n - 1 - w``).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionCap, InvalidGate, ParseError
from .modnum import is_prime, mod_inv
from .weil import ZERO, ExactPhaseMatrix, permutation

KINDS = ("H", "Rk2", "Rk1", "Sk", "Perm", "SWAP")
_ARITY = {"H": 1, "Rk1": 1, "Perm": 1, "Rk2": 2, "Sk": 2, "SWAP": 2}
DEFAULT_MAX_DIM = 3**10


def max_dim() -> int:
    """Cap on ``p**n`` for dense expansion, from ``AFRFT_MAX_DIM``."""
    raw = os.environ.get("AFRFT_MAX_DIM")
    return int(raw) if raw else DEFAULT_MAX_DIM


@dataclass(frozen=True)
class Gate:
    """One gate of the qudit gate set.

    ``Rk2``/``Sk`` multiply ``|j>|m>`` by ``exp(2 pi i c mult j m / p**k)``
    with ``c = 1`` or ``2``; ``Rk1`` uses ``m**2`` on one wire; ``Perm`` maps
    ``|x> -> |mu x mod p>``.  ``block`` is an optional label used by the
    metrics merge rule and carried through serialization.
    """

    kind: str
    wires: tuple[int, ...]
    p: int
    k: int | None = None
    mult: int = 1
    mu: int | None = None
    block: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        if self.kind not in KINDS:
            raise InvalidGate(f"unknown gate kind {self.kind!r}")
        if len(self.wires) != _ARITY[self.kind]:
            raise InvalidGate(f"{self.kind} needs {_ARITY[self.kind]} wire(s), got {self.wires}")
        if len(set(self.wires)) != len(self.wires) or min(self.wires) < 0:
            raise InvalidGate(f"bad wires {self.wires}")
        if self.kind in ("Rk2", "Rk1", "Sk"):
            if self.k is None or self.k < 1:
                raise InvalidGate(f"{self.kind} needs a level k >= 1")
            object.__setattr__(self, "mult", self.mult % self.p**self.k)
        if self.kind == "Perm":
            if self.mu is None or self.mu % self.p == 0:
                raise InvalidGate(f"Perm needs a unit mu mod {self.p}, got {self.mu}")
            object.__setattr__(self, "mu", self.mu % self.p)

    @property
    def is_two_qudit(self) -> bool:
        return len(self.wires) == 2

    @property
    def root(self) -> int:
        """Order of the root of unity needed to express this gate exactly."""
        return self.p**self.k if self.k is not None else self.p

    def tagged(self, block: str | None) -> Gate:
        return replace(self, block=block)

    def inverse(self) -> Gate:
        """Inverse of a non-Hadamard gate (see :func:`circuit_inverse` for H)."""
        if self.kind == "H":
            raise InvalidGate("Hadamard has no single-gate inverse; use circuit_inverse")
        if self.kind == "Perm":
            return replace(self, mu=mod_inv(self.mu, self.p))
        if self.kind == "SWAP":
            return self
        return replace(self, mult=-self.mult)


def H(w: int, p: int, block=None) -> Gate:
    return Gate("H", (w,), p, block=block)


def Perm(w: int, mu: int, p: int, block=None) -> Gate:
    return Gate("Perm", (w,), p, mu=mu, block=block)


def Rk2(c: int, t: int, k: int, p: int, mult: int = 1, block=None) -> Gate:
    return Gate("Rk2", (c, t), p, k=k, mult=mult, block=block)


def Rk1(w: int, k: int, p: int, mult: int = 1, block=None) -> Gate:
    return Gate("Rk1", (w,), p, k=k, mult=mult, block=block)


def Sk(a: int, b: int, k: int, p: int, mult: int = 1, block=None) -> Gate:
    return Gate("Sk", (a, b), p, k=k, mult=mult, block=block)


def SWAP(a: int, b: int, p: int, block=None) -> Gate:
    return Gate("SWAP", (a, b), p, block=block)


def gate_phase_exponents(g: Gate) -> np.ndarray:
    """Diagonal exponents over ``omega_{p^k}``: shape ``(p,)`` or ``(p, p)``."""
    d = np.arange(g.p, dtype=np.int64)
    if g.kind == "Rk1":
        return g.mult * d * d % g.root
    if g.kind == "Rk2":
        return g.mult * np.outer(d, d) % g.root
    if g.kind == "Sk":
        return 2 * g.mult * np.outer(d, d) % g.root
    raise InvalidGate(f"{g.kind} is not diagonal")


def gate_unitary(g: Gate) -> ExactPhaseMatrix:
    """Local matrix of ``g``; two-wire gates index ``|j m>`` as ``j p + m``
    with ``j`` on ``wires[0]``."""
    p = g.p
    if g.kind == "H":
        d = np.arange(p, dtype=np.int64)
        return ExactPhaseMatrix(p, np.outer(d, d), 1)
    if g.kind == "Perm":
        return permutation(g.mu * np.arange(p) % p, p)
    if g.kind == "SWAP":
        idx = np.arange(p * p)
        return permutation((idx % p) * p + idx // p, p)
    e = gate_phase_exponents(g).ravel()
    grid = np.full((len(e), len(e)), ZERO, dtype=np.int64)
    np.fill_diagonal(grid, e)
    return ExactPhaseMatrix(g.root, grid)


@dataclass(frozen=True)
class Circuit:
    p: int
    n: int
    layers: tuple[tuple[Gate, ...], ...] = ()
    lnn: bool = False
    msq_in: int | None = None
    msq_out: int | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise InvalidGate(f"qudit dimension {self.p} is not prime")
        if self.n < 1:
            raise InvalidGate("need at least one wire")
        for name in ("msq_in", "msq_out"):
            v = getattr(self, name)
            if v is None:
                object.__setattr__(self, name, self.n - 1)
            elif v not in (0, self.n - 1):
                raise InvalidGate(f"{name}={v} must be 0 or n-1")
        layers = tuple(tuple(sorted(layer, key=lambda g: min(g.wires))) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        for li, layer in enumerate(layers):
            seen: set[int] = set()
            for g in layer:
                if g.p != self.p:
                    raise InvalidGate(f"layer {li}: gate for p={g.p} in a p={self.p} circuit")
                if max(g.wires) >= self.n:
                    raise InvalidGate(f"layer {li}: wire {max(g.wires)} >= n={self.n}")
                if seen & set(g.wires):
                    raise InvalidGate(f"layer {li}: wire collision on {g.wires}")
                seen |= set(g.wires)
                if self.lnn and g.is_two_qudit and abs(g.wires[0] - g.wires[1]) != 1:
                    raise InvalidGate(f"layer {li}: {g.kind}{g.wires} is not nearest-neighbour")

    @classmethod
    def from_gates(cls, p: int, n: int, gates: Iterable[Gate], lnn: bool = False,
                   msq_in: int | None = None, msq_out: int | None = None) -> Circuit:
        """Layer a gate sequence as-soon-as-possible; per-wire order is kept."""
        layers: list[list[Gate]] = []
        front = [0] * n
        for g in gates:
            if max(g.wires) >= n:
                raise InvalidGate(f"wire {max(g.wires)} >= n={n}")
            li = max(front[w] for w in g.wires)
            if li == len(layers):
                layers.append([])
            layers[li].append(g)
            for w in g.wires:
                front[w] = li + 1
        return cls(p, n, tuple(tuple(l) for l in layers), lnn, msq_in, msq_out)

    @property
    def gates(self) -> list[Gate]:
        return [g for layer in self.layers for g in layer]

    @property
    def natural_in(self) -> bool:
        return self.msq_in == self.n - 1

    @property
    def natural_out(self) -> bool:
        return self.msq_out == self.n - 1

    @property
    def dim(self) -> int:
        return self.p**self.n

    def __len__(self) -> int:
        return len(self.layers)


def empty_circuit(p: int, n: int, lnn: bool = False) -> Circuit:
    return Circuit(p, n, (), lnn)


def upside_down(c: Circuit) -> Circuit:
    """Reindex wire ``w`` to ``n - 1 - w``; the dit layouts flip with it."""
    m = c.n - 1
    layers = tuple(tuple(replace(g, wires=tuple(m - w for w in g.wires)) for g in layer)
                   for layer in c.layers)
    return Circuit(c.p, c.n, layers, c.lnn, m - c.msq_in, m - c.msq_out)


def concat(*circuits: Circuit) -> Circuit:
    """Sequential composition, re-layered ASAP so adjacent blocks pipeline.

    Each block's output layout must equal the next block's input layout.
    """
    first = circuits[0]
    for a, b in zip(circuits, circuits[1:]):
        if (a.p, a.n) != (b.p, b.n):
            raise InvalidGate("cannot concatenate circuits of different shape")
        if a.msq_out != b.msq_in:
            raise InvalidGate(f"layout mismatch: msq_out={a.msq_out} then msq_in={b.msq_in}")
    gates = [g for c in circuits for g in c.gates]
    return Circuit.from_gates(first.p, first.n, gates, all(c.lnn for c in circuits),
                              first.msq_in, circuits[-1].msq_out)


def _inverse_gates(gates: Sequence[Gate]) -> list[Gate]:
    p = gates[0].p if gates else 2
    # pair each Hadamard with a Perm that directly follows it on the same wire
    partner: dict[int, int] = {}
    last_on: dict[int, int] = {}
    for i, g in enumerate(gates):
        for w in g.wires:
            j = last_on.get(w)
            if j is not None and g.kind == "Perm" and gates[j].kind == "H" and j not in partner:
                partner[j] = i
            last_on[w] = i
    paired = {i: j for j, i in partner.items()}  # Perm index -> H index
    out: list[Gate] = []
    for i in range(len(gates) - 1, -1, -1):
        g = gates[i]
        if g.kind == "Perm" and i in paired:
            # (P_mu H)^-1 = P_{-mu} H
            h = gates[paired[i]]
            out.append(h)
            mu = -g.mu % p
            if mu != 1:
                out.append(replace(g, mu=mu))
        elif g.kind == "H":
            if i in partner:
                continue
            # H^dag = Pi H, Pi the parity permutation
            out.append(g)
            if (-1) % p != 1:
                out.append(Perm(g.wires[0], -1, p, g.block))
        else:
            out.append(g.inverse())
    return out


def circuit_inverse(c: Circuit) -> Circuit:
    return Circuit.from_gates(c.p, c.n, _inverse_gates(c.gates), c.lnn, c.msq_out, c.msq_in)


def logical_to_physical(p: int, n: int, msq: int) -> np.ndarray:
    """``out[x]`` is the physical index storing logical value ``x`` under layout ``msq``."""
    x = np.arange(p**n)
    if msq == n - 1:
        return x
    ds = [(x // p**i) % p for i in range(n)]
    return sum(ds[i] * p ** (n - 1 - i) for i in range(n))


def _check_cap(c: Circuit, cap: int | None) -> None:
    cap = max_dim() if cap is None else cap
    if c.dim > cap:
        raise DimensionCap(f"p**n = {c.dim} exceeds the cap {cap} (AFRFT_MAX_DIM)")


def _monomial_unitary(c: Circuit) -> ExactPhaseMatrix:
    """Exact product of a Hadamard-free circuit as (images, phases)."""
    p, n, N = c.p, c.n, c.dim
    root = p ** max([n] + [g.k for g in c.gates if g.k is not None])
    images = np.arange(N, dtype=np.int64)
    phases = np.zeros(N, dtype=np.int64)
    stride = [p**w for w in range(n)]
    for g in c.gates:
        ds = [(images // stride[w]) % p for w in g.wires]
        if g.kind == "Perm":
            w = g.wires[0]
            images = images + ((g.mu * ds[0]) % p - ds[0]) * stride[w]
        elif g.kind == "SWAP":
            a, b = g.wires
            images = images + (ds[1] - ds[0]) * stride[a] + (ds[0] - ds[1]) * stride[b]
        else:
            e = gate_phase_exponents(g)
            local = e[ds[0]] if g.kind == "Rk1" else e[ds[0], ds[1]]
            phases = phases + local * (root // g.root)
    grid = np.full((N, N), ZERO, dtype=np.int64)
    grid[images, np.arange(N)] = phases % root
    return ExactPhaseMatrix(root, grid)


def circuit_unitary(c: Circuit, physical: bool = False, cap: int | None = None):
    """Matrix of ``c`` (earlier layers act first).

    Hadamard-free circuits give an exact monomial matrix; otherwise the
    result is dense, built by simulating every basis input.  By default the
    matrix is expressed on logical values, undoing the ``msq`` layouts;
    ``physical=True`` returns the raw wire-level matrix.
    """
    _check_cap(c, cap)
    N = c.dim
    if not any(g.kind == "H" for g in c.gates):
        U = _monomial_unitary(c)
        if physical:
            return U
        src = logical_to_physical(c.p, c.n, c.msq_in)
        dst = logical_to_physical(c.p, c.n, c.msq_out)
        return ExactPhaseMatrix(U.root, U.exps[np.ix_(dst, src)], 0)
    from .sim import run_batch

    cols = np.zeros((N, N), dtype=complex)
    src = np.arange(N) if physical else logical_to_physical(c.p, c.n, c.msq_in)
    cols[src, np.arange(N)] = 1
    out = run_batch(c, cols)
    if not physical:
        out = out[logical_to_physical(c.p, c.n, c.msq_out)]
    return out


@dataclass(frozen=True)
class Metrics:
    """Circuit size figures.

    ``cost`` counts interactions: consecutive gates (per wire) acting on the
    same wire set inside one block merge into one interaction.  ``depth`` is
    the ASAP level count of interactions, ``depth_2q`` counts only levels
    containing a two-qudit interaction.  ``elementary_*`` are the coarse
    ``4 p**2`` per-interaction estimates and carry ``approximate=True``.
    """

    depth: int
    cost: int
    width: int
    elementary_cost: int
    elementary_depth: int
    depth_2q: int = 0
    approximate: bool = True
    convention: str = field(default="merge-same-wires-within-block", compare=False)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "depth_2q": self.depth_2q,
            "cost": self.cost,
            "width": self.width,
            "elementary_cost": self.elementary_cost,
            "elementary_depth": self.elementary_depth,
            "approximate": self.approximate,
            "convention": self.convention,
        }


def interactions(c: Circuit) -> list[list[Gate]]:
    """Group gates into merged interactions (see :class:`Metrics`)."""
    groups: list[list[Gate]] = []
    last: dict[int, int] = {}
    for g in c.gates:
        prev = {last.get(w) for w in g.wires}
        if len(prev) == 1 and None not in prev:
            gi = prev.pop()
            head = groups[gi][0]
            if set(head.wires) == set(g.wires) and head.block == g.block:
                groups[gi].append(g)
                continue
        groups.append([g])
        for w in g.wires:
            last[w] = len(groups) - 1
    return groups


def metrics(c: Circuit) -> Metrics:
    groups = interactions(c)
    front = [0] * c.n
    levels_2q: set[int] = set()
    depth = 0
    for grp in groups:
        wires = grp[0].wires
        lvl = max(front[w] for w in wires)
        for w in wires:
            front[w] = lvl + 1
        depth = max(depth, lvl + 1)
        if len(wires) == 2:
            levels_2q.add(lvl)
    cost = len(groups)
    e = 4 * c.p**2
    perms = sum(g.kind == "Perm" for g in c.gates)
    return Metrics(depth, cost, c.n, e * cost + c.p * perms, e * depth, len(levels_2q))


def _gate_doc(g: Gate) -> dict:
    doc: dict = {"kind": g.kind, "wires": list(g.wires)}
    if g.k is not None:
        doc["k"] = g.k
        doc["mult"] = g.mult
    if g.mu is not None:
        doc["mu"] = g.mu
    if g.block is not None:
        doc["block"] = g.block
    return doc


def circuit_to_dict(c: Circuit) -> dict:
    return {
        "p": c.p,
        "n": c.n,
        "lnn": c.lnn,
        "msq_in": c.msq_in,
        "msq_out": c.msq_out,
        "layers": [[_gate_doc(g) for g in layer] for layer in c.layers],
    }


def serialize(c: Circuit) -> bytes:
    return json.dumps(circuit_to_dict(c), separators=(",", ":")).encode()


def _need(doc, key, typ, path):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"missing field {key!r}", path=path)
    v = doc[key]
    if typ is int and (isinstance(v, bool) or not isinstance(v, int)):
        raise ParseError(f"{key!r} must be an integer", path=f"{path}.{key}")
    if typ is not int and not isinstance(v, typ):
        raise ParseError(f"{key!r} has the wrong type", path=f"{path}.{key}")
    return v


def circuit_from_dict(doc: dict) -> Circuit:
    p = _need(doc, "p", int, "$")
    n = _need(doc, "n", int, "$")
    lnn = _need(doc, "lnn", bool, "$") if "lnn" in doc else False
    msq_in = _need(doc, "msq_in", int, "$") if "msq_in" in doc else None
    msq_out = _need(doc, "msq_out", int, "$") if "msq_out" in doc else None
    raw_layers = _need(doc, "layers", list, "$")
    layers = []
    for li, raw in enumerate(raw_layers):
        if not isinstance(raw, list):
            raise ParseError("layer must be a list", path=f"$.layers[{li}]")
        layer = []
        for gi, gd in enumerate(raw):
            path = f"$.layers[{li}][{gi}]"
            kind = _need(gd, "kind", str, path)
            if kind not in KINDS:
                raise ParseError(f"unknown gate kind {kind!r}", path=path)
            wires = _need(gd, "wires", list, path)
            if not all(isinstance(w, int) and not isinstance(w, bool) for w in wires):
                raise ParseError("wires must be integers", path=f"{path}.wires")
            if any(w < 0 or w >= n for w in wires):
                raise ParseError(f"wire index out of range [0, {n})", path=f"{path}.wires")
            try:
                layer.append(Gate(kind, tuple(wires), p, k=gd.get("k"), mult=gd.get("mult", 1),
                                  mu=gd.get("mu"), block=gd.get("block")))
            except (InvalidGate, TypeError) as exc:
                raise ParseError(str(exc), path=path) from None
        layers.append(tuple(layer))
    try:
        return Circuit(p, n, tuple(layers), lnn, msq_in, msq_out)
    except InvalidGate as exc:
        raise ParseError(str(exc), path="$.layers") from None


def deserialize(data: bytes | str) -> Circuit:
    text = data.decode() if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, pos=exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", path="$")
    return circuit_from_dict(doc)
