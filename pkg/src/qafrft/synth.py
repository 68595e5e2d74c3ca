"""Circuit synthesis: QFT, modified QFT, modular multipliers, quadratic
diagonals and the arithmetic fractional Fourier transform.

Every block is built as a plain gate sequence and layered ASAP by
:meth:`Circuit.from_gates`.  Gates carry a ``block`` label so that the
metrics merge rule never fuses gates across block boundaries.
"""

from __future__ import annotations

import math

from .circuit import (
    SWAP,
    Circuit,
    Gate,
    H,
    Metrics,
    Perm,
    Rk1,
    Rk2,
    Sk,
    circuit_inverse,
    concat,
    upside_down,
)
from .errors import NonCoprimeB, UnsupportedModulus
from .modnum import ceil_log, half_mod, is_prime, mod_inv, p_adic_split
from .sl2 import SO2Element

INVERSE_MODES = ("none", "flip", "negate")
INVERSE_CHOICES = ("direct", "flip", "negate", "reciprocal")


def _check(p: int, n: int) -> None:
    if not is_prime(p):
        raise UnsupportedModulus(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be >= 1")


def _hadamard(w: int, p: int, lam: int, block: str) -> list[Gate]:
    out = [H(w, p, block)]
    mu = mod_inv(lam, p)
    if mu != 1:
        out.append(Perm(w, mu, p, block))
    return out


def _qft_gates(p: int, n: int, lam: int, lnn: bool, block: str) -> list[Gate]:
    gates: list[Gate] = []
    if lnn:
        # staircase: the top wire is processed and carried down by SWAPs
        for k in range(1, n + 1):
            gates += _hadamard(n - 1, p, lam, block)
            for s in range(1, n - k + 1):
                a, b = n - s, n - s - 1
                gates.append(Rk2(a, b, s + 1, p, lam, block))
                gates.append(SWAP(a, b, p, block))
        return gates
    for t in range(n - 1, -1, -1):
        gates += _hadamard(t, p, lam, block)
        for c in range(t - 1, -1, -1):
            gates.append(Rk2(c, t, t - c + 1, p, lam, block))
    return gates


def synth_qft(p: int, n: int, lnn: bool = True) -> Circuit:
    """QFT on ``n`` qudits: ``|x> -> sum_y omega**(x y) |y> / sqrt(p**n)``.

    The nearest-neighbour form keeps the natural dit order; the textbook form
    leaves the output reversed (``msq_out = 0``).
    """
    return synth_mqft(1, p, n, lnn)


def synth_mqft(lam: int, p: int, n: int, lnn: bool = True,
               inverse_mode: str = "none") -> Circuit:
    """Modified QFT with entries ``omega**(lam x y)``.

    ``inverse_mode``: ``flip`` reverses the circuit with inverted gates,
    ``negate`` builds the circuit for ``-lam`` (both realize the inverse).
    """
    _check(p, n)
    if inverse_mode not in INVERSE_MODES:
        raise ValueError(f"inverse_mode must be one of {INVERSE_MODES}")
    N = p**n
    mod_inv(lam, N)
    if inverse_mode == "negate":
        lam = -lam
    lam %= N
    gates = _qft_gates(p, n, lam, lnn, "qft" if lam == 1 else "mqft")
    c = Circuit.from_gates(p, n, gates, lnn, n - 1, n - 1 if lnn else 0)
    if inverse_mode == "flip":
        return circuit_inverse(c)
    return c


def synth_iqft(p: int, n: int, lnn: bool = True) -> Circuit:
    return _retag(circuit_inverse(synth_qft(p, n, lnn)), "iqft")


def _retag(c: Circuit, block: str) -> Circuit:
    return Circuit.from_gates(c.p, c.n, [g.tagged(block) for g in c.gates], c.lnn,
                              c.msq_in, c.msq_out)


def synth_modmulc(lam: int, p: int, n: int, inverse_choice: str = "direct",
                  lnn: bool = True) -> Circuit:
    """In-place multiplier ``|x> -> |lam x mod p**n>`` as mQFT then inverse QFT.

    The other choices build the inverse multiplier ``|x> -> |x / lam>``:
    ``flip`` and ``negate`` as QFT followed by the matching inverse mQFT,
    ``reciprocal`` as the direct circuit for ``lam**-1 mod p**n``.
    """
    _check(p, n)
    if inverse_choice not in INVERSE_CHOICES:
        raise ValueError(f"inverse_choice must be one of {INVERSE_CHOICES}")
    N = p**n
    lam_inv = mod_inv(lam, N)
    if inverse_choice == "direct":
        return concat(synth_mqft(lam, p, n, lnn), synth_iqft(p, n, lnn))
    if inverse_choice == "reciprocal":
        return synth_modmulc(lam_inv, p, n, "direct", lnn)
    inv = _retag(synth_mqft(lam, p, n, lnn, inverse_choice), "imqft")
    return concat(synth_qft(p, n, lnn), inv)


def _diag_pair(a: int, b: int, k: int, p: int, gamma: int, block: str) -> list[Gate]:
    if p == 2:
        # S_k = R_{k-1} on qubits, and S_1 is the identity
        return [] if k == 1 else [Rk2(a, b, k - 1, p, gamma, block)]
    return [Sk(a, b, k, p, gamma, block)]


def _diag_layers(p: int, n: int, gamma: int, block: str) -> list[Gate]:
    gates: list[Gate] = []
    for l in range(n):
        k = n - l
        if l % 2 == 0:
            gates.append(Rk1(l // 2, k, p, gamma, block))
        for j in range((l + 1) // 2):
            gates += _diag_pair(j, l - j, k, p, gamma, block)
    return gates


def _diag_lnn(p: int, n: int, gamma: int, block: str) -> list[Gate]:
    gates: list[Gate] = []
    # holder[w] is the dit index currently on wire w
    holder = list(range(n))
    if n == 1:
        return [Rk1(0, 1, p, gamma, block)]
    for i in range(n - 1):
        if i >= 1 and 2 * i <= n - 1:
            gates.append(Rk1(0, n - 2 * i, p, gamma, block))
        for w in range(n - 1 - i):
            j = holder[w + 1]
            if i + j <= n - 1:
                gates += _diag_pair(w, w + 1, n - i - j, p, gamma, block)
            gates.append(SWAP(w, w + 1, p, block))
            holder[w], holder[w + 1] = holder[w + 1], holder[w]
        if i == 0:
            gates.append(Rk1(n - 1, n, p, gamma, block))
    return gates


def synth_diag(gamma: int, p: int, n: int, orientation: str = "standard",
               lnn: bool = True) -> Circuit:
    """Quadratic diagonal ``|x> -> omega**(gamma x**2) |x>`` over ``p**n``.

    The nearest-neighbour form reverses the dit order (``standard``: natural
    in, reversed out); ``flipped`` is the same gates in reverse order, which
    is valid because every gate is diagonal up to the SWAP relabelling.
    """
    _check(p, n)
    if orientation not in ("standard", "flipped"):
        raise ValueError("orientation must be 'standard' or 'flipped'")
    gamma %= p**n
    block = "diag"
    if lnn:
        gates = _diag_lnn(p, n, gamma, block)
        msq_in, msq_out = n - 1, 0
    else:
        gates = _diag_layers(p, n, gamma, block)
        msq_in = msq_out = n - 1
    if orientation == "flipped":
        gates = gates[::-1]
        msq_in, msq_out = msq_out, msq_in
    return Circuit.from_gates(p, n, gates, lnn, msq_in, msq_out)


def qafrft_parameters(a: int, b: int, N: int) -> tuple[int, int]:
    """``(gamma, lam)`` with ``gamma = -a / (2 b)`` and ``lam = 1 / b`` mod ``N``."""
    if math.gcd(b % N, N) != 1:
        raise NonCoprimeB(f"b={b % N} is not a unit mod {N}; use the matrix-level fallback")
    lam = mod_inv(b, N)
    return -half_mod(N) * a * lam % N, lam


def synth_qafrft(a: int, b: int, p: int, n: int) -> Circuit:
    """Nearest-neighbour circuit for the AFrFT of the rotation ``(a, b)``.

    Blocks: chirp (flipped orientation), mQFT for ``1/b``, chirp (standard).
    Input and output both use the reversed dit layout, so no relabelling sits
    between blocks and ASAP layering pipelines them.
    """
    _check(p, n)
    if p == 2:
        raise UnsupportedModulus("the Weil construction needs an odd modulus")
    N = p**n
    g = SO2Element(a, b, N)
    gamma, lam = qafrft_parameters(g.a, g.b, N)
    d1 = _retag(synth_diag(gamma, p, n, "flipped"), "diag_in")
    mq = synth_mqft(lam, p, n, lnn=True)
    d2 = _retag(synth_diag(gamma, p, n, "standard"), "diag_out")
    return concat(d1, mq, d2)


def synth_qafrft_upside_down(a: int, b: int, p: int, n: int) -> Circuit:
    """The alternative block order: chirp (standard), mQFT reindexed
    upside down, chirp (flipped); natural layout on both ends."""
    _check(p, n)
    N = p**n
    g = SO2Element(a, b, N)
    gamma, lam = qafrft_parameters(g.a, g.b, N)
    d1 = _retag(synth_diag(gamma, p, n, "standard"), "diag_in")
    mq = upside_down(synth_mqft(lam, p, n, lnn=True))
    d2 = _retag(synth_diag(gamma, p, n, "flipped"), "diag_out")
    return concat(d1, mq, d2)


def synth_mulc(lam: int, p: int, n1: int) -> Circuit:
    """Multiplier ``|x> -> |lam x>`` for ``x < p**n1`` and any ``lam >= 1``.

    With ``lam = g p**s`` (``g`` a unit): a MODMULC_g on the low ``n1 + n2``
    wires, ``n2 = ceil(log_p lam)``, then a cyclic shift of every wire up by
    ``s`` positions built from SWAPs.  Wires above ``n1`` must start in
    ``|0>``.
    """
    _check(p, n1)
    if lam < 1:
        raise ValueError("lam must be a positive integer")
    if lam == 1:
        return Circuit(p, n1, (), True)
    g, s = p_adic_split(lam, p)
    n2 = ceil_log(lam, p)
    m = n1 + n2 + s
    gates: list[Gate] = []
    if g != 1:
        inner = synth_modmulc(g, p, n1 + n2)
        gates += inner.gates
    for _ in range(s):
        gates += [SWAP(w, w - 1, p, "shift") for w in range(m - 1, 0, -1)]
    return Circuit.from_gates(p, m, gates, True)


# kind -> (cost coefficient, depth coefficient)
_TABLE1 = {
    "qafrft": (6, 16),
    "mqft": (2, 8),
    "modmulc": (4, 16),
    "diag": (2, 8),
}


def elementary_estimates(kind: str, p: int, n: int) -> Metrics:
    """Elementary-gate cost, depth and width: ``(c p**2 n**2, d p**2 n, n)``."""
    if kind not in _TABLE1:
        raise ValueError(f"kind must be one of {sorted(_TABLE1)}")
    c, d = _TABLE1[kind]
    cost = c * p**2 * n**2
    depth = d * p**2 * n
    return Metrics(depth=depth, cost=cost, width=n, elementary_cost=cost,
                   elementary_depth=depth, depth_2q=0, approximate=True,
                   convention="elementary-estimate")
