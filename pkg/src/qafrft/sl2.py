"""SL2(Z_N) matrices, the rotation subgroup SO2(Z_N), and their decompositions.

Matrices act on row vectors: a phase-space point ``(q, p)`` moves to
``(q, p) @ A mod N``.  An :class:`SO2Element` ``(a, b)`` denotes the matrix
``[[a, -b], [b, a]]``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .errors import (
    DecompositionFailure,
    ModulusMismatch,
    NoFourierPower,
    SearchExhausted,
    UnsupportedModulus,
)
from .modnum import is_prime, mod_inv


@dataclass(frozen=True)
class Mat2Z:
    """Row-major 2x2 integer matrix with entries reduced mod ``N``."""

    a: int
    b: int
    c: int
    d: int
    N: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % self.N)

    @property
    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.N

    @property
    def is_sl2(self) -> bool:
        return self.det == 1 % self.N

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, self.b), (self.c, self.d)

    def act(self, r: int, s: int) -> tuple[int, int]:
        """Row-vector action ``(r, s) @ A``."""
        return (r * self.a + s * self.c) % self.N, (r * self.b + s * self.d) % self.N

    def __matmul__(self, other: Mat2Z) -> Mat2Z:
        return mat2_mul(self, other)

    def __pow__(self, e: int) -> Mat2Z:
        return mat2_pow(self, e)

    def __repr__(self):
        return f"Mat2Z([[{self.a}, {self.b}], [{self.c}, {self.d}]] mod {self.N})"


def identity(N: int) -> Mat2Z:
    return Mat2Z(1, 0, 0, 1, N)


def epsilon(N: int) -> Mat2Z:
    """The quarter-turn ``[[0, -1], [1, 0]]``; its Weil image is the DFT."""
    return Mat2Z(0, -1, 1, 0, N)


def R(x: int, N: int) -> Mat2Z:
    return Mat2Z(1, x, 0, 1, N)


def L(x: int, N: int) -> Mat2Z:
    return Mat2Z(1, 0, x, 1, N)


def D(y: int, N: int) -> Mat2Z:
    return Mat2Z(y, 0, 0, mod_inv(y, N), N)


def mat2_mul(A: Mat2Z, B: Mat2Z) -> Mat2Z:
    if A.N != B.N:
        raise ModulusMismatch(f"cannot multiply mod {A.N} by mod {B.N}")
    return Mat2Z(
        A.a * B.a + A.b * B.c,
        A.a * B.b + A.b * B.d,
        A.c * B.a + A.d * B.c,
        A.c * B.b + A.d * B.d,
        A.N,
    )


def mat2_pow(A: Mat2Z, e: int) -> Mat2Z:
    if e < 0:
        raise ValueError("negative exponent")
    result, base = identity(A.N), A
    while e:
        if e & 1:
            result = mat2_mul(result, base)
        base = mat2_mul(base, base)
        e >>= 1
    return result


def element_order(A: Mat2Z) -> int:
    """Period of ``A``: the least ``T >= 1`` with ``A**T = I``."""
    if not A.is_sl2:
        raise ValueError(f"{A} is not in SL2")
    I = identity(A.N)
    cur, T = A, 1
    # |SL2(Z_N)| < N**3 bounds every period
    while cur != I:
        cur = mat2_mul(cur, A)
        T += 1
        if T > A.N**3:
            raise RuntimeError(f"no period found for {A}")
    return T


@dataclass(frozen=True)
class SO2Element:
    """Rotation ``[[a, -b], [b, a]]`` with ``a**2 + b**2 = 1 mod N``."""

    a: int
    b: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % self.N)
        object.__setattr__(self, "b", self.b % self.N)
        if (self.a * self.a + self.b * self.b) % self.N != 1 % self.N:
            raise ValueError(f"({self.a}, {self.b}) is not on the circle mod {self.N}")

    @property
    def matrix(self) -> Mat2Z:
        return Mat2Z(self.a, -self.b, self.b, self.a, self.N)

    @classmethod
    def from_matrix(cls, A: Mat2Z) -> SO2Element:
        if A.a != A.d or (A.b + A.c) % A.N != 0:
            raise ValueError(f"{A} is not a rotation")
        return cls(A.a, A.c, A.N)

    def __mul__(self, other: SO2Element) -> SO2Element:
        return SO2Element.from_matrix(mat2_mul(self.matrix, other.matrix))

    def __pow__(self, e: int) -> SO2Element:
        return SO2Element.from_matrix(mat2_pow(self.matrix, e))

    def order(self) -> int:
        return element_order(self.matrix)


def so2_group_order(p: int, n: int = 1) -> int:
    """Order of SO2(Z_{p^n}) for an odd prime ``p``."""
    if p == 2:
        raise UnsupportedModulus("SO2 order formula needs an odd prime")
    if not is_prime(p):
        raise UnsupportedModulus(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be >= 1")
    if p % 4 == 3:
        return p ** (n - 1) * (p + 1)
    return p ** (n - 1) * (p - 1)


def so2_elements(N: int) -> list[SO2Element]:
    """Every solution of ``a**2 + b**2 = 1 mod N``, sorted by ``(a, b)``."""
    squares: dict[int, list[int]] = {}
    for a in range(N):
        squares.setdefault(a * a % N, []).append(a)
    out = []
    for b in range(N):
        for a in squares.get((1 - b * b) % N, ()):
            out.append((a, b))
    return [SO2Element(a, b, N) for a, b in sorted(out)]


def _check_odd_prime(p: int, n: int) -> None:
    if p == 2 or not is_prime(p):
        raise UnsupportedModulus(f"need an odd prime, got p={p}")
    if n < 1:
        raise ValueError("n must be >= 1")


def all_generators(p: int, n: int = 1) -> list[SO2Element]:
    """All generators of the cyclic group SO2(Z_{p^n}), sorted by ``(a, b)``."""
    _check_odd_prime(p, n)
    T = so2_group_order(p, n)
    return [g for g in so2_elements(p**n) if g.order() == T]


def find_generator(p: int, n: int = 1, strategy: str = "exhaustive",
                   seed: int | None = None, max_tries: int = 100_000) -> SO2Element:
    """Find a generator of SO2(Z_{p^n}).

    ``exhaustive`` returns the generator with the smallest ``(a, b)``;
    ``random`` samples ``b`` with :class:`random.Random` seeded by ``seed``
    and solves ``a**2 = 1 - b**2`` by scanning.
    """
    _check_odd_prime(p, n)
    N = p**n
    T = so2_group_order(p, n)
    if strategy == "exhaustive":
        for g in so2_elements(N):
            if g.order() == T:
                return g
        raise SearchExhausted(f"no generator of order {T} mod {N}")
    if strategy != "random":
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = random.Random(seed)
    for _ in range(max_tries):
        b = rng.randrange(N)
        target = (1 - b * b) % N
        roots = [a for a in range(N) if a * a % N == target]
        if not roots:
            continue
        g = SO2Element(rng.choice(roots), b, N)
        if g.order() == T:
            return g
    raise SearchExhausted(f"random search gave up after {max_tries} draws mod {N}")


@dataclass(frozen=True)
class FourierPower:
    m: int
    group_order: int


def fourier_power(g: SO2Element) -> FourierPower:
    """Least ``m >= 1`` with ``g**m = epsilon``.

    Scans powers: for a generator, the quarter power may land on
    ``epsilon**3`` instead of ``epsilon``.
    """
    T = g.order()
    eps = epsilon(g.N)
    cur = g.matrix
    for m in range(1, T + 1):
        if cur == eps:
            return FourierPower(m, T)
        cur = mat2_mul(cur, g.matrix)
    raise NoFourierPower(f"no power of ({g.a}, {g.b}) equals epsilon mod {g.N}")


@dataclass(frozen=True)
class Factor:
    kind: str  # "R", "D" or "eps"
    param: int | None = None

    def matrix(self, N: int) -> Mat2Z:
        if self.kind == "R":
            return R(self.param, N)
        if self.kind == "D":
            return D(self.param, N)
        if self.kind == "eps":
            return epsilon(N)
        raise ValueError(f"unknown factor kind {self.kind!r}")

    def __str__(self):
        return "eps" if self.kind == "eps" else f"{self.kind}({self.param})"


@dataclass(frozen=True)
class Decomposition:
    """Ordered factors whose product mod ``N`` is the source matrix."""

    factors: tuple[Factor, ...]
    N: int
    fallback_used: bool = False
    identity: bool = False
    source: Mat2Z | None = field(default=None, compare=False)

    def product(self) -> Mat2Z:
        out = identity(self.N)
        for f in self.factors:
            out = mat2_mul(out, f.matrix(self.N))
        return out

    @property
    def params(self) -> dict[str, int]:
        """``x, y, z`` of the leading ``R(x) D(y) eps R(z)`` block."""
        if self.identity:
            return {}
        f = self.factors
        return {"x": f[0].param, "y": f[1].param, "z": f[3].param}


def _rdeps(A: Mat2Z) -> tuple[Factor, ...]:
    ci = mod_inv(A.c, A.N)
    return (
        Factor("R", A.a * ci % A.N),
        Factor("D", ci),
        Factor("eps"),
        Factor("R", A.d * ci % A.N),
    )


def decompose_sl2(A: Mat2Z) -> Decomposition:
    """Write ``A = R(x) D(y) eps R(z)``, or ``(...) eps`` when ``c`` is a zero divisor."""
    if not A.is_sl2:
        raise ValueError(f"{A} is not in SL2")
    N = A.N
    if math.gcd(A.c, N) == 1:
        return Decomposition(_rdeps(A), N, source=A)
    if math.gcd(A.d, N) == 1:
        # A = [[-b, a], [-d, c]] @ eps, and -d is a unit
        shifted = Mat2Z(-A.b, A.a, -A.d, A.c, N)
        return Decomposition(_rdeps(shifted) + (Factor("eps"),), N, fallback_used=True,
                             source=A)
    raise DecompositionFailure(f"neither c nor d of {A} is a unit")


def decompose_so2(g: SO2Element) -> Decomposition:
    """Decompose a rotation; the identity maps to an empty factor list."""
    if g.a == 1 % g.N and g.b == 0:
        return Decomposition((), g.N, identity=True, source=g.matrix)
    return decompose_sl2(g.matrix)
