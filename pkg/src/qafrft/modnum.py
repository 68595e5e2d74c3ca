"""Exact modular arithmetic on Z_N with N = p**n."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EvenModulus, NotInvertible

# Dense N x N matrices put the practical ceiling far below this.
MAX_MODULUS = 2**31


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Modulus:
    """A prime-power modulus ``N = p**n``."""

    p: int
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"exponent must be >= 1, got {self.n}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.p**self.n > MAX_MODULUS:
            raise OverflowError(f"{self.p}**{self.n} exceeds {MAX_MODULUS}")

    @property
    def N(self) -> int:
        return self.p**self.n

    def __int__(self) -> int:
        return self.N


@dataclass(frozen=True)
class Residue:
    """An element of Z_N, always stored in ``[0, N)``."""

    value: int
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"modulus must be positive, got {self.N}")
        object.__setattr__(self, "value", self.value % self.N)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.N != self.N:
                raise ValueError(f"moduli differ: {self.N} vs {other.N}")
            return other.value
        return int(other)

    def __add__(self, other):
        return Residue(self.value + self._coerce(other), self.N)

    def __sub__(self, other):
        return Residue(self.value - self._coerce(other), self.N)

    def __mul__(self, other):
        return Residue(self.value * self._coerce(other), self.N)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.N)

    def inverse(self) -> Residue:
        return Residue(mod_inv(self.value, self.N), self.N)

    def __pow__(self, e: int):
        return Residue(mod_pow(self.value, e, self.N), self.N)


def mod_inv(x: int, N: int) -> int:
    """Inverse of ``x`` modulo ``N``; raises :class:`NotInvertible` with the gcd."""
    x %= N
    g = math.gcd(x, N)
    if g != 1:
        raise NotInvertible(x, N, g)
    # builtin pow runs the extended Euclidean algorithm
    return pow(x, -1, N)


def half_mod(N: int) -> int:
    """The residue acting as 1/2 mod an odd ``N``, i.e. ``(N + 1) // 2``."""
    if N % 2 == 0:
        raise EvenModulus(f"1/2 is undefined mod even N={N}")
    return (N + 1) // 2


def p_adic_split(lam: int, p: int) -> tuple[int, int]:
    """Factor ``lam = g * p**s`` with ``g`` coprime to ``p``."""
    if lam < 1:
        raise ValueError(f"expected a positive integer, got {lam}")
    s = 0
    while lam % p == 0:
        lam //= p
        s += 1
    return lam, s


def mod_pow(x: int, e: int, N: int) -> int:
    if e < 0:
        raise ValueError("negative exponent; invert first")
    return pow(x, e, N)


def ceil_log(lam: int, p: int) -> int:
    """Smallest ``k >= 0`` with ``p**k >= lam``."""
    k, q = 0, 1
    while q < lam:
        q *= p
        k += 1
    return k


def digits(x: int, p: int, n: int) -> list[int]:
    """Base-``p`` digits of ``x``, least significant first."""
    out = []
    for _ in range(n):
        x, d = divmod(x, p)
        out.append(d)
    return out


def from_digits(ds, p: int) -> int:
    x = 0
    for d in reversed(list(ds)):
        x = x * p + d
    return x
