"""Finite quantum mechanics operators and Weil-representation unitaries.

Two backends coexist.  :class:`ExactPhaseMatrix` stores each entry as an
integer exponent of ``omega = exp(2 pi i / root)`` (or Zero) with a global
scale ``dim ** (-scale_pow / 2)``; it is closed under the products that
matter here (monomial @ monomial, monomial @ uniform, uniform @ monomial).
Anything else drops to a plain complex ``numpy`` array, the dense backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateRotation,
    DimensionMismatch,
    EvenModulus,
    NonInvertibleC,
    NotInvertible,
    NotProportional,
    ParseError,
)
from .modnum import half_mod, mod_inv
from .sl2 import Decomposition, Mat2Z, SO2Element

ZERO = -1


def default_tol(N: int) -> float:
    """Entrywise float tolerance; summation error grows linearly in ``N``."""
    return 1e-9 if N <= 2048 else 1e-12 * N


class ExactPhaseMatrix:
    """Square matrix whose non-zero entries are roots of unity times one scale."""

    __slots__ = ("root", "exps", "scale_pow")

    def __init__(self, root: int, exps, scale_pow: int = 0, mask=None):
        # without an explicit mask, negative cells are read as Zero
        exps = np.array(exps, dtype=np.int64)
        if exps.ndim != 2 or exps.shape[0] != exps.shape[1]:
            raise DimensionMismatch(f"expected a square grid, got shape {exps.shape}")
        mask = exps >= 0 if mask is None else np.asarray(mask, dtype=bool)
        exps = np.where(mask, exps % root, ZERO)
        self.root = int(root)
        self.exps = exps
        self.scale_pow = int(scale_pow)
        self.exps.flags.writeable = False

    @classmethod
    def full(cls, root: int, exps, scale_pow: int = 1) -> ExactPhaseMatrix:
        """Matrix with no Zero cells; ``exps`` may be any integers."""
        exps = np.asarray(exps, dtype=np.int64)
        return cls(root, exps, scale_pow, mask=np.ones(exps.shape, dtype=bool))

    @property
    def dim(self) -> int:
        return self.exps.shape[0]

    @property
    def mask(self) -> np.ndarray:
        return self.exps >= 0

    @property
    def kind(self) -> str:
        m = self.mask
        if self.scale_pow == 0 and (m.sum(0) == 1).all() and (m.sum(1) == 1).all():
            return "monomial"
        if self.scale_pow == 1 and m.all():
            return "uniform"
        return "general"

    @property
    def scale(self) -> float:
        return self.dim ** (-self.scale_pow / 2)

    def to_dense(self) -> np.ndarray:
        phases = np.exp(2j * np.pi * np.where(self.mask, self.exps, 0) / self.root)
        return np.where(self.mask, phases, 0) * self.scale

    # make numpy defer to __rmatmul__ instead of broadcasting over the object
    __array_ufunc__ = None

    def __array__(self, dtype=None, copy=None):
        out = self.to_dense()
        return out if dtype is None else out.astype(dtype)

    def lift(self, root: int) -> ExactPhaseMatrix:
        """Same matrix re-expressed over ``omega_root``; ``root`` must be a multiple."""
        if root % self.root:
            raise ValueError(f"cannot lift root {self.root} to {root}")
        f = root // self.root
        return ExactPhaseMatrix(root, np.where(self.mask, self.exps * f, ZERO),
                                self.scale_pow)

    def _common(self, other: ExactPhaseMatrix):
        r = math.lcm(self.root, other.root)
        return self.lift(r), other.lift(r)

    def __eq__(self, other):
        if not isinstance(other, ExactPhaseMatrix):
            return NotImplemented
        if self.dim != other.dim or self.scale_pow != other.scale_pow:
            return False
        a, b = self._common(other)
        return bool(np.array_equal(a.exps, b.exps))

    __hash__ = None

    def with_phase(self, e: int) -> ExactPhaseMatrix:
        """Multiply by ``omega**e``."""
        return ExactPhaseMatrix(self.root, self.exps + e, self.scale_pow, mask=self.mask)

    def adjoint(self) -> ExactPhaseMatrix:
        if self.kind == "general":
            raise ValueError("adjoint is only exact for monomial or uniform matrices")
        return ExactPhaseMatrix(self.root, -self.exps.T, self.scale_pow, mask=self.mask.T)

    def row_perm(self) -> np.ndarray:
        """For a monomial matrix: ``out[j]`` is the row holding column ``j``'s entry."""
        return np.argmax(self.mask, axis=0)

    def __matmul__(self, other):
        if isinstance(other, ExactPhaseMatrix):
            return exact_matmul(self, other)
        return self.to_dense() @ np.asarray(other)

    def __rmatmul__(self, other):
        return np.asarray(other) @ self.to_dense()

    def power(self, k: int):
        """``self**k`` by squaring; stays exact only for monomial matrices."""
        if k < 0:
            raise ValueError("negative power")
        out = identity_matrix(self.dim, self.root)
        base = self
        while k:
            if k & 1:
                out = out @ base
            k >>= 1
            if k:
                base = base @ base
            if not isinstance(base, ExactPhaseMatrix):
                return as_dense(out) @ np.linalg.matrix_power(base, k) if k else out
        return out

    def __repr__(self):
        return (f"ExactPhaseMatrix(dim={self.dim}, root={self.root}, "
                f"scale_pow={self.scale_pow}, kind={self.kind})")


def exact_matmul(A: ExactPhaseMatrix, B: ExactPhaseMatrix):
    """Exact product when the closure rules allow it, else a dense array."""
    if A.dim != B.dim:
        raise DimensionMismatch(f"{A.dim} vs {B.dim}")
    ka, kb = A.kind, B.kind
    if ka == "monomial" or kb == "monomial":
        A, B = A._common(B)
        n = A.dim
        out = np.full((n, n), ZERO, dtype=np.int64)
        if ka == "monomial" and kb == "monomial":
            # column j of B sits at row kb = perm_b[j]; A maps column kb to row perm_a[kb]
            pb = B.row_perm()
            pa = A.row_perm()
            cols = np.arange(n)
            rows = pa[pb]
            out[rows, cols] = A.exps[rows, pb] + B.exps[pb, cols]
            return ExactPhaseMatrix(A.root, out, 0)
        if ka == "monomial" and kb == "uniform":
            # row i of A has its entry in column col_a[i]
            col_a = np.argmax(A.mask, axis=1)
            out = A.exps[np.arange(n), col_a][:, None] + B.exps[col_a, :]
            return ExactPhaseMatrix(A.root, out, B.scale_pow)
        if ka == "uniform" and kb == "monomial":
            pb = B.row_perm()
            out = A.exps[:, pb] + B.exps[pb, np.arange(n)][None, :]
            return ExactPhaseMatrix(A.root, out, A.scale_pow)
    return A.to_dense() @ B.to_dense()


def as_dense(M) -> np.ndarray:
    if isinstance(M, ExactPhaseMatrix):
        return M.to_dense()
    return np.asarray(M, dtype=complex)


def identity_matrix(N: int, root: int | None = None) -> ExactPhaseMatrix:
    exps = np.full((N, N), ZERO, dtype=np.int64)
    np.fill_diagonal(exps, 0)
    return ExactPhaseMatrix(root or N, exps)


def diagonal(exps_1d, root: int) -> ExactPhaseMatrix:
    e = np.asarray(exps_1d, dtype=np.int64)
    grid = np.zeros((len(e), len(e)), dtype=np.int64)
    np.fill_diagonal(grid, e)
    return ExactPhaseMatrix(root, grid, mask=np.eye(len(e), dtype=bool))


def permutation(images, root: int) -> ExactPhaseMatrix:
    """Monomial matrix sending ``|x>`` to ``|images[x]>`` with unit phases."""
    images = np.asarray(images, dtype=np.int64)
    n = len(images)
    if sorted(images.tolist()) != list(range(n)):
        raise ValueError("images do not form a permutation")
    grid = np.full((n, n), ZERO, dtype=np.int64)
    grid[images, np.arange(n)] = 0
    return ExactPhaseMatrix(root, grid)


def _grid(N: int):
    k = np.arange(N, dtype=np.int64)
    return k[:, None], k[None, :]


def _require_odd(N: int) -> None:
    if N % 2 == 0:
        raise EvenModulus(f"N={N} must be odd")


def clock(N: int) -> ExactPhaseMatrix:
    """Position operator ``Q = diag(omega**k)``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    return diagonal(np.arange(N), N)


def shift(N: int) -> ExactPhaseMatrix:
    """Momentum-translation operator ``P|e_k> = |e_{k+1}>``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    return permutation((np.arange(N) + 1) % N, N)


def weyl_j(r: int, s: int, N: int) -> ExactPhaseMatrix:
    """Magnetic translation ``J_{r,s} = omega**(rs/2) P**r Q**s``."""
    _require_odd(N)
    r, s = r % N, s % N
    l = np.arange(N, dtype=np.int64)
    grid = np.full((N, N), ZERO, dtype=np.int64)
    grid[(l + r) % N, l] = (s * l + half_mod(N) * r * s) % N
    return ExactPhaseMatrix(N, grid)


def magnetic_phase(r: int, s: int, r2: int, s2: int, N: int) -> int:
    """Exponent ``e`` with ``J_{r,s} J_{r2,s2} = omega**e J_{r+r2, s+s2}``."""
    _require_odd(N)
    # (r, s) eps (r2, s2)^T = s*r2 - r*s2
    return half_mod(N) * (s * r2 - r * s2) % N


def u_generic(A: Mat2Z) -> ExactPhaseMatrix:
    """Weil image of ``A`` whose lower-left entry ``c`` is a unit."""
    N = A.N
    _require_odd(N)
    if math.gcd(A.c, N) != 1:
        raise NonInvertibleC(f"c={A.c} is not a unit mod {N}; use weil_unitary")
    k, l = _grid(N)
    e = -half_mod(N) * mod_inv(A.c, N) * (A.a * k * k - 2 * k * l + A.d * l * l)
    return ExactPhaseMatrix.full(N, e)


def u_mult(a: int, N: int) -> ExactPhaseMatrix:
    """Weil image of the dilation ``D(a)``: entries ``delta(a k, l)``, so ``|l> -> |a^-1 l>``."""
    ai = mod_inv(a, N)
    return permutation(ai * np.arange(N) % N, N)


def modmulc_matrix(lam: int, N: int) -> ExactPhaseMatrix:
    """In-place multiplier ``|x> -> |lam x mod N>``."""
    mod_inv(lam, N)
    return permutation(lam * np.arange(N) % N, N)


def diag_gamma(gamma: int, N: int) -> ExactPhaseMatrix:
    """Chirp ``diag(omega**(gamma k**2))``; valid for any ``N``."""
    k = np.arange(N, dtype=np.int64)
    return diagonal(gamma % N * k * k, N)


def u_diag(a: int, N: int) -> ExactPhaseMatrix:
    """Weil image of the translation ``R(a)``: ``diag(omega**(-a k**2 / 2))``."""
    _require_odd(N)
    return diag_gamma(-half_mod(N) * a, N)


def qft_matrix(N: int) -> ExactPhaseMatrix:
    k, l = _grid(N)
    return ExactPhaseMatrix.full(N, k * l)


def mqft_matrix(lam: int, N: int) -> ExactPhaseMatrix:
    """Modified QFT with entries ``omega**(lam k l) / sqrt(N)``."""
    mod_inv(lam, N)
    k, l = _grid(N)
    return ExactPhaseMatrix.full(N, lam % N * k * l)


def weil_unitary(A: Mat2Z):
    """``U(A)`` up to global phase, for any ``A`` in SL2(Z_N) with ``N`` odd.

    Exact when ``c`` is a unit or zero.  Otherwise uses ``A = [[-b, a], [-d, c]] eps``
    and returns the dense product ``U([[-b, a], [-d, c]]) @ F``.
    """
    if not A.is_sl2:
        raise ValueError(f"{A} is not in SL2")
    _require_odd(A.N)
    if math.gcd(A.c, A.N) == 1:
        return u_generic(A)
    if A.c == 0:
        # upper triangular: A = D(a) R(b / a), both images are monomial
        return u_mult(A.a, A.N) @ u_diag(A.b * mod_inv(A.a, A.N), A.N)
    shifted = Mat2Z(-A.b, A.a, -A.d, A.c, A.N)
    return u_generic(shifted).to_dense() @ qft_matrix(A.N).to_dense()


def afrft_matrix(a: int, b: int, N: int):
    """Arithmetic fractional Fourier transform for the rotation ``(a, b)``.

    Exponent ``-(a (k**2 + l**2) - 2 k l) / (2 b)`` when ``b`` is a unit;
    a dense fallback product when ``b`` is a non-zero zero divisor.
    """
    g = SO2Element(a, b, N)
    _require_odd(N)
    if g.b == 0:
        raise DegenerateRotation(f"b = 0 mod {N}: the rotation is +-I, use u_mult({g.a})")
    if math.gcd(g.b, N) != 1:
        return weil_unitary(g.matrix)
    k, l = _grid(N)
    e = -half_mod(N) * mod_inv(g.b, N) * (g.a * (k * k + l * l) - 2 * k * l)
    return ExactPhaseMatrix.full(N, e)


def factor_unitary(kind: str, param: int | None, N: int) -> ExactPhaseMatrix:
    if kind == "R":
        return u_diag(param, N)
    if kind == "D":
        return u_mult(param, N)
    if kind == "eps":
        return qft_matrix(N)
    raise ValueError(f"unknown factor kind {kind!r}")


def decomposition_unitary(dec: Decomposition):
    """Product of the factor unitaries, exact when the closure rules permit."""
    out = identity_matrix(dec.N)
    for f in dec.factors:
        out = out @ factor_unitary(f.kind, f.param, dec.N)
    return out


def phase_fit(M1, M2, tol: float = 1e-9) -> tuple[complex, float]:
    """Best unit ``mu`` with ``M1 ~ mu M2``, anchored on the first entry of
    ``M2`` above ``tol``; returns ``(mu, max residual)``."""
    A, B = as_dense(M1), as_dense(M2)
    if A.shape != B.shape:
        raise DimensionMismatch(f"{A.shape} vs {B.shape}")
    flat = np.abs(B).ravel()
    idx = np.flatnonzero(flat > tol)
    if len(idx) == 0:
        return 1.0 + 0j, float(np.abs(A).max(initial=0.0))
    i = idx[0]
    mu = A.ravel()[i] / B.ravel()[i]
    if abs(mu) > tol:
        mu_unit = mu / abs(mu)
    else:
        mu_unit = 1.0 + 0j
    resid = float(np.abs(A - mu_unit * B).max())
    return complex(mu_unit), resid


def global_phase_equal(M1, M2, tol: float = 1e-9) -> bool:
    """True iff ``M1 = mu M2`` entrywise within ``tol`` for some unit ``mu``."""
    _, resid = phase_fit(M1, M2, tol)
    return resid <= tol


def snap_monomial(M, root: int, tol: float = 1e-9):
    """Round a dense matrix to an exact monomial one when every entry is
    within ``tol`` of 0 or of a power of ``omega_root``; else return ``M``."""
    if isinstance(M, ExactPhaseMatrix):
        return M
    D = as_dense(M)
    mask = np.abs(D) > 0.5
    if not ((mask.sum(0) == 1).all() and (mask.sum(1) == 1).all()):
        return M
    ang = np.angle(np.where(mask, D, 1)) * root / (2 * np.pi)
    exps = np.rint(ang).astype(np.int64) % root
    snapped = ExactPhaseMatrix(root, np.where(mask, exps, ZERO))
    if np.abs(snapped.to_dense() - D).max() > tol:
        return M
    return snapped


@dataclass(frozen=True)
class CovarianceReport:
    max_deviation: float
    pairs: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def covariance_check(A: Mat2Z, tol: float = 1e-9) -> CovarianceReport:
    """Worst entrywise gap in ``U(A)^dag J_{r,s} U(A) = J_{(r,s) A}`` over all ``(r, s)``."""
    N = A.N
    U = weil_unitary(A)
    if isinstance(U, ExactPhaseMatrix) and U.kind == "monomial":
        # exact conjugation; a mismatch still reports the float gap
        Ud = U.adjoint()
        worst = 0.0
        for r in range(N):
            for s in range(N):
                lhs = Ud @ weyl_j(r, s, N) @ U
                rhs = weyl_j(*A.act(r, s), N)
                if lhs != rhs:
                    worst = max(worst, float(np.abs(lhs.to_dense() - rhs.to_dense()).max()))
        return CovarianceReport(worst, N * N, tol)
    U = as_dense(U)
    Ud = U.conj().T
    worst = 0.0
    for r in range(N):
        for s in range(N):
            lhs = Ud @ weyl_j(r, s, N).to_dense() @ U
            rhs = weyl_j(*A.act(r, s), N).to_dense()
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return CovarianceReport(worst, N * N, tol)


def projective_check(A: Mat2Z, B: Mat2Z, tol: float = 1e-9) -> complex:
    """Unit ``mu`` with ``U(A) U(B) = mu U(AB)``; raises :class:`NotProportional`."""
    left = as_dense(weil_unitary(A)) @ as_dense(weil_unitary(B))
    right = weil_unitary(A @ B)
    mu, resid = phase_fit(left, right, tol)
    if resid > tol:
        raise NotProportional(f"U(A)U(B) is not a multiple of U(AB): {resid:.3g}", resid)
    return mu


def matrix_to_json(M) -> dict:
    if isinstance(M, ExactPhaseMatrix):
        doc = {
            "backend": "exact",
            "N": M.dim,
            "scale_pow": M.scale_pow,
            "entries": [[None if e < 0 else int(e) for e in row] for row in M.exps],
        }
        if M.root != M.dim:
            doc["root"] = M.root
        return doc
    D = as_dense(M)
    return {
        "backend": "dense",
        "N": D.shape[0],
        "entries": [[float(z.real), float(z.imag)] for z in D.ravel()],
    }


def matrix_from_json(doc: dict):
    try:
        backend = doc["backend"]
        N = int(doc["N"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix document: {exc}") from None
    if backend == "exact":
        grid = [[ZERO if e is None else int(e) for e in row] for row in entries]
        if len(grid) != N or any(len(row) != N for row in grid):
            raise ParseError(f"exact grid is not {N}x{N}", path="entries")
        return ExactPhaseMatrix(int(doc.get("root", N)), grid, int(doc.get("scale_pow", 0)))
    if backend == "dense":
        arr = np.asarray(entries, dtype=float)
        if arr.shape == (N, N, 2):
            arr = arr.reshape(N * N, 2)
        if arr.shape != (N * N, 2):
            raise ParseError(f"dense entries have shape {arr.shape}", path="entries")
        return (arr[:, 0] + 1j * arr[:, 1]).reshape(N, N)
    raise ParseError(f"unknown backend {backend!r}", path="backend")
