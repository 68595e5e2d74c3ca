"""Self-check suites over the library's algebraic identities.

Each suite yields ``Case`` records; :func:`run_suite` folds them into the
report ``{suite, cases, failures, max_residual}``.  Exact comparisons report
a residual of 0 or 1 (integer mismatch); float comparisons report the
entrywise deviation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterator

import numpy as np

from . import synth
from .circuit import circuit_unitary, metrics
from .errors import UnsupportedModulus
from .modnum import mod_inv
from .sl2 import Mat2Z, epsilon, find_generator, fourier_power, identity
from .weil import (
    ZERO,
    ExactPhaseMatrix,
    afrft_matrix,
    as_dense,
    clock,
    covariance_check,
    diag_gamma,
    identity_matrix,
    magnetic_phase,
    modmulc_matrix,
    mqft_matrix,
    phase_fit,
    qft_matrix,
    shift,
    snap_monomial,
    weil_unitary,
    weyl_j,
)

SUITES = ("appendix-a", "covariance", "magnetic", "roots", "circuits", "metrics")


@dataclass(frozen=True)
class Case:
    id: str
    passed: bool
    residual: float = 0.0


def load_golden() -> dict[str, ExactPhaseMatrix]:
    """Reference 11x11 exponent grids (AFrFT, chirp, multiplier, QFT, mQFT)."""
    doc = json.loads(resources.files("qafrft.data").joinpath("golden_n11.json").read_text())
    out = {}
    for name, grid in doc["grids"].items():
        exps = [[ZERO if e is None else e for e in row] for row in grid]
        uniform = all(e is not None for row in grid for e in row)
        out[name] = ExactPhaseMatrix(doc["N"], exps, 1 if uniform else 0)
    return out


def _exact(case_id: str, got, want) -> Case:
    ok = isinstance(got, ExactPhaseMatrix) and got == want
    return Case(case_id, ok, 0.0 if ok else 1.0)


def _close(case_id: str, got, want, tol: float, up_to_phase: bool = True) -> Case:
    if up_to_phase:
        _, r = phase_fit(got, want, tol)
    else:
        r = float(np.abs(as_dense(got) - as_dense(want)).max())
    return Case(case_id, r <= tol, r)


def suite_appendix_a(p: int = 11, n: int = 1, tol: float = 1e-9) -> Iterator[Case]:
    gold = load_golden()
    N = 11
    yield _exact("afrft(3,-5)", afrft_matrix(3, -5, N), gold["afrft_3_m5"])
    yield _exact("diag(8)", diag_gamma(8, N), gold["diag_8"])
    yield _exact("modmulc(6)", modmulc_matrix(6, N), gold["modmulc_6"])
    yield _exact("qft", qft_matrix(N), gold["qft"])
    yield _exact("mqft(2)", mqft_matrix(2, N), gold["mqft_2"])


def random_sl2(N: int, rng: random.Random, unit_c: bool = True) -> Mat2Z:
    """Uniform-ish SL2 sample; ``unit_c=False`` forces ``c`` into ``p Z_N``."""
    while True:
        if unit_c:
            c = rng.randrange(1, N)
            a, d = rng.randrange(N), rng.randrange(N)
            try:
                b = (a * d - 1) * mod_inv(c, N) % N
            except ValueError:
                continue
        else:
            divisors = [q for q in range(2, N + 1) if N % q == 0]
            c = divisors[0] * rng.randrange(N // divisors[0]) % N
            b, d = rng.randrange(N), rng.randrange(N)
            try:
                a = (1 + b * c) * mod_inv(d, N) % N
            except ValueError:
                continue
        A = Mat2Z(a, b, c, d, N)
        if A.is_sl2:
            return A


def suite_covariance(p: int = 11, n: int = 1, tol: float = 1e-9,
                     samples: int = 20, seed: int = 0) -> Iterator[Case]:
    N = p**n
    rng = random.Random(seed)
    mats = [("I", identity(N)), ("eps", epsilon(N))]
    mats += [(f"random[{i}]", random_sl2(N, rng)) for i in range(samples)]
    mats += [(f"fallback[{i}]", random_sl2(N, rng, unit_c=False)) for i in range(3)]
    for name, A in mats:
        rep = covariance_check(A, tol)
        yield Case(f"N={N} {name} {A.rows()}", rep.passed, rep.max_deviation)


def suite_magnetic(p: int = 11, n: int = 1, tol: float = 1e-9) -> Iterator[Case]:
    N = p**n
    I = identity_matrix(N)
    Q, P = clock(N), shift(N)
    yield _exact("QP = w PQ", Q @ P, (P @ Q).with_phase(1))
    F = qft_matrix(N)
    yield _exact("QF = FP", Q @ F, F @ P)
    rng = random.Random(1)
    for r in range(N):
        for s in range(N):
            J = weyl_j(r, s, N)
            yield _exact(f"J({r},{s})^N = I", J.power(N), I)
            yield _exact(f"J({r},{s})^dag", J.adjoint(), weyl_j(-r, -s, N))
            k = rng.randrange(2, N + 2)
            yield _exact(f"J({r},{s})^{k}", J.power(k), weyl_j(k * r, k * s, N))
            r2, s2 = rng.randrange(N), rng.randrange(N)
            want = weyl_j(r + r2, s + s2, N).with_phase(magnetic_phase(r, s, r2, s2, N))
            yield _exact(f"J({r},{s})J({r2},{s2})", J @ weyl_j(r2, s2, N), want)


def suite_roots(p: int = 11, n: int = 1, tol: float = 1e-9) -> Iterator[Case]:
    N = p**n
    gens = [find_generator(p, n)]
    if N == 11:
        from .sl2 import SO2Element
        gens.insert(0, SO2Element(3, -5, 11))
    for g in gens:
        m = fourier_power(g).m
        U = as_dense(weil_unitary(g.matrix))
        Um = np.linalg.matrix_power(U, m)
        yield _close(f"U({g.a},{g.b})^{m} ~ F", Um, qft_matrix(N), tol)
        U4m = np.linalg.matrix_power(Um, 4)
        yield _close(f"U({g.a},{g.b})^{4 * m} = I", U4m, np.eye(N), tol, up_to_phase=False)


def suite_circuits(p: int = 3, n: int = 2, tol: float = 1e-9) -> Iterator[Case]:
    N = p**n
    for lnn in (False, True):
        yield _close(f"qft lnn={lnn}", circuit_unitary(synth.synth_qft(p, n, lnn)),
                     qft_matrix(N), tol, up_to_phase=False)
    units = [lam for lam in range(1, N) if lam % p][:4]
    for lam in units:
        yield _close(f"mqft({lam})", circuit_unitary(synth.synth_mqft(lam, p, n)),
                     mqft_matrix(lam, N), tol, up_to_phase=False)
        for choice in synth.INVERSE_CHOICES:
            want = lam if choice == "direct" else mod_inv(lam, N)
            got = snap_monomial(circuit_unitary(synth.synth_modmulc(lam, p, n, choice)), N)
            yield _exact(f"modmulc({lam}) {choice}", got, modmulc_matrix(want, N))
    for gamma in sorted({0, 1, N - 1, N // 2}):
        for orient in ("standard", "flipped"):
            got = circuit_unitary(synth.synth_diag(gamma, p, n, orient))
            yield _exact(f"diag({gamma}) {orient}", got, diag_gamma(gamma, N))
    if p != 2:
        try:
            g = find_generator(p, n)
        except UnsupportedModulus:
            return
        if g.b % p:
            yield _close(f"qafrft({g.a},{g.b})", circuit_unitary(synth.synth_qafrft(g.a, g.b, p, n)),
                         afrft_matrix(g.a, g.b, N), tol)


def lnn_formulas(n: int) -> dict[str, tuple[int, int]]:
    """Depth and cost this library guarantees for its nearest-neighbour blocks.

    Cost counts merged interactions; the chirp depth counts layers that hold
    a two-qudit interaction.  The multiplier is two QFT-sized blocks in
    sequence, so its depth is ``2 (2n - 1)``.
    """
    return {
        "qft": (2 * n - 1, n * (n + 1) // 2),
        "modmulc": (2 * (2 * n - 1), n * (n + 1)),
        "diag": (max(2 * n - 3, 1), -(-n * n // 2)),
    }


def suite_metrics(p: int = 3, n: int = 8, tol: float = 1e-9) -> Iterator[Case]:
    for m in range(2, max(n, 2) + 1):
        want = lnn_formulas(m)
        got = {
            "qft": metrics(synth.synth_qft(p, m)),
            "modmulc": metrics(synth.synth_modmulc(1 if p == 2 else 2, p, m)),
            "diag": metrics(synth.synth_diag(1, p, m)),
        }
        for kind, (depth, cost) in want.items():
            mt = got[kind]
            d = mt.depth_2q if kind == "diag" else mt.depth
            yield Case(f"{kind} n={m} depth {d}/{depth} cost {mt.cost}/{cost}",
                       d == depth and mt.cost == cost)
        if p != 2:
            qa = metrics(synth.synth_qafrft(0, 1, p, m))
            yield Case(f"qafrft n={m} depth {qa.depth} <= {4 * m + 3}", qa.depth <= 4 * m + 3)


_SUITES: dict[str, Callable[..., Iterator[Case]]] = {
    "appendix-a": suite_appendix_a,
    "covariance": suite_covariance,
    "magnetic": suite_magnetic,
    "roots": suite_roots,
    "circuits": suite_circuits,
    "metrics": suite_metrics,
}


def run_suite(name: str, p: int | None = None, n: int | None = None,
              tol: float = 1e-9) -> dict:
    if name == "all":
        names = list(SUITES)
    elif name in _SUITES:
        names = [name]
    else:
        raise KeyError(name)
    cases: list[Case] = []
    for s in names:
        kw = {"tol": tol}
        if p is not None:
            kw["p"] = p
        if n is not None:
            kw["n"] = n
        if s == "roots" and kw.get("p") == 2:
            continue
        if s in ("covariance", "magnetic") and kw.get("p") == 2:
            continue
        prefix = f"{s}: " if name == "all" else ""
        cases += [Case(prefix + c.id, c.passed, c.residual) for c in _SUITES[s](**kw)]
    cases.sort(key=lambda c: c.id)
    return {
        "suite": name,
        "cases": len(cases),
        "failures": [c.id for c in cases if not c.passed],
        "max_residual": max((c.residual for c in cases), default=0.0),
    }
