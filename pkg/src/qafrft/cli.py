"""Command-line interface.

stdout carries exactly one JSON document per invocation; diagnostics go to
stderr.  Exit codes: 0 success, 1 a verification failed, 2 usage or library
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import synth
from .circuit import circuit_to_dict, deserialize, max_dim, metrics
from .errors import DimensionCap, QafrftError
from .modnum import Modulus
from .sl2 import Mat2Z, SO2Element, decompose_sl2, decompose_so2, find_generator, fourier_power
from .sl2 import so2_group_order
from .sim import basis_state, run
from .verify import SUITES, run_suite
from .weil import (
    afrft_matrix,
    as_dense,
    diag_gamma,
    matrix_to_json,
    modmulc_matrix,
    mqft_matrix,
    qft_matrix,
    u_generic,
    weyl_j,
)

MATRIX_KINDS = ("afrft", "qft", "mqft", "modmulc", "diag", "weyl-j", "u-generic")
SYNTH_KINDS = ("qft", "mqft", "modmulc", "diag", "qafrft", "mulc")
METRIC_KINDS = ("qft", "mqft", "modmulc", "diag", "qafrft")


class UsageError(Exception):
    pass


def _modulus(args) -> int:
    try:
        N = Modulus(args.p, args.n).N
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from None
    _cap(N)
    return N


def _cap(dim: int) -> None:
    cap = max_dim()
    if dim > cap:
        raise DimensionCap(f"dimension {dim} exceeds AFRFT_MAX_DIM={cap}")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing --{', --'.join(m.replace('_', '-') for m in missing)}")
    return [getattr(args, n) for n in names]


def cmd_group(args) -> tuple[dict, int]:
    N = _modulus(args)
    if args.action == "order":
        return {"order": so2_group_order(args.p, args.n)}, 0
    if args.action == "generator":
        g = find_generator(args.p, args.n, args.strategy, args.seed)
        return {"a": g.a, "b": g.b, "order": so2_group_order(args.p, args.n)}, 0
    if args.action == "fourier-power":
        if args.a is None and args.b is None:
            g = find_generator(args.p, args.n)
        else:
            g = SO2Element(*_need(args, "a", "b"), N)
        fp = fourier_power(g)
        return {"a": g.a, "b": g.b, "m": fp.m, "group_order": fp.group_order}, 0
    # decompose
    if args.c is not None or args.d is not None:
        a, b, c, d = _need(args, "a", "b", "c", "d")
        dec = decompose_sl2(Mat2Z(a, b, c, d, N))
    else:
        dec = decompose_so2(SO2Element(*_need(args, "a", "b"), N))
    return {
        "factors": [str(f) for f in dec.factors],
        "params": dec.params,
        "fallback_used": dec.fallback_used,
        "identity": dec.identity,
    }, 0


def cmd_matrix(args) -> tuple[dict, int]:
    N = _modulus(args)
    k = args.kind
    if k == "afrft":
        M = afrft_matrix(*_need(args, "a", "b"), N)
    elif k == "qft":
        M = qft_matrix(N)
    elif k == "mqft":
        M = mqft_matrix(_need(args, "lam")[0], N)
    elif k == "modmulc":
        M = modmulc_matrix(_need(args, "lam")[0], N)
    elif k == "diag":
        M = diag_gamma(_need(args, "gamma")[0], N)
    elif k == "weyl-j":
        M = weyl_j(*_need(args, "r", "s"), N)
    else:
        a, b, c, d = _need(args, "a", "b", "c", "d")
        A = Mat2Z(a, b, c, d, N)
        if not A.is_sl2:
            raise UsageError(f"{A} has determinant {A.det}, not 1")
        M = u_generic(A)
    if args.backend == "dense":
        M = as_dense(M)
    return matrix_to_json(M), 0


def _build(args):
    k = args.kind
    p, n = args.p, args.n
    if k == "mulc":
        lam = _need(args, "lam")[0]
        if lam < 1:
            raise UsageError("--lambda must be a positive integer for mulc")
        _modulus(args)
        return synth.synth_mulc(lam, p, n)
    N = _modulus(args)
    if k == "qft":
        return synth.synth_qft(p, n, args.lnn)
    if k == "mqft":
        mode = args.inverse_mode or "none"
        if mode not in synth.INVERSE_MODES:
            raise UsageError(f"--inverse-mode for mqft must be one of {synth.INVERSE_MODES}")
        return synth.synth_mqft(_need(args, "lam")[0] % N, p, n, args.lnn, mode)
    if k == "modmulc":
        mode = args.inverse_mode or "direct"
        if mode not in synth.INVERSE_CHOICES:
            raise UsageError(f"--inverse-mode for modmulc must be one of {synth.INVERSE_CHOICES}")
        return synth.synth_modmulc(_need(args, "lam")[0] % N, p, n, mode, args.lnn)
    if k == "diag":
        return synth.synth_diag(_need(args, "gamma")[0], p, n, args.orientation, args.lnn)
    a, b = _need(args, "a", "b")
    return synth.synth_qafrft(a, b, p, n)


def cmd_synth(args) -> tuple[dict, int]:
    c = _build(args)
    doc = circuit_to_dict(c)
    if args.out:
        Path(args.out).write_text(json.dumps(doc, separators=(",", ":")))
        return {"out": args.out, "p": c.p, "n": c.n, "layers": len(c.layers)}, 0
    return doc, 0


def _read_circuit(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return deserialize(text)


def cmd_simulate(args) -> tuple[list, int]:
    c = _read_circuit(args.circuit)
    _cap(c.dim)
    kind, _, val = args.state.partition(":")
    if kind != "basis" or not val.lstrip("-").isdigit():
        raise UsageError(f"--state must look like basis:K, got {args.state!r}")
    psi = run(c, basis_state(c.p, c.n, int(val)), physical=args.physical)
    return [[float(z.real), float(z.imag)] for z in psi.amplitudes], 0


def cmd_verify(args) -> tuple[dict, int]:
    if args.p is not None:
        _modulus(argparse.Namespace(p=args.p, n=args.n or 1))
    report = run_suite(args.suite, args.p, args.n, args.tol)
    return report, 1 if report["failures"] else 0


def cmd_metrics(args) -> tuple[dict, int]:
    if args.circuit:
        c = _read_circuit(args.circuit)
        return {"circuit": metrics(c).to_dict()}, 0
    _modulus(args)
    kinds = METRIC_KINDS if args.kind == "all" else (args.kind,)
    out = {}
    for kind in kinds:
        if kind == "qafrft" and args.p == 2:
            continue
        p, n = args.p, args.n
        c = {
            "qft": lambda: synth.synth_qft(p, n),
            "mqft": lambda: synth.synth_mqft(1 if p == 2 else 2, p, n),
            "modmulc": lambda: synth.synth_modmulc(1 if p == 2 else 2, p, n),
            "diag": lambda: synth.synth_diag(1, p, n),
            "qafrft": lambda: synth.synth_qafrft(0, 1, p, n),
        }[kind]()
        est = synth.elementary_estimates("mqft" if kind == "qft" else kind, p, n)
        out[kind] = {
            "circuit": metrics(c).to_dict(),
            "table1": {"cost": est.cost, "depth": est.depth, "width": est.width},
        }
    return out, 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qafrft", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def modulus(sp, required=True):
        sp.add_argument("--p", type=int, required=required, help="prime qudit dimension")
        sp.add_argument("--n", type=int, default=None if not required else 1,
                        help="number of qudits (default 1)")

    g = sub.add_parser("group", help="SO2 group queries")
    g.add_argument("action", choices=("order", "generator", "decompose", "fourier-power"))
    modulus(g)
    for name in "abcd":
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--strategy", choices=("exhaustive", "random"), default="exhaustive")
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_group)

    m = sub.add_parser("matrix", help="emit a matrix")
    m.add_argument("kind", choices=MATRIX_KINDS)
    modulus(m)
    for name in "abcdrs":
        m.add_argument(f"--{name}", type=int)
    m.add_argument("--lambda", dest="lam", type=int)
    m.add_argument("--gamma", type=int)
    m.add_argument("--backend", choices=("exact", "dense"), default="exact")
    m.set_defaults(func=cmd_matrix)

    s = sub.add_parser("synth", help="emit a circuit")
    s.add_argument("kind", choices=SYNTH_KINDS)
    modulus(s)
    s.add_argument("--a", type=int)
    s.add_argument("--b", type=int)
    s.add_argument("--lambda", dest="lam", type=int)
    s.add_argument("--gamma", type=int)
    s.add_argument("--lnn", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--inverse-mode", default=None)
    s.add_argument("--orientation", choices=("standard", "flipped"), default="standard")
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("simulate", help="run a circuit on a basis state")
    r.add_argument("--circuit", required=True, help="circuit JSON path or - for stdin")
    r.add_argument("--state", default="basis:0")
    r.add_argument("--physical", action="store_true", help="ignore the dit-layout markers")
    r.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run self-check suites")
    v.add_argument("suite", choices=SUITES + ("all",))
    modulus(v, required=False)
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("metrics", help="depth and cost tables")
    t.add_argument("--kind", choices=METRIC_KINDS + ("all",), default="all")
    t.add_argument("--circuit")
    t.add_argument("--p", type=int, default=3)
    t.add_argument("--n", type=int, default=4)
    t.set_defaults(func=cmd_metrics)
    return ap


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload) + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        _emit({"error": "UsageError", "message": str(exc)})
        return 2
    except (QafrftError, ValueError, OSError) as exc:
        name = type(exc).__name__
        print(f"{name}: {exc}", file=sys.stderr)
        _emit({"error": name, "message": str(exc)})
        return 2
    _emit(payload)
    if code == 1:
        print(f"{len(payload['failures'])} verification failure(s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
