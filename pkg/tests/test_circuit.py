from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qafrft.circuit import (
    SWAP,
    Circuit,
    Gate,
    H,
    Perm,
    Rk1,
    Rk2,
    Sk,
    circuit_inverse,
    circuit_unitary,
    deserialize,
    empty_circuit,
    gate_unitary,
    interactions,
    metrics,
    serialize,
    upside_down,
)
from qafrft.errors import DimensionCap, InvalidGate, ParseError
from qafrft.synth import synth_modmulc, synth_qafrft, synth_qft
from qafrft.weil import ExactPhaseMatrix, as_dense, identity_matrix, qft_matrix


def assert_unitary(M, tol=1e-12):
    D = as_dense(M)
    assert np.abs(D @ D.conj().T - np.eye(len(D))).max() <= tol


def test_hadamard_on_zero():
    v = as_dense(gate_unitary(H(0, 3)))[:, 0]
    assert np.allclose(v, np.ones(3) / np.sqrt(3))


def test_perm_doubling_mod_5():
    M = gate_unitary(Perm(0, 2, 5))
    images = {x: int(np.argmax(M.exps[:, x] >= 0)) for x in range(1, 5)}
    assert images == {1: 2, 2: 4, 3: 1, 4: 3}


def test_sk_is_rk_squared():
    R = gate_unitary(Rk2(0, 1, 2, 3, mult=4))
    S = gate_unitary(Sk(0, 1, 2, 3, mult=4))
    assert S == R @ R


def test_rk_two_symmetric_under_wire_swap():
    for k in (1, 2, 3):
        a = gate_unitary(Rk2(0, 1, k, 5, mult=7))
        b = gate_unitary(Rk2(1, 0, k, 5, mult=7))
        assert a == b
        # swapping local factors leaves the diagonal unchanged
        sw = gate_unitary(SWAP(0, 1, 5))
        assert sw @ a @ sw == a


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_gate_unitaries_unitary(p):
    gates = [H(0, p), Rk1(0, 2, p, 3), Rk2(0, 1, 3, p, 5), Sk(0, 1, 2, p, 1), SWAP(0, 1, p)]
    if p > 2:
        gates.append(Perm(0, p - 1, p))
    for g in gates:
        U = gate_unitary(g)
        assert U.kind in ("monomial", "uniform")
        assert_unitary(U)


@pytest.mark.parametrize("kwargs", [
    dict(kind="CNOT", wires=(0, 1), p=3),
    dict(kind="H", wires=(0, 1), p=3),
    dict(kind="SWAP", wires=(1, 1), p=3),
    dict(kind="Perm", wires=(0,), p=3, mu=3),
    dict(kind="Rk2", wires=(0, 1), p=3),
])
def test_invalid_gates(kwargs):
    with pytest.raises(InvalidGate):
        Gate(**kwargs)


def test_mult_reduced_mod_level():
    assert Rk2(0, 1, 2, 3, mult=-1).mult == 8


def test_layer_collisions_rejected():
    with pytest.raises(InvalidGate):
        Circuit(3, 2, ((H(0, 3), Perm(0, 2, 3)),))


def test_lnn_adjacency_enforced():
    with pytest.raises(InvalidGate):
        Circuit(3, 3, ((SWAP(0, 2, 3),),), lnn=True)
    Circuit(3, 3, ((SWAP(0, 2, 3),),), lnn=False)


def test_asap_layering():
    c = Circuit.from_gates(3, 3, [H(0, 3), H(2, 3), Rk2(0, 1, 2, 3), H(2, 3)])
    assert [len(layer) for layer in c.layers] == [2, 2]


def test_empty_circuit_is_identity():
    U = circuit_unitary(empty_circuit(3, 2))
    assert U == identity_matrix(9)


def test_single_hadamard_is_qft():
    c = Circuit(5, 1, ((H(0, 5),),))
    assert np.allclose(circuit_unitary(c), as_dense(qft_matrix(5)))


def test_qft_unitary_with_wire_order():
    c = synth_qft(3, 2, lnn=False)
    assert c.msq_out == 0
    assert np.allclose(circuit_unitary(c), as_dense(qft_matrix(9)), atol=1e-12)
    # physically the output dits come out reversed
    phys = circuit_unitary(c, physical=True)
    rev = [(x % 3) * 3 + x // 3 for x in range(9)]
    assert np.allclose(phys[rev], as_dense(qft_matrix(9)), atol=1e-12)


def test_hadamard_free_circuits_stay_exact():
    c = Circuit.from_gates(3, 2, [Rk1(0, 2, 3, 4), SWAP(0, 1, 3), Perm(1, 2, 3), Sk(0, 1, 1, 3)])
    U = circuit_unitary(c)
    assert isinstance(U, ExactPhaseMatrix) and U.kind == "monomial"
    ref = np.eye(9, dtype=complex)
    from qafrft.sim import run_batch
    assert np.allclose(U.to_dense(), run_batch(c, ref))


def test_dimension_cap(monkeypatch):
    monkeypatch.setenv("AFRFT_MAX_DIM", "20")
    with pytest.raises(DimensionCap):
        circuit_unitary(synth_qft(3, 3))


def test_inverse_undoes_qft():
    c = synth_qft(3, 2)
    prod = as_dense(circuit_unitary(circuit_inverse(c))) @ as_dense(circuit_unitary(c))
    assert np.abs(prod - np.eye(9)).max() <= 1e-9


def test_inverse_of_hadamard_pairs():
    c = Circuit.from_gates(5, 1, [H(0, 5), Perm(0, 2, 5)])
    inv = circuit_inverse(c)
    assert [(g.kind, g.mu) for g in inv.gates] == [("H", None), ("Perm", 3)]
    prod = as_dense(circuit_unitary(inv)) @ as_dense(circuit_unitary(c))
    assert np.allclose(prod, np.eye(5))


@pytest.mark.parametrize("c", [
    synth_qft(3, 3), synth_qft(5, 2, lnn=False), synth_modmulc(2, 3, 2), synth_qafrft(0, 1, 3, 3),
    empty_circuit(3, 2),
])
def test_double_inverse_is_identity_structure(c):
    assert circuit_inverse(circuit_inverse(c)) == c


def test_inverse_of_empty():
    assert circuit_inverse(empty_circuit(3, 1)) == empty_circuit(3, 1)


def test_upside_down_preserves_unitary():
    c = synth_qft(3, 2)
    flipped = upside_down(c)
    assert flipped.msq_in == 0 and flipped.msq_out == 0
    assert np.allclose(circuit_unitary(flipped), circuit_unitary(c))


@pytest.mark.parametrize("n", [2, 3, 6])
def test_qft_metrics(n):
    m = metrics(synth_qft(5, n))
    assert (m.depth, m.cost, m.width) == (2 * n - 1, n * (n + 1) // 2, n)
    assert m.approximate


def test_merge_rule_respects_blocks():
    a = Circuit.from_gates(3, 1, [H(0, 3, "x"), Perm(0, 2, 3, "x")])
    b = Circuit.from_gates(3, 1, [H(0, 3, "x"), Perm(0, 2, 3, "y")])
    assert len(interactions(a)) == 1
    assert len(interactions(b)) == 2


def test_metrics_depend_only_on_structure():
    c = synth_qafrft(3, -5, 11, 1)
    assert metrics(deserialize(serialize(c))) == metrics(c)


def test_serialize_round_trip():
    c = synth_qafrft(3, -5, 11, 1)
    data = serialize(c)
    back = deserialize(data)
    assert back == c
    assert serialize(back) == data
    doc = json.loads(data)
    assert set(doc) == {"p", "n", "lnn", "msq_in", "msq_out", "layers"}


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(1, 3), st.integers(1, 24))
def test_serialize_round_trip_property(p, n, lam):
    if lam % p == 0:
        lam += 1
    c = synth_modmulc(lam, p, n)
    assert deserialize(serialize(c)) == c


def test_canonical_order_within_layer():
    c = Circuit(3, 3, ((H(2, 3), H(0, 3), H(1, 3)),))
    assert [g.wires[0] for g in c.layers[0]] == [0, 1, 2]


@pytest.mark.parametrize("doc, where", [
    ({"p": 3, "n": 2, "layers": [[{"kind": "CZ", "wires": [0, 1]}]]}, "$.layers[0][0]"),
    ({"p": 3, "n": 2, "layers": [[{"kind": "H", "wires": [2]}]]}, "$.layers[0][0].wires"),
    ({"p": 3, "n": 2, "layers": [[{"kind": "H", "wires": [0]}, {"kind": "H", "wires": [0]}]]},
     "$.layers"),
    ({"p": 3, "layers": []}, "$"),
])
def test_parse_errors(doc, where):
    with pytest.raises(ParseError) as info:
        deserialize(json.dumps(doc))
    assert info.value.path == where


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        deserialize('{"p": 3,\n "n": }')
    assert info.value.line == 2
    assert info.value.pos is not None
