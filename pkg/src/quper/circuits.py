"""Parametrized permutation ansatze: construction, evaluation, synthesis.

Gate set: RX(theta) = exp(-i theta X / 2); PHASE(theta) = diag(1, e^{i theta})
(internal to PCX); CX; PCX(c -> t; theta) = [PHASE(theta/2) on c] then
[controlled-RX(theta) from c to t], which equals CX exactly at theta = pi
and the identity at theta = 0; PSWAP(a, b; phi) = CX(b -> a), PCX(a -> b; phi),
CX(b -> a).

The circuit unitary is the product of gate matrices applied in list order
(first gate acts first on the state).  Basis index convention: qubit 0 is the
most-significant bit of the computational-basis index.

RX(pi) = -iX up to the PCX phase correction; the global phase never reaches
permutations or DSMs.  The RX layer of the LX ansatz is placed first in gate
order; since the X-gate subgroup is normal in the affine group, the spanned
permutation set is the same as with the layer last.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .gf2 import (
    AffineMap,
    Transvection,
    borel_subword,
    bruhat_decompose,
    longest_element_word,
    weyl_subword_mask,
)
from .gf2 import Permutation

DEFAULT_MAX_QUBITS = 14
MAX_QUBITS_ENV = "QUPER_MAX_QUBITS"

ANSATZ_KINDS = ("XLayer", "Borel", "Weyl", "Bruhat", "LX", "SEL")


class QubitBudgetError(RuntimeError):
    """Dense evaluation would exceed the configured qubit guard."""


def max_dense_qubits() -> int:
    env = os.environ.get(MAX_QUBITS_ENV)
    return int(env) if env else DEFAULT_MAX_QUBITS


@dataclass(frozen=True)
class Gate:
    """One gate; qubits = (target,) or (control, target); slot None = fixed."""

    kind: str
    qubits: tuple[int, ...]
    slot: int | None

    def __post_init__(self):
        if self.kind not in ("RX", "PCX", "PSWAP", "CX"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 1 if self.kind == "RX" else 2
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s)")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError("two-qubit gate needs distinct qubits")
        if (self.slot is None) != (self.kind == "CX"):
            raise ValueError("CX is fixed; other kinds need a slot")


@dataclass(frozen=True)
class Circuit:
    q: int
    gates: tuple[Gate, ...]
    param_count: int
    kind: str = "Custom"

    def __post_init__(self):
        for g in self.gates:
            if any(t < 0 or t >= self.q for t in g.qubits):
                raise ValueError("qubit index out of range")
            if g.slot is not None and not 0 <= g.slot < self.param_count:
                raise ValueError("parameter slot out of range")


@dataclass(frozen=True)
class CircuitStats:
    param_count: int
    depth: int
    two_qubit_gate_count: int


def _xlayer_gates(qubits: list[int], slot0: int) -> list[Gate]:
    return [Gate("RX", (t,), slot0 + i) for i, t in enumerate(qubits)]


def _borel_pairs(q: int) -> list[tuple[int, int]]:
    """Ascending lexicographic (j, k), j < k: the universal word right-to-left."""
    return [(j, k) for j in range(q) for k in range(j + 1, q)]


def _borel_gates(q: int, slot0: int) -> list[Gate]:
    # Transvection T_(jk) <-> cx controlled by qubit k acting on qubit j.
    return [
        Gate("PCX", (k, j), slot0 + i) for i, (j, k) in enumerate(_borel_pairs(q))
    ]


def _weyl_gates(q: int, slot0: int) -> list[Gate]:
    # The longest-element word read right-to-left gives the gate order; the
    # adjacent transposition sigma_i acts on qubits (i-1, i).
    word = list(reversed(longest_element_word(q)))
    return [Gate("PSWAP", (i - 1, i), slot0 + g) for g, i in enumerate(word)]


def build_ansatz(kind: str, q: int, sel_layers: int | None = None) -> Circuit:
    if kind not in ANSATZ_KINDS:
        raise ValueError(f"unknown ansatz kind {kind!r}")
    if q < 1 or (kind in ("Borel", "Weyl", "Bruhat") and q < 2):
        raise ValueError(f"q={q} too small for {kind}")
    pairs = q * (q - 1) // 2
    if kind == "XLayer":
        gates = _xlayer_gates(list(range(q)), 0)
        ell = q
    elif kind == "Borel":
        gates = _borel_gates(q, 0)
        ell = pairs
    elif kind == "Weyl":
        gates = _weyl_gates(q, 0)
        ell = pairs
    elif kind == "Bruhat":
        gates = (
            _borel_gates(q, 0)
            + _weyl_gates(q, pairs)
            + _borel_gates(q, 2 * pairs)
        )
        ell = 3 * pairs
    elif kind == "LX":
        gates = _xlayer_gates(list(range(q)), 0)
        gates += (
            _borel_gates(q, q)
            + _weyl_gates(q, q + pairs)
            + _borel_gates(q, q + 2 * pairs)
        )
        ell = q + 3 * pairs
    else:  # SEL
        if q < 2:
            raise ValueError("SEL needs q >= 2")
        if sel_layers is None:
            # Match the LX parameter count as closely as a whole number of
            # layers (2q slots each) allows.
            sel_layers = max(1, round((q + 3 * pairs) / (2 * q)))
        gates = []
        slot = 0
        for _ in range(sel_layers):
            gates += _xlayer_gates(list(range(q)), slot)
            slot += q
            for i in range(q):
                gates.append(Gate("PCX", (i, (i + 1) % q), slot))
                slot += 1
        ell = slot
    return Circuit(q, tuple(gates), ell, kind)


SOLVER_ANSATZE = ("bruhat", "borel", "sel")


def solver_ansatz(name: str, q: int) -> Circuit:
    """Ansatz used by the solver: an upstream RX layer plus the named block.

    "bruhat" is the full LX circuit; "borel" is the RX layer followed by the
    Borel block only; "sel" is the hardware-style layered baseline.
    """
    if name == "bruhat":
        return build_ansatz("LX", q)
    if name == "borel":
        gates = _xlayer_gates(list(range(q)), 0) + _borel_gates(q, q)
        return Circuit(q, tuple(gates), q + q * (q - 1) // 2, "Custom")
    if name == "sel":
        return build_ansatz("SEL", q)
    raise ValueError(f"unknown solver ansatz {name!r}")


def circuit_stats(c: Circuit) -> CircuitStats:
    """Greedy ASAP depth on qubit availability; PSWAP counts 3, others 1."""
    avail = [0] * c.q
    two_q = 0
    for g in c.gates:
        dur = 3 if g.kind == "PSWAP" else 1
        if len(g.qubits) == 2:
            two_q += dur  # PSWAP expands to three two-qubit gates
        start = max(avail[t] for t in g.qubits)
        for t in g.qubits:
            avail[t] = start + dur
    return CircuitStats(c.param_count, max(avail, default=0), two_q)


def _rx_matrix(theta: float) -> np.ndarray:
    if theta == 0.0:
        return np.eye(2, dtype=complex)
    if theta == math.pi:
        return np.array([[0.0, -1.0j], [-1.0j, 0.0]])
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1.0j * s], [-1.0j * s, c]])


def _phase_matrix(theta: float) -> np.ndarray:
    if theta == 0.0:
        ph = 1.0
    elif theta == math.pi:
        ph = -1.0
    elif theta == math.pi / 2:
        ph = 1.0j
    else:
        ph = complex(math.cos(theta), math.sin(theta))
    return np.array([[1.0, 0.0], [0.0, ph]])


def _apply_1q(psi: np.ndarray, m: np.ndarray, t: int) -> np.ndarray:
    psi = np.tensordot(m, psi, axes=([1], [t]))
    return np.moveaxis(psi, 0, t)


def _apply_controlled_1q(
    psi: np.ndarray, m: np.ndarray, c: int, t: int
) -> np.ndarray:
    idx = [slice(None)] * psi.ndim
    idx[c] = 1
    sub = psi[tuple(idx)]
    t_sub = t if t < c else t - 1
    sub = np.moveaxis(np.tensordot(m, sub, axes=([1], [t_sub])), 0, t_sub)
    psi = psi.copy()
    psi[tuple(idx)] = sub
    return psi


_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _apply_gate(psi: np.ndarray, g: Gate, theta: float | None) -> np.ndarray:
    if g.kind == "RX":
        return _apply_1q(psi, _rx_matrix(theta), g.qubits[0])
    if g.kind == "CX":
        c, t = g.qubits
        return _apply_controlled_1q(psi, _X, c, t)
    if g.kind == "PCX":
        c, t = g.qubits
        psi = _apply_1q(psi, _phase_matrix(theta / 2), c)
        return _apply_controlled_1q(psi, _rx_matrix(theta), c, t)
    # PSWAP(a, b; phi) = CX(b -> a), PCX(a -> b; phi), CX(b -> a)
    a, b = g.qubits
    psi = _apply_controlled_1q(psi, _X, b, a)
    psi = _apply_1q(psi, _phase_matrix(theta / 2), a)
    psi = _apply_controlled_1q(psi, _rx_matrix(theta), a, b)
    return _apply_controlled_1q(psi, _X, b, a)


def _check_theta(c: Circuit, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.param_count,):
        raise ValueError(
            f"expected {c.param_count} parameters, got shape {theta.shape}"
        )
    return theta


def eval_unitary(c: Circuit, theta, max_qubits: int | None = None) -> np.ndarray:
    """Dense 2^q x 2^q unitary of the circuit at the given parameters."""
    limit = max_qubits if max_qubits is not None else max_dense_qubits()
    if c.q > limit:
        raise QubitBudgetError(
            f"dense evaluation of {c.q} qubits exceeds the guard ({limit})"
        )
    theta = _check_theta(c, theta)
    dim = 1 << c.q
    psi = np.eye(dim, dtype=complex).reshape((2,) * c.q + (dim,))
    for g in c.gates:
        psi = _apply_gate(psi, g, None if g.slot is None else theta[g.slot])
    return psi.reshape(dim, dim)


def _binary_theta(c: Circuit, theta) -> np.ndarray:
    theta = _check_theta(c, theta)
    snapped = np.where(np.abs(theta) < 1e-12, 0.0, theta)
    snapped = np.where(np.abs(snapped - math.pi) < 1e-12, math.pi, snapped)
    if not np.all((snapped == 0.0) | (snapped == math.pi)):
        raise ValueError("eval_permutation requires every parameter in {0, pi}")
    return snapped


def eval_permutation(c: Circuit, theta) -> Permutation:
    """Basis-state permutation at binary parameters, without a dense unitary."""
    theta = _binary_theta(c, theta)
    q = c.q
    x = np.arange(1 << q, dtype=np.int64)
    for g in c.gates:
        on = g.slot is None or theta[g.slot] == math.pi
        if g.kind == "RX":
            if on:
                x = x ^ (1 << (q - 1 - g.qubits[0]))
        elif g.kind in ("CX", "PCX"):
            if on:
                sc = q - 1 - g.qubits[0]
                st = q - 1 - g.qubits[1]
                x = x ^ (((x >> sc) & 1) << st)
        else:  # PSWAP
            if on:
                sa = q - 1 - g.qubits[0]
                sb = q - 1 - g.qubits[1]
                d = ((x >> sa) & 1) ^ ((x >> sb) & 1)
                x = x ^ ((d << sa) | (d << sb))
    return Permutation(tuple(int(v) for v in x))


def synthesize_params(m: AffineMap) -> tuple[Circuit, np.ndarray]:
    """LX ansatz and binary parameters realizing x -> a.x XOR b.

    The circuit applies the RX layer first, so its X offset c must satisfy
    a.(x XOR c) = a.x XOR b, i.e. c = a^(-1).b.
    """
    q = m.q
    c = build_ansatz("LX", q)
    theta = np.zeros(c.param_count)
    pairs = q * (q - 1) // 2
    offset = m.a.inverse().matvec(m.b)
    for t in range(q):
        if (offset >> t) & 1:
            theta[t] = math.pi
    factors = bruhat_decompose(m.a)
    # Operator order is Borel2 . Weyl . Borel1 . X, so the first Borel block
    # realizes u2 and the second realizes u1.
    pair_slot = {jk: i for i, jk in enumerate(_borel_pairs(q))}
    for t in borel_subword(factors.u2):
        theta[q + pair_slot[(t.j, t.k)]] = math.pi
    for t in borel_subword(factors.u1):
        theta[q + 2 * pairs + pair_slot[(t.j, t.k)]] = math.pi
    mask = weyl_subword_mask(factors.w)
    n_letters = len(mask)
    for g in range(n_letters):
        if mask[n_letters - 1 - g]:
            theta[q + pairs + g] = math.pi
    return c, theta


def lower_to_linear_topology(c: Circuit) -> Circuit:
    """Rewrite long-range PCX/CX into nearest-neighbour ladders.

    A gate spanning distance p > 1 becomes 4(p-1) neighbouring gates; the
    parameter is carried by the two gates nearest the target, whose removal
    makes the remainder cancel.
    """
    out: list[Gate] = []
    for g in c.gates:
        if g.kind == "RX":
            out.append(g)
            continue
        a, b = g.qubits
        if abs(a - b) == 1:
            out.append(g)
            continue
        if g.kind == "PSWAP":
            raise ValueError("long-range PSWAP lowering is not supported")
        ctrl, tgt = g.qubits
        p = abs(ctrl - tgt)
        step = 1 if ctrl > tgt else -1
        chain = [tgt + i * step for i in range(p + 1)]

        def rung(i: int) -> Gate:
            if i == 0:
                return Gate(g.kind, (chain[1], chain[0]), g.slot)
            return Gate("CX", (chain[i + 1], chain[i]), None)

        block1 = [rung(i) for i in range(p)] + [
            rung(i) for i in range(p - 2, -1, -1)
        ]
        block2 = [rung(i) for i in range(1, p)] + [
            rung(i) for i in range(p - 2, 0, -1)
        ]
        out.extend(block1 + block2)
    return Circuit(c.q, tuple(out), c.param_count, "Custom")


def circuit_to_text(c: Circuit) -> str:
    lines = []
    for g in c.gates:
        if g.kind == "RX":
            lines.append(f"RX {g.qubits[0]} {g.slot}")
        elif g.kind == "CX":
            lines.append(f"CX {g.qubits[0]} {g.qubits[1]}")
        else:
            lines.append(f"{g.kind} {g.qubits[0]} {g.qubits[1]} {g.slot}")
    return "\n".join(lines)


def circuit_from_text(text: str, q: int | None = None) -> Circuit:
    gates: list[Gate] = []
    for ln in text.strip().splitlines():
        toks = ln.split()
        if not toks:
            continue
        kind = toks[0]
        if kind == "RX" and len(toks) == 3:
            gates.append(Gate("RX", (int(toks[1]),), int(toks[2])))
        elif kind == "CX" and len(toks) == 3:
            gates.append(Gate("CX", (int(toks[1]), int(toks[2])), None))
        elif kind in ("PCX", "PSWAP") and len(toks) == 4:
            gates.append(
                Gate(kind, (int(toks[1]), int(toks[2])), int(toks[3]))
            )
        else:
            raise ValueError(f"bad gate line: {ln!r}")
    if q is None:
        q = 1 + max((t for g in gates for t in g.qubits), default=0)
    ell = 1 + max((g.slot for g in gates if g.slot is not None), default=-1)
    return Circuit(q, tuple(gates), ell, "Custom")
