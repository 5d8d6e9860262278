"""Doubly-stochastic matrices from ancilla-assisted circuit simulation.

A circuit on m + q qubits (ancillas = the m most-significant qubits) induces
the doubly-stochastic matrix

    p_ij = 2^(-m) sum_{a,b} |U[(b,i),(a,j)]|^2,

the exact outcome distribution of feeding the circuit half of 2^(m+q)
maximally entangled pairs and measuring the 2q non-ancilla qubits.  Both the
closed-form block sum and a literal doubled-register statevector oracle are
provided; they must agree to 1e-10.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .circuits import (
    Circuit,
    QubitBudgetError,
    _apply_1q,
    _apply_controlled_1q,
    _apply_gate,
    eval_unitary,
    max_dense_qubits,
)
from .gf2 import Permutation

ROW_SUM_TOL = 1e-9
ENTRY_TOL = 1e-12
BIRKHOFF_TOL = 1e-8


class NotDoublyStochasticError(ValueError):
    pass


@dataclass(frozen=True)
class Dsm:
    """n x n real matrix with unit row and column sums."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("DSM must be square")
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def validate(self) -> None:
        e = self.entries
        if np.min(e) < -ENTRY_TOL or np.max(e) > 1 + ENTRY_TOL:
            raise NotDoublyStochasticError("entries outside [0, 1]")
        sums = np.concatenate([e.sum(axis=0) - 1, e.sum(axis=1) - 1])
        if np.max(np.abs(sums)) > ROW_SUM_TOL:
            raise NotDoublyStochasticError("row/column sums deviate from 1")

    def to_csv(self) -> str:
        return "\n".join(
            ",".join(f"{v:.17g}" for v in row) for row in self.entries
        )

    @staticmethod
    def from_csv(text: str) -> Dsm:
        rows = [
            [float(t) for t in ln.split(",")]
            for ln in text.strip().splitlines()
            if ln.strip()
        ]
        return Dsm(np.array(rows))


@dataclass(frozen=True)
class BirkhoffDecomposition:
    terms: tuple[tuple[float, Permutation], ...]
    residual: float

    def to_json(self) -> str:
        return json.dumps(
            [
                {"lambda": lam, "permutation": list(p.map)}
                for lam, p in self.terms
            ]
        )


@dataclass(frozen=True)
class DsmJob:
    """Ansatz on m + q qubits; the m ancillas are the most-significant qubits."""

    circuit: Circuit
    m: int
    theta: np.ndarray

    def __post_init__(self):
        if self.m < 0 or self.m >= self.circuit.q:
            raise ValueError("need 0 <= m < circuit.q")
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))

    @property
    def q(self) -> int:
        return self.circuit.q - self.m


def extract_dsm(job: DsmJob) -> Dsm:
    """Closed-form block sum over the ancilla indices of |U|^2."""
    u = eval_unitary(job.circuit, job.theta)
    n = 1 << job.q
    k = 1 << job.m
    blocks = np.abs(u.reshape(k, n, k, n)) ** 2
    return Dsm(blocks.sum(axis=(0, 2)) / k)


def statevector_oracle(job: DsmJob) -> Dsm:
    """Literal doubled-register simulation; the ground truth for extract_dsm.

    Register 1 (qubits 0..m+q-1) and register 2 (qubits m+q..2(m+q)-1) are
    prepared in maximally entangled pairs (qubit t with qubit m+q+t), the
    circuit acts on register 1, and the exact joint distribution of the 2q
    non-ancilla qubits is scaled by n.
    """
    w = job.circuit.q
    if 2 * w > max_dense_qubits():
        raise QubitBudgetError(
            f"oracle needs {2 * w} qubits, over the guard ({max_dense_qubits()})"
        )
    if len(np.asarray(job.theta)) != job.circuit.param_count:
        raise ValueError("parameter length mismatch")
    n = 1 << job.q
    psi = np.zeros((2,) * (2 * w), dtype=complex)
    psi[(0,) * (2 * w)] = 1.0
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    for t in range(w):
        psi = _apply_1q(psi, h, t)
        psi = _apply_controlled_1q(psi, x, t, w + t)
    theta = np.asarray(job.theta, dtype=float)
    for g in job.circuit.gates:
        psi = _apply_gate(psi, g, None if g.slot is None else theta[g.slot])
    probs = np.abs(psi) ** 2
    # Axes: [reg1 ancillas (m), reg1 system (q), reg2 ancillas (m), reg2
    # system (q)]; measure the 2q system qubits, marginalizing the rest.
    k = 1 << job.m
    probs = probs.reshape(k, n, k, n).sum(axis=(0, 2))
    return Dsm(probs * n)


def birkhoff_decompose(d: Dsm, tol: float = BIRKHOFF_TOL) -> BirkhoffDecomposition:
    """Greedy Birkhoff-von-Neumann peeling via maximum-weight assignment.

    Each step subtracts lambda = min entry of the heaviest permutation
    support; choosing the assignment maximizing the total weight is the
    deterministic tie-break.
    """
    d.validate()
    n = d.n
    rem = d.entries.clip(min=0.0).copy()
    terms: dict[tuple[int, ...], float] = {}
    while rem.sum() > tol * n:
        rows, cols = linear_sum_assignment(rem, maximize=True)
        support = rem[rows, cols]
        lam = float(support.min())
        if lam <= tol:
            raise NotDoublyStochasticError(
                "no permutation support above tol; input is not doubly "
                "stochastic within tolerance"
            )
        pmap = tuple(int(c) for c in cols[np.argsort(rows)])
        terms[pmap] = terms.get(pmap, 0.0) + lam
        rem[rows, cols] -= lam
    recon = np.zeros_like(d.entries)
    out = []
    for pmap, lam in terms.items():
        p = Permutation(pmap)
        out.append((lam, p))
        recon[np.arange(n), pmap] += lam
    residual = float(np.max(np.abs(d.entries - recon)))
    return BirkhoffDecomposition(tuple(out), residual)
