"""Self-check suites: gate identities, group theorems, simulator agreement.

Each suite returns (name, passed, detail); detail carries a counterexample
description on failure.  The `x_matrix` hook exists so tests can inject a
corrupted gate and watch the right suite fail.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .circuits import Circuit, Gate, build_ansatz, eval_unitary
from .dsm import DsmJob, extract_dsm, statevector_oracle
from .gf2 import (
    Gf2Matrix,
    Transvection,
    borel_subword,
    bruhat_decompose,
    word_to_matrix,
)

ATOL = 1e-12

_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float
)  # control = qubit 0 (MSB), target = qubit 1


def suite_x_cx_relations(x_matrix: np.ndarray | None = None):
    x = _X if x_matrix is None else np.asarray(x_matrix)
    i2 = np.eye(2)
    relations = [
        ("cx.(x@x) = (x@I).cx", _CX @ np.kron(x, x), np.kron(x, i2) @ _CX),
        ("cx.(I@x) = (I@x).cx", _CX @ np.kron(i2, x), np.kron(i2, x) @ _CX),
        ("(x@x).cx = cx.(x@I)", np.kron(x, x) @ _CX, _CX @ np.kron(x, i2)),
    ]
    for name, lhs, rhs in relations:
        err = float(np.max(np.abs(lhs - rhs)))
        if err > ATOL:
            return "x_cx_relations", False, f"{name} violated, max err {err:.3e}"
    return "x_cx_relations", True, "3 relations hold"


def suite_noncommutation():
    # (cx_kl cx_lm)^2 = cx_km as operators: rightmost factor applied first.
    k, l, m = 0, 1, 2
    seq = Circuit(
        3,
        (
            Gate("CX", (l, m), None),
            Gate("CX", (k, l), None),
            Gate("CX", (l, m), None),
            Gate("CX", (k, l), None),
        ),
        0,
    )
    target = Circuit(3, (Gate("CX", (k, m), None),), 0)
    err = float(np.max(np.abs(eval_unitary(seq, []) - eval_unitary(target, []))))
    ok = err <= ATOL
    return "noncommutation", ok, f"max err {err:.3e}"


def suite_gate_constructions():
    pcx = Circuit(2, (Gate("PCX", (0, 1), 0),), 1)
    psw = Circuit(2, (Gate("PSWAP", (0, 1), 0),), 1)
    swap = np.eye(4)[[0, 2, 1, 3]]
    checks = [
        ("PCX(pi) = CX", eval_unitary(pcx, [math.pi]), _CX),
        ("PSWAP(pi) = SWAP", eval_unitary(psw, [math.pi]), swap),
        ("PSWAP(0) = I", eval_unitary(psw, [0.0]), np.eye(4)),
    ]
    for name, lhs, rhs in checks:
        err = float(np.max(np.abs(lhs - rhs)))
        if err > ATOL:
            return "gate_constructions", False, f"{name} violated ({err:.3e})"
    return "gate_constructions", True, "3 identities hold"


def _all_borel(q: int):
    pairs = [(j, k) for j in range(q) for k in range(j + 1, q)]
    ident = Gf2Matrix.identity(q)
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        rows = list(ident.rows)
        for on, (j, k) in zip(bits, pairs):
            if on:
                rows[j] |= 1 << k
        yield Gf2Matrix(q, tuple(rows))


def suite_borel_enumeration(q: int):
    count = 0
    for a in _all_borel(q):
        word = borel_subword(a)
        if word_to_matrix(word, q) != a:
            return (
                "borel_enumeration",
                False,
                f"round-trip failed for\n{a.to_text()}",
            )
        count += 1
    expect = 1 << (q * (q - 1) // 2)
    ok = count == expect
    return "borel_enumeration", ok, f"{count} matrices (expected {expect})"


def _all_gl(q: int):
    for bits in range(1 << (q * q)):
        rows = tuple((bits >> (q * j)) & ((1 << q) - 1) for j in range(q))
        m = Gf2Matrix(q, rows)
        if m.is_invertible():
            yield m


def suite_bruhat_reassembly(q: int = 3, deep: bool = False, samples: int = 500):
    count = 0
    if q <= 3 and not deep:
        mats = _all_gl(q)
    else:
        rng = np.random.default_rng(0)
        def sample():
            for _ in range(samples):
                while True:
                    rows = tuple(int(v) for v in rng.integers(0, 1 << q, q))
                    m = Gf2Matrix(q, rows)
                    if m.is_invertible():
                        yield m
                        break
        mats = sample()
    for m in mats:
        f = bruhat_decompose(m)
        ok = (
            f.u1.is_upper_unitriangular()
            and f.u2.is_upper_unitriangular()
            and f.u1 @ f.w.gf2_matrix() @ f.u2 == m
        )
        if not ok:
            return "bruhat_reassembly", False, f"failed for\n{m.to_text()}"
        count += 1
    return "bruhat_reassembly", True, f"{count} matrices reassembled"


def suite_dsm_agreement(seed: int = 0, jobs: int = 20):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(jobs):
        m = int(rng.integers(0, 2))
        c = build_ansatz("Bruhat", 2 + m)
        theta = rng.uniform(0, 2 * math.pi, c.param_count)
        job = DsmJob(c, m, theta)
        err = float(
            np.max(np.abs(extract_dsm(job).entries - statevector_oracle(job).entries))
        )
        worst = max(worst, err)
        if err > 1e-10:
            return "dsm_agreement", False, f"deviation {err:.3e} at m={m}"
    return "dsm_agreement", True, f"max deviation {worst:.3e} over {jobs} jobs"


def run_suites(q: int = 3, deep: bool = False, x_matrix: np.ndarray | None = None):
    results = [
        suite_x_cx_relations(x_matrix),
        suite_noncommutation(),
        suite_gate_constructions(),
        suite_borel_enumeration(4 if deep else min(q, 3)),
        suite_bruhat_reassembly(q if deep else min(q, 3), deep=deep),
        suite_dsm_agreement(),
    ]
    return results
