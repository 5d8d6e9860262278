"""Problem definitions: quadratic assignment (QAP), graph isomorphism (GIP).

Costs take either a Permutation (row convention: matrix has a 1 at
(i, p(i))) or a relaxed doubly-stochastic matrix.

QAP: minimize f(P) = tr(W P D^T P^T).
GIP: minimize f(P) = ||A - P B P^T||_F^2, zero iff P is an isomorphism,
i.e. A[i][j] = B[p(i)][p(j)] for all i, j.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dsm import Dsm
from .gf2 import AffineMap, Gf2Matrix, Permutation


@dataclass(frozen=True)
class QapInstance:
    w: np.ndarray
    d: np.ndarray
    name: str = ""
    known_optimum: float | None = None

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        d = np.asarray(self.d, dtype=float)
        if w.shape != d.shape or w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("W and D must be square matrices of equal size")
        if not (np.isfinite(w).all() and np.isfinite(d).all()):
            raise ValueError("matrices must be finite")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True)
class GipInstance:
    a: np.ndarray
    b: np.ndarray
    planted: Permutation | None = None
    name: str = ""

    def __post_init__(self):
        for label, m in (("A", self.a), ("B", self.b)):
            m = np.asarray(m)
            if (
                m.ndim != 2
                or m.shape[0] != m.shape[1]
                or not np.array_equal(m, m.T)
                or not np.isin(m, (0, 1)).all()
                or np.any(np.diag(m))
            ):
                raise ValueError(
                    f"{label} must be a binary symmetric zero-diagonal matrix"
                )
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))

    @property
    def n(self) -> int:
        return self.a.shape[0]


def _as_matrix(p) -> np.ndarray:
    if isinstance(p, Permutation):
        return np.eye(p.n)[list(p.map)]  # row i has a 1 at column p(i)
    if isinstance(p, Dsm):
        return p.entries
    return np.asarray(p, dtype=float)


def qap_cost(inst: QapInstance, p) -> float:
    pm = _as_matrix(p)
    if pm.shape != inst.w.shape:
        raise ValueError("dimension mismatch")
    return float(np.trace(inst.w @ pm @ inst.d.T @ pm.T))


def gip_cost(inst: GipInstance, p) -> float:
    pm = _as_matrix(p)
    if pm.shape != inst.a.shape:
        raise ValueError("dimension mismatch")
    return float(np.sum((inst.a - pm @ inst.b @ pm.T) ** 2))


def gip_to_qap(inst: GipInstance) -> QapInstance:
    """W = A, D = -B; then gip = tr(A^T A) + tr(B^T B) + 2 qap for every P."""
    return QapInstance(inst.a, -inst.b, name=inst.name or "gip")


def parse_qaplib(text: str, name: str = "") -> QapInstance:
    toks = text.split()
    try:
        vals = [int(t) for t in toks]
    except ValueError as exc:
        raise ValueError(f"non-integer token in QAPLIB data: {exc}") from exc
    if not vals:
        raise ValueError("empty QAPLIB data")
    n = vals[0]
    if n <= 0:
        raise ValueError("n must be positive")
    if len(vals) != 1 + 2 * n * n:
        raise ValueError(
            f"expected {1 + 2 * n * n} integers for n={n}, got {len(vals)}"
        )
    w = np.array(vals[1 : 1 + n * n], dtype=float).reshape(n, n)
    d = np.array(vals[1 + n * n :], dtype=float).reshape(n, n)
    return QapInstance(w, d, name=name)


def serialize_qaplib(inst: QapInstance) -> str:
    def block(m: np.ndarray) -> str:
        return "\n".join(" ".join(str(int(v)) for v in row) for row in m)

    return f"{inst.n}\n\n{block(inst.w)}\n\n{block(inst.d)}\n"


def parse_sln(text: str) -> tuple[int, float, Permutation]:
    toks = text.split()
    try:
        vals = [int(t) for t in toks]
    except ValueError as exc:
        raise ValueError(f"non-integer token in .sln data: {exc}") from exc
    if len(vals) < 2:
        raise ValueError("solution file needs n and a value")
    n, value = vals[0], vals[1]
    perm_vals = vals[2:]
    if len(perm_vals) != n:
        raise ValueError(f"expected a permutation of length {n}")
    # QAPLIB permutations are 1-based.
    if sorted(perm_vals) == list(range(1, n + 1)):
        perm_vals = [v - 1 for v in perm_vals]
    return n, float(value), Permutation(tuple(perm_vals))


def load_qaplib(dat_text: str, sln_text: str | None, name: str = "") -> QapInstance:
    """Parse a .dat, attaching the .sln optimum and pinning the W/D roles.

    If the stored permutation does not reproduce the stored value under
    f(P) = tr(W P D^T P^T), the matrix roles are swapped.
    """
    inst = parse_qaplib(dat_text, name)
    if sln_text is None:
        return inst
    n, value, perm = parse_sln(sln_text)
    if n != inst.n:
        raise ValueError(".sln size does not match instance")
    if not math.isclose(qap_cost(inst, perm), value, abs_tol=1e-6):
        swapped = QapInstance(inst.d, inst.w, name=name)
        if math.isclose(qap_cost(swapped, perm), value, abs_tol=1e-6):
            inst = swapped
    return QapInstance(inst.w, inst.d, name=name, known_optimum=value)


def random_qap(n: int, seed: int) -> QapInstance:
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.0, 10.0, (n, n))
    d = rng.uniform(0.0, 10.0, (n, n))
    return QapInstance(w, d, name=f"random_qap_{n}_{seed}")


def _affine_permutation(q: int, rng: np.random.Generator) -> Permutation:
    while True:
        rows = tuple(int(v) for v in rng.integers(0, 1 << q, q))
        a = Gf2Matrix(q, rows)
        if a.is_invertible():
            break
    b = int(rng.integers(0, 1 << q))
    amap = AffineMap(a, b)

    def to_vec(idx: int) -> int:
        return sum(((idx >> (q - 1 - t)) & 1) << t for t in range(q))

    def to_idx(v: int) -> int:
        return sum(((v >> t) & 1) << (q - 1 - t) for t in range(q))

    return Permutation(tuple(to_idx(amap.apply(to_vec(i))) for i in range(1 << q)))


def random_gip(
    n: int,
    seed: int,
    edge_prob: float = 0.5,
    span_restricted: bool = False,
) -> GipInstance:
    """Random graph pair with a planted isomorphism (gip_cost = 0).

    With span_restricted, the planted permutation is a uniform affine map
    (random invertible matrix plus random offset), so it lies in the span of
    the full-ansatz circuit without ancillas.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    if span_restricted:
        q = n.bit_length() - 1
        if 1 << q != n:
            raise ValueError("span-restricted instances need n a power of two")
        planted = _affine_permutation(q, rng)
    else:
        planted = Permutation(tuple(int(v) for v in rng.permutation(n)))
    a = np.triu((rng.random((n, n)) < edge_prob).astype(int), 1)
    a = a + a.T
    # B[p(i)][p(j)] = A[i][j] makes gip_cost(planted) = 0.
    b = np.zeros_like(a)
    pm = list(planted.map)
    for i in range(n):
        for j in range(n):
            b[pm[i]][pm[j]] = a[i][j]
    return GipInstance(a, b, planted=planted, name=f"random_gip_{n}_{seed}")


def parse_edge_list(text: str) -> np.ndarray:
    """Graph as 'n' then one 'u v' pair per edge; returns the adjacency matrix."""
    toks = text.split()
    if not toks:
        raise ValueError("empty edge list")
    n = int(toks[0])
    rest = [int(t) for t in toks[1:]]
    if len(rest) % 2:
        raise ValueError("edge list must contain pairs")
    adj = np.zeros((n, n), dtype=int)
    for u, v in zip(rest[::2], rest[1::2]):
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ValueError(f"bad edge ({u}, {v})")
        adj[u][v] = adj[v][u] = 1
    return adj


def parse_adjacency_csv(text: str) -> np.ndarray:
    rows = [
        [int(t) for t in ln.split(",")]
        for ln in text.strip().splitlines()
        if ln.strip()
    ]
    return np.array(rows, dtype=int)


def instance_to_json(inst) -> str:
    if isinstance(inst, QapInstance):
        return json.dumps(
            {
                "type": "qap",
                "n": inst.n,
                "name": inst.name,
                "W": inst.w.tolist(),
                "D": inst.d.tolist(),
                "known_optimum": inst.known_optimum,
            }
        )
    return json.dumps(
        {
            "type": "gip",
            "n": inst.n,
            "name": inst.name,
            "A": inst.a.astype(int).tolist(),
            "B": inst.b.astype(int).tolist(),
            "planted": list(inst.planted.map) if inst.planted else None,
        }
    )


def relative_optimality_gap(value: float, optimum: float) -> float | None:
    if optimum == 0:
        return None
    return (value - optimum) / optimum


def normalized_heuristic_gap(quantum: float, heuristic: float, n: int) -> float:
    return (quantum - heuristic) / (n * n / 2)
