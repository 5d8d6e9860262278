"""Regularized loss, Adam with Nesterov momentum, and the QuPer driver.

The driver optimizes the relaxed cost of the circuit's doubly-stochastic
matrix plus three regularizers pushing it toward a permutation, projecting
onto permutations at every iteration and escalating the ancilla count with
parameter re-embedding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .circuits import Circuit, solver_ansatz
from .dsm import Dsm, DsmJob, extract_dsm
from .gf2 import Permutation
from .problems import GipInstance, QapInstance, gip_cost, qap_cost
from .projection import project_hungarian, project_random_order

DEFAULT_LR = 0.005
GIP_LR = 0.4
PAD_ANGLE = math.pi / 8


@dataclass(frozen=True)
class LossConfig:
    w_st: float = 1 / 10
    w_entropy: float = 15 / 100
    w_ort: float = 1 / 100
    entropy_eps: float = 1e-8
    cost: object = None  # Dsm -> real


@dataclass(frozen=True)
class AdamState:
    theta: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    k: int = 1
    eta: float = DEFAULT_LR
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @staticmethod
    def fresh(theta: np.ndarray, eta: float = DEFAULT_LR) -> AdamState:
        theta = np.asarray(theta, dtype=float)
        return AdamState(theta, np.zeros_like(theta), np.zeros_like(theta), 1, eta)


@dataclass(frozen=True)
class QuperConfig:
    ansatz: str = "bruhat"
    m_max: int = 0
    iterations: int = 1000
    seed: int = 0
    lr: float | None = None  # None: 0.005 for QAP, 0.4 for GIP
    grad_step: float = 1e-5
    entropy_eps: float = 1e-8
    random_order_trials: int = 50

    def __post_init__(self):
        if self.m_max < 0 or self.iterations < 1:
            raise ValueError("need m_max >= 0 and iterations >= 1")


@dataclass
class QuperTrace:
    records: list[dict] = field(default_factory=list)
    levels: list[dict] = field(default_factory=list)


def regularizers(d: Dsm, entropy_eps: float) -> tuple[float, float, float]:
    """(st, S_eps, ort) as defined by the loss."""
    e = d.entries
    st = float(np.sum((e.sum(axis=0) - 1.0) ** 2))
    s_eps = float(-np.sum(e * np.log(e + entropy_eps)))
    gram = e.T @ e - np.eye(d.n)
    ort = float(np.sum(gram**2))
    return st, s_eps, ort


def loss(job: DsmJob, cfg: LossConfig) -> float:
    d = extract_dsm(job)
    return loss_from_dsm(d, cfg)


def loss_from_dsm(d: Dsm, cfg: LossConfig) -> float:
    st, s_eps, ort = regularizers(d, cfg.entropy_eps)
    return (
        float(cfg.cost(d))
        + cfg.w_st * st
        + cfg.w_entropy * s_eps
        + cfg.w_ort * ort
    )


def fd_gradient(f, theta, h: float = 1e-5) -> np.ndarray:
    """Central differences, one independent coordinate at a time."""
    if h <= 0:
        raise ValueError("h must be positive")
    theta = np.asarray(theta, dtype=float)
    g = np.zeros_like(theta)
    for i in range(theta.size):
        step = np.zeros_like(theta)
        step[i] = h
        hi, lo = f(theta + step), f(theta - step)
        if not (math.isfinite(hi) and math.isfinite(lo)):
            raise ValueError("non-finite loss value in gradient")
        g[i] = (hi - lo) / (2 * h)
    return g


def adam_nesterov_step(s: AdamState, g) -> AdamState:
    g = np.asarray(g, dtype=float)
    if g.shape != s.theta.shape:
        raise ValueError("gradient length mismatch")
    mu = s.beta1 * s.mu + (1 - s.beta1) * g
    nu = s.beta2 * s.nu + (1 - s.beta2) * g**2
    mu_hat = s.beta1 / (1 - s.beta1 ** (s.k + 1)) * mu + (
        1 - s.beta1
    ) / (1 - s.beta1**s.k) * g
    nu_hat = nu / (1 - s.beta2**s.k)
    theta = s.theta - s.eta * mu_hat / (np.sqrt(nu_hat) + s.eps)
    return replace(s, theta=theta, mu=mu, nu=nu, k=s.k + 1)


def _slot_keys(c: Circuit) -> dict[tuple, int]:
    """Structural identity of each slot: gate kind, bottom-anchored qubit
    coordinates, and occurrence index.  Stable under adding a qubit on top."""
    keys: dict[tuple, int] = {}
    seen: dict[tuple, int] = {}
    for g in c.gates:
        if g.slot is None:
            continue
        coords = tuple(c.q - 1 - t for t in g.qubits)
        base = (g.kind, coords)
        occ = seen.get(base, 0)
        seen[base] = occ + 1
        keys.setdefault((g.kind, coords, occ), g.slot)
    return keys


def embed_theta(
    old: Circuit, new: Circuit, old_theta, fill: float = PAD_ANGLE
) -> np.ndarray:
    """Carry parameters to a larger ansatz by structural slot identity;
    every slot with no counterpart gets the fill angle."""
    old_theta = np.asarray(old_theta, dtype=float)
    old_keys = _slot_keys(old)
    theta = np.full(new.param_count, fill)
    for key, slot in _slot_keys(new).items():
        if key in old_keys:
            theta[slot] = old_theta[old_keys[key]]
    return theta


def _problem_costs(problem):
    if isinstance(problem, QapInstance):
        return lambda p: qap_cost(problem, p)
    if isinstance(problem, GipInstance):
        return lambda p: gip_cost(problem, p)
    raise TypeError("problem must be a QapInstance or GipInstance")


def _default_lr(problem) -> float:
    return GIP_LR if isinstance(problem, GipInstance) else DEFAULT_LR


def quper_solve(problem, cfg: QuperConfig):
    """Run the full heuristic; returns (best permutation, value, trace)."""
    n = problem.n
    q = n.bit_length() - 1
    if 1 << q != n:
        raise ValueError("problem size must be a power of two")
    cost = _problem_costs(problem)
    lr = cfg.lr if cfg.lr is not None else _default_lr(problem)
    loss_cfg = LossConfig(entropy_eps=cfg.entropy_eps, cost=cost)

    rng = np.random.default_rng([cfg.seed])
    trace = QuperTrace()
    best_p: Permutation | None = None
    best_v = math.inf
    prev_circuit: Circuit | None = None
    theta: np.ndarray | None = None
    it_global = 0

    for m in range(cfg.m_max + 1):
        circuit = solver_ansatz(cfg.ansatz, q + m)
        if prev_circuit is None:
            theta = rng.uniform(
                math.pi / 2 - 0.05, math.pi / 2 + 0.05, circuit.param_count
            )
        else:
            theta = embed_theta(prev_circuit, circuit, theta)
        state = AdamState.fresh(theta, eta=lr)

        def loss_fn(th):
            return loss(DsmJob(circuit, m, th), loss_cfg)

        for _ in range(cfg.iterations):
            g = fd_gradient(loss_fn, state.theta, cfg.grad_step)
            state = adam_nesterov_step(state, g)
            d = extract_dsm(DsmJob(circuit, m, state.theta))
            raw = float(cost(d))
            ph = project_hungarian(d)
            ph_cost = float(cost(ph))
            rand = project_random_order(
                d, [cfg.seed, m, it_global], cfg.random_order_trials
            )
            pr_cost = min(float(cost(p)) for p in rand)
            for p in sorted(rand | {ph}, key=lambda p: p.map):
                v = float(cost(p))
                if v < best_v:
                    best_p, best_v = p, v
            trace.records.append(
                {
                    "iter": it_global,
                    "m": m,
                    "loss": loss_from_dsm(d, loss_cfg),
                    "raw_cost": raw,
                    "proj_hungarian_cost": ph_cost,
                    "proj_random_cost": pr_cost,
                    "best": best_v,
                }
            )
            it_global += 1
        trace.levels.append(
            {"m": m, "value": best_v, "permutation": list(best_p.map)}
        )
        prev_circuit, theta = circuit, state.theta
    return best_p, best_v, trace


def random_baseline(problem, iterations: int, seed: int):
    """Best of 50 * ceil(I/10) uniformly random permutations."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    cost = _problem_costs(problem)
    trials = 50 * math.ceil(iterations / 10)
    rng = np.random.default_rng([seed])
    best_p, best_v = None, math.inf
    for _ in range(trials):
        p = Permutation(tuple(int(v) for v in rng.permutation(problem.n)))
        v = float(cost(p))
        if v < best_v:
            best_p, best_v = p, v
    return best_p, best_v
