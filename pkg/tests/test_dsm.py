"""DSM extraction, the doubled-register oracle, Birkhoff peeling."""

import math

import numpy as np
import pytest

from quper.circuits import build_ansatz
from quper.dsm import (
    BirkhoffDecomposition,
    Dsm,
    DsmJob,
    NotDoublyStochasticError,
    birkhoff_decompose,
    extract_dsm,
    statevector_oracle,
)
from quper.gf2 import Permutation, recognize_affine
from quper.circuits import eval_permutation

PI = math.pi


def perm_column_matrix(p):
    m = np.zeros((p.n, p.n))
    for j in range(p.n):
        m[p(j), j] = 1.0
    return m


def random_dsm(n, rng, terms=6):
    e = np.zeros((n, n))
    lams = rng.dirichlet(np.ones(terms))
    for lam in lams:
        e[np.arange(n), rng.permutation(n)] += lam
    return Dsm(e)


class TestExtractDsm:
    def test_identity_circuit(self):
        c = build_ansatz("XLayer", 2)
        d = extract_dsm(DsmJob(c, 0, np.zeros(2)))
        assert np.array_equal(d.entries, np.eye(4))

    def test_m0_binary_matches_eval_permutation(self):
        rng = np.random.default_rng(0)
        c = build_ansatz("LX", 3)
        for _ in range(20):
            theta = rng.choice([0.0, PI], c.param_count)
            d = extract_dsm(DsmJob(c, 0, theta))
            p = eval_permutation(c, theta)
            assert np.array_equal(d.entries, perm_column_matrix(p))

    def test_m0_any_theta_is_mod_squared_unitary(self):
        from quper.circuits import eval_unitary

        rng = np.random.default_rng(1)
        c = build_ansatz("LX", 2)
        theta = rng.uniform(0, 2 * PI, c.param_count)
        d = extract_dsm(DsmJob(c, 0, theta))
        assert np.allclose(
            d.entries, np.abs(eval_unitary(c, theta)) ** 2, atol=1e-15
        )

    def test_double_stochasticity_m1(self):
        rng = np.random.default_rng(2)
        c = build_ansatz("Bruhat", 3)
        for _ in range(100):
            d = extract_dsm(DsmJob(c, 1, rng.uniform(0, 2 * PI, c.param_count)))
            sums = np.concatenate(
                [d.entries.sum(axis=0) - 1, d.entries.sum(axis=1) - 1]
            )
            assert np.max(np.abs(sums)) <= 1e-10

    def test_oracle_agreement_50_jobs(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            m = int(rng.integers(0, 2))
            c = build_ansatz("Bruhat", 2 + m)
            job = DsmJob(c, m, rng.uniform(0, 2 * PI, c.param_count))
            delta = np.abs(
                extract_dsm(job).entries - statevector_oracle(job).entries
            )
            assert np.max(delta) <= 1e-10

    def test_bad_ancilla_count(self):
        with pytest.raises(ValueError):
            DsmJob(build_ansatz("LX", 2), 2, np.zeros(5))


class TestBirkhoff:
    def test_permutation_matrix_single_term(self):
        p = Permutation((2, 0, 1, 3))
        bd = birkhoff_decompose(Dsm(np.eye(4)[list(p.map)]))
        assert len(bd.terms) == 1
        lam, term = bd.terms[0]
        assert lam == pytest.approx(1.0)
        assert term == p
        assert bd.residual <= 1e-12

    def test_half_half(self):
        d = Dsm(np.array([[0.5, 0.5], [0.5, 0.5]]))
        bd = birkhoff_decompose(d)
        assert sorted(lam for lam, _ in bd.terms) == [
            pytest.approx(0.5),
            pytest.approx(0.5),
        ]
        assert {t.map for _, t in bd.terms} == {(0, 1), (1, 0)}

    def test_random_dsm_reconstructs(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            d = random_dsm(6, rng)
            bd = birkhoff_decompose(d)
            assert bd.residual <= 1e-8
            assert sum(lam for lam, _ in bd.terms) <= 1 + 1e-9
            maps = [t.map for _, t in bd.terms]
            assert len(maps) == len(set(maps))

    def test_non_dsm_rejected(self):
        with pytest.raises(NotDoublyStochasticError):
            birkhoff_decompose(Dsm(np.full((3, 3), 0.5)))

    def test_extracted_terms_are_affine(self):
        rng = np.random.default_rng(5)
        c = build_ansatz("Bruhat", 4)
        for _ in range(30):
            theta = rng.choice([0.0, PI], c.param_count)
            d = extract_dsm(DsmJob(c, 1, theta))
            bd = birkhoff_decompose(d)
            for _, p in bd.terms:
                assert recognize_affine(p) is not None

    def test_json_export(self):
        import json

        bd = BirkhoffDecomposition(((1.0, Permutation((1, 0))),), 0.0)
        data = json.loads(bd.to_json())
        assert data == [{"lambda": 1.0, "permutation": [1, 0]}]


class TestDsmType:
    def test_csv_roundtrip_exact(self):
        rng = np.random.default_rng(6)
        d = random_dsm(5, rng)
        back = Dsm.from_csv(d.to_csv())
        assert np.array_equal(back.entries, d.entries)

    def test_validate_rejects_negative(self):
        with pytest.raises(NotDoublyStochasticError):
            Dsm(np.array([[1.5, -0.5], [-0.5, 1.5]])).validate()

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            Dsm(np.zeros((2, 3)))
