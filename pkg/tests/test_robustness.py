import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakdetect.protocol import build_hamiltonian, weak_values_all
from weakdetect.qmat import trace_norm
from weakdetect.robustness import (
    Perturbation,
    RankDeficientError,
    _deviations_all,
    bound_check,
    coupling_miscalibration,
    random_perturbation,
    weak_value_deviation,
)
from weakdetect.states import random_mixed, validate, werner

seeds = st.integers(0, 10**6)


class TestRandomPerturbation:
    @given(seeds)
    @settings(max_examples=10)
    def test_trace_norm_equals_delta(self, seed):
        pert = random_perturbation(1e-2, seed)
        assert abs(trace_norm(pert.matrix) - 1e-2) <= 1e-10
        assert pert.delta == 1e-2

    def test_zero_delta_gives_zero_matrix(self):
        pert = random_perturbation(0.0, 3)
        assert np.all(pert.matrix == 0)

    def test_seed_reproducible(self):
        a = random_perturbation(1e-3, 42)
        b = random_perturbation(1e-3, 42)
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_hermitian(self):
        pert = random_perturbation(1e-2, 0)
        np.testing.assert_allclose(pert.matrix, pert.matrix.conj().T, atol=1e-15)

    def test_rejects_negative_delta(self):
        with pytest.raises(ValueError):
            random_perturbation(-1.0, 0)


class TestWeakValueDeviation:
    def test_zero_perturbation(self):
        h = build_hamiltonian()
        pert = Perturbation(np.zeros((16, 16), dtype=complex), 0.0)
        for k in (1, 4, 16):
            assert weak_value_deviation(werner(0.5), h, pert, k) == 0.0

    def test_scaling_linearity(self):
        h = build_hamiltonian()
        rho = werner(0.5)
        base = random_perturbation(1e-2, 11)
        doubled = Perturbation(2 * base.matrix, 2 * base.delta)
        for k in range(1, 17):
            d1 = weak_value_deviation(rho, h, base, k)
            d2 = weak_value_deviation(rho, h, doubled, k)
            assert abs(d2 - 2 * d1) <= 1e-10

    def test_werner_bound_sampled(self):
        # min diagonal 1/8, so m = 1/64 and the bound is 0.64 at delta 1e-2
        h = build_hamiltonian()
        rho = werner(0.5)
        bound = 1e-2 / (1 / 64)
        assert bound == pytest.approx(0.64)
        rng = np.random.default_rng(0)
        for _ in range(100):
            pert = random_perturbation(1e-2, rng)
            for k in range(1, 17):
                assert weak_value_deviation(rho, h, pert, k) <= bound

    @given(seeds)
    @settings(max_examples=10)
    def test_batched_deviations_match_literal(self, seed):
        rho = random_mixed(seed)
        h = build_hamiltonian()
        pert = random_perturbation(1e-2, seed + 1)
        joint = np.kron(rho.matrix, rho.matrix)
        batched = _deviations_all(joint, pert)
        for k, dev in batched.items():
            assert dev == pytest.approx(
                weak_value_deviation(rho, h, pert, k), rel=1e-10, abs=1e-15
            )


class TestBoundCheck:
    def test_werner_small_delta(self):
        report = bound_check(werner(0.5), 1e-3, trials=100, seed=1)
        assert report.bound == pytest.approx(6.4e-2)
        assert report.violations == 0
        assert report.margin > 0
        assert max(report.deviations.values()) <= 6.4e-2

    def test_maximally_mixed(self, maximally_mixed):
        report = bound_check(maximally_mixed, 1e-2, trials=50, seed=2)
        assert report.m == pytest.approx(1 / 16)
        assert report.bound == pytest.approx(0.16)
        assert report.violations == 0

    @given(seeds)
    @settings(max_examples=10)
    def test_bound_is_min_diagonal_squared(self, seed):
        rho = random_mixed(seed)
        report = bound_check(rho, 1e-2, trials=5, seed=0)
        assert report.bound == pytest.approx(1e-2 / min(rho.diagonal()) ** 2)

    def test_rank_deficient_rejected(self, bell):
        with pytest.raises(RankDeficientError):
            bound_check(bell, 1e-2, trials=5, seed=0)

    def test_deterministic(self):
        a = bound_check(werner(0.5), 1e-2, trials=20, seed=9)
        b = bound_check(werner(0.5), 1e-2, trials=20, seed=9)
        assert a == b

    def test_report_serialization(self):
        report = bound_check(werner(0.5), 1e-2, trials=10, seed=3)
        doc = report.to_json_dict()
        assert doc["bound"] == pytest.approx(0.64)
        assert set(doc["deviations"]) == {str(k) for k in range(1, 17)}
        rows = report.csv_rows()
        assert len(rows) == 16
        assert rows[0][0] == 1e-2 and rows[0][1] == 1
        assert all(row[3] == report.bound for row in rows)


class TestCouplingMiscalibration:
    def test_trace_norm(self):
        # H has sixteen unit-magnitude eigenvalues, so ||eta H||_1 = 16 |eta|
        pert = coupling_miscalibration(1e-3)
        assert pert.delta == pytest.approx(16e-3)
        assert trace_norm(pert.matrix) == pytest.approx(16e-3, abs=1e-12)

    def test_bound_holds(self):
        rho = werner(0.5)
        h = build_hamiltonian()
        pert = coupling_miscalibration(1e-3)
        bound = pert.delta / min(rho.diagonal()) ** 2
        for k in range(1, 17):
            assert weak_value_deviation(rho, h, pert, k) <= bound

    def test_scaled_hamiltonian_shifts_weak_values_proportionally(self):
        # H_e = (1+eta) H multiplies every weak value by (1+eta)
        rho = werner(0.5)
        h = build_hamiltonian()
        eta = 1e-3
        pert = coupling_miscalibration(eta)
        wv = weak_values_all(rho)
        for k, value in wv.values.items():
            expected = abs(value) * eta
            assert weak_value_deviation(rho, h, pert, k) == pytest.approx(
                expected, abs=1e-12
            )
