import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakdetect.protocol import (
    DecisionPath,
    HamiltonianKind,
    NoSignalError,
    OracleMismatchError,
    RatioSet,
    TAU_DIAG,
    WeakValueSet,
    build_hamiltonian,
    build_local_hamiltonian,
    det_bracket,
    det_bracket_terms,
    detect,
    detect_pure_local,
    diagonals_from_postselection,
    diagonals_from_ratios,
    element_ratio,
    exact_weak_value,
    reconstruct,
    weak_values_all,
)
from weakdetect.states import (
    PositivityError,
    PureAmplitudes,
    Verdict,
    det_ptb,
    ppt_oracle,
    random_mixed,
    random_pure,
    trace_distance,
    validate,
    werner,
)

seeds = st.integers(0, 10**6)

# the twelve informative outcomes and the element ratios they measure
RATIO_ORACLE = {
    1: lambda m: np.conj(m[0, 1]) / m[0, 0].real,
    2: lambda m: m[0, 1] / m[1, 1].real,
    3: lambda m: np.conj(m[2, 3]) / m[2, 2].real,
    4: lambda m: m[2, 3] / m[3, 3].real,
    9: lambda m: np.conj(m[0, 2]) / m[0, 0].real,
    10: lambda m: np.conj(m[1, 3]) / m[1, 1].real,
    11: lambda m: m[0, 2] / m[2, 2].real,
    12: lambda m: m[1, 3] / m[3, 3].real,
    13: lambda m: np.conj(m[0, 3]) / m[0, 0].real,
    14: lambda m: np.conj(m[1, 2]) / m[1, 1].real,
    15: lambda m: m[1, 2] / m[2, 2].real,
    16: lambda m: m[0, 3] / m[3, 3].real,
}


def basis_state(i):
    m = np.zeros((4, 4), dtype=complex)
    m[i, i] = 1.0
    return validate(m)


class TestBuildHamiltonian:
    def test_flip_amplitudes(self):
        h = build_hamiltonian().matrix
        # |0000> -> |0001| block flips the last qubit
        assert h[1, 0] == 1
        # |1111> -> |1100|: the |11> block flips both second-copy qubits
        assert h[12, 15] == 1

    def test_squares_to_identity(self):
        h = build_hamiltonian().matrix
        np.testing.assert_allclose(h @ h, np.eye(16), atol=1e-15)

    def test_hermitian(self):
        h = build_hamiltonian().matrix
        np.testing.assert_allclose(h, h.conj().T, atol=1e-15)

    def test_block_structure(self):
        h = build_hamiltonian().matrix
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        eye2 = np.eye(2)
        np.testing.assert_allclose(h[0:4, 0:4], np.kron(eye2, sx))
        np.testing.assert_allclose(h[4:8, 4:8], np.kron(eye2, sx))
        np.testing.assert_allclose(h[8:12, 8:12], np.kron(sx, eye2))
        np.testing.assert_allclose(h[12:16, 12:16], np.kron(sx, sx))
        off = h.copy()
        for i in range(4):
            off[4 * i : 4 * i + 4, 4 * i : 4 * i + 4] = 0
        assert np.max(np.abs(off)) == 0

    def test_local_hamiltonian(self):
        h = build_local_hamiltonian()
        assert h.kind is HamiltonianKind.PURE_LOCAL
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        np.testing.assert_allclose(h.matrix, np.kron(np.eye(8), sx))
        np.testing.assert_allclose(h.matrix @ h.matrix, np.eye(16), atol=1e-15)


class TestExactWeakValue:
    def test_werner_k16(self):
        # w/s = (1/4) / (3/8) = 2/3
        h = build_hamiltonian()
        value = exact_weak_value(werner(0.5), h, 16)
        assert value == pytest.approx(2 / 3, abs=1e-14)

    def test_werner_k1_zero(self):
        value = exact_weak_value(werner(0.5), build_hamiltonian(), 1)
        assert value == 0

    def test_bell_k16(self, bell):
        assert exact_weak_value(bell, build_hamiltonian(), 16) == pytest.approx(1.0)

    def test_no_signal(self, bell):
        with pytest.raises(NoSignalError):
            exact_weak_value(bell, build_hamiltonian(), 6)  # probability q^2 = 0

    def test_bad_outcome_index(self, bell):
        with pytest.raises(ValueError):
            exact_weak_value(bell, build_hamiltonian(), 17)


class TestWeakValuesAll:
    @given(seeds)
    def test_identities(self, seed):
        rho = random_mixed(seed)
        wv = weak_values_all(rho)
        for k, oracle in RATIO_ORACLE.items():
            assert abs(wv.values[k] - oracle(rho.matrix)) <= 1e-12

    @given(seeds)
    def test_redundant_outcomes(self, seed):
        wv = weak_values_all(random_mixed(seed))
        for k in (5, 6, 7, 8):
            assert abs(wv.values[k] - wv.values[k - 4]) <= 1e-12

    def test_maximally_mixed_all_zero(self, maximally_mixed):
        wv = weak_values_all(maximally_mixed)
        assert wv.defined == frozenset(range(1, 17))
        assert all(v == 0 for v in wv.values.values())

    def test_defined_mask_tracks_probabilities(self, bell):
        wv = weak_values_all(bell)
        assert wv.defined == frozenset({1, 4, 13, 16})
        assert wv.probabilities[6] == 0.0
        assert wv.probabilities[16] == pytest.approx(0.25)

    def test_oracle_mismatch_detected(self, monkeypatch):
        rho = random_mixed(4)
        import weakdetect.protocol as proto

        broken = dict(proto.OUTCOME_RATIO_INDEX)
        broken[2] = (0, 2, 1)  # wrong element for outcome 2
        monkeypatch.setattr(proto, "OUTCOME_RATIO_INDEX", broken)
        with pytest.raises(OracleMismatchError):
            weak_values_all(rho)


class TestDiagonalsFromPostselection:
    def test_werner_half(self):
        # Pr(k=1) = p^2 = (3/8)^2 = 9/64
        w = werner(0.5)
        wv = weak_values_all(w)
        assert wv.probabilities[1] == pytest.approx(9 / 64, abs=1e-14)
        p, q, r, s = diagonals_from_postselection(w)
        assert (p, s) == (pytest.approx(3 / 8), pytest.approx(3 / 8))
        assert (q, r) == (pytest.approx(1 / 8), pytest.approx(1 / 8))

    def test_maximally_mixed(self, maximally_mixed):
        assert diagonals_from_postselection(maximally_mixed) == pytest.approx(
            (0.25, 0.25, 0.25, 0.25)
        )

    def test_basis_state(self):
        assert diagonals_from_postselection(basis_state(1)) == (0.0, 1.0, 0.0, 0.0)

    @given(seeds)
    def test_matches_diagonal(self, seed):
        rho = random_mixed(seed)
        np.testing.assert_allclose(
            diagonals_from_postselection(rho), rho.diagonal(), atol=1e-12
        )


class TestDiagonalsFromRatios:
    @given(seeds)
    def test_agrees_with_postselection(self, seed):
        rho = random_mixed(seed)
        wv = weak_values_all(rho)
        chain = diagonals_from_ratios(wv)
        np.testing.assert_allclose(chain, diagonals_from_postselection(rho), atol=1e-8)

    def test_singular_for_diagonal_states(self, maximally_mixed):
        wv = weak_values_all(maximally_mixed)
        with pytest.raises(ValueError):
            diagonals_from_ratios(wv)


class TestDetBracket:
    @given(seeds)
    def test_matches_determinant(self, seed):
        rho = random_mixed(seed)
        diag = rho.diagonal()
        bracket = det_bracket(RatioSet.from_state(rho), diag)
        pqrs = np.prod(diag)
        lu = det_ptb(rho)
        assert abs(bracket * pqrs - lu) <= 1e-10 * max(abs(lu), pqrs)

    @given(seeds)
    def test_ratio_route_equals_element_route(self, seed):
        rho = random_mixed(seed)
        wv = weak_values_all(rho)
        diag = diagonals_from_postselection(rho)
        via_wv = det_bracket(RatioSet.from_weak_values(wv), diag)
        via_elements = det_bracket(RatioSet.from_state(rho), rho.diagonal())
        assert via_wv == pytest.approx(via_elements, rel=1e-9, abs=1e-12)

    def test_term_table_audit(self):
        """Each documented term must equal its direct element expression."""
        rho = random_mixed(99)
        m = rho.matrix
        p, q, r, s = rho.diagonal()
        u, v, w = m[0, 1], m[0, 2], m[0, 3]
        x, y, z = m[1, 2], m[1, 3], m[2, 3]
        c = np.conj
        expected = [
            +u * c(u) * z * c(z) / (p * q * r * s),
            -u * v * c(y) * c(z) / (p * q * r * s),
            -u * c(w) * x * z / (p * q * r * s),
            -c(u) * c(v) * y * z / (p * q * r * s),
            -c(u) * w * c(x) * c(z) / (p * q * r * s),
            +v * c(v) * y * c(y) / (p * q * r * s),
            -v * c(w) * c(x) * y / (p * q * r * s),
            -c(v) * w * x * c(y) / (p * q * r * s),
            +w * c(w) * x * c(x) / (p * q * r * s),
            +u * v * c(w) / (p * q * r),
            +c(u) * c(v) * w / (p * q * r),
            +u * x * c(y) / (p * q * s),
            +c(u) * c(x) * y / (p * q * s),
            -u * c(u) / (p * q),
            +v * c(x) * c(z) / (p * r * s),
            +c(v) * x * z / (p * r * s),
            -v * c(v) / (p * r),
            -x * c(x) / (p * s),
            +w * c(y) * c(z) / (q * r * s),
            +c(w) * y * z / (q * r * s),
            -w * c(w) / (q * r),
            -y * c(y) / (q * s),
            -z * c(z) / (r * s),
            1.0,
        ]
        terms = det_bracket_terms(RatioSet.from_state(rho), rho.diagonal())
        assert len(terms) == 24
        for got, want in zip(terms, expected):
            assert got == pytest.approx(want, rel=1e-10, abs=1e-13)

    @given(seeds)
    def test_conjugate_consistency(self, seed):
        # conj(u*/p) * p must equal (u/q) * q whenever all four are defined
        rho = random_mixed(seed)
        wv = weak_values_all(rho)
        p, q, _, _ = diagonals_from_postselection(rho)
        lhs = np.conj(wv.values[1]) * p
        rhs = wv.values[2] * q
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs))


class TestDetect:
    def test_bell_case_ii(self, bell):
        report = detect(bell)
        assert report.path is DecisionPath.CASE_II
        assert report.verdict is Verdict.ENTANGLED
        assert report.det_value == pytest.approx(-1 / 16, abs=1e-12)
        assert report.det_scaled is None
        assert report.e_estimate == pytest.approx(1 / 16, abs=1e-12)

    def test_basis_state_case_i_separable(self):
        report = detect(basis_state(1))  # p = 0 then r = 0
        assert report.path is DecisionPath.CASE_I
        assert report.verdict is Verdict.SEPARABLE
        assert report.det_value == 0.0

    def test_psi_plus_case_i_entangled(self):
        # (|01> + |10>)/sqrt(2): p = s = 0, x = 1/2 decides
        m = np.zeros((4, 4), dtype=complex)
        m[1, 1] = m[2, 2] = 0.5
        m[1, 2] = m[2, 1] = 0.5
        report = detect(validate(m))
        assert report.path is DecisionPath.CASE_I
        assert report.verdict is Verdict.ENTANGLED
        assert report.det_value == pytest.approx(-1 / 16, abs=1e-12)

    def test_werner_general_separable(self):
        report = detect(werner(0.2))
        assert report.path is DecisionPath.GENERAL
        assert report.verdict is Verdict.SEPARABLE
        assert report.det_value == pytest.approx(1.2**3 * 0.4 / 256, abs=1e-12)

    def test_werner_general_entangled(self):
        report = detect(werner(0.5))
        assert report.path is DecisionPath.GENERAL
        assert report.verdict is Verdict.ENTANGLED
        assert report.det_value == pytest.approx(-27 / 4096, abs=1e-12)
        assert report.det_scaled == pytest.approx(
            report.det_value / np.prod(werner(0.5).diagonal()), rel=1e-9
        )

    def test_rank_deficient_s_zero_probes_x(self):
        # s = 0 silences every outcome that measures x; the probe falls back
        # to the matrix element and still classifies correctly
        psi = np.array([0.6, 0.48, 0.64, 0.0], dtype=complex)
        rho = validate(np.outer(psi, psi.conj()))
        report = detect(rho)
        assert report.path is DecisionPath.CASE_I
        assert report.verdict is Verdict.ENTANGLED
        assert ppt_oracle(rho) is Verdict.ENTANGLED

    @given(seeds)
    def test_verdict_agreement(self, seed):
        rho = random_mixed(seed)
        if abs(det_ptb(rho)) > 1e-9:
            assert detect(rho).verdict is ppt_oracle(rho)

    def test_named_families_agreement(self):
        for p_mix in (0.0, 0.1, 1 / 3, 0.34, 0.6, 1.0):
            rho = werner(p_mix)
            assert detect(rho).verdict is ppt_oracle(rho)

    def test_report_weak_values_included(self, bell):
        report = detect(bell)
        assert set(report.weak_values) == {1, 4, 13, 16}
        doc = report.to_json_dict()
        assert doc["verdict"] == "Entangled"
        assert doc["path"] == "CaseII"
        assert doc["weak_values"]["16"] == [1.0, 0.0]


class TestReconstruct:
    @given(seeds)
    def test_round_trip(self, seed):
        rho = random_mixed(seed)
        rebuilt = reconstruct(
            weak_values_all(rho), diagonals_from_postselection(rho)
        )
        assert trace_distance(rho, rebuilt) <= 1e-8

    def test_maximally_mixed_exact(self, maximally_mixed):
        rebuilt = reconstruct(
            weak_values_all(maximally_mixed),
            diagonals_from_postselection(maximally_mixed),
        )
        np.testing.assert_array_equal(rebuilt.matrix, maximally_mixed.matrix)

    def test_bell_from_defined_ratios(self, bell):
        # only outcomes 1, 4, 13, 16 carry signal; w comes from 16, the rest
        # fall back to zero
        rebuilt = reconstruct(weak_values_all(bell), diagonals_from_postselection(bell))
        assert trace_distance(bell, rebuilt) <= 1e-12
        assert rebuilt.w == pytest.approx(0.5)
        assert rebuilt.x == 0

    def test_fallback_to_conjugate_partner(self):
        rho = random_mixed(17)
        wv = weak_values_all(rho)
        # strip the primary outcomes so every element uses its fallback
        reduced = WeakValueSet(
            values={k: v for k, v in wv.values.items() if k in (1, 3, 9, 10, 13, 14)},
            probabilities=wv.probabilities,
        )
        rebuilt = reconstruct(reduced, diagonals_from_postselection(rho))
        assert trace_distance(rho, rebuilt) <= 1e-8

    def test_rejects_bad_diagonal_sum(self):
        wv = weak_values_all(werner(0.5))
        with pytest.raises(ValueError):
            reconstruct(wv, (0.5, 0.5, 0.5, 0.5))

    def test_rejects_negative_diagonal(self):
        wv = weak_values_all(werner(0.5))
        with pytest.raises(ValueError):
            reconstruct(wv, (1.2, -0.2, 0.0, 0.0))

    def test_rejects_inconsistent_data(self, bell):
        # Bell weak values give w/s = 1, so w = s after recovery; forcing
        # s > p makes the (|00>, |11>) block indefinite
        wv = weak_values_all(bell)
        with pytest.raises(PositivityError):
            reconstruct(wv, (0.02, 0.0, 0.0, 0.98))


class TestDetectPureLocal:
    def test_bell_entangled(self):
        psi = PureAmplitudes(1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2))
        report = detect_pure_local(psi)
        assert report.verdict is Verdict.ENTANGLED
        assert report.path is DecisionPath.PURE_LOCAL
        # |ad - bc| = 1/2
        assert report.det_value == pytest.approx(-(0.5**4), abs=1e-12)

    def test_product_state_separable(self):
        psi = PureAmplitudes(1 / np.sqrt(2), 0, 1 / np.sqrt(2), 0)
        assert detect_pure_local(psi).verdict is Verdict.SEPARABLE

    def test_full_support_entangled(self):
        # u/q = 1 while z/s = -1: unequal weak values flag entanglement
        psi = PureAmplitudes(0.5, 0.5, 0.5, -0.5)
        report = detect_pure_local(psi)
        assert report.verdict is Verdict.ENTANGLED
        assert report.weak_values[2] == pytest.approx(1.0)
        assert report.weak_values[4] == pytest.approx(-1.0)

    def test_full_support_separable(self):
        v = np.kron([0.6, 0.8], [0.8, 0.6j]).astype(complex)
        psi = PureAmplitudes(*v)
        assert detect_pure_local(psi).verdict is Verdict.SEPARABLE

    @given(seeds)
    def test_agreement_with_discriminant_oracle(self, seed):
        psi = random_pure(seed)
        oracle = abs(psi.a * psi.d - psi.b * psi.c) > 1e-9
        got = detect_pure_local(psi).verdict is Verdict.ENTANGLED
        assert got == oracle

    @given(seeds)
    def test_matches_ppt_on_pure_states(self, seed):
        psi = random_pure(seed)
        assert detect_pure_local(psi).verdict is ppt_oracle(psi.to_state())


def test_element_ratio_no_signal(bell):
    with pytest.raises(NoSignalError):
        element_ratio(bell, 14)  # q = 0


def test_case_thresholds_respected():
    # diagonal entries just above TAU_DIAG still route to the general path
    m = np.diag([0.5 - 1e-6, 1e-6, 1e-6, 0.5 - 1e-6]).astype(complex)
    report = detect(validate(m))
    assert report.path is DecisionPath.GENERAL
    assert report.verdict is Verdict.SEPARABLE
