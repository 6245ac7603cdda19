import numpy as np
import pytest
from numpy.testing import assert_allclose

from scf.channels import (
    ChoiMatrix,
    KrausSet,
    PauliTransferMatrix,
    Superoperator,
    apply,
    certify,
    compose,
    identity_superop,
    random_cptp,
    to_choi,
    to_kraus,
    to_ptm,
    to_superop,
    vec,
)
from scf.constructions import build_phi_mu, build_psi
from scf.exceptions import DimensionMismatch, NotCP, NotQubit
from scf.numerics import eig, spectra_match

DELTA = 1.0 / 18.0

# Hand-assembled superoperator of the non-diagonalizable example channel:
# columns are vec of the images of |j><k| under
# rho -> [[rho11 + rho22, -rho11 + rho22], [-rho11 + rho22, rho11 + rho22]]/2.
NONDIAG_SUPEROP = 0.5 * np.array(
    [[1, 0, 0, 1],
     [-1, 0, 0, 1],
     [-1, 0, 0, 1],
     [1, 0, 0, 1]], dtype=complex)

# Choi matrix of the n = 2 simple-spectrum perturber, assembled entrywise
# from its basis action.
PSI2_CHOI = np.array(
    [[0.5, 0, 0, 1j * DELTA],
     [0, 0.5, 0, 0],
     [0, 0, 0.5, 0],
     [-1j * DELTA, 0, 0, 0.5]])


@pytest.fixture
def psi2():
    return build_psi(2).superop


@pytest.fixture
def eq1():
    return build_phi_mu(1.0)


def brute_choi(s):
    """Independent Choi assembly: apply the map to every |j><k|."""
    n = s.n
    J = np.zeros((n * n, n * n), dtype=complex)
    for j in range(n):
        for k in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[j, k] = 1.0
            J += np.kron(E, apply(s, E))
    return J


class TestConversions:
    def test_ptm_to_superop_matches_hand_matrix(self, eq1):
        assert np.linalg.norm(eq1.mat - NONDIAG_SUPEROP) < 1e-14

    def test_choi_of_identity(self):
        J = to_choi(identity_superop(2)).mat
        omega = np.array([1, 0, 0, 1.0])
        assert_allclose(J, np.outer(omega, omega), atol=1e-15)

    def test_choi_of_psi2_matches_hand_matrix(self, psi2):
        assert np.linalg.norm(to_choi(psi2).mat - PSI2_CHOI) < 1e-15

    def test_choi_matches_brute_assembly(self, psi2, eq1):
        rng = np.random.default_rng(21)
        for s in (psi2, eq1, random_cptp(3, rng)):
            assert np.linalg.norm(to_choi(s).mat - brute_choi(s)) < 1e-12

    def test_choi_of_nondiag_example_is_cp_boundary(self, eq1):
        w = np.linalg.eigvalsh(brute_choi(eq1))
        assert abs(w.min()) < 1e-12
        assert spectra_match(w, [0, 0, 1, 1], 1e-12)

    def test_superop_of_psi2_is_permuted_block_form(self, psi2):
        # basis order (11, 22, 12, 21) exhibits A + diag(i/18) + diag(-i/18)
        perm = [0, 3, 1, 2]
        block = np.zeros((4, 4), dtype=complex)
        block[:2, :2] = 0.5 * np.ones((2, 2))
        block[2, 2] = 1j * DELTA
        block[3, 3] = -1j * DELTA
        assert np.linalg.norm(psi2.mat[np.ix_(perm, perm)] - block) < 1e-15

    def test_kraus_of_identity(self):
        ks = to_kraus(to_choi(identity_superop(2)))
        assert len(ks.operators) == 1
        K = ks.operators[0]
        phase = K[0, 0] / abs(K[0, 0])
        assert np.linalg.norm(K / phase - np.eye(2)) < 1e-12

    def test_kraus_of_psi2(self, psi2):
        ks = to_kraus(to_choi(psi2))
        assert len(ks.operators) == 4
        assert ks.completeness_residual() < 1e-10

    def test_kraus_of_nondiag_example(self, eq1):
        assert len(to_kraus(to_choi(eq1)).operators) == 2

    def test_kraus_rejects_non_cp(self):
        # transpose map: Choi is the swap with eigenvalue -1
        swap = np.eye(4)[[0, 2, 1, 3]]
        with pytest.raises(NotCP):
            to_kraus(ChoiMatrix(2, swap.astype(complex) - 0.0))
        with pytest.raises(NotCP):
            to_kraus(to_choi(Superoperator(2, swap.astype(complex))))

    def test_kraus_reconstructs_channel(self):
        rng = np.random.default_rng(22)
        for n in (2, 3):
            s = random_cptp(n, rng)
            ks = to_kraus(to_choi(s))
            for j in range(n):
                for k in range(n):
                    E = np.zeros((n, n), dtype=complex)
                    E[j, k] = 1.0
                    rebuilt = sum(K @ E @ K.conj().T for K in ks.operators)
                    assert np.linalg.norm(rebuilt - apply(s, E)) < 1e-8

    def test_roundtrips_are_identities(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            s = random_cptp(2, rng)
            back = to_superop(to_choi(s))
            assert np.linalg.norm(back.mat - s.mat) < 1e-10
            back = to_superop(to_kraus(to_choi(s)))
            assert np.linalg.norm(back.mat - s.mat) < 1e-10
            back = to_superop(to_ptm(s))
            assert np.linalg.norm(back.mat - s.mat) < 1e-10

    def test_spectra_invariant_across_representations(self):
        rng = np.random.default_rng(24)
        for _ in range(100):
            s = random_cptp(2, rng)
            ref = eig(s.mat).eigenvalues
            for x in (to_choi(s), to_kraus(to_choi(s)), to_ptm(s)):
                assert spectra_match(eig(to_superop(x).mat).eigenvalues, ref, 1e-8)

    def test_to_ptm_requires_qubit(self):
        with pytest.raises(NotQubit):
            to_ptm(identity_superop(3))


class TestApply:
    def test_nondiag_example_on_ground_state(self, eq1):
        out = apply(eq1, np.diag([1.0, 0.0]))
        assert_allclose(out, 0.5 * np.array([[1, -1], [-1, 1.0]]), atol=1e-14)

    def test_identity(self):
        rng = np.random.default_rng(25)
        rho = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        assert_allclose(apply(identity_superop(2), rho), rho, atol=1e-15)

    def test_psi2_entrywise_action(self, psi2):
        # diagonals average onto the identity; off-diagonals scale by +-i/18
        out = apply(psi2, np.ones((2, 2)))
        expected = np.array([[1.0, 1j * DELTA], [-1j * DELTA, 1.0]])
        assert_allclose(out, expected, atol=1e-15)

    def test_dimension_mismatch(self, psi2):
        with pytest.raises(DimensionMismatch):
            apply(psi2, np.eye(3))


class TestPtm:
    def test_nondiag_example_ptm(self, eq1):
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        expected[1, 3] = -1.0
        assert np.linalg.norm(to_ptm(eq1).mat - expected) < 1e-14

    def test_identity_ptm(self):
        assert_allclose(to_ptm(identity_superop(2)).mat, np.eye(4), atol=1e-14)

    def test_convex_combination_ptm(self, psi2):
        lam, mu = 0.3, 0.7
        mix = Superoperator(2, (1 - lam) * build_phi_mu(mu).mat + lam * psi2.mat)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        expected[1, 2] = lam * DELTA
        expected[2, 1] = -lam * DELTA
        expected[1, 3] = -(1 - lam) * mu
        assert np.linalg.norm(to_ptm(mix).mat - expected) < 1e-14

    def test_ptm_real_for_hermiticity_preserving(self):
        rng = np.random.default_rng(26)
        for _ in range(20):
            P = to_ptm(random_cptp(2, rng))
            assert P.mat.dtype == float  # complex parts above 1e-12 would raise


class TestCertify:
    def test_psi3_is_unital_cptp(self):
        cert = certify(build_psi(3).superop)
        assert cert.tp_residual < 1e-12
        assert cert.unital_residual < 1e-12
        # the Choi spectrum contains exact zeros for n >= 3, so "strictly
        # positive" is unattainable; certify at the CP tolerance instead
        assert cert.cp_min_eig >= -1e-12
        assert cert.is_cptp and cert.is_unital

    def test_identity_channel(self):
        cert = certify(identity_superop(2))
        assert cert.tp_residual < 1e-14
        assert cert.unital_residual < 1e-14
        assert abs(cert.cp_min_eig) < 1e-14  # rank-one PSD Choi
        assert not cert.positivity_refuted

    def test_markovian_shift_is_gksl(self, eq1):
        L = Superoperator(2, eq1.mat - np.eye(4))
        cert = certify(L, kind="generator")
        assert cert.gksl_trace_residual < 1e-12
        assert cert.gksl_ccp_min_eig >= -1e-10
        assert cert.is_gksl

    def test_random_cptp_certifies_and_composes(self):
        rng = np.random.default_rng(27)
        for _ in range(25):
            a = random_cptp(2, rng)
            b = random_cptp(2, rng)
            for s in (a, b, compose(a, b)):
                cert = certify(s, rng=np.random.default_rng(0), samples=200)
                assert cert.tp_residual < 1e-10
                assert cert.cp_min_eig >= -1e-10
                assert cert.is_cptp

    def test_markovian_approximation_always_gksl(self):
        rng = np.random.default_rng(28)
        for n in (2, 3):
            for _ in range(10):
                X = random_cptp(n, rng)
                L = Superoperator(n, X.mat - np.eye(n * n))
                cert = certify(L, kind="generator", samples=200)
                assert cert.is_gksl

    def test_transpose_map_fails_cp_but_not_positivity(self):
        swap = np.eye(4)[[0, 2, 1, 3]].astype(complex)
        cert = certify(Superoperator(2, swap))
        assert cert.is_tp
        assert not cert.is_cp
        assert cert.cp_min_eig < -0.9
        assert not cert.positivity_refuted  # transposition is positive

    def test_positivity_refuted_for_nonpositive_map(self):
        # rho -> rho - tr(rho) 1/2 sends |0><0| to a matrix with eigenvalue -1/2
        M = np.eye(4, dtype=complex)
        M[0, 0] -= 0.5
        M[0, 3] -= 0.5
        M[3, 0] -= 0.5
        M[3, 3] -= 0.5
        cert = certify(Superoperator(2, M))
        assert cert.positivity_min_sample < -0.4
        assert cert.positivity_refuted

    def test_certify_rejects_unknown_kind(self, psi2):
        with pytest.raises(ValueError):
            certify(psi2, kind="unitary")


class TestContainers:
    def test_superoperator_validates_shape(self):
        with pytest.raises(DimensionMismatch):
            Superoperator(2, np.eye(3, dtype=complex))

    def test_kraus_set_nonempty(self):
        with pytest.raises(DimensionMismatch):
            KrausSet(2, [])

    def test_ptm_rejects_complex(self):
        with pytest.raises(DimensionMismatch):
            PauliTransferMatrix(np.eye(4) + 1e-6j * np.ones((4, 4)))

    def test_vec_convention_row_stacking(self):
        E = np.zeros((2, 2))
        E[0, 1] = 1.0
        assert_allclose(vec(E), [0, 1, 0, 0])
