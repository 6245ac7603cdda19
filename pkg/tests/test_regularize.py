import math

import numpy as np
import pytest

from scf.bounds import diamond_bounds
from scf.channels import (
    Superoperator,
    identity_superop,
    random_cptp,
    random_gksl,
    to_ptm,
)
from scf.constructions import build_phi_mu, build_psi, build_remark_family
from scf.exceptions import (
    BudgetTooTight,
    NotChannel,
    NotGKSL,
    ZeroGenerator,
)
from scf.numerics import eig, spectra_match
from scf.regularize import (
    is_simple,
    markovian_approximation,
    regularize_channel,
    regularize_generator,
    regularize_markovian,
    regularize_markovian_product,
    scan_path,
)


@pytest.fixture
def psi2():
    return build_psi(2).superop


@pytest.fixture
def eq1():
    return build_phi_mu(1.0)


def feasible_remark_pair(rng):
    """Random (a, b) != (0, 0) with |a - b| <= 1 and |a + b| <= 1."""
    while True:
        a, b = rng.uniform(-1, 1, 2)
        if abs(a - b) <= 1.0 and abs(a + b) <= 1.0 and (abs(a) + abs(b)) > 1e-3:
            return a, b


class TestIsSimple:
    def test_simple_perturber(self, psi2):
        simple, gap = is_simple(psi2)
        assert simple
        assert abs(gap - 1.0 / 18.0) < 1e-12

    def test_nondiag_example(self, eq1):
        simple, gap = is_simple(eq1)
        assert not simple
        assert gap < 1e-12

    def test_identity_channel(self):
        simple, gap = is_simple(identity_superop(2))
        assert not simple
        assert gap < 1e-12


class TestRegularizeChannel:
    def test_reported_lambda_reproduces_transfer_matrix(self, eq1, psi2):
        # pick eps so the first schedule weight is exactly eps / ||diff||_F
        D = np.linalg.norm(eq1.mat - psi2.mat)
        out, rep = regularize_channel(eq1, 0.1 * D, budget_norm="fro")
        lam = rep.lam
        assert abs(lam - 0.1) < 1e-15
        assert rep.attempts == 1
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        expected[1, 2] = lam / 18.0
        expected[2, 1] = -lam / 18.0
        expected[1, 3] = -(1.0 - lam)
        assert np.linalg.norm(to_ptm(out).mat - expected) < 1e-14
        assert spectra_match(
            eig(out.mat).eigenvalues,
            [1, 0, 1j * lam / 18, -1j * lam / 18],
            1e-10,
        )

    def test_already_simple_input(self, psi2):
        out, rep = regularize_channel(psi2, 0.05)
        assert rep.attempts == 1
        assert is_simple(out)[0]
        # mixing the perturber with itself changes nothing
        assert np.linalg.norm(out.mat - psi2.mat) < 1e-15
        assert rep.fro_distance < 1e-15

    def test_defective_unital_input(self):
        phi = build_remark_family(1.0, 0.0)
        out, rep = regularize_channel(phi, 1e-3, budget_norm="fro")
        assert rep.achieved_gap > 1e-8
        assert rep.fro_distance <= 1e-3 + 1e-15
        assert rep.output_cert.is_cptp and rep.output_cert.is_unital
        # exact convexity identity
        D = np.linalg.norm(phi.mat - build_psi(2).superop.mat)
        assert abs(rep.fro_distance - rep.lam * D) < 1e-13

    def test_diamond_budget_mode(self, eq1):
        out, rep = regularize_channel(eq1, 1e-2, budget_norm="diamond_upper")
        assert rep.diamond_upper <= 1e-2 + 1e-14
        assert rep.achieved_gap > 1e-8

    def test_budget_too_tight(self, eq1):
        with pytest.raises(BudgetTooTight):
            regularize_channel(eq1, 1e-16)

    def test_rejects_non_tp(self):
        M = np.eye(4, dtype=complex)
        M[0, 0] = 2.0
        with pytest.raises(NotChannel):
            regularize_channel(Superoperator(2, M), 0.1)

    def test_trivial_dimension_one(self):
        s = Superoperator(1, np.eye(1, dtype=complex))
        out, rep = regularize_channel(s, 0.1)
        assert out.mat == s.mat
        assert rep.achieved_gap == math.inf

    def test_class_preservation_over_random_inputs(self):
        rng = np.random.default_rng(31)
        psi = build_psi(2).superop
        D = None
        for _ in range(100):
            phi = random_cptp(2, rng)
            out, rep = regularize_channel(phi, 1e-3)
            assert rep.attempts <= 2
            assert rep.achieved_gap > 1e-8
            in_flags = (rep.input_cert.is_tp, rep.input_cert.is_cp,
                        rep.input_cert.is_unital)
            out_flags = (rep.output_cert.is_tp, rep.output_cert.is_cp,
                         rep.output_cert.is_unital)
            assert in_flags == out_flags
            D = np.linalg.norm(phi.mat - psi.mat)
            assert abs(rep.fro_distance - rep.lam * D) < 1e-13

    def test_unital_class_preserved(self):
        rng = np.random.default_rng(32)
        for _ in range(20):
            phi = build_remark_family(*feasible_remark_pair(rng))
            out, rep = regularize_channel(phi, 1e-3)
            assert rep.input_cert.is_unital
            assert rep.output_cert.is_unital
            assert rep.output_cert.is_cptp

    def test_budget_monotonicity(self):
        rng = np.random.default_rng(33)
        for _ in range(20):
            phi = random_cptp(2, rng)
            _, rep_full = regularize_channel(phi, 1e-3)
            _, rep_half = regularize_channel(phi, 5e-4)
            assert rep_half.fro_distance <= rep_full.fro_distance + 1e-15

    def test_density_of_simple_spectrum_members(self):
        # defective-by-construction inputs are repaired at the first or
        # second schedule weight in at least 99 of 100 seeded cases
        rng = np.random.default_rng(34)
        quick = 0
        for _ in range(100):
            phi = build_remark_family(*feasible_remark_pair(rng))
            _, rep = regularize_channel(phi, 1e-3)
            if rep.attempts <= 2:
                quick += 1
        assert quick >= 99


class TestMarkovianApproximation:
    def test_identity_gives_zero(self):
        L = markovian_approximation(identity_superop(2))
        assert np.linalg.norm(L.mat) == 0.0

    def test_nondiag_example_spectrum(self, eq1):
        L = markovian_approximation(eq1)
        assert spectra_match(eig(L.mat).eigenvalues, [0, -1, -1, -1], 1e-9)

    def test_perturber_spectrum(self, psi2):
        L = markovian_approximation(psi2)
        expected = [0, -1, -1 + 1j / 18, -1 - 1j / 18]
        assert spectra_match(eig(L.mat).eigenvalues, expected, 1e-12)
        assert is_simple(L)[0]

    def test_rejects_non_channel(self):
        M = np.eye(4, dtype=complex) * 2.0
        with pytest.raises(NotChannel):
            markovian_approximation(Superoperator(2, M))


class TestRegularizeGenerator:
    def test_zero_generator_input(self, psi2):
        L0 = Superoperator(2, np.zeros((4, 4), dtype=complex))
        out, rep = regularize_generator(L0, 0.1)
        lam = rep.lam
        expected = lam * np.array([0, -1, -1 + 1j / 18, -1 - 1j / 18])
        assert spectra_match(eig(out.mat).eigenvalues, expected, 1e-12)
        assert np.linalg.norm(out.mat - lam * (psi2.mat - np.eye(4))) < 1e-15
        assert rep.output_cert.is_gksl

    def test_nondiag_markovian_generator(self, eq1):
        L = markovian_approximation(eq1)
        out, rep = regularize_generator(L, 1e-3)
        assert rep.achieved_gap > 1e-8
        assert rep.fro_distance <= 1e-3 + 1e-15
        assert rep.output_cert.is_gksl
        cert = rep.output_cert
        assert cert.gksl_trace_residual < 1e-9
        assert cert.gksl_ccp_min_eig >= -1e-9

    def test_already_simple(self, psi2):
        L = markovian_approximation(psi2)
        out, rep = regularize_generator(L, 0.05)
        assert rep.attempts == 1
        assert rep.output_cert.is_gksl

    def test_rejects_non_gksl(self):
        M = np.eye(4, dtype=complex)  # the identity map is not a generator
        with pytest.raises(NotGKSL):
            regularize_generator(Superoperator(2, M), 0.1)

    def test_random_generators_pass_certificates(self):
        rng = np.random.default_rng(35)
        for _ in range(30):
            L = random_gksl(2, rng)
            out, rep = regularize_generator(L, 1e-3)
            assert rep.output_cert.gksl_trace_residual < 1e-9
            assert rep.output_cert.gksl_ccp_min_eig >= -1e-9
            assert rep.achieved_gap > 1e-8
            # trace-preserving semigroups fix the trace functional: exactly
            # one eigenvalue sits at zero
            vals = eig(out.mat).eigenvalues
            assert np.count_nonzero(np.abs(vals) <= 1e-8) == 1


class TestRegularizeMarkovian:
    def test_nondiag_markovian_generator(self, eq1):
        L = markovian_approximation(eq1)
        out, rep = regularize_markovian(L, 0.1)
        assert rep.achieved_gap > 1e-8
        assert rep.diamond_upper < 0.1
        assert rep.output_cert.is_cptp
        assert len(rep.time_factors) == 1
        assert rep.time_factors[0] > 1.0

    def test_simple_generator_accepts_first_scan_point(self, psi2):
        L = Superoperator(2, 0.3 * (psi2.mat - np.eye(4)))
        out, rep = regularize_markovian(L, 0.1)
        t = rep.time_factors[0]
        L_ub = diamond_bounds(
            Superoperator(2, (1 - rep.lam) * L.mat
                          + rep.lam * (psi2.mat - np.eye(4)))).upper
        delta = min(0.5, 0.1 / 2.0 / L_ub)
        assert abs(t - (1.0 + delta)) < 1e-12
        assert rep.output_cert.is_cptp

    def test_zero_generator_rejected(self):
        with pytest.raises(ZeroGenerator):
            regularize_markovian(Superoperator(2, np.zeros((4, 4))), 0.1)

    def test_time_factor_respects_budget_window(self):
        rng = np.random.default_rng(36)
        for _ in range(10):
            L = random_gksl(2, rng)
            out, rep = regularize_markovian(L, 0.2)
            assert is_simple(out)[0]
            assert rep.output_cert.is_cptp
            assert 1.0 < rep.time_factors[0] <= 1.5 + 1e-12


class TestRegularizeMarkovianProduct:
    def test_single_factor_reduces_to_markovian(self, eq1):
        L = markovian_approximation(eq1)
        out_p, rep_p = regularize_markovian_product([L], 0.2)
        out_m, rep_m = regularize_markovian(L, 0.1)
        assert np.linalg.norm(out_p.mat - out_m.mat) < 1e-15
        assert rep_p.time_factors == rep_m.time_factors

    def test_two_identical_factors(self, eq1):
        L = markovian_approximation(eq1)
        out, rep = regularize_markovian_product([L, L], 0.1)
        assert is_simple(out)[0]
        assert len(rep.time_factors) == 2
        m = 2
        width = 0.1 / (2 * m * diamond_bounds(L).upper)
        assert 1.0 - width - 1e-12 <= rep.time_factors[1] <= 1.0
        assert rep.diamond_upper < 0.1
        assert rep.output_cert.is_cptp

    def test_zero_factor_rejected(self, eq1):
        L = markovian_approximation(eq1)
        Z = Superoperator(2, np.zeros((4, 4)))
        with pytest.raises(ZeroGenerator):
            regularize_markovian_product([L, Z], 0.1)

    def test_commuting_simple_factors_keep_time_factors_in_window(self, psi2):
        # scalar multiples of one simple generator commute and every partial
        # product stays simple, so each scanned time factor is accepted at 1
        gens = [Superoperator(2, a * (psi2.mat - np.eye(4)))
                for a in (0.7, 0.5, 0.3)]
        eps = 0.1
        out, rep = regularize_markovian_product(gens, eps)
        assert is_simple(out)[0]
        m = len(gens)
        for k in range(1, m):
            width = eps / (2 * m * diamond_bounds(gens[k]).upper)
            assert 1.0 - width - 1e-12 <= rep.time_factors[k] <= 1.0
        assert rep.time_factors[1] == 1.0
        assert rep.time_factors[2] == 1.0
        assert rep.diamond_upper < eps

    def test_random_factors_meet_budget(self):
        rng = np.random.default_rng(37)
        gens = [random_gksl(2, rng) for _ in range(3)]
        out, rep = regularize_markovian_product(gens, 0.1)
        assert is_simple(out)[0]
        assert rep.diamond_upper < 0.1
        assert rep.output_cert.is_cptp


class TestScanPath:
    def test_nondiag_to_perturber(self, eq1, psi2):
        rep = scan_path(eq1, psi2, 1001)
        assert len(rep.grid) == len(rep.gaps) == 1001
        # gap along the segment is t/18 in closed form
        assert np.max(np.abs(rep.gaps - rep.grid / 18.0)) < 1e-9
        assert len(rep.exceptional_intervals) == 1
        lo, hi = rep.exceptional_intervals[0]
        assert lo == 0.0
        assert hi < 1e-6

    def test_simple_to_itself_has_no_exceptional_points(self, psi2):
        rep = scan_path(psi2, psi2, 51)
        assert rep.exceptional_intervals == []
        assert np.min(rep.gaps) > 1e-8

    def test_inside_defective_family_everything_is_exceptional(self):
        rep = scan_path(build_phi_mu(0.3), build_phi_mu(0.9), 101)
        assert rep.exceptional_intervals == [(0.0, 1.0)]
        assert np.max(rep.gaps) < 1e-8

    def test_trajectories_shape(self, eq1, psi2):
        rep = scan_path(eq1, psi2, 11)
        assert rep.eigenvalues.shape == (11, 4)
