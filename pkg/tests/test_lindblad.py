"""Generator certification, semigroup simulation, and energy-bound tests."""

import numpy as np
import pytest

from eclim.lindblad import (
    BoundViolation,
    EnergyBoundReport,
    LindbladGenerator,
    StabilityCertificate,
    best_certificate,
    default_e0_grid,
    dissipation_matrix,
    evolve,
    joint_constants,
    min_omega,
    pencil_vector,
    stability_curve,
    verify_energy_bound,
)
from eclim.opcore import (
    DensityState,
    HermitianMatrix,
    ReferenceHamiltonian,
    energy,
    random_density,
    random_hermitian,
    random_reference,
    rng_from_seed,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def ref(*vals):
    return ReferenceHamiltonian(HermitianMatrix(np.diag(vals).astype(complex)))


def random_generator(d, rng, conservative=None):
    h = random_hermitian(d, rng).entries
    n_l = int(rng.integers(0, 3))
    ls = tuple(0.7 * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
               for _ in range(n_l))
    if conservative is None:
        conservative = bool(rng.integers(0, 2))
    if conservative or not ls:
        return LindbladGenerator.from_hamiltonian(h, ls)
    k = -1j * h - 0.5 * sum(l.conj().T @ l for l in ls) - 0.05 * np.eye(d)
    return LindbladGenerator(k, ls)


class TestGeneratorValidation:
    def test_hamiltonian_is_conservative(self):
        gen = LindbladGenerator.from_hamiltonian(SX)
        assert gen.formally_conservative

    def test_damping_is_conservative(self):
        gen = LindbladGenerator.from_hamiltonian(np.zeros((2, 2)), (LOWER,))
        assert gen.formally_conservative

    def test_strictly_dissipative_flagged(self):
        k = -0.5 * LOWER.conj().T @ LOWER - 0.1 * np.eye(2)
        gen = LindbladGenerator(k, (LOWER,))
        assert not gen.formally_conservative

    def test_rejects_expanding(self):
        with pytest.raises(ValueError):
            LindbladGenerator(0.1 * np.eye(2), (LOWER,))


class TestDissipationMatrix:
    def test_commuting_hamiltonian(self):
        gen = LindbladGenerator.from_hamiltonian(np.diag([1.0, 3.0]).astype(complex))
        m = dissipation_matrix(gen, ref(0.0, 1.0))
        assert np.allclose(m.entries, 0.0, atol=1e-12)

    def test_sigma_x_gives_minus_sigma_y(self):
        gen = LindbladGenerator.from_hamiltonian(SX)
        m = dissipation_matrix(gen, ref(0.0, 1.0))
        assert np.allclose(m.entries, -SY, atol=1e-12)
        assert sorted(np.linalg.eigvalsh(m.entries)) == [pytest.approx(-1.0),
                                                         pytest.approx(1.0)]

    def test_pure_damping(self):
        gen = LindbladGenerator(-0.5 * np.diag([0.0, 1.0]).astype(complex), (LOWER,))
        m = dissipation_matrix(gen, ref(0.0, 1.0))
        assert np.allclose(m.entries, -np.diag([0.0, 1.0]), atol=1e-12)


class TestMinOmega:
    def test_zero_matrix(self):
        cert = min_omega(HermitianMatrix(np.zeros((2, 2))), ref(0.0, 1.0), 1.0)
        assert cert.omega == 0.0

    def test_minus_sigma_y_pencil(self):
        # congruence gives off-diagonal 1/sqrt(e0(1+e0)); eigenvalues +-
        m = HermitianMatrix(-SY)
        assert min_omega(m, ref(0.0, 1.0), 1.0, symmetric=True).omega == pytest.approx(
            1.0 / np.sqrt(2.0), abs=1e-12)
        assert min_omega(m, ref(0.0, 1.0), 3.0, symmetric=True).omega == pytest.approx(
            1.0 / np.sqrt(12.0), abs=1e-12)

    def test_unit_slope_growth(self):
        g = ref(0.0, 1.0, 2.0)
        for e0 in (0.5, 2.0, 50.0):
            cert = min_omega(g.matrix, g, e0)
            expect = max(eps / (eps + e0) for eps in (0.0, 1.0, 2.0))
            assert cert.omega == pytest.approx(expect, abs=1e-12)

    def test_requires_positive_e0(self):
        with pytest.raises(ValueError):
            min_omega(HermitianMatrix(np.zeros((2, 2))), ref(0.0, 1.0), 0.0)

    def test_residual_nonnegative(self):
        rng = rng_from_seed(1)
        for _ in range(20):
            d = int(rng.integers(2, 6))
            m = random_hermitian(d, rng)
            g = random_reference(d, rng)
            cert = min_omega(m, g, 0.7, symmetric=bool(rng.integers(0, 2)))
            assert cert.residual >= -1e-10 * (1.0 + m.operator_norm())


class TestStabilityCurve:
    def test_commuting_all_zero(self):
        gen = LindbladGenerator.from_hamiltonian(np.diag([1.0, 3.0]).astype(complex))
        certs = stability_curve(gen, ref(0.0, 1.0), (0.5, 1.0, 2.0))
        assert all(c.omega == 0.0 for c in certs)

    def test_omega_nonincreasing(self):
        rng = rng_from_seed(2)
        gen = random_generator(4, rng)
        g = random_reference(4, rng)
        certs = stability_curve(gen, g, default_e0_grid(g))
        omegas = [c.omega for c in certs]
        assert all(b <= a + 1e-12 for a, b in zip(omegas, omegas[1:]))


class TestEvolve:
    def test_zero_generator(self):
        gen = LindbladGenerator.from_hamiltonian(np.zeros((2, 2)))
        rho = DensityState.pure(np.array([0.6, 0.8]))
        assert np.allclose(evolve(gen, rho, 2.5).entries, rho.entries, atol=1e-12)

    def test_amplitude_damping_closed_form(self):
        # pins the vectorization convention
        gen = LindbladGenerator.from_hamiltonian(np.zeros((2, 2)), (LOWER,))
        rho = DensityState.pure(np.array([0.0, 1.0]))
        for t in (0.2, 1.0, 3.0):
            out = evolve(gen, rho, t)
            expect = np.diag([1.0 - np.exp(-t), np.exp(-t)])
            assert np.allclose(out.entries, expect, atol=1e-10)

    def test_hamiltonian_matches_unitary_conjugation(self):
        rng = rng_from_seed(3)
        h = random_hermitian(3, rng)
        gen = LindbladGenerator.from_hamiltonian(h)
        rho = random_density(3, rng)
        t = 0.9
        evals, evecs = h.eigh()
        u = evecs @ np.diag(np.exp(-1j * evals * t)) @ evecs.conj().T
        expect = u @ rho.entries @ u.conj().T
        assert np.allclose(evolve(gen, rho, t).entries, expect, atol=1e-10)

    def test_trace_behavior(self):
        rng = rng_from_seed(4)
        cons = random_generator(3, rng, conservative=True)
        rho = random_density(3, rng)
        assert evolve(cons, rho, 1.3).trace() == pytest.approx(rho.trace(), abs=1e-9)
        diss = random_generator(3, rng, conservative=False)
        if not diss.formally_conservative:
            assert evolve(diss, rho, 1.3).trace() <= rho.trace() + 1e-9

    def test_negative_time_rejected(self):
        gen = LindbladGenerator.from_hamiltonian(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            evolve(gen, DensityState.pure(np.array([1.0, 0.0])), -0.1)

    def test_large_dimension_sparse_path(self):
        # dim 30 exercises the expm_multiply branch against the dense one
        n = 30
        a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
        gen = LindbladGenerator.from_hamiltonian(np.zeros((n, n)), (a,))
        pops = np.exp(-np.arange(n) / 2.0)
        pops /= pops.sum()
        rho = DensityState(HermitianMatrix(np.diag(pops).astype(complex)))
        number = ref(*np.arange(n, dtype=float))
        e0 = energy(number, rho)
        out = evolve(gen, rho, 0.8)
        assert energy(number, out) == pytest.approx(e0 * np.exp(-0.8), rel=1e-8)


class TestVerifyEnergyBound:
    def test_commuting_energy_constant(self):
        gen = LindbladGenerator.from_hamiltonian(np.diag([1.0, 3.0]).astype(complex))
        g = ref(0.0, 1.0)
        cert = min_omega(dissipation_matrix(gen, g), g, 1.0)
        rho = DensityState.pure(np.array([0.6, 0.8]))
        report = verify_energy_bound(gen, g, cert, rho, (0.1, 0.5, 1.0))
        assert cert.omega == 0.0
        for e_t in report.energies:
            assert e_t == pytest.approx(report.initial_energy, abs=1e-10)

    def test_damping_omega_zero(self):
        gen = LindbladGenerator.from_hamiltonian(np.zeros((2, 2)), (LOWER,))
        g = ref(0.0, 1.0)
        cert = min_omega(dissipation_matrix(gen, g), g, 1.0)
        assert cert.omega == 0.0
        rho = DensityState.pure(np.array([0.0, 1.0]))
        report = verify_energy_bound(gen, g, cert, rho, (0.2, 1.0, 2.0))
        assert report.worst_margin >= -1e-7

    def test_random_certified_generators(self):
        rng = rng_from_seed(5)
        for i in range(20):
            d = int(rng.integers(2, 6))
            gen = random_generator(d, rng)
            g = random_reference(d, rng)
            m = dissipation_matrix(gen, g)
            cert = min_omega(m, g, float(default_e0_grid(g)[6]))
            for _ in range(3):
                rho = random_density(d, rng)
                report = verify_energy_bound(gen, g, cert, rho,
                                             np.linspace(0.1, 2.0, 8))
                assert report.worst_margin >= -1e-7 * (1.0 + report.initial_energy
                                                       + cert.e0)

    def test_violation_raises(self):
        gen = LindbladGenerator.from_hamiltonian(SX)
        g = ref(0.0, 1.0)
        bogus = StabilityCertificate(0.0, 1e-6)
        rho = DensityState.pure(np.array([1.0, 0.0]))
        with pytest.raises(BoundViolation):
            verify_energy_bound(gen, g, bogus, rho, (1.0,))

    def test_first_order_sharpness(self):
        rng = rng_from_seed(6)
        for _ in range(10):
            d = int(rng.integers(2, 6))
            gen = random_generator(d, rng)
            g = random_reference(d, rng)
            m = dissipation_matrix(gen, g)
            e0 = 1.0
            psi = pencil_vector(m, g, e0)
            rho = DensityState.pure(psi)
            delta = 1e-5
            deriv = (energy(g, evolve(gen, rho, delta)) - energy(g, rho)) / delta
            expect = float(np.real(psi.conj() @ m.entries @ psi))
            assert deriv == pytest.approx(expect, rel=1e-3, abs=1e-8)


class TestJointConstants:
    def test_pairwise_max_verifies_for_each(self):
        rng = rng_from_seed(7)
        g = random_reference(3, rng)
        gens = [random_generator(3, rng) for _ in range(3)]
        grid = default_e0_grid(g)
        curves = [stability_curve(gen, g, grid) for gen in gens]
        joint = joint_constants(curves)
        cert = best_certificate(joint, 1.0, 1.0)
        for gen in gens:
            rho = random_density(3, rng)
            report = verify_energy_bound(gen, g, cert, rho, (0.25, 1.0))
            assert report.worst_margin >= -1e-7 * (1.0 + report.initial_energy + cert.e0)


def test_report_structure():
    gen = LindbladGenerator.from_hamiltonian(np.zeros((2, 2)))
    g = ref(0.0, 1.0)
    cert = StabilityCertificate(0.0, 1.0)
    rho = DensityState.pure(np.array([1.0, 0.0]))
    report = verify_energy_bound(gen, g, cert, rho, (0.5, 1.0))
    assert isinstance(report, EnergyBoundReport)
    assert len(report.times) == len(report.margins) == 2
