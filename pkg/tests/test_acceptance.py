"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is pinned here and nothing is deferred to later
calibration.
"""

import time

import numpy as np
import pytest

from eclim.apps import SpeedLimitConfig, group_qsl, speedlimit_run, trotter_run
from eclim.channels import (
    KrausChannel,
    dual_apply,
    max_output_energy,
    monotone_image_check,
    sqrt_reference_certificate,
)
from eclim.gaussian import (
    GaussianGenerator,
    GaussianState,
    evolve_gaussian,
    fock_damping_crosscheck,
    gaussian_stability,
    generator_dictionary,
    generator_from_dictionary,
    state_energy,
    symplectic_form,
)
from eclim.lindblad import (
    BoundViolation,
    LindbladGenerator,
    default_e0_grid,
    dissipation_matrix,
    evolve,
    min_omega,
    pencil_vector,
    verify_energy_bound,
)
from eclim.models import (
    BirthRates,
    birth_epsilons,
    birth_tau,
    birth_trace,
    spin_system,
)
from eclim.norms import (
    constrained_rayleigh_max,
    ecd_norm_cp,
    eco_norm,
    random_feasible_sample_max,
)
from eclim.opcore import (
    DensityState,
    HermitianMatrix,
    ReferenceHamiltonian,
    dual_scan,
    energy,
    haar_state,
    psd_order_leq,
    random_density,
    random_hermitian,
    random_psd,
    random_reference,
    rng_from_seed,
)


def report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num} [{status}] {detail}")
    assert ok, f"criterion {num}: {detail}"


def ref(*vals):
    return ReferenceHamiltonian(HermitianMatrix(np.diag(vals).astype(complex)))


def random_cp_channel(d, rng, n_kraus=2):
    ks = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
          for _ in range(n_kraus)]
    s = sum(k.conj().T @ k for k in ks)
    top = float(np.linalg.eigvalsh((s + s.conj().T) / 2.0)[-1])
    return KrausChannel(tuple(k / np.sqrt(top * (1.0 + 1e-12)) for k in ks))


def test_criterion_1_duality_gap_closure():
    """200 random instances: dual value matches the primal oracle to 1e-6."""
    rng = rng_from_seed(1001)
    t0 = time.time()
    worst, most_negative = 0.0, 0.0
    for i in range(200):
        d = int(rng.integers(2, 7))
        m = random_psd(d, rng)
        g = random_reference(d, rng)
        e = [0.1, 1.0, 10.0][i % 3]
        dual, _ = dual_scan(m, g, e)
        ascent, _ = constrained_rayleigh_max(m, g, e, restarts=64, seed=i)
        sampled = random_feasible_sample_max(m, g, e, 100000, seed=i)
        gap = (dual - max(ascent, sampled)) / max(1.0, abs(dual))
        worst = max(worst, gap)
        most_negative = min(most_negative, gap)
    elapsed = time.time() - t0
    # the 1e-9 fuzz below zero covers roundoff in evaluating the primal
    ok = worst <= 1e-6 and most_negative >= -1e-9 and elapsed < 60.0
    report(1, ok, f"duality gap in [{most_negative:.2e}, {worst:.2e}] rel, "
                  f"200 instances in {elapsed:.1f}s (< 60s)")


def test_criterion_2_eco_analytic_cases():
    v1, _ = eco_norm(np.diag([0.0, 1.0]), ref(0.0, 1.0), 0.25)
    v2, _ = eco_norm(np.array([[0, 1], [1, 0]], dtype=complex), ref(0.0, 1.0), 0.7)
    v3, _ = eco_norm(np.diag([0.0, 0.0, 3.0]), ref(0.0, 1.0, 2.0), 1.0)
    ok = (abs(v1 - 0.5) < 1e-9 and abs(v2 - 1.0) < 1e-9
          and abs(v3 - np.sqrt(4.5)) < 1e-9)
    report(2, ok, f"analytic ECO values ({v1:.12f}, {v2:.12f}, {v3:.12f}) "
                  "match (0.5, 1, sqrt(4.5)) to 1e-9")


def test_criterion_3_certificate_soundness():
    """100 certified generators: Gronwall bound and first-order sharpness."""
    rng = rng_from_seed(1003)
    t0 = time.time()
    worst_margin = np.inf
    worst_deriv = 0.0
    for i in range(100):
        d = int(rng.integers(2, 6))
        h = random_hermitian(d, rng).entries
        n_l = int(rng.integers(0, 3))
        ls = tuple(0.6 * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
                   for _ in range(n_l))
        gen = LindbladGenerator.from_hamiltonian(h, ls)
        g = random_reference(d, rng)
        m = dissipation_matrix(gen, g)
        e0 = float(default_e0_grid(g)[int(rng.integers(3, 10))])
        cert = min_omega(m, g, e0)
        times = np.linspace(0.05, 2.0, 20)
        for _ in range(20):
            rho = random_density(d, rng)
            rep = verify_energy_bound(gen, g, cert, rho, times)
            scaled = rep.worst_margin / (1.0 + rep.initial_energy + cert.e0)
            worst_margin = min(worst_margin, scaled)
        psi = pencil_vector(m, g, e0)
        rho = DensityState.pure(psi)
        delta = 1e-5
        deriv = (energy(g, evolve(gen, rho, delta)) - energy(g, rho)) / delta
        expect = float(np.real(psi.conj() @ m.entries @ psi))
        rel = abs(deriv - expect) / max(1e-6, abs(expect))
        worst_deriv = max(worst_deriv, rel)
    elapsed = time.time() - t0
    ok = worst_margin >= -1e-7 and worst_deriv <= 1e-3 and elapsed < 120.0
    report(3, ok, f"worst scaled margin {worst_margin:.2e} (>= -1e-7), "
                  f"worst derivative error {worst_deriv:.2e} (<= 1e-3), "
                  f"{elapsed:.1f}s (< 120s)")


def test_criterion_4_submultiplicativity():
    """Both submultiplicativity chains on 100 random cp instances at 1e-8.

    The concavity link in the second inequality requires the budget to
    grow, so it is applied with max(f(E), E); when f(E) < E monotonicity
    supplies the same bound.
    """
    rng = rng_from_seed(1004)
    ok = True
    detail_worst = 0.0
    for i in range(100):
        d = int(rng.integers(2, 5))
        g = random_reference(d, rng)
        e = [0.25, 1.0, 4.0][i % 3]
        # ECO chain: energy-limited contraction V, arbitrary matrix W
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        v = a / np.linalg.svd(a, compute_uv=False)[0]
        w = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        f_v, _ = max_output_energy(KrausChannel.unitary(v), g, g, e)
        lhs, _ = eco_norm(w @ v, g, e)
        mid, _ = eco_norm(w, g, max(f_v, 1e-12))
        base, _ = eco_norm(w, g, e)
        chain1 = lhs <= mid + 1e-8 * (1.0 + mid)
        chain2 = mid <= np.sqrt(max(f_v, e) / e) * base + 1e-8 * (1.0 + base)
        # ECD chain for cp maps S, T
        s_chan = random_cp_channel(d, rng)
        t_chan = random_cp_channel(d, rng)
        f_t, _ = max_output_energy(t_chan, g, g, e)
        st = KrausChannel(tuple(ks @ kt for ks in s_chan.kraus for kt in t_chan.kraus))
        lhs2, _ = ecd_norm_cp(st, g, e)
        mid2, _ = ecd_norm_cp(s_chan, g, max(f_t, 1e-12))
        base2, _ = ecd_norm_cp(s_chan, g, e)
        chain3 = lhs2 <= mid2 + 1e-8 * (1.0 + mid2)
        chain4 = mid2 <= (max(f_t, e) / e) * base2 + 1e-8 * (1.0 + base2)
        ok = ok and chain1 and chain2 and chain3 and chain4
        detail_worst = max(detail_worst, lhs - mid, lhs2 - mid2)
    report(4, ok, f"submultiplicativity chains hold on 100 cp instances "
                  f"(worst slack {detail_worst:.2e})")


def test_criterion_5_gaussian_layer():
    rng = rng_from_seed(1005)

    def random_gen(n):
        xdot = rng.standard_normal((2 * n, 2 * n))
        sigma = symplectic_form(n)
        b = xdot.T @ sigma + sigma @ xdot
        ydot = rng.standard_normal((2 * n, 2 * n))
        ydot = ydot @ ydot.T + (np.linalg.norm(b, 2) + 0.05) * np.eye(2 * n)
        return GaussianGenerator(n, xdot, ydot)

    round_trip_worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 4))
        g = random_gen(n)
        m, h = generator_dictionary(g)
        g2 = generator_from_dictionary(m, h, n)
        round_trip_worst = max(round_trip_worst,
                               float(np.max(np.abs(g2.xdot - g.xdot))),
                               float(np.max(np.abs(g2.ydot - g.ydot))))

    bound_ok = True
    for _ in range(100):
        n = int(rng.integers(1, 3))
        g = random_gen(n)
        cert = gaussian_stability(g)
        s = GaussianState.thermal(n, float(rng.random() * 2))
        e0 = state_energy(s)
        t = float(rng.random() * 2) + 1e-3
        if state_energy(evolve_gaussian(g, s, t)) > cert.budget(e0, t) + 1e-7:
            bound_ok = False

    damping_worst = 0.0
    gd = GaussianGenerator.damping(0.8)
    st = GaussianState.thermal(1, 1.7)
    for t in (0.25, 0.7, 1.3, 2.0):
        e = state_energy(evolve_gaussian(gd, st, t))
        damping_worst = max(damping_worst, abs(e - 1.7 * np.exp(-0.8 * t)))

    fock_worst = max(abs(eg - ef) for _, eg, ef in
                     fock_damping_crosscheck(1.0, 1.0, (0.25, 0.8, 1.6), cutoff=60))

    ok = (round_trip_worst < 1e-10 and bound_ok and damping_worst < 1e-10
          and fock_worst < 1e-3)
    report(5, ok, f"dictionary round trip {round_trip_worst:.2e} (< 1e-10), "
                  f"dynamic bound on 100 triples, damping closed form "
                  f"{damping_worst:.2e} (< 1e-10), Fock cross-check "
                  f"{fock_worst:.2e} (< 1e-3)")


def test_criterion_6_birth_dichotomy():
    rates = BirthRates.geometric(2.0)
    traces = [birth_trace(rates, 40, t) for t in (1.0, 2.0, 3.0, 4.0)]
    escape_ok = traces[2] < 0.9 and all(b < a for a, b in zip(traces, traces[1:]))

    # Poisson tail P(X_t > 5t) reaches the 1e-6 level for t >= 3, the same
    # time the escape clause fixes; smaller times sit above it (0.99941 at
    # t=1, N=5, matching the Poisson oracle exactly).
    conservative_ok = True
    for t in (3.0, 4.0):
        n = int(np.ceil(5 * t))
        if birth_trace(BirthRates.power(0.0), n, t) < 1.0 - 1e-6:
            conservative_ok = False

    residual_ok = True
    for r, cutoff in ((BirthRates.power(0.0), 200), (BirthRates.power(0.5), 200),
                      (BirthRates.geometric(0.5), 40)):
        cert = birth_epsilons(r, cutoff)
        if min(cert.residuals) < -1e-12:
            residual_ok = False

    tau, verdict = birth_tau(BirthRates.power(2.0), 10 ** 6)
    basel_ok = abs(tau - np.pi ** 2 / 6.0) < 1e-6 and verdict == "finite"

    ok = escape_ok and conservative_ok and residual_ok and basel_ok
    report(6, ok, f"escape trace {traces[2]:.4f} (< 0.9, decreasing), "
                  f"conservative traces >= 1-1e-6, residuals >= 0, "
                  f"Basel partial off by {abs(tau - np.pi ** 2 / 6.0):.2e} (< 1e-6)")


def test_criterion_7_figure_reproduction():
    t0 = time.time()
    grid = tuple(np.linspace(0.0, 0.6, 60))
    left_gap_ok = True
    ratios = []
    try:
        for seed in range(20):
            rows = speedlimit_run(SpeedLimitConfig(
                n_qubits=7, scenario="left", time_grid=grid, seed=seed))
            last = rows[-1]
            if not last.energy_bound < last.uniform_bound:
                left_gap_ok = False
        for seed in range(20):
            rows = speedlimit_run(SpeedLimitConfig(
                n_qubits=7, scenario="right", time_grid=grid, seed=seed))
            last = rows[-1]
            ratios.append(last.energy_bound / last.uniform_bound)
        ordering_ok = True
    except BoundViolation as exc:
        ordering_ok = False
        print(f"row ordering violated: {exc}")
    elapsed = time.time() - t0
    mean_ratio = float(np.mean(ratios)) if ratios else np.inf
    ok = ordering_ok and left_gap_ok and mean_ratio < 1.0 and elapsed < 600.0
    report(7, ok, f"row ordering on 2x20 seeds, left gap strict, right mean "
                  f"ratio {mean_ratio:.3f} (< 1), {elapsed:.0f}s (< 600s)")


def test_criterion_8_trotter_bound():
    rng = rng_from_seed(1008)
    g = ref(0.0, 1.0)
    n_grid = (4, 8, 16, 32, 64)
    all_ok = True
    exponents_ok = True
    for pair in range(20):
        hamiltonian_pair = pair < 10
        h1 = random_hermitian(2, rng)
        h2 = random_hermitian(2, rng)
        if hamiltonian_pair:
            gen1 = LindbladGenerator.from_hamiltonian(h1)
            gen2 = LindbladGenerator.from_hamiltonian(h2)
        else:
            l1 = 0.5 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
            l2 = 0.5 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
            gen1 = LindbladGenerator.from_hamiltonian(h1, (l1,))
            gen2 = LindbladGenerator.from_hamiltonian(h2, (l2,))
        rep = trotter_run(gen1, gen2, g, 1.0, 1.0, n_grid, n_states=10,
                          seed=pair, restarts=64)
        if any(r.status == "failed" for r in rep.rows):
            all_ok = False
        if any(r.lhs_max > r.rhs + 1e-6 for r in rep.rows):
            all_ok = False
        if hamiltonian_pair and rep.decay_exponent is not None:
            if not 0.9 <= rep.decay_exponent <= 1.1:
                exponents_ok = False
    ok = all_ok and exponents_ok
    report(8, ok, "lhs <= rhs on 20 generator pairs for n in {4..64}; "
                  "Hamiltonian-pair decay exponents in [0.9, 1.1]")


def test_criterion_9_lie_group_bounds():
    psd_ok = True
    for n in range(1, 8):
        s = spin_system(n)
        for c in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            ax = s.generator(c)
            if not psd_order_leq(HermitianMatrix(ax.entries @ ax.entries),
                                 s.laplacian, 1e-9):
                psd_ok = False

    rng = rng_from_seed(1009)
    spin3 = spin_system(3)
    spin7 = spin_system(7)
    draws_ok = True
    try:
        for i in range(1000):
            spin = spin7 if i % 20 == 0 else spin3
            cx = rng.standard_normal(3)
            cy = rng.standard_normal(3)
            psi = haar_state(spin.dim, rng)
            lhs, rhs = group_qsl(spin, cx, cy, psi)
            if lhs > rhs + 1e-9:
                draws_ok = False
    except BoundViolation:
        draws_ok = False
    ok = psd_ok and draws_ok
    report(9, ok, "A(X)^2 <= |X|^2 Delta up to 7 qubits; group speed limit "
                  "holds on 1000 random draws to 1e-9")


def test_criterion_10_operator_monotone_suite():
    rng = rng_from_seed(1010)
    monotone_ok = True
    for _ in range(100):
        d = int(rng.integers(2, 5))
        chan = random_cp_channel(d, rng)
        m = random_psd(d, rng)
        if not monotone_image_check(chan, m, tol=1e-8):
            monotone_ok = False

    cert_ok = True
    for _ in range(100):
        d = int(rng.integers(2, 5))
        chan = random_cp_channel(d, rng)
        g_in = random_reference(d, rng)
        g_out = random_reference(d, rng)
        _, cert = max_output_energy(chan, g_in, g_out, 1.0)
        try:
            out = sqrt_reference_certificate(chan, g_in, g_out, cert)
        except ValueError:
            cert_ok = False
            continue
        scale = 1.0 + dual_apply(chan, g_out.matrix).operator_norm()
        if out.residual < -1e-8 * scale:
            cert_ok = False
    ok = monotone_ok and cert_ok
    report(10, ok, "T* sqrt(M) <= sqrt(T* M) on 100 pairs at 1e-8; square-root "
                   "reference certificates verify on 100 channels")
