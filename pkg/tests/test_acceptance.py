"""End-to-end acceptance battery against the published reference values.

The session fixture runs the full pipeline once for N = 20, 30, 40, 50 at
the default 50-digit precision (a couple of minutes); the table tests read
from that single sweep.  Known deviations from the references fail loudly
here instead of being patched over -- see README.md, "Known deviations".
"""

import math
import random

import numpy as np
import pytest
from mpmath import mp

from hyhe.basis import enumerate_basis
from hyhe.config import RunConfig
from hyhe.constants import PhysicalConstants, default_constants
from hyhe.corrections import total_energy
from hyhe.eigen import build_systems, optimize_k, solve_fixed_k
from hyhe.integrals import (IntegralTable, base_integral, k_scaling_exponent,
                            quad_integral)
from hyhe.matrices import (build_operator_matrices, derivative_symbols,
                           evaluate_poly, expectation_set, reduced_laplacian)
from hyhe.oracles import (CartesianProbe, direction_cosines,
                          random_configurations, stu_of)
from hyhe.report import compute_row, solve_single

SIZES = (20, 30, 40, 50)

REF_E_INF = {20: "-2.90370938", 30: "-2.90371945",
             40: "-2.90372103", 50: "-2.90372124"}
REF_E_0 = {20: "-2.90328962", 30: "-2.90329969",
           40: "-2.90330128", 50: "-2.90330389"}
REF_DELTA_E2 = "-0.00009586"        # at N = 50
REF_DELTA_E3 = "0.00002238"         # at N = 50
REF_E_TOTAL = "-2.90338"
REF_GAP = "0.00001"                 # E_total minus experiment
REF_K_OPT = "2.0451486913735"
REF_E_BENCH = "-2.90338629"


@pytest.fixture(scope="session")
def sweep():
    config = RunConfig()
    constants = default_constants()
    table = IntegralTable()
    out = {}
    for n in SIZES:
        row, (res_inf, res_0, exps, breakdown) = compute_row(
            n, config, constants, table=table)
        assert row.ok, row.error
        out[n] = {"row": row, "inf": res_inf, "0": res_0,
                  "exps": exps, "breakdown": breakdown}
    return out


def test_reference_energies(sweep):
    # both energy columns at every size; the 5e-6 band absorbs basis-ordering
    # ambiguity inside a grade
    with mp.workdps(30):
        for n in SIZES:
            e_inf, e_0 = sweep[n]["inf"].energy, sweep[n]["0"].energy
            assert abs(e_inf - mp.mpf(REF_E_INF[n])) < mp.mpf("5e-6"), \
                f"E_inf({n}) = {mp.nstr(e_inf, 12)} vs {REF_E_INF[n]} +/- 5e-6"
            assert abs(e_0 - mp.mpf(REF_E_0[n])) < mp.mpf("5e-6"), \
                f"E_0({n}) = {mp.nstr(e_0, 12)} vs {REF_E_0[n]} +/- 5e-6"


def test_relativistic_shift_reference(sweep):
    de2 = sweep[50]["breakdown"].deltaE2
    assert abs(de2 - mp.mpf(REF_DELTA_E2)) < mp.mpf("5e-7"), (
        f"delta E^(2) at N=50 is {mp.nstr(de2, 8)} vs reference "
        f"{REF_DELTA_E2} +/- 5e-7; see README.md, Known deviations")


def test_radiative_shift_reference(sweep):
    de3 = sweep[50]["breakdown"].deltaE3
    assert abs(de3 - mp.mpf(REF_DELTA_E3)) < mp.mpf("1e-7"), (
        f"delta E^(3) at N=50 is {mp.nstr(de3, 8)} vs reference "
        f"{REF_DELTA_E3} +/- 1e-7; see README.md, Known deviations")


def test_total_energy_reference(sweep):
    e_total = sweep[50]["breakdown"].E_total
    assert abs(e_total - mp.mpf(REF_E_TOTAL)) < mp.mpf("1e-5"), \
        f"E_total at N=50 is {mp.nstr(e_total, 10)} vs {REF_E_TOTAL} +/- 1e-5"


def test_gap_to_experiment(sweep):
    gap = sweep[50]["breakdown"].delta_vs_experiment
    assert abs(gap - mp.mpf(REF_GAP)) < mp.mpf("1e-5"), \
        f"E_total - E_exp at N=50 is {mp.nstr(gap, 6)} vs {REF_GAP} +/- 1e-5"


def test_scale_parameter_fixed_point(sweep):
    ks = {n: sweep[n]["0"].k_opt for n in SIZES}
    with mp.workdps(30):
        assert abs(ks[50] - mp.mpf(REF_K_OPT)) < mp.mpf("1e-4"), (
            f"k_opt at N=50 is {mp.nstr(ks[50], 10)} vs reference {REF_K_OPT} "
            "+/- 1e-4; see README.md, Known deviations")
        for n in SIZES:
            assert mp.mpf("2.0451") <= ks[n] <= mp.mpf("2.0452"), \
                f"k_opt({n}) = {mp.nstr(ks[n], 10)} outside [2.0451, 2.0452]"


def test_total_energy_relative_error(sweep):
    bench = mp.mpf(REF_E_BENCH)
    rel = abs(sweep[50]["breakdown"].E_total - bench) / abs(bench)
    assert rel <= mp.mpf("4e-6"), f"relative error {mp.nstr(rel, 4)} > 4e-6"


def test_hydrogenic_closed_forms():
    # the one-term state is exactly a product of scaled 1s orbitals, so the
    # whole expectation pipeline has closed-form answers
    with mp.workdps(50):
        res = solve_single(1, nuclear_motion=False)
        k = res.k_opt
        basis = enumerate_basis(1)
        mats = build_operator_matrices(basis, Z=2)
        exps = expectation_set(basis, res.coeffs, k, mats.W)
        checks = (
            (res.energy, mp.mpf("-2.84765625")),   # -(Z - 5/16)^2
            (k, mp.mpf("1.6875")),                 # Z - 5/16
            (exps.delta_r1, k ** 3 / mp.pi),
            (exps.delta_r12, k ** 3 / (8 * mp.pi)),
            (exps.p4, 5 * k ** 4),
        )
        for got, want in checks:
            assert abs(got - want) <= mp.mpf("1e-10") * abs(want)


# --- property suite -----------------------------------------------------------


def test_variational_ordering(sweep):
    # upper bounds tighten monotonically, and the finite-mass ground energy
    # sits above the clamped-nucleus one at every size
    e_inf = [sweep[n]["inf"].energy for n in SIZES]
    e_0 = [sweep[n]["0"].energy for n in SIZES]
    assert all(b <= a for a, b in zip(e_inf, e_inf[1:]))
    assert all(b <= a for a, b in zip(e_0, e_0[1:]))
    assert all(e0 > ei for ei, e0 in zip(e_inf, e_0))


def test_correction_sign_structure(sweep):
    for n in SIZES:
        b = sweep[n]["breakdown"]
        assert b.deltaE2 < 0 < b.deltaE3
        assert b.E1 < 0 < b.E4 and b.E5 > 0


def test_matrix_structure():
    mats = build_operator_matrices(enumerate_basis(12), Z=2)
    for name in ("W", "K", "P", "M_pol", "attraction", "repulsion"):
        m = getattr(mats, name)
        assert all(m[i][j] == m[j][i] for i in range(12) for j in range(i))
    w = np.array([[float(v) for v in row] for row in mats.W])
    assert np.linalg.eigvalsh(w).min() > 0


def test_integral_scaling_random_k():
    rng = random.Random(101)
    for _ in range(4):
        a, b, c = (rng.randint(0, 3) for _ in range(3))
        k = rng.uniform(0.9, 2.5)
        val = quad_integral(
            lambda s, t, u: s**a * t**b * u**c * u * (s*s - t*t)
            * np.exp(-2 * (k - 1) * s))
        want = float(base_integral(a, b, c)) / k ** k_scaling_exponent(a, b, c)
        assert val == pytest.approx(want, rel=1e-10)


def test_quadrature_agreement_battery():
    # every volume-weighted polynomial moment with a + b + c <= 8
    worst = 0.0
    for a in range(9):
        for b in range(9 - a):
            for c in range(9 - a - b):
                exact = float(base_integral(a, b, c))
                val = quad_integral(
                    lambda s, t, u, a=a, b=b, c=c:
                    s**a * t**b * u**c * u * (s*s - t*t))
                worst = max(worst, abs(val - exact) / abs(exact))
    assert worst <= 1e-12, f"worst relative disagreement {worst:.2e}"


def test_operator_fd_oracles():
    # chain-rule Laplacian and interelectronic directional derivative against
    # Cartesian finite differences on a correlated 5-term state
    basis = enumerate_basis(5)
    coeffs = [1.0, -0.3, 0.2, 0.05, -0.04]
    k = 1.3
    p = CartesianProbe(basis, coeffs, k=k)
    state = {}
    for term, c in zip(basis, coeffs):
        key = (term.l, 2 * term.m, term.n)
        state[key] = state.get(key, 0) + c
    T = {key: float(v) for key, v in
         reduced_laplacian({key: mp.mpf(v) for key, v in state.items()}).items()}
    for cfg in random_configurations(8, seed=5):
        s, t, u = stu_of(cfg.r1, cfg.r2)
        S, Tc, U = k * s, k * t, k * u
        lap = k * k * evaluate_poly(T, S, Tc, U) / ((S - Tc) * U) * math.exp(-S)
        assert p.laplacian_fd(cfg, electron=1) == pytest.approx(
            lap, rel=1e-6, abs=1e-6)
        c1, c2 = direction_cosines(cfg)
        total = 0.0
        for term, c in zip(basis, coeffs):
            _, da, db, pu = derivative_symbols(term)
            total += c * (c1 * evaluate_poly(da, S, Tc, U)
                          - c2 * evaluate_poly(db, S, Tc, U)
                          + 2 * evaluate_poly(pu, S, Tc, U))
        grad = 0.5 * k * total * math.exp(-S)
        assert p.grad12_dot_n_fd(cfg) == pytest.approx(grad, rel=1e-8, abs=1e-8)


def test_energy_parabola_minimum():
    # E(k) = (Kq k^2 + Pq k)/Wq per eigenvector, so the converged k is a
    # genuine minimum, not just a fixed point
    with mp.workdps(50):
        mats = build_operator_matrices(enumerate_basis(6), Z=2)
        sys0 = build_systems(
            mats, mass_ratio=default_constants().mass_ratio_M)["0"]
        res = optimize_k(sys0)
        for dk in (mp.mpf("1e-3"), mp.mpf("-1e-3")):
            assert solve_fixed_k(sys0, res.k_opt + dk)[0] > res.energy


def test_alpha_insensitivity(sweep):
    # a 1e-9 relative nudge of the fine-structure constant moves the
    # corrections by ~3e-9 relative -- far below every band above, so the
    # choice of alpha source cannot decide any reference comparison
    with mp.workdps(50):
        constants = default_constants()
        res_0, exps = sweep[50]["0"], sweep[50]["exps"]
        base = total_energy(res_0.energy, exps, constants)
        nudged_alpha = mp.nstr(constants.alpha_mp() * (1 + mp.mpf("1e-9")), 25)
        nudged = total_energy(res_0.energy, exps,
                              PhysicalConstants(alpha=nudged_alpha))
        assert abs(nudged.deltaE2 - base.deltaE2) < mp.mpf("1e-12")
        assert abs(nudged.deltaE3 - base.deltaE3) < mp.mpf("1e-12")


def test_radiative_shift_stable_across_sizes(sweep):
    vals = [sweep[n]["breakdown"].deltaE3 for n in SIZES]
    assert max(vals) - min(vals) < mp.mpf("5e-7")


@pytest.mark.xfail(strict=True, reason="delta E^(2) drifts ~8e-7 across N "
                   "(driven by the slow <p^4> convergence of the graded "
                   "basis), past the 5e-7 stability band; see README.md, "
                   "Known deviations")
def test_relativistic_shift_stable_across_sizes(sweep):
    vals = [sweep[n]["breakdown"].deltaE2 for n in SIZES]
    assert max(vals) - min(vals) < mp.mpf("5e-7")
