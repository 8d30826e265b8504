import math

import numpy as np
import pytest

from entdyn import theory

D4 = theory.BipartiteDims(4, 4)
ASYM = theory.BipartiteDims(4, 16)


def test_dims_coefficients():
    assert (D4.coeff_a, D4.coeff_b) == (9, 18)
    assert (ASYM.coeff_a, ASYM.coeff_b) == (21, 66)
    assert D4.nu == -0.5
    assert D4.eta == 8.0
    with pytest.raises(ValueError):
        theory.BipartiteDims(1, 4)


def test_avg_s2_endpoints():
    assert theory.avg_s2(D4, 0.0) == 1.0
    assert theory.avg_s2(D4, 100.0) == pytest.approx(9.0 / 18.0)
    d2 = theory.BipartiteDims(2, 2)
    assert theory.avg_s2(d2, 100.0) == pytest.approx(5.0 / 6.0)
    assert theory.avg_s2(d2, 0.1) == pytest.approx(0.92480193934900441, abs=1e-15)


def test_avg_s2_monotone_decreasing():
    grid = np.linspace(0.0, 1.0, 50)
    vals = theory.avg_s2(D4, grid)
    assert np.all(np.diff(vals) < 0)


def test_avg_s3_endpoints():
    assert theory.avg_s3(D4, 0.0) == pytest.approx(1.0, abs=1e-14)
    # plateau (a^2 + b)/b^2
    assert theory.avg_s3(D4, 100.0) == pytest.approx((81.0 + 18.0) / 324.0)
    assert theory.avg_s3(ASYM, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_var_s2_zero_at_origin():
    # both closed forms cancel exactly at Lambda = 0
    assert theory.var_s2(D4, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert theory.var_s2(ASYM, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert theory.var_s2_balanced(4, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert theory.var_s2_balanced(7, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_var_s2_plateaus_disagree():
    # the two published variance forms do not agree for n_a = n_b = D: the
    # general form plateaus at 4(a^2+b)/b^3, the balanced form at 20/D^4.
    general = theory.var_s2(D4, 100.0)
    balanced = theory.var_s2_balanced(4, 100.0)
    assert general == pytest.approx(4.0 * (81.0 + 18.0) / 18.0 ** 3)
    assert balanced == pytest.approx(20.0 / 256.0)
    assert abs(general - balanced) > 1e-3


def test_var_s2_balanced_has_interior_maximum():
    grid = np.linspace(0.0, 1.0, 400)
    vals = theory.var_s2_balanced(4, grid)
    peak = int(np.argmax(vals))
    assert 0 < peak < len(grid) - 1
    assert vals[peak] > vals[-1]


def test_avg_r1_endpoints():
    assert theory.avg_r1(D4, 0.0) == 0.0
    page = math.log(4) - 0.5
    assert theory.avg_r1(D4, 100.0) == pytest.approx(page)
    # half the Page value is reached at Lambda = 2 ln 2 / N
    lam_half = 2.0 * math.log(2.0) / D4.n
    assert theory.avg_r1(D4, lam_half) == pytest.approx(0.5 * page)
    grid = np.linspace(0.0, 1.0, 50)
    assert np.all(np.diff(theory.avg_r1(D4, grid)) > 0)


def test_purity_relaxes_faster_than_entropy():
    # purity rate b = N+2 vs entropy rate N/2: at matched Lambda the purity
    # is much closer to its plateau
    lam = 0.1
    s2_progress = (1.0 - theory.avg_s2(D4, lam)) / (1.0 - 9.0 / 18.0)
    page = math.log(4) - 0.5
    r1_progress = theory.avg_r1(D4, lam) / page
    assert s2_progress > r1_progress


def test_avg_pa_endpoints():
    assert theory.avg_pa(64, 0.0) == 1.0
    assert theory.avg_pa(64, 10.0) == pytest.approx(0.5)


def test_avg_papb_endpoints():
    assert theory.avg_papb(64, 0.0) == 0.0
    assert theory.avg_papb(64, 10.0) == pytest.approx(64.0 / (4.0 * 66.0))


def test_var_papb_closed_form_origin_defect():
    # the closed form starts at 5/(2 N^2) instead of 0; the ODE route is
    # exact at the origin
    for n in (16, 64, 256):
        assert theory.var_papb(n, 0.0) == pytest.approx(2.5 / n ** 2, rel=1e-10)
    assert theory.papb_variance_ode(64, np.array([0.0, 1e-6]))[0] == 0.0


def test_var_papb_closed_form_plateau():
    assert theory.var_papb(64, 10.0) == pytest.approx(0.5 / 64.0 ** 2, rel=1e-10)


def test_papb_variance_ode_plateau_matches_stationary_sphere():
    # stationary point of the moment hierarchy: Var = N/(2 (N+2)^2 (N+6))
    n = 64
    var = theory.papb_variance_ode(n, np.array([0.0, 1.0]), tol=1e-13)[-1]
    assert var == pytest.approx(n / (2.0 * (n + 2.0) ** 2 * (n + 6.0)), rel=1e-7)


def test_spee_ergodic():
    assert theory.spee_ergodic(64) == pytest.approx(math.log(2.0) - 2.0 / 64.0)


def test_integrate_adaptive_exponential():
    grid = np.linspace(0.0, 2.0, 9)
    out = theory.integrate_adaptive(lambda t, y: -3.0 * y, [2.0], grid, tol=1e-12)
    assert np.max(np.abs(out[:, 0] - 2.0 * np.exp(-3.0 * grid))) < 1e-10


def test_integrate_adaptive_vector_system():
    grid = np.linspace(0.0, 3.0, 7)
    out = theory.integrate_adaptive(
        lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], grid, tol=1e-12
    )
    assert np.max(np.abs(out[:, 0] - np.cos(grid))) < 1e-9
    assert np.max(np.abs(out[:, 1] + np.sin(grid))) < 1e-9


def test_integrate_adaptive_grid_validation():
    with pytest.raises(ValueError):
        theory.integrate_adaptive(lambda t, y: -y, [1.0], np.array([0.0, 0.0, 1.0]))


def test_sn_recursion_purity_matches_closed_form():
    grid = np.linspace(0.0, 0.5, 21)
    moments = theory.sn_recursion(D4, 3, grid)
    assert np.max(np.abs(moments[2] - theory.avg_s2(D4, grid))) < 1e-8
    moments = theory.sn_recursion(ASYM, 2, grid)
    assert np.max(np.abs(moments[2] - theory.avg_s2(ASYM, grid))) < 1e-8


def test_sn_recursion_s3_disagrees_with_closed_form():
    # the published S3 hierarchy and the published S3 closed form are not
    # solutions of each other: their stationary values differ (0.3333 vs
    # 0.30556 at D=4).  Documented, not reconciled.
    grid = np.array([0.0, 2.0])
    moments = theory.sn_recursion(D4, 3, grid)
    stationary_recursion = moments[3][-1]
    stationary_closed = float(theory.avg_s3(D4, 2.0))
    # recursion stationary point: S3 = ((a+1) S2_inf + 1)/b = 1/3 at D=4
    assert stationary_recursion == pytest.approx(1.0 / 3.0, rel=1e-6)
    assert abs(stationary_recursion - stationary_closed) > 1e-2


def test_r1_variance_ode_manufactured_solution():
    # pick v(t) = t e^{-t} (v(0) = 0) and solve for the matching input
    dims = D4
    n, n_b = dims.n, dims.n_b
    cov = lambda t: 0.1 * math.sin(t)

    def q_minus_r1sq(t):
        v = t * math.exp(-t)
        vdot = (1.0 - t) * math.exp(-t)
        return 0.5 * (vdot + n * v - n_b * cov(t))

    grid = np.linspace(0.0, 2.0, 11)
    out = theory.r1_variance_ode(dims, q_minus_r1sq, cov, grid, tol=1e-12)
    assert np.max(np.abs(out - grid * np.exp(-grid))) < 1e-8


def test_r1_variance_ode_constant_input_steady_state():
    dims = D4
    out = theory.r1_variance_ode(dims, lambda t: 0.3, lambda t: 0.0, np.array([0.0, 5.0]))
    assert out[-1] == pytest.approx(2.0 * 0.3 / dims.n, rel=1e-8)


def test_papb_moment_ode_matches_closed_form():
    n = 64
    grid = np.linspace(0.0, 0.05, 21)
    moments = theory.papb_moment_ode(n, 1, grid)
    assert np.max(np.abs(moments[1] - theory.avg_papb(n, grid))) < 1e-8


def test_curve_to_csv(tmp_path):
    grid = np.array([0.0, 0.1])
    vals = np.array([1.0, 1.0 / 3.0])
    path = tmp_path / "curve.csv"
    theory.curve_to_csv(path, "avg_s2", grid, vals, n_a=4, n_b=4)
    lines = path.read_text().splitlines()
    assert lines[0] == "lambda,value,kind,n_a,n_b"
    cells = lines[2].split(",")
    assert float(cells[1]) == vals[1]  # 17 significant digits round-trip
    assert cells[2] == "avg_s2"
