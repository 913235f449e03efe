import numpy as np
import pytest

from imexkg import (
    NewtonConfig,
    StateOutOfDomainError,
    acoustic_column,
    column_stage_solve,
    dahlquist_split,
    default_background,
    hevi_problem,
    hydrostatic_state,
    integrate,
    lookup,
    newton_stage,
    perturb_phi,
    scan_grid,
)
from imexkg.problems import (
    column_jac_s,
    column_mu,
    column_pressure,
    column_tendency,
    mu_jacobian_dense,
    split_state,
    write_column_csv,
    _column_newton_config,
)

RNG = np.random.default_rng(2718)

STRICT_RED = NewtonConfig(epsilon=1e-6, eps_r=1e-8, eps_a=1e-3, max_iters=50)


def strict_dense_config(L):
    eps_r = 1e-8
    eps_a = np.concatenate([np.full(L + 1, 10 * eps_r), np.full(L + 1, 1e5 * eps_r)])
    return NewtonConfig(epsilon=1e-6, eps_r=eps_r, eps_a=eps_a, max_iters=50)


class TestDahlquist:
    def test_constant_solution(self):
        p = dahlquist_split(0.0, 0.0)
        traj = integrate(lookup("IMKG232a").tableau, p, np.array([1.0 + 0j]), 0.0, 1.0, 0.1)
        assert np.allclose(traj.final, [1.0])

    def test_exact_solution(self):
        p = dahlquist_split(1j, -2.0 + 0j)
        assert p.exact_solution(0.5)[0] == pytest.approx(np.exp((1j - 2) * 0.5))


class TestHeviProblem:
    def test_norm_preserved_by_exact_solution(self):
        p = hevi_problem(1.3, 7.7)
        u0 = p.exact_solution(0.0)
        for t in (0.1, 1.0, 10.0):
            assert np.linalg.norm(p.exact_solution(t)) == pytest.approx(
                np.linalg.norm(u0), abs=1e-12
            )

    def test_identity_dynamics_at_zero_wavenumbers(self):
        p = hevi_problem(0.0, 0.0)
        u = np.array([1.0, 2.0, 3.0], dtype=complex)
        assert np.allclose(p.n(u, 0.0), 0.0)
        assert np.allclose(p.s(u, 0.0), 0.0)

    def test_norm_bounded_inside_stability_region(self):
        # Points on the axes give normal one-step maps, so the norm bound is
        # exact there; a strictly interior mixed point is checked as well.
        t = lookup("IMKG232b").tableau
        cases = [(1.0, 0.0, 1.0), (0.0, 8.0, 1.0), (1.0, 5.0, 1.0)]
        for kx, kz, dt in cases:
            p = hevi_problem(kx, kz)
            u = p.exact_solution(0.0)
            norm0 = np.linalg.norm(u)
            from imexkg import imex_step

            cache = None
            for _ in range(10000):
                res = imex_step(t, p, u, 0.0, dt, fsal_cache=cache)
                u, cache = res.x, res.fsal_cache
                assert np.linalg.norm(u) <= norm0 * (1 + 1e-6)


class TestColumnBackground:
    def test_default_shapes(self):
        bg = default_background(20)
        assert bg.layers == 20
        assert bg.eta.size == 21
        assert bg.pi_interfaces[0] == pytest.approx(225.0)
        assert np.all(np.diff(bg.pi_interfaces) > 0)

    def test_hydrostatic_balance(self):
        bg = default_background(20)
        x0 = hydrostatic_state(bg)
        _, phi = split_state(x0)
        assert np.abs(column_mu(bg, phi) - 1.0).max() < 1e-12
        assert np.abs(column_tendency(bg, x0)).max() < 1e-10

    def test_pressure_recovery_matches_hydrostatic(self):
        bg = default_background(12)
        _, phi = split_state(hydrostatic_state(bg))
        assert np.allclose(column_pressure(bg, phi), bg.pi_midpoints, rtol=1e-12)

    def test_overturned_layer_detected(self):
        bg = default_background(8)
        _, phi = split_state(hydrostatic_state(bg))
        bad = phi.copy()
        bad[3] = bad[4] - 1.0  # geopotential no longer decreasing with depth
        with pytest.raises(StateOutOfDomainError):
            column_pressure(bg, bad)


class TestColumnTendency:
    def test_restoring_response_to_phi_bump(self):
        # Raising phi at one interior interface raises the recovered pressure
        # in the layer above and lowers it below; the bumped interface is
        # pushed back while both flanking interfaces are pushed the other
        # way, the discrete acoustic restoring pattern.
        bg = default_background(16)
        x0 = hydrostatic_state(bg)
        k = 8
        xp = perturb_phi(x0, 100.0, k)
        s = column_tendency(bg, xp)
        dw = s[: bg.layers + 1]
        assert dw[k] < 0.0 < min(dw[k - 1], dw[k + 1])
        assert dw[k] * dw[k - 1] < 0.0 and dw[k] * dw[k + 1] < 0.0

    def test_bottom_interface_masked(self):
        bg = default_background(10)
        xp = perturb_phi(hydrostatic_state(bg), 200.0, 5)
        s = column_tendency(bg, xp)
        w_dot, phi_dot = split_state(s)
        assert w_dot[-1] == 0.0
        assert phi_dot[-1] == 0.0


class TestColumnJacobian:
    def test_analytic_matches_central_differences(self):
        bg = default_background(14)
        xp = perturb_phi(hydrostatic_state(bg), 80.0, 7)
        J = column_jac_s(bg, xp)
        dim = xp.size
        J_fd = np.zeros((dim, dim))
        for k in range(dim):
            h = 1e-2 * max(1.0, abs(xp[k]) * 1e-6)
            xa, xb = xp.copy(), xp.copy()
            xa[k] += h
            xb[k] -= h
            J_fd[:, k] = (column_tendency(bg, xa) - column_tendency(bg, xb)) / (2 * h)
        scale = np.abs(J).max()
        assert np.abs(J - J_fd).max() <= 1e-6 * scale

    def test_spectrum_neutral_about_hydrostatic(self):
        bg = default_background(20)
        lam = np.linalg.eigvals(column_jac_s(bg, hydrostatic_state(bg)))
        assert np.abs(lam.real).max() < 1e-8 * np.abs(lam.imag).max()

    def test_dense_mu_jacobian_consistent_with_bands(self):
        bg = default_background(9)
        _, phi = split_state(perturb_phi(hydrostatic_state(bg), 40.0, 4))
        J = mu_jacobian_dense(bg, phi)
        mu0 = column_mu(bg, phi)
        for j in range(bg.layers + 1):
            h = 1e-2
            pp = phi.copy()
            pp[j] += h
            pm = phi.copy()
            pm[j] -= h
            col = (column_mu(bg, pp) - column_mu(bg, pm)) / (2 * h)
            assert np.abs(col - J[:, j]).max() < 1e-8 * max(1.0, np.abs(J).max())
        del mu0


class TestStageSolve:
    def test_hydrostatic_stage_is_identity(self):
        bg = default_background(20)
        E_w, E_phi = split_state(hydrostatic_state(bg))
        w, phi, iters = column_stage_solve(bg, E_w, E_phi, 0.5, 30.0, STRICT_RED)
        assert iters <= 1
        assert np.abs(phi - E_phi).max() < 1e-12 * np.abs(E_phi).max()
        assert np.abs(w).max() < 1e-12

    def test_back_substituted_residuals(self):
        bg = default_background(20)
        g = bg.gravity
        E_w, E_phi = split_state(perturb_phi(hydrostatic_state(bg), 60.0, 9))
        a_jj, dt = 0.5, 20.0
        w, phi, _ = column_stage_solve(bg, E_w, E_phi, a_jj, dt, STRICT_RED)
        mu = column_mu(bg, phi)
        # stage equations: w = E_w - dt a g (1 - mu); phi = E_phi + dt a g w
        res_w = w[:-1] - (E_w[:-1] - dt * a_jj * g * (1.0 - mu))
        res_phi = phi[:-1] - (E_phi[:-1] + dt * a_jj * g * w[:-1])
        assert np.abs(res_w).max() < 1e-9
        assert np.abs(res_phi).max() < 1e-7 * np.abs(E_phi).max()

    def test_reduced_matches_dense_newton(self):
        bg = default_background(20)
        xp = perturb_phi(hydrostatic_state(bg), 50.0, 10)
        E_w, E_phi = split_state(xp)
        w_r, phi_r, _ = column_stage_solve(bg, E_w, E_phi, 0.5, 30.0, STRICT_RED)
        dense_problem = acoustic_column(bg, reduced=False)
        g_dense, _ = newton_stage(
            dense_problem, xp, 0.5, 30.0, 0.0, strict_dense_config(bg.layers)
        )
        w_d, phi_d = split_state(g_dense)
        scale = np.abs(xp).max()
        assert np.abs(w_r - w_d).max() <= 1e-10 * scale
        assert np.abs(phi_r - phi_d).max() <= 1e-10 * scale

    def test_reduced_matches_dense_on_random_states(self):
        bg = default_background(8)
        base = hydrostatic_state(bg)
        for _ in range(5):
            state = base.copy()
            half = state.size // 2
            state[:half] += RNG.uniform(-0.5, 0.5, half)
            state[half:-1] += RNG.uniform(-30.0, 30.0, half - 1)
            state[half - 1] = 0.0  # respect the rigid bottom
            E_w, E_phi = split_state(state)
            a_jj = float(RNG.uniform(0.2, 0.9))
            dt = float(RNG.uniform(5.0, 40.0))
            w_r, phi_r, _ = column_stage_solve(bg, E_w, E_phi, a_jj, dt, STRICT_RED)
            g_dense, _ = newton_stage(
                acoustic_column(bg, reduced=False),
                state,
                a_jj,
                dt,
                0.0,
                strict_dense_config(bg.layers),
            )
            w_d, phi_d = split_state(g_dense)
            scale = np.abs(state).max()
            assert np.abs(np.concatenate([w_r - w_d, phi_r - phi_d])).max() <= 1e-10 * scale


class TestColumnIntegration:
    def test_hydrostatic_invariance_a_stable_methods(self):
        bg = default_background(20)
        x0 = hydrostatic_state(bg)
        for name in ("IMKG232a", "IMKG242b"):
            prob = acoustic_column(bg)
            traj = integrate(lookup(name).tableau, prob, x0, 0.0, 3000.0, 30.0)
            rel = np.abs(traj.final - x0).max() / np.abs(x0).max()
            assert rel < 1e-10, name
            assert max(traj.newton_iterations) <= prob.newton.max_iters

    def test_self_convergence_second_order(self):
        from imexkg import convergence_study

        bg = default_background(20)
        xp = perturb_phi(hydrostatic_state(bg), 50.0, 10)
        prob = acoustic_column(bg)
        table = convergence_study(
            lookup("IMKG232a").tableau,
            prob,
            [2.0, 1.0, 0.5, 0.25],
            24.0,
            x0=xp,
            reference_refinement=128,
        )
        assert table.fitted_order == pytest.approx(2.0, abs=0.3)

    def test_snapshot_csv(self, tmp_path):
        bg = default_background(6)
        path = tmp_path / "col.csv"
        write_column_csv(bg, hydrostatic_state(bg), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "eta,w,phi,p,mu"
        assert len(lines) == 1 + 7
        assert lines[-1].endswith("nan,nan")

    def test_column_newton_config_scales(self):
        cfg = _column_newton_config(4)
        assert np.asarray(cfg.eps_a).size == 10


class TestGridConsistency:
    def test_unstable_point_blows_up_in_time(self):
        # a scaled wave-number pair sampled as unstable must blow up when
        # integrated, tying the scan to the stepper
        t = lookup("IMKG232a").tableau
        grid = scan_grid(t, 3.0, 3.0, 4, 4)
        assert grid.rho[3, 0] > 1.01  # x = 3 beyond the cubic's axis limit
        p = hevi_problem(3.0, 0.0)
        from imexkg import BlowUpError

        with pytest.raises(BlowUpError):
            integrate(t, p, p.exact_solution(0.0), 0.0, 500.0, 1.0)
