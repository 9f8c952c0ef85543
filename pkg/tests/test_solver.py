import numpy as np
import pytest
from pydantic import ValidationError
from mngn.exceptions import FactorizationError, InconsistentRankError, InvalidInputError
from mngn.schemas.relaxation import DeltaMode
from mngn.schemas.solver import FailureReason, Method, Problem, SolveOptions
from mngn.services import linalg
from mngn.services.problems import derivative_operator, make_circle2d, make_sphere_planes
from mngn.services.solver import (
    check_convergence, ckb_convex_step, ckb_gamma, ckb_step, min_L_norm_step, min_norm_step, solve,
)


class TestMinNormStep:

    def test_single_row(self):
        s_tilde, t, basis = min_norm_step(np.array([[1.0, 0.0]]), np.array([2.0]), np.array([0.0, 5.0]), np.zeros(2), 1)
        assert s_tilde == pytest.approx([-2.0, 0.0])
        assert t == pytest.approx([0.0, 5.0])
        assert basis.dim == 1

    def test_zero_correction_at_profile(self, rng):
        J = rng.standard_normal((4, 6))
        x = rng.standard_normal(6)
        _, t, _ = min_norm_step(J, rng.standard_normal(4), x, x, 4)
        assert np.allclose(t, 0.0)

    def test_pseudoinverse_oracle(self, rng):
        J = rng.standard_normal((8, 10))
        r = rng.standard_normal(8)
        s_tilde, _, _ = min_norm_step(J, r, np.zeros(10), np.zeros(10), 8)
        oracle = -np.linalg.pinv(J) @ r
        assert np.linalg.norm(s_tilde - oracle) <= 1e-10 * np.linalg.norm(oracle)

    def test_correction_is_linearly_neutral(self, rng):
        J = rng.standard_normal((5, 9))
        _, t, _ = min_norm_step(J, rng.standard_normal(5), rng.standard_normal(9), np.zeros(9), 5)
        assert np.linalg.norm(J @ t) <= 1e-10 * np.linalg.norm(J) * np.linalg.norm(t)

    def test_zero_singular_value_inside_rank(self):
        with pytest.raises(InconsistentRankError) as exc_info:
            min_norm_step(np.array([[1.0, 0.0], [0.0, 0.0]]), np.ones(2), np.zeros(2), np.zeros(2), 2)
        assert exc_info.value.code == "inconsistent-rank"

    def test_rank_out_of_range(self):
        with pytest.raises(InvalidInputError):
            min_norm_step(np.eye(2), np.ones(2), np.zeros(2), np.zeros(2), 3)


class TestMinLNormStep:

    def test_identity_regularizer_matches_svd_path(self, rng):
        J = rng.standard_normal((3, 5))
        r = rng.standard_normal(3)
        x = rng.standard_normal(5)
        xbar = rng.standard_normal(5)
        s_svd, t_svd, _ = min_norm_step(J, r, x, xbar, 3)
        s_gsvd, t_gsvd, _ = min_L_norm_step(J, np.eye(5), r, x, xbar, 3)
        assert np.allclose(s_gsvd, s_svd, atol=1e-8)
        assert np.allclose(t_gsvd, t_svd, atol=1e-8)

    def test_full_rank_has_no_correction(self, rng):
        J = rng.standard_normal((6, 4))
        _, t, basis = min_L_norm_step(J, derivative_operator(1, 4), rng.standard_normal(6),
                                      rng.standard_normal(4), np.zeros(4), 4)
        assert np.allclose(t, 0.0)
        assert basis.dim == 0

    def test_full_step_annihilates_oblique_component(self, rng):
        tp = make_sphere_planes(8, 10)
        L = derivative_operator(2, 10)
        x = rng.uniform(-5, 5, 10)
        J = tp.problem.jacobian(x)
        r = tp.problem.r(x)
        factors = linalg.gsvd(J, L)
        q = factors.layout.q
        s_tilde, t, basis = min_L_norm_step(J, L, r, x, np.zeros(10), q, factors=factors)
        x_next = x + s_tilde - t
        assert np.linalg.norm(basis.rows @ x_next) <= 1e-8 * (1 + np.linalg.norm(x_next))

    def test_degenerate_pair_propagates(self):
        J = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        with pytest.raises(FactorizationError):
            min_L_norm_step(J, np.array([[1.0, 1.0, 0.0]]), np.ones(2), np.zeros(3), np.zeros(3), 2)


class TestCkb:

    @pytest.mark.parametrize("variant", [1, 2])
    def test_first_term(self, variant):
        assert ckb_gamma(0, variant) == 0.5

    def test_second_index(self):
        assert ckb_gamma(2, 1) == 0.125
        assert ckb_gamma(2, 2) == 0.0625

    def test_fast_sequence_underflows(self):
        assert ckb_gamma(200, 2) == 0.0

    def test_negative_index(self):
        with pytest.raises(InvalidInputError):
            ckb_gamma(-1, 1)

    def test_unknown_variant(self):
        with pytest.raises(InvalidInputError):
            ckb_gamma(0, 3)

    def test_forms_agree(self, rng):
        for k in range(6):
            x, s, t = rng.standard_normal((3, 7))
            gamma = ckb_gamma(k, 1)
            a = ckb_step(x, s, t, gamma)
            b = ckb_convex_step(x, s, t, gamma)
            assert np.linalg.norm(a - b) <= 1e-12 * max(1.0, np.linalg.norm(a))


class TestCheckConvergence:

    def test_zero_step(self):
        x = np.array([1.0, 2.0])
        assert check_convergence(x, x, 1.0, 1e-8)

    def test_small_gauss_newton_step(self):
        assert check_convergence(np.zeros(2), np.ones(2), 1e-9, 1e-8)

    def test_no_condition_met(self):
        assert not check_convergence(np.array([0.9, 0.0]), np.array([1.0, 0.0]), 1.0, 1e-8)


class TestSolveOptions:

    def test_fixed_eta_required(self):
        with pytest.raises(ValidationError):
            SolveOptions(method=Method.mngn2_ab)

    def test_delta_mode_follows_method(self):
        assert SolveOptions(method=Method.mngn2_ab, fixed_eta=0.5).delta_mode == DeltaMode.fixed
        assert SolveOptions().delta_mode == DeltaMode.adaptive
        assert SolveOptions(method=Method.mngn).delta_mode is None

    def test_mismatched_delta_mode(self):
        with pytest.raises(ValidationError):
            SolveOptions(method=Method.mngn2_abd, delta_mode=DeltaMode.fixed)

    @pytest.mark.parametrize("field, value", [("stop_tol", 0.0), ("max_iter", 0)])
    def test_bounds(self, field, value):
        with pytest.raises(ValidationError):
            SolveOptions(**{field: value})


class TestSolve:

    def test_paraboloid_reaches_minimal_norm(self, paraboloid):
        result = solve(paraboloid.problem, np.array([0.0, 3.0, 3.0]))
        assert result.converged
        assert abs(np.linalg.norm(result.x_final) - 3.681558) <= 5e-3

    def test_start_on_solution(self, paraboloid):
        result = solve(paraboloid.problem, np.array([1.0, 2.0, 3.0]))
        assert result.converged
        assert result.iterations == 1
        assert result.trace[0].step_norm == 0.0

    def test_sphere_planes_first_axis(self):
        tp = make_sphere_planes(2, 3, c=[2.0, 0.0, 0.0])
        result = solve(tp.problem, np.array([0.0, 3.0, 3.0]))
        assert result.converged
        assert np.linalg.norm(result.x_final - tp.known_solution) <= 1e-4

    def test_trace_is_complete(self, paraboloid):
        options = SolveOptions(keep_iterates=True)
        result = solve(paraboloid.problem, np.array([0.0, 3.0, 3.0]), options)
        assert result.iterations == len(result.trace)
        assert [rec.k for rec in result.trace] == list(range(result.iterations))
        assert result.failure_reason is None
        x_prev = np.array(result.trace[-2].iterate)
        last = result.final_record
        assert check_convergence(x_prev, result.x_final, last.step_norm, options.stop_tol)

    @pytest.mark.parametrize("method", [Method.mngn2_a, Method.mngn2_abd])
    def test_step_lengths_are_powers_of_two(self, paraboloid, method):
        result = solve(paraboloid.problem, np.array([0.0, 3.0, 3.0]), SolveOptions(method=method))
        for rec in result.trace:
            assert 0 < rec.alpha <= 1
            assert 1e-8 < rec.beta <= 1
            assert np.log2(rec.alpha) == int(np.log2(rec.alpha))
            assert np.log2(rec.beta) == int(np.log2(rec.beta))

    @pytest.mark.parametrize("method", [Method.mngn, Method.mngn2_abd])
    def test_armijo_decrease_holds_every_iteration(self, paraboloid, method):
        problem = paraboloid.problem
        x = np.array([0.0, 3.0, 3.0])
        result = solve(problem, x, SolveOptions(method=method, keep_iterates=True, max_iter=60))
        assert result.trace
        for rec in result.trace:
            if rec.alpha == 2.0 ** -30:
                x = np.array(rec.iterate)
                continue
            J, r = problem.jacobian(x), problem.r(x)
            s_tilde, _, _ = min_norm_step(J, r, x, np.zeros(3), rec.rank)
            rr = float(r @ r)
            trial = problem.r(x + rec.alpha * s_tilde)
            decrease = rr - float(trial @ trial)
            assert decrease >= 0.5 * rec.alpha * float(np.sum((J @ s_tilde) ** 2)) - 1e-12 * rr
            assert decrease >= -1e-12 * rr
            x = np.array(rec.iterate)

    def test_projection_is_halved_on_circle(self):
        tp = make_circle2d(delta=0.75, gamma=2.0)
        result = solve(tp.problem, np.array([4.0, 0.0]), SolveOptions(method=Method.mngn2_abd, max_iter=1))
        first = result.trace[0]
        assert first.alpha == 1.0
        # beta = 1 and 1/2 overshoot the allowed residual 0.68 + 0.68 ** (1/8)
        assert first.beta == 0.25
        assert first.residual_norm == pytest.approx(0.5625 * ((13 / 18) ** 2 + (31 / 18) ** 2) - 1.0)

    def test_mngn2_a_ties_beta_to_alpha(self, paraboloid):
        result = solve(paraboloid.problem, np.array([0.0, 3.0, 3.0]), SolveOptions(method=Method.mngn2_a))
        assert all(rec.beta == rec.alpha for rec in result.trace)
        assert all(rec.eta is None for rec in result.trace)

    @pytest.mark.parametrize("method", [Method.mngn, Method.mngn2_abd])
    def test_full_projection_lands_orthogonal_to_null_space(self, rng, method):
        tp = make_sphere_planes(8, 10)
        x0 = rng.uniform(-5, 5, 10)
        result = solve(tp.problem, x0, SolveOptions(method=method, keep_iterates=True, max_iter=20))
        x_prev = x0
        for rec in result.trace:
            x_next = np.array(rec.iterate)
            if rec.beta == 1.0:
                V2 = linalg.svd(tp.problem.jacobian(x_prev)).V[:, rec.rank:]
                assert np.linalg.norm(V2.T @ x_next) <= 1e-9 * (1 + np.linalg.norm(x_next))
            x_prev = x_next

    def test_fixed_eta_variant_records_eta(self, paraboloid):
        options = SolveOptions(method=Method.mngn2_ab, fixed_eta=0.5)
        result = solve(paraboloid.problem, np.array([0.0, 3.0, 3.0]), options)
        assert all(rec.eta == 0.5 for rec in result.trace)

    def test_regularized_norm_is_reported(self, paraboloid):
        L = derivative_operator(1, 3)
        options = SolveOptions(regularizer=L)
        result = solve(paraboloid.problem, np.array([0.0, 3.0, 3.0]), options)
        last = result.trace[-1]
        assert last.solution_norm == pytest.approx(np.linalg.norm(L @ result.x_final))

    @pytest.mark.parametrize("method", [Method.ckb1, Method.rckb2])
    def test_ckb_variants_run(self, method):
        tp = make_circle2d(delta=0.7, gamma=2.0)
        result = solve(tp.problem, np.array([0.5, 0.5]), SolveOptions(method=method, max_iter=50))
        assert result.iterations == len(result.trace)
        assert result.trace[0].beta == 0.5

    def test_factorization_failure_is_reported(self, mocker, paraboloid):
        mocker.patch("mngn.services.solver.linalg.svd", side_effect=FactorizationError("no convergence"))
        result = solve(paraboloid.problem, np.array([0.0, 3.0, 3.0]))
        assert not result.converged
        assert result.failure_reason == FailureReason.factorization_error
        assert result.iterations == 0

    def test_non_finite_residual_diverges(self):
        problem = Problem(m=1, n=2, residual=lambda x: np.array([np.nan]),
                          jacobian=lambda x: np.array([[1.0, 0.0]]))
        result = solve(problem, np.zeros(2))
        assert result.failure_reason == FailureReason.diverged
        assert not result.converged

    def test_iteration_cap(self, paraboloid):
        result = solve(paraboloid.problem, np.array([0.0, 3.0, 3.0]), SolveOptions(max_iter=1))
        assert not result.converged
        assert result.iterations == 1
        assert result.failure_reason == FailureReason.max_iter

    def test_start_length_checked(self, paraboloid):
        with pytest.raises(InvalidInputError):
            solve(paraboloid.problem, np.zeros(2))

    def test_profile_length_checked(self, paraboloid):
        with pytest.raises(InvalidInputError):
            solve(paraboloid.problem, np.zeros(3), SolveOptions(model_profile=np.zeros(4)))

    def test_jacobian_shape_checked(self):
        problem = Problem(m=1, n=2, residual=lambda x: np.array([x[0]]), jacobian=lambda x: np.eye(2))
        with pytest.raises(InvalidInputError):
            solve(problem, np.ones(2))

    def test_finite_difference_fallback(self, linear_problem):
        problem, A = linear_problem
        plain = Problem(m=3, n=5, residual=problem.residual, b=problem.b)
        result = solve(plain, np.zeros(5), SolveOptions(method=Method.mngn))
        assert result.converged
        assert np.linalg.norm(A @ result.x_final - problem.b) <= 1e-6
