import numpy as np
import pytest
from scipy.optimize import minimize as scipy_minimize

from conftest import THREE_ASSET_MU, three_asset_cov
from tailrisk.portfolio import (
    OptimizationResult,
    PortfolioProblem,
    SolverOptions,
    default_x_grid,
    frontier,
    min_variance_weights,
    optimize,
    project_simplex,
    risk_gradient,
    risk_objective,
)
from tailrisk.risk import CVAR, GAUSSIAN, STUDENT_T, VAR, RiskSpec

GV = RiskSpec(GAUSSIAN, VAR)


def slsqp_min_variance(cov, min_return=None, mu=None):
    """Independent constrained-variance oracle."""
    n = cov.shape[0]
    cons = [{"type": "eq", "fun": lambda w: w.sum() - 1.0}]
    if min_return is not None:
        cons.append({"type": "ineq", "fun": lambda w: mu @ w - min_return})
    # multi-start: SLSQP's line search can stall from a single start point
    starts = [np.full(n, 1.0 / n)] + [np.eye(n)[i] for i in range(n)]
    best = None
    for w0 in starts:
        res = scipy_minimize(lambda w: w @ cov @ w, w0,
                             jac=lambda w: 2.0 * cov @ w,
                             bounds=[(0.0, 1.0)] * n, constraints=cons,
                             method="SLSQP",
                             options={"ftol": 1e-14, "maxiter": 500})
        if res.success and (best is None or res.fun < best.fun):
            best = res
    assert best is not None
    return best.x


class TestProblemValidation:
    def test_asymmetric_cov_rejected(self):
        cov = np.array([[1.0, 0.2], [0.3, 1.0]])
        with pytest.raises(ValueError):
            PortfolioProblem(np.zeros(2), cov, GV, 0.025)

    def test_non_pd_cov_rejected(self):
        cov = np.array([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(ValueError, match="positive definite"):
            PortfolioProblem(np.zeros(2), cov, GV, 0.025)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            PortfolioProblem(np.zeros(3), np.eye(2), GV, 0.025)

    def test_u_in_loss_tail(self):
        with pytest.raises(ValueError):
            PortfolioProblem(np.zeros(2), np.eye(2), GV, 0.5)


class TestProjection:
    def test_already_feasible(self):
        w = np.array([0.2, 0.3, 0.5])
        assert project_simplex(w) == pytest.approx(w, abs=1e-15)

    def test_random_points_feasible(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            p = project_simplex(rng.normal(size=6, scale=3.0))
            assert np.all(p >= 0.0)
            assert p.sum() == pytest.approx(1.0, abs=1e-12)


class TestObjectiveAndGradient:
    def test_single_asset(self):
        p = PortfolioProblem([0.01], [[0.0004]], GV, 0.025)
        assert risk_objective(p, np.array([1.0])) == \
            pytest.approx(-0.01 + 1.95996 * 0.02, abs=1e-6)
        assert risk_gradient(p, np.array([1.0]))[0] == \
            pytest.approx(-0.01 + p.psi() * 0.02, rel=1e-12)

    def test_two_asset_identity_cov(self):
        p = PortfolioProblem(np.zeros(2), np.eye(2), GV, 0.025)
        w = np.array([0.5, 0.5])
        assert risk_objective(p, w) == pytest.approx(p.psi() * np.sqrt(0.5), rel=1e-13)
        g = risk_gradient(p, w)
        assert g[0] == pytest.approx(g[1], rel=1e-13)

    def test_dimension_mismatch(self):
        p = PortfolioProblem(np.zeros(2), np.eye(2), GV, 0.025)
        with pytest.raises(ValueError):
            risk_objective(p, np.array([1.0]))

    def test_infeasible_weights_rejected(self):
        p = PortfolioProblem(np.zeros(2), np.eye(2), GV, 0.025)
        with pytest.raises(ValueError):
            risk_objective(p, np.array([0.9, 0.3]))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(5):
            A = rng.normal(size=(5, 5))
            cov = A @ A.T + 0.5 * np.eye(5)
            mu = rng.normal(size=5, scale=0.05)
            p = PortfolioProblem(mu, cov, GV, 0.01)
            for _ in range(20):
                w = rng.dirichlet(np.ones(5))
                g = risk_gradient(p, w)
                psi_val = p.psi()
                for i in range(5):
                    e = np.zeros(5)
                    e[i] = h
                    wp, wm = w + e, w - e
                    fp = -mu @ wp + psi_val * np.sqrt(wp @ cov @ wp)
                    fm = -mu @ wm + psi_val * np.sqrt(wm @ cov @ wm)
                    assert abs((fp - fm) / (2 * h) - g[i]) <= 1e-6


class TestOptimize:
    def test_single_asset(self):
        p = PortfolioProblem([0.01], [[0.0004]], GV, 0.025)
        res = optimize(p)
        assert res.converged
        assert res.weights == pytest.approx([1.0], abs=1e-12)

    def test_symmetric_two_asset(self):
        p = PortfolioProblem([0.05, 0.05], 0.01 * np.eye(2), GV, 0.025)
        res = optimize(p)
        assert res.weights == pytest.approx([0.5, 0.5], abs=1e-9)

    def test_result_invariants(self, t3_cvar_problem):
        res = optimize(t3_cvar_problem)
        assert res.converged
        assert np.all(res.weights >= 0.0)
        assert res.weights.sum() == pytest.approx(1.0, abs=1e-10)
        recomputed = risk_objective(t3_cvar_problem, res.weights)
        assert abs(recomputed - res.risk) <= 1e-10

    def test_against_random_plus_slsqp_oracle(self, t3_cvar_problem):
        p = t3_cvar_problem
        rng = np.random.default_rng(5)
        e = rng.standard_exponential((1_000_000, 3))
        W = e / e.sum(axis=1, keepdims=True)
        psi_val = p.psi()
        vals = -W @ p.mu + psi_val * np.sqrt(np.einsum("ij,jk,ik->i", W, p.cov, W))
        w_best = W[np.argmin(vals)]
        # local polish with an independent solver
        res = scipy_minimize(
            lambda w: -p.mu @ w + psi_val * np.sqrt(w @ p.cov @ w), w_best,
            bounds=[(0.0, 1.0)] * 3,
            constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0}],
            method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
        assert res.success
        ours = optimize(p)
        assert np.max(np.abs(ours.weights - res.x)) <= 1e-3

    def test_kkt_certificate(self, gauss_var_problem, t3_cvar_problem):
        for p in (gauss_var_problem, t3_cvar_problem):
            res = optimize(p)
            grad = risk_gradient(p, res.weights)
            lam = grad @ res.weights
            for wi, gi in zip(res.weights, grad):
                if wi > 1e-8:
                    assert abs(gi - lam) <= 1e-6
                else:
                    assert gi >= lam - 1e-6

    def test_convexity_restart_consistency(self, t3_cvar_problem):
        rng = np.random.default_rng(3)
        risks = []
        for _ in range(10):
            res = optimize(t3_cvar_problem, w0=rng.dirichlet(np.ones(3)))
            assert res.converged
            risks.append(res.risk)
        assert max(risks) - min(risks) <= 1e-8

    def test_iteration_cap_reports_nonconvergence(self, t3_cvar_problem):
        res = optimize(t3_cvar_problem, SolverOptions(max_iter=2))
        assert not res.converged
        assert isinstance(res, OptimizationResult)


class TestFrontier:
    def test_default_grid(self):
        assert default_x_grid() == pytest.approx(
            [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0])

    def test_single_asset_constant(self):
        p = PortfolioProblem([0.01], [[0.0004]], GV, 0.025)
        results = frontier(p)
        assert len(results) == 9
        for res in results:
            assert res.weights == pytest.approx([1.0], abs=1e-12)

    def test_invalid_x_rejected(self, gauss_var_problem):
        with pytest.raises(ValueError):
            frontier(gauss_var_problem, [0.1])

    @pytest.mark.parametrize("spec", [GV, RiskSpec(STUDENT_T, CVAR, 3.0)])
    def test_variance_monotone_and_minvar_limit(self, spec):
        p = PortfolioProblem(THREE_ASSET_MU, three_asset_cov(), spec, 0.025)
        results = frontier(p)
        variances = [r.variance for r in results]
        for v1, v2 in zip(variances, variances[1:]):
            assert v2 <= v1 + 1e-10
        w_mv = min_variance_weights(p.cov)
        d_first = np.linalg.norm(results[0].weights - w_mv)
        d_last = np.linalg.norm(results[-1].weights - w_mv)
        assert d_last < d_first

    @pytest.mark.parametrize("spec", [GV, RiskSpec(STUDENT_T, CVAR, 3.0)])
    def test_frontier_membership(self, spec):
        p = PortfolioProblem(THREE_ASSET_MU, three_asset_cov(), spec, 0.025)
        for res in frontier(p):
            w_ref = slsqp_min_variance(p.cov, min_return=res.expected_return,
                                       mu=p.mu)
            var_ref = w_ref @ p.cov @ w_ref
            assert abs(res.variance - var_ref) <= 1e-6 * var_ref


class TestMinVariance:
    def test_identity(self):
        assert min_variance_weights(np.eye(3)) == pytest.approx([1 / 3] * 3, abs=1e-9)

    def test_two_asset_diagonal(self):
        assert min_variance_weights(np.diag([1.0, 4.0])) == \
            pytest.approx([0.8, 0.2], abs=1e-9)

    def test_three_asset_vs_oracle(self):
        cov = three_asset_cov()
        assert min_variance_weights(cov) == \
            pytest.approx(slsqp_min_variance(cov), abs=1e-4)
