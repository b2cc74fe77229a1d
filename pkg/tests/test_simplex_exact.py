from __future__ import annotations

import random
from fractions import Fraction

import pytest

from bnb_auditor.rational import INF
from bnb_auditor.simplex_exact import (
    CertifiedImpossible,
    Completion,
    ExactStatus,
    complete_solution,
    dual_objective,
    factorize_basis_exact,
    lu_solve,
    lu_solve_transpose,
    rational_lu,
    solve_lp_exact,
)
from bnb_auditor.simplex_fp import Basis, LpStatus, VarStatus, solve_lp_fp
from bnb_auditor.verify import validate_farkas_exact
from oracles import _model, lp_vertex_optimum, random_lp, random_small_lp

F = Fraction
B, LO, UP = VarStatus.BASIC, VarStatus.AT_LOWER, VarStatus.AT_UPPER


def check_optimal(p, res, lower=None, upper=None):
    """Primal feasibility, dual feasibility and strong duality, all exact."""
    lower = list(p.lower if lower is None else lower)
    upper = list(p.upper if upper is None else upper)
    x = res.x
    for j, v in enumerate(x):
        assert lower[j] <= v <= upper[j]
    for row, b in zip(p.rows, p.rhs):
        assert sum((a * x[j] for j, a in row), F(0)) >= b
    assert min(res.y + res.r_plus + res.r_minus, default=0) >= 0
    for j, col in enumerate(p.columns):
        assert sum((res.y[i] * a for i, a in col), F(0)) + res.r_plus[j] - res.r_minus[j] == p.objective[j]
    assert p.evaluate(x) == res.objective
    assert dual_objective(p, lower, upper, res.y, res.r_plus, res.r_minus) == res.objective


class TestSolve:
    def test_single_variable(self):
        res = solve_lp_exact(_model("x", [-1], [], [], [0], [1], []))
        assert res.status is ExactStatus.OPTIMAL and res.x == (1,) and res.objective == -1

    def test_infeasible_with_ray(self):
        p = _model("i", [0], [{0: 1}, {0: -1}], [1, 0], [0], [1], [])
        res = solve_lp_exact(p)
        assert res.status is ExactStatus.INFEASIBLE
        assert validate_farkas_exact(p, None, res.farkas) is not None

    def test_unbounded(self):
        p = _model("u", [-1, -1], [{0: 1, 1: 1}], [0], [0, 0], [0, 0], [])
        p = p.__class__(**{**p.__dict__, "upper": (INF, INF)})
        assert solve_lp_exact(p).status is ExactStatus.UNBOUNDED

    def test_matches_vertex_enumeration(self):
        rng = random.Random(21)
        solved = 0
        for _ in range(150):
            p = random_small_lp(rng)
            res, oracle = solve_lp_exact(p), lp_vertex_optimum(p)
            if oracle is None:
                assert res.status is ExactStatus.INFEASIBLE
                assert validate_farkas_exact(p, None, res.farkas) is not None
            else:
                assert res.status is ExactStatus.OPTIMAL and res.objective == oracle
                check_optimal(p, res)
                solved += 1
        assert solved > 50

    def test_local_bounds(self):
        p = _model("l", [1, 2], [{0: 1, 1: 1}], [3], [0, 0], [5, 5], [])
        bounds = ([F(0), F(0)], [F(1), F(5)])
        res = solve_lp_exact(p, bounds)
        assert res.objective == 1 + 2 * 2
        check_optimal(p, res, *bounds)


class TestFactorization:
    def test_rational_lu_solves(self):
        mat = [[F(2), F(1)], [F(4), F(3)]]
        lu, perm = rational_lu(mat)
        assert lu_solve(lu, perm, [F(1), F(2)]) == [F(1, 2), F(0)]
        # transpose system: 2a + 4b = 1, a + 3b = 1
        assert lu_solve_transpose(lu, perm, [F(1), F(1)]) == [F(-1, 2), F(1, 2)]

    def test_singular_matrix(self):
        with pytest.raises(ArithmeticError):
            rational_lu([[F(1), F(2)], [F(2), F(4)]])

    def test_fp_basis_single_variable(self):
        p = _model("x", [-1], [], [], [0], [1], [])
        fp = solve_lp_fp(p)
        res = factorize_basis_exact(p, None, fp.basis)
        assert res.status is ExactStatus.OPTIMAL and res.objective == -1
        assert res.objective == solve_lp_exact(p).objective

    def test_all_nonbasic_structurals(self):
        p = _model("n", [1, 1], [{0: 1, 1: 1}], [-10], [F(1, 3), 2], [4, 5], [])
        res = factorize_basis_exact(p, None, Basis((LO, LO), (B,)))
        assert res.x == (F(1, 3), F(2))
        assert res.status is ExactStatus.OPTIMAL and res.objective == F(7, 3)

    def test_wrong_basis_is_not_optimal(self):
        # min x + y, x + y >= 1, both in [0, 5]; x at its upper bound is primal feasible
        # but dual infeasible, the all-lower basis violates the row
        p = _model("w", [1, 1], [{0: 1, 1: 1}], [1], [0, 0], [5, 5], [])
        bad = factorize_basis_exact(p, None, Basis((UP, LO), (B,)))
        assert bad.status is not ExactStatus.OPTIMAL
        worse = factorize_basis_exact(p, None, Basis((LO, LO), (B,)))
        assert worse.status is not ExactStatus.OPTIMAL
        assert factorize_basis_exact(p, None, Basis((B, LO), (LO,))).objective == 1

    def test_five_node_tree_root(self, fixture_path):
        from bnb_auditor.model import presolve, read_mps

        p = presolve(read_mps(fixture_path("tree5.mps")))
        fp = solve_lp_fp(p)
        res = factorize_basis_exact(p, None, fp.basis)
        assert res.status is ExactStatus.OPTIMAL and res.objective == F(3, 2)

    def test_optimal_factorization_agrees_with_solver(self):
        rng = random.Random(22)
        for _ in range(200):
            p = random_lp(rng)
            fp = solve_lp_fp(p)
            if fp.status is not LpStatus.OPTIMAL:
                continue
            res = factorize_basis_exact(p, None, fp.basis)
            if res.status is ExactStatus.OPTIMAL:
                assert res.objective == solve_lp_exact(p).objective
            elif res.status is ExactStatus.DUAL_BOUND:
                assert res.objective <= solve_lp_exact(p).objective


class TestCompletion:
    def _model(self):
        # x + s >= 1, s in [0, 1/4], x binary
        return _model("c", [1, 0], [{0: 1, 1: 1}], [1], [0, 0], [1, F(1, 4)], [0])

    def test_pure_integer_assignment_returned(self):
        p = _model("pi", [1, 2], [{0: 1, 1: 1}], [1], [0, 0], [1, 1], [0, 1])
        out = complete_solution(p, {0: F(1), 1: F(0)})
        assert isinstance(out, Completion) and out.x == (1, 0) and out.objective == 1

    def test_impossible(self):
        p = self._model()
        out = complete_solution(p, {0: F(0)})
        assert isinstance(out, CertifiedImpossible)
        fixed = ([F(0), F(0)], [F(0), F(1, 4)])
        assert validate_farkas_exact(p, fixed, out.farkas) is not None

    def test_feasible_completion(self):
        out = complete_solution(self._model(), {0: F(1)})
        assert isinstance(out, Completion) and out.x == (1, 0)

    def test_out_of_bounds_assignment_clamped(self):
        out = complete_solution(self._model(), {0: F(3)})
        assert isinstance(out, Completion) and out.x[0] == 1

    def test_completions_are_exactly_feasible(self):
        rng = random.Random(23)
        for _ in range(100):
            p = random_lp(rng, max_vars=5, max_rows=5)
            ints = {j: F(rng.randint(int(p.lower[j]), int(p.upper[j])))
                    for j in range(p.num_vars) if rng.random() < 0.5}
            out = complete_solution(p, ints)
            if isinstance(out, Completion):
                lower, upper = list(p.lower), list(p.upper)
                for j, v in ints.items():
                    assert out.x[j] == v
                    lower[j] = upper[j] = v
                assert all(sum((a * out.x[j] for j, a in row), F(0)) >= b
                           for row, b in zip(p.rows, p.rhs))
                assert all(lower[j] <= v <= upper[j] for j, v in enumerate(out.x))
            else:
                lower, upper = list(p.lower), list(p.upper)
                for j, v in ints.items():
                    lower[j] = upper[j] = v
                assert lp_vertex_optimum(p, lower, upper) is None
