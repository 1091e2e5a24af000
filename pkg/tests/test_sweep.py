"""Parameter sweeps and the Spearman trend checker."""

import math
from datetime import datetime

import numpy as np
import pytest

from vulnprop import (
    AlphaAll,
    AlphaRatioR,
    BudgetW,
    DefenseParams,
    NodeVuln,
    NotTwoNodeError,
    OptimizeConfig,
    OutOfRangeError,
    SweepResult,
    SweepRow,
    SweepSpec,
    TooFewRowsError,
    Trend,
    build_network,
    optimize,
    run_sweep,
    trend_check,
)

from conftest import symmetric_two_node

_CFG = OptimizeConfig(restarts=2, seed=7)


def _params(W=1.0):
    return DefenseParams(budget_W=W)


def _spec(target, grid, net=None, params=None, cfg=_CFG):
    return SweepSpec(
        target=target,
        grid=grid,
        base_net=net if net is not None else symmetric_two_node(),
        base_params=params if params is not None else _params(),
        opt_cfg=cfg,
    )


class TestSpecValidation:
    def test_empty_grid(self):
        with pytest.raises(OutOfRangeError):
            _spec(BudgetW(), ())

    def test_grid_must_increase_strictly(self):
        with pytest.raises(OutOfRangeError):
            _spec(BudgetW(), (0.5, 0.5))
        with pytest.raises(OutOfRangeError):
            _spec(BudgetW(), (1.0, 0.5))

    def test_non_finite_grid(self):
        with pytest.raises(OutOfRangeError):
            _spec(BudgetW(), (0.0, float("inf")))

    def test_node_vuln_bounds(self):
        with pytest.raises(OutOfRangeError):
            _spec(NodeVuln(0), (0.5, 1.2))
        with pytest.raises(OutOfRangeError):
            _spec(NodeVuln(5), (0.4, 0.6))

    def test_alpha_all_bounds(self):
        with pytest.raises(OutOfRangeError):
            _spec(AlphaAll(), (-0.2, 0.5))

    def test_budget_non_negative(self):
        with pytest.raises(OutOfRangeError):
            _spec(BudgetW(), (-1.0, 0.0, 1.0))

    def test_ratio_positive(self):
        with pytest.raises(OutOfRangeError):
            _spec(AlphaRatioR(), (0.0, 1.0))

    def test_ratio_needs_two_node_network(self):
        tri = build_network(
            [("a", 0.5), ("b", 0.5), ("c", 0.5)],
            [(0, 1, 0.5), (1, 0, 0.5), (1, 2, 0.5), (2, 1, 0.5)],
        )
        with pytest.raises(NotTwoNodeError):
            _spec(AlphaRatioR(), (0.5, 1.0), net=tri)

    def test_ratio_needs_both_edges(self):
        one_way = build_network([("a", 0.5), ("b", 0.5)], [(1, 0, 0.5)])
        with pytest.raises(NotTwoNodeError):
            _spec(AlphaRatioR(), (0.5, 1.0), net=one_way)

    def test_unknown_target(self):
        with pytest.raises(OutOfRangeError):
            _spec(object(), (0.5, 1.0))


class TestRunSweep:
    def test_single_point_matches_direct_optimize(self):
        net = symmetric_two_node()
        spec = _spec(NodeVuln(0), (0.7,), net=net)
        result = run_sweep(spec)
        direct = optimize(net.with_default_vuln(0, 0.7), _params(), _CFG)
        assert len(result.rows) == 1
        row = result.rows[0]
        assert row.param_value == 0.7
        assert row.z == tuple(direct.allocation.z.tolist())
        assert row.objective == direct.objective
        assert row.converged == direct.converged
        assert row.error is None

    def test_rows_follow_grid_order(self):
        result = run_sweep(_spec(AlphaAll(), (0.2, 0.5, 0.8)))
        assert [r.param_value for r in result.rows] == [0.2, 0.5, 0.8]
        assert all(r.error is None for r in result.rows)

    def test_reproducible_rows(self):
        spec = _spec(BudgetW(), (0.0, 0.5, 1.0))
        a = run_sweep(spec)
        b = run_sweep(spec)
        assert a.rows == b.rows
        assert a.seed == b.seed == 7

    def test_created_is_iso_timestamp(self):
        result = run_sweep(_spec(BudgetW(), (0.5,)))
        assert datetime.fromisoformat(result.created) is not None

    def test_budget_sweep_spends_what_it_gets(self):
        result = run_sweep(_spec(BudgetW(), (0.0, 0.5, 1.0, 1.5)))
        for row in result.rows:
            assert row.spent == pytest.approx(row.param_value, abs=1e-6)

    def test_ratio_rows_flagged_when_alpha_leaves_range(self):
        # alpha(1 -> 0) = 0.4, so r = 3 would need alpha(0 -> 1) = 1.2
        net = build_network(
            [("a", 0.5), ("b", 0.5)], [(0, 1, 0.4), (1, 0, 0.4)]
        )
        result = run_sweep(_spec(AlphaRatioR(), (0.5, 1.0, 2.0, 3.0), net=net))
        good, bad = result.rows[:3], result.rows[3]
        assert all(r.error is None for r in good)
        assert bad.error is not None
        assert math.isnan(bad.objective)
        assert all(math.isnan(z) for z in bad.z)
        assert not bad.converged
        # flagged rows are excluded, the remaining three still work
        trend_check(result, "objective", Trend.NON_DECREASING, rho_min=0.9)

    def test_higher_own_vulnerability_attracts_budget(self):
        net = build_network(
            [("a", 0.5), ("b", 0.5)], [(0, 1, 0.5), (1, 0, 0.5)]
        )
        spec = _spec(NodeVuln(0), (0.4, 0.5, 0.6, 0.7, 0.8, 0.9), net=net)
        result = run_sweep(spec)
        assert trend_check(result, 0, Trend.NON_DECREASING, rho_min=0.9)

    def test_budget_lowers_objective(self):
        result = run_sweep(_spec(BudgetW(), (0.0, 0.5, 1.0, 1.5, 2.0)))
        assert trend_check(result, "objective", Trend.NON_INCREASING, rho_min=0.9)

    def test_decoupled_nodes_still_chase_vulnerability(self):
        # inert edges decouple the nodes entirely: raising one node's
        # default vulnerability must pull budget toward it while the whole
        # budget keeps being spent
        net = symmetric_two_node(alpha=1.0)
        spec = _spec(NodeVuln(0), (0.4, 0.55, 0.7, 0.85), net=net)
        result = run_sweep(spec)
        assert trend_check(result, 0, Trend.NON_DECREASING, rho_min=0.9)
        for row in result.rows:
            assert row.spent == pytest.approx(1.0, abs=1e-6)


class TestTrendCheck:
    def _result(self, rows):
        spec = _spec(BudgetW(), (0.0, 0.5, 1.0))
        return SweepResult(
            rows=tuple(rows), spec=spec, seed=0, created="2026-01-01T00:00:00+00:00"
        )

    def _row(self, x, obj, err=None):
        return SweepRow(
            param_value=x,
            z=(obj, 0.0),
            objective=obj,
            spent=obj,
            converged=err is None,
            error=err,
        )

    def test_strict_trend_passes_at_full_rho(self):
        res = self._result([self._row(x, x * 2.0) for x in (0.0, 0.5, 1.0, 2.0)])
        assert trend_check(res, "objective", Trend.NON_DECREASING, rho_min=1.0)
        assert not trend_check(res, "objective", Trend.NON_INCREASING, rho_min=0.5)

    def test_constant_column_fails_both_directions(self):
        res = self._result([self._row(x, 1.0) for x in (0.0, 0.5, 1.0)])
        assert not trend_check(res, "objective", Trend.NON_DECREASING, rho_min=0.5)
        assert not trend_check(res, "objective", Trend.NON_INCREASING, rho_min=0.5)

    def test_error_rows_excluded(self):
        rows = [self._row(x, -x) for x in (0.0, 0.5, 1.0)]
        rows.insert(1, self._row(0.25, math.nan, err="solver died"))
        res = self._result(rows)
        assert trend_check(res, "objective", Trend.NON_INCREASING, rho_min=0.9)

    def test_too_few_usable_rows(self):
        rows = [self._row(0.0, 0.1), self._row(1.0, 0.2)]
        with pytest.raises(TooFewRowsError):
            trend_check(self._result(rows), "objective", Trend.NON_DECREASING)
        rows = [
            self._row(0.0, 0.1),
            self._row(0.5, math.nan, err="x"),
            self._row(1.0, 0.2),
        ]
        with pytest.raises(TooFewRowsError):
            trend_check(self._result(rows), "objective", Trend.NON_DECREASING)

    def test_non_finite_unflagged_column_rejected(self):
        rows = [
            self._row(0.0, 0.1),
            self._row(0.5, math.nan),
            self._row(1.0, 0.2),
        ]
        with pytest.raises(TooFewRowsError):
            trend_check(self._result(rows), "objective", Trend.NON_DECREASING)

    def test_column_selectors(self):
        rows = [self._row(x, x) for x in (0.0, 0.5, 1.0)]
        res = self._result(rows)
        assert trend_check(res, "spent", Trend.NON_DECREASING, rho_min=1.0)
        assert trend_check(res, 0, Trend.NON_DECREASING, rho_min=1.0)
        assert trend_check(
            res, lambda r: -r.objective, Trend.NON_INCREASING, rho_min=1.0
        )

    def test_unknown_selector(self):
        res = self._result([self._row(x, x) for x in (0.0, 0.5, 1.0)])
        with pytest.raises(OutOfRangeError):
            trend_check(res, "zoo", Trend.NON_DECREASING)

    def test_rho_min_domain(self):
        res = self._result([self._row(x, x) for x in (0.0, 0.5, 1.0)])
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(OutOfRangeError):
                trend_check(res, "objective", Trend.NON_DECREASING, rho_min=bad)
