import json
import math

import numpy as np
import pytest

from chute.errors import ParameterError
from chute.instances import (
    MomipInstance,
    Solution,
    generate_instance,
    is_feasible,
    sample_weight_vectors,
)
from chute.scalarize import ChebyshevParams, estimate_reference_point
from chute.solver import SolveTask, brute_force_chebyshev, brute_force_outcomes, solve_chebyshev
from chute.surrogate import (
    Multipliers,
    initial_multipliers,
    make_surrogate,
    suboptimal_multipliers,
    uniform_multipliers,
)


class TestMakeSurrogate:
    def test_single_constraint_scaling_keeps_feasible_set(self):
        inst = generate_instance(2, 8, 1, seed=2)
        surr = make_surrogate(inst, Multipliers((3.0,)))
        feas_orig = {s.bits for s, _ in brute_force_outcomes(inst)}
        feas_surr = {s.bits for s, _ in brute_force_outcomes(surr)}
        assert feas_orig == feas_surr

    def test_unit_multipliers_give_column_sums(self):
        inst = generate_instance(2, 6, 3, seed=5)
        surr = make_surrogate(inst, uniform_multipliers(inst.m))
        assert np.allclose(surr.row, inst.constraints.sum(axis=0))
        assert surr.rhs_total == pytest.approx(inst.rhs.sum())

    def test_relaxation_contains_original(self):
        rng = np.random.default_rng(7)
        for trial in range(10):
            inst = generate_instance(2, 9, int(rng.integers(2, 5)), seed=100 + trial)
            mu = Multipliers(tuple(rng.random(inst.m) + 0.01))
            surr = make_surrogate(inst, mu)
            for sol, _ in brute_force_outcomes(inst):
                assert is_feasible(surr.base, sol)
                assert float(surr.row @ np.array(sol.bits)) <= surr.rhs_total + 1e-9

    def test_all_zero_multipliers_rejected(self):
        with pytest.raises(ParameterError):
            Multipliers((0.0, 0.0))

    def test_length_mismatch(self):
        inst = generate_instance(2, 5, 2, seed=1)
        with pytest.raises(ParameterError):
            make_surrogate(inst, Multipliers((1.0, 1.0, 1.0)))


class TestSuboptimal:
    def _params(self, inst, seed=0):
        lam = sample_weight_vectors(inst.k, 1, seed=seed)[0]
        ys = estimate_reference_point(inst, 10, 1.0)
        return ChebyshevParams(lam, ys, 0.001)

    def test_single_constraint_dual_is_flat(self):
        inst = generate_instance(2, 10, 1, seed=3)
        params = self._params(inst)
        trace = suboptimal_multipliers(inst, params, stall_limit=20, time_limit=10)
        # surrogate equals the original feasible set, so the relaxation optimum is
        # feasible and the search stops by dual exactness at the first iteration
        assert trace.stop_reason == "exact"
        assert len(trace.iterations) == 1
        assert trace.best_value == trace.iterations[0].s_mu

    def test_weak_duality_along_trace(self):
        rng = np.random.default_rng(11)
        for trial in range(10):
            inst = generate_instance(2, 10, int(rng.integers(2, 5)), seed=300 + trial)
            params = self._params(inst, seed=trial)
            exact = brute_force_chebyshev(inst, params)
            trace = suboptimal_multipliers(inst, params, stall_limit=5, time_limit=10)
            for it in trace.iterations:
                assert it.s_mu <= exact.objective + 1e-9
            assert trace.best_value <= exact.objective + 1e-9

    def test_best_never_below_start(self):
        for trial in range(5):
            inst = generate_instance(3, 10, 3, seed=400 + trial)
            params = self._params(inst, seed=trial)
            trace = suboptimal_multipliers(inst, params, stall_limit=8, time_limit=10)
            assert trace.best_value >= trace.iterations[0].s_mu

    def test_starts_at_normalized_ones(self):
        inst = generate_instance(2, 8, 4, seed=6)
        params = self._params(inst)
        trace = suboptimal_multipliers(inst, params, stall_limit=3, time_limit=10)
        assert trace.iterations[0].mu == pytest.approx((0.5,) * 4)

    def test_mu_stays_normalized_and_nonnegative(self):
        inst = generate_instance(2, 10, 4, seed=13)
        params = self._params(inst, seed=2)
        trace = suboptimal_multipliers(inst, params, stall_limit=10, time_limit=10)
        for it in trace.iterations[1:]:
            assert min(it.mu) >= 0.0
            assert np.linalg.norm(it.mu) == pytest.approx(1.0, abs=1e-9)

    def test_stall_counting(self):
        inst = generate_instance(2, 10, 3, seed=17)
        params = self._params(inst, seed=3)
        n = 4
        trace = suboptimal_multipliers(inst, params, stall_limit=n, time_limit=60)
        if trace.stop_reason == "stall":
            assert all(not it.improved for it in trace.iterations[-n:])
            assert len([it for it in trace.iterations if not it.improved]) >= n

    def test_stop_reason_enum(self):
        inst = generate_instance(2, 8, 2, seed=19)
        params = self._params(inst, seed=4)
        trace = suboptimal_multipliers(inst, params, stall_limit=20, time_limit=10)
        assert trace.stop_reason in ("stall", "time", "exact")

    def test_time_stop(self):
        inst = generate_instance(2, 16, 4, seed=23)
        params = self._params(inst, seed=5)
        trace = suboptimal_multipliers(inst, params, stall_limit=10_000, time_limit=1e-6)
        assert trace.stop_reason in ("time", "exact")

    def test_trace_jsonl_round_trips(self):
        inst = generate_instance(2, 8, 3, seed=29)
        params = self._params(inst, seed=6)
        trace = suboptimal_multipliers(inst, params, stall_limit=4, time_limit=10)
        lines = trace.to_jsonl().strip().splitlines()
        assert len(lines) == len(trace.iterations)
        rec = json.loads(lines[0])
        assert set(rec) == {"t", "mu", "s_mu", "alpha", "improved"}
        assert rec["t"] == 0

    def test_parameter_validation(self):
        inst = generate_instance(2, 6, 2, seed=31)
        params = self._params(inst)
        with pytest.raises(ParameterError):
            suboptimal_multipliers(inst, params, stall_limit=0, time_limit=1)
        with pytest.raises(ParameterError):
            suboptimal_multipliers(inst, params, stall_limit=5, time_limit=0)
