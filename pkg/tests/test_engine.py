import math

import numpy as np
import pytest

from chute.engine import (
    ChuteConfig,
    build_probe_schedule,
    chute,
    find_upper_shell,
)
from chute.errors import ParameterError, ScopeError
from chute.instances import (
    WeightVector,
    dominates,
    evaluate_outcome,
    generate_instance,
    sample_weight_vectors,
)
from chute.scalarize import ChebyshevParams, estimate_reference_point
from chute.shells import BoundVector, lower_bounds
from chute.solver import (
    SolveTask,
    brute_force_chebyshev,
    brute_force_outcomes,
    solve_chebyshev,
)
from chute.surrogate import Multipliers, make_surrogate, uniform_multipliers


class TestProbeSchedule:
    def test_k2_first_probe(self):
        sched = build_probe_schedule(0, WeightVector((0.5, 0.5)), 10)
        assert sched.delta == pytest.approx(0.05)
        assert sched.probes[0].weights == pytest.approx((0.55, 0.45))

    def test_probe_count_within_gamma(self):
        sched = build_probe_schedule(0, WeightVector((0.5, 0.5)), 10)
        assert 0 < len(sched.probes) <= 10
        for p in sched.probes:
            assert abs(sum(p.weights) - 1) <= 1e-12
            assert min(p.weights) > 0

    def test_k3_aborts_when_component_would_cross_zero(self):
        sched = build_probe_schedule(0, WeightVector((0.1, 0.1, 0.8)), 10)
        # delta = 0.09, step = 0.045: second probe reaches lambda'_2 = 0.01,
        # the third would cross zero
        assert sched.delta == pytest.approx(0.09)
        assert len(sched.probes) == 2
        assert sched.probes[1].weights[1] == pytest.approx(0.01)

    def test_base_lambda_never_probed(self):
        for gamma in (3, 10, 50):
            lam = WeightVector((0.3, 0.7))
            sched = build_probe_schedule(1, lam, gamma)
            assert lam not in sched.probes

    def test_target_component_strictly_increasing(self):
        sched = build_probe_schedule(2, WeightVector((0.2, 0.3, 0.5)), 30)
        targets = [p.weights[2] for p in sched.probes]
        assert all(b > a for a, b in zip(targets, targets[1:]))

    def test_density_monotone_in_gamma(self):
        lam = WeightVector((0.4, 0.6))
        small = build_probe_schedule(0, lam, 5)
        large = build_probe_schedule(0, lam, 20)
        assert len(large.probes) >= len(small.probes)

    def test_gamma_validation(self):
        with pytest.raises(ParameterError):
            build_probe_schedule(0, WeightVector((0.5, 0.5)), 0.0)


class TestFindUpperShell:
    def test_members_are_relaxation_optima(self):
        inst = generate_instance(2, 10, 3, seed=41)
        ys = estimate_reference_point(inst, 10, 1.0)
        lam = WeightVector((0.5, 0.5))
        params = ChebyshevParams(lam, ys, 0.001)
        rep = solve_chebyshev(SolveTask(inst, params, deadline=10))
        from chute.shells import Shell, ShellMember, Provenance
        s_l = Shell("lower", (ShellMember(rep.incumbent,
                                          evaluate_outcome(inst, rep.incumbent),
                                          Provenance("incumbent")),))
        L = lower_bounds(s_l, params)
        mu = uniform_multipliers(inst.m)
        search = find_upper_shell(0, lam, ys, L, 10, mu, inst)
        surr = make_surrogate(inst, mu)
        for m in search.shell.members:
            probe = WeightVector(m.provenance.lambda_probe)
            re_solved = solve_chebyshev(
                SolveTask(surr, ChebyshevParams(probe, ys, 0.001), deadline=30))
            from chute.scalarize import chebyshev_value
            own_value = chebyshev_value(m.outcome, ChebyshevParams(probe, ys, 0.001))
            assert own_value == pytest.approx(re_solved.objective, abs=1e-9)

    def test_upper_defaults_to_reference_point_without_hit(self, toy, toy_ystar):
        lam = WeightVector((0.5, 0.5))
        params = ChebyshevParams(lam, toy_ystar, 0.001)
        rep = solve_chebyshev(SolveTask(toy, params, deadline=10))
        from chute.shells import Shell, ShellMember, Provenance
        s_l = Shell("lower", (ShellMember(rep.incumbent,
                                          evaluate_outcome(toy, rep.incumbent),
                                          Provenance("incumbent")),))
        L = lower_bounds(s_l, params)
        search = find_upper_shell(0, lam, toy_ystar, L, 10, uniform_multipliers(1), toy)
        if not search.hit:
            assert search.upper == toy_ystar.values[0]
            assert search.source == "default-y*"


class TestChute:
    def test_toy_sandwich_against_oracle(self, toy, toy_params):
        oracle = brute_force_chebyshev(toy, toy_params)
        f_opt = evaluate_outcome(toy, oracle.incumbent).values
        res = chute(toy, toy_params.lam, toy_params.y_star,
                    ChuteConfig(variant="chute1", tl=5, gamma=10))
        for l in range(2):
            assert res.lower.values[l] <= f_opt[l] + 1e-9
            assert f_opt[l] <= res.upper.values[l] + 1e-9

    def test_single_constraint_chute2_matches_chute1(self):
        inst = generate_instance(2, 10, 1, seed=43)
        ys = estimate_reference_point(inst, 10, 1.0)
        lam = sample_weight_vectors(2, 1, seed=9)[0]
        r1 = chute(inst, lam, ys, ChuteConfig(variant="chute1", tl=5, gamma=10))
        r2 = chute(inst, lam, ys, ChuteConfig(variant="chute2", tl=5, gamma=10,
                                              ts=5, n_stall=10))
        assert r2.dual_trace.stop_reason in ("stall", "exact")
        assert r1.lower.values == r2.lower.values
        assert r1.upper.values == r2.upper.values
        assert r1.representation.gap == r2.representation.gap

    def test_scope_error_outside_k23(self):
        inst = generate_instance(4, 8, 2, seed=47)
        ys = estimate_reference_point(inst, 5, 1.0)
        lam = sample_weight_vectors(4, 1, seed=1)[0]
        with pytest.raises(ScopeError):
            chute(inst, lam, ys, ChuteConfig())

    def test_upper_shell_members_not_dominated_by_feasible(self):
        # Lemma-2 style audit by exhaustive enumeration
        for seed in (51, 52):
            inst = generate_instance(2, 10, 3, seed=seed)
            ys = estimate_reference_point(inst, 10, 1.0)
            lam = sample_weight_vectors(2, 1, seed=seed)[0]
            res = chute(inst, lam, ys, ChuteConfig(variant="chute1", tl=5, gamma=10))
            feasible = brute_force_outcomes(inst)
            for m in res.s_u.members:
                for _, outcome in feasible:
                    assert not dominates(outcome, m.outcome)

    def test_probe_traces_satisfy_invariants(self):
        inst = generate_instance(3, 9, 2, seed=53)
        ys = estimate_reference_point(inst, 10, 1.0)
        lam = sample_weight_vectors(3, 1, seed=3)[0]
        res = chute(inst, lam, ys, ChuteConfig(variant="chute1", tl=5, gamma=10))
        for search in res.searches:
            assert len(search.probes) <= math.ceil(10)
            for p in search.probes:
                assert abs(sum(p.weights) - 1) <= 1e-12
                assert min(p.weights) > 0
                assert p != lam

    def test_upper_sources_satisfy_eligibility_post_hoc(self):
        from chute.shells import eligible_for_upper
        for seed in (61, 62, 63):
            inst = generate_instance(2, 10, 3, seed=seed)
            ys = estimate_reference_point(inst, 10, 1.0)
            lam = sample_weight_vectors(2, 1, seed=seed)[0]
            res = chute(inst, lam, ys, ChuteConfig(variant="chute1", tl=5, gamma=10))
            by_id = {m.member_id: m for m in res.s_u.members}
            for l, src in enumerate(res.upper.sources):
                if src.startswith("member:"):
                    member = by_id[src]
                    assert eligible_for_upper(member.outcome, l, res.lower)
                    assert res.upper.values[l] == member.outcome.values[l]
                else:
                    assert res.upper.values[l] == ys.values[l]

    def test_result_dict_schema(self, toy, toy_params):
        res = chute(toy, toy_params.lam, toy_params.y_star, ChuteConfig())
        doc = res.to_dict()
        for key in ("lambda", "variant", "gamma", "L", "U", "gap",
                    "shell_sizes", "timings", "probes"):
            assert key in doc
        assert doc["shell_sizes"]["s_l"] == 1
        assert set(doc["timings"]) == {"incumbent_s", "dual_s", "shells_s"}
        assert len(doc["timings"]["shells_s"]) == toy.k

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            ChuteConfig(variant="chute3")
        with pytest.raises(ParameterError):
            ChuteConfig(tl=0)
        with pytest.raises(ParameterError):
            ChuteConfig(gamma=-1)
        with pytest.raises(ParameterError):
            ChuteConfig(rho=0.0)

    def test_shell_deadline_knob_limits_probing(self):
        inst = generate_instance(2, 12, 3, seed=59)
        ys = estimate_reference_point(inst, 10, 1.0)
        lam = sample_weight_vectors(2, 1, seed=4)[0]
        res = chute(inst, lam, ys,
                    ChuteConfig(variant="chute1", tl=5, gamma=50, shell_deadline=1e-9))
        assert all(len(s.probes) <= 1 for s in res.searches)
