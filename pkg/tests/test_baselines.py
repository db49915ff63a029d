import numpy as np
import pytest

import cfmimo as cf


def test_full_power_scenario_is_definitional(desk_channel):
    gamma, beta, gram, params = desk_channel(0)
    res = cf.run_scenario(cf.Scenario(kind="full_power_all_serve"),
                          gamma, beta, gram, params, cf.SolverOptions())
    assert np.all(res.eta_star == 1.0)
    assert np.all(res.d_binary == 1.0)
    assert res.iterations == 0
    assert res.objective_trace.size == 0


def test_fractional_power_scenario(desk_channel):
    gamma, beta, gram, params = desk_channel(0)
    res = cf.run_scenario(cf.Scenario(kind="fractional_power_control"),
                          gamma, beta, gram, params, cf.SolverOptions())
    assert res.iterations == 0
    assert np.all(res.eta_star > 0) and np.all(res.eta_star <= 1.0)
    assert res.eta_star.max() == pytest.approx(1.0)
    # default exponent -0.5 is channel inversion on the summed coefficients
    s = beta.sum(axis=0)
    assert np.allclose(res.eta_star, s.min() / s, rtol=1e-12)


def test_fractional_power_equal_strength_gives_ones():
    beta = np.full((6, 3), 2.5e-12)
    assert np.allclose(cf.fractional_powers(beta), 1.0)


def test_fractional_power_exponent_zero_gives_ones(desk_channel):
    _, beta, _, _ = desk_channel(1)
    assert np.allclose(cf.fractional_powers(beta, exponent=0.0), 1.0)


def test_single_block_scenarios_respect_fixed_variable(desk_channel):
    gamma, beta, gram, params = desk_channel(2)
    opts = cf.SolverOptions()
    res_c = cf.run_scenario(cf.Scenario(kind="power_only"), gamma, beta, gram, params, opts)
    assert np.all(res_c.d_binary == 1.0)
    assert not np.all(res_c.eta_star == 1.0)
    res_d = cf.run_scenario(cf.Scenario(kind="association_only"),
                            gamma, beta, gram, params, opts)
    assert np.all(res_d.eta_star == 1.0)
    assert not np.all(res_d.d_binary == 1.0)


def test_single_block_traces_nondecreasing(desk_channel):
    opts = cf.SolverOptions()
    for kind in ("power_only", "association_only"):
        for seed in range(3):
            gamma, beta, gram, params = desk_channel(seed)
            res = cf.run_scenario(cf.Scenario(kind=kind), gamma, beta, gram, params, opts)
            trace = res.objective_trace
            assert np.all(np.diff(trace) >= -1e-9 * np.abs(trace[:-1]))


def test_power_only_runs_without_qos(desk_channel):
    # the fixed-service baselines are evaluated without the QoS constraint
    gamma, beta, gram, params = desk_channel(0)
    res = cf.run_scenario(cf.Scenario(kind="power_only"), gamma, beta, gram, params,
                          cf.SolverOptions(qos_infeasible_policy="error"))
    assert res.iterations >= 1


def test_unknown_scenario_rejected():
    with pytest.raises(ValueError):
        cf.Scenario(kind="mystery")


def test_joint_beats_fixed_baselines_on_average(desk_channel):
    opts = cf.SolverOptions()
    sums = {k: [] for k in ("full_power_all_serve", "power_only",
                            "association_only", "joint")}
    for seed in range(5):
        gamma, beta, gram, params = desk_channel(seed)
        for kind in sums:
            res = cf.run_scenario(cf.Scenario(kind=kind), gamma, beta, gram, params, opts)
            sums[kind].append(cf.se_all(res.eta_star, res.d_binary,
                                        gamma, beta, gram, params).sum())
    joint = np.mean(sums["joint"])
    for kind in ("full_power_all_serve", "power_only", "association_only"):
        assert joint > np.mean(sums[kind])
