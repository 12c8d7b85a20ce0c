import numpy as np
import pytest

from mlqmc.asian import AsianProblem, build_level_problem, build_single_level_problem
from mlqmc.low_discrepancy import MCSource, QMCSource, seeded_rng
from mlqmc.mlevel import LevelPlan, LevelProblem, coarsen, level_mean, ml_estimate, sample_mean


def test_coarsen_examples():
    np.testing.assert_allclose(coarsen([1.0, 1.0, 2.0, 0.0], 2), [np.sqrt(2), np.sqrt(2)])
    np.testing.assert_array_equal(coarsen([3.0, -3.0, 1.5, -1.5], 2), [0.0, 0.0])
    with pytest.raises(ValueError):
        coarsen(np.ones(6), 4)


def test_coarsen_matches_matrix():
    m, n = 3, 27
    C = np.zeros((n // m, n))
    for i in range(n // m):
        C[i, i * m : (i + 1) * m] = 1 / np.sqrt(m)
    x = np.random.default_rng(0).normal(size=(5, n))
    np.testing.assert_allclose(coarsen(x, m), x @ C.T)


def test_coarsen_covariance_is_identity():
    N = 10**5
    Y = coarsen(np.random.default_rng(1).standard_normal((N, 8)), 2)
    C = np.cov(Y.T)
    se = np.where(np.eye(4, dtype=bool), np.sqrt(2 / N), np.sqrt(1 / N))
    assert np.all(np.abs(C - np.eye(4)) < 3 * se)


def test_level_plan_schedule():
    plan = LevelPlan(m=2, L=10, N_L=16)
    assert plan.samples(10) == 16 and plan.samples(0) == 16 * 1024
    assert plan.dimension(10) == 1024
    s = plan.schedule
    assert all(a >= b for a, b in zip(s, s[1:]))
    assert LevelPlan(m=4, L=3, N_L=2, factor=3).schedule == [54, 18, 6, 2]
    with pytest.raises(ValueError):
        LevelPlan(m=1, L=3, N_L=2)


def _quadratic(dim, coarse=None):
    return LevelProblem(dim=dim, fine=lambda y: (y**2).sum(axis=1), payoff=lambda v: v, coarse=coarse)


def test_level_mean_trivial_cases():
    plan = LevelPlan(2, 3, 8)
    zero = LevelProblem(dim=4, fine=lambda y: y.sum(axis=1), payoff=lambda v: 0 * v)
    assert level_mean(2, plan, zero, MCSource(4, seeded_rng(0))) == 0.0
    same = _quadratic(4, coarse=lambda y: (y**2).sum(axis=1))
    assert level_mean(2, plan, same, QMCSource(4, seeded_rng(0))) == 0.0
    with pytest.raises(ValueError):
        level_mean(2, plan, same, QMCSource(8, seeded_rng(0)))


def test_same_vector_feeds_fine_and_coarse():
    seen = {}

    def fine(y):
        seen["fine"] = y.copy()
        return y[:, 0]

    def coarse(y):
        seen["coarse"] = y.copy()
        return y[:, 0]

    prob = LevelProblem(dim=4, fine=fine, payoff=lambda v: v, coarse=coarse, transform=lambda x: 2 * x)
    sample_mean(prob, MCSource(4, seeded_rng(3)), 5)
    np.testing.assert_array_equal(seen["fine"], seen["coarse"])


def test_ml_estimate_sums_levels():
    plan = LevelPlan(2, 0, 64)
    probs = [_quadratic(1)]
    res = ml_estimate(plan, probs, [QMCSource(1, seeded_rng(0))])
    assert res.value == res.per_level_means[0]
    assert res.per_level_sample_counts == [64]

    plan = LevelPlan(2, 2, 16)
    probs = [_quadratic(1)] + [_quadratic(2**l, coarse=lambda y: (y**2).sum(axis=1)) for l in (1, 2)]
    srcs = [QMCSource(2**l, seeded_rng(l)) for l in range(3)]
    res = ml_estimate(plan, probs, srcs)
    assert res.per_level_means[1:] == [0.0, 0.0]
    assert res.value == pytest.approx(sum(res.per_level_means))
    with pytest.raises(ValueError):
        ml_estimate(plan, probs[:2], srcs[:2])


def _mc_values(prob, n, seed):
    X = np.random.default_rng(seed).standard_normal((n, prob.dim))
    return prob.summand(X)


def test_asian_level_one_matches_plain_mc():
    problem = AsianProblem()
    prob = build_level_problem(1, problem, "regression")
    N = 2**14
    vals = [sample_mean(prob, QMCSource(2, seeded_rng(s)), N) for s in range(20)]
    q_mean, q_se = np.mean(vals), np.std(vals, ddof=1) / np.sqrt(len(vals))
    mc = _mc_values(build_level_problem(1, problem, "forward"), 10**6, 5)
    mc_se = mc.std(ddof=1) / np.sqrt(len(mc))
    assert abs(q_mean - mc.mean()) < 3 * np.hypot(q_se, mc_se)


def test_telescoping_consistency_mc():
    problem = AsianProblem(L=4)
    plan = LevelPlan(2, 4, 10**5, factor=1)
    probs = [build_level_problem(l, problem, "forward") for l in plan.levels]
    means, variances = [], []
    for l in plan.levels:
        v = _mc_values(probs[l], plan.samples(l), 40 + l)
        means.append(v.mean())
        variances.append(v.var(ddof=1) / len(v))
    single = _mc_values(build_single_level_problem(problem, "forward"), 10**5, 99)
    se = np.sqrt(sum(variances) + single.var(ddof=1) / len(single))
    assert abs(sum(means) - single.mean()) < 3 * se


def test_transform_indifference_of_the_mean():
    problem = AsianProblem(L=4)
    N = 10**5
    results = {}
    for method in ("forward", "pca", "haar", "regression"):
        v = _mc_values(build_single_level_problem(problem, method), N, 7 + len(results))
        results[method] = (v.mean(), v.var(ddof=1) / N)
    ms = list(results.values())
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            assert abs(ms[i][0] - ms[j][0]) < 3 * np.sqrt(ms[i][1] + ms[j][1])
