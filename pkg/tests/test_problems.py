import math

import numpy as np
import pytest

from comboo.errors import ConfigError, InputError, UnsupportedError
from comboo.problems import (
    REGISTRY, c2_dtlz2_constraint, candidate_grid, dtlz2_objectives, evaluate, evaluate_batch,
    get_problem, load_tabular_problem, make_problem, observe, true_pareto_hv,
)
from comboo.scalarization import dominates


def c2_oracle(x, m=2, r=0.2):
    """Plain-loop transcription of DTLZ2 plus the C2 min-of-min constraint."""
    d = len(x)
    g = sum((x[k] - 0.5) ** 2 for k in range(m - 1, d))
    f = []
    for i in range(m):
        v = 1 + g
        for k in range(m - 1 - i):
            v *= math.cos(math.pi / 2 * x[k])
        if i > 0:
            v *= math.sin(math.pi / 2 * x[m - 1 - i])
        f.append(v)
    terms = []
    for i in range(m):
        s = (f[i] - 1) ** 2
        for j in range(m):
            if j != i:
                s += f[j] ** 2 - r**2
        terms.append(s)
    centre = sum((fi - 1 / math.sqrt(m)) ** 2 - r**2 for fi in f)
    return f, -min(min(terms), centre)


def test_toy_at_corner():
    F, G = evaluate(get_problem("toy"), [1.0, 1.0])
    np.testing.assert_allclose(F, [-2, -2])
    np.testing.assert_allclose(G, [-0.1, 0.25], atol=1e-12)


def test_toy_out_of_bounds():
    with pytest.raises(InputError):
        evaluate(get_problem("toy"), [1.0, 0.9])


def test_wrong_dimension():
    with pytest.raises(InputError):
        evaluate(get_problem("toy"), [1.0, 1.0, 1.0])


def test_c2_dtlz2_centre_point():
    X = np.array([[0.5, 0.5]])
    F = dtlz2_objectives(X, 2)
    np.testing.assert_allclose(F[0], [math.sqrt(2) / 2] * 2, atol=1e-12)
    f, c = c2_oracle([0.5, 0.5])
    assert c2_dtlz2_constraint(F)[0] == pytest.approx(c, abs=1e-12)
    assert c == pytest.approx(0.08, abs=1e-12)


def test_c2_dtlz2_matches_oracle_random():
    rng = np.random.default_rng(0)
    prob = get_problem("c2_dtlz2")
    X = rng.uniform(0, 1, (200, 4))
    F, G = evaluate_batch(prob, X)
    for x, fv, gv in zip(X, F, G):
        f, c = c2_oracle(list(x))
        np.testing.assert_allclose(-fv, f, atol=1e-12)
        assert gv[0] == pytest.approx(c, abs=1e-12)
    assert 0 < np.mean(G[:, 0] >= 0) < 1


def test_branin_currin_known_values():
    prob = get_problem("branin_currin")
    F, _ = evaluate(prob, [0.0, 0.0])
    # Branin term at u = -5 and the Currin limit factor of 1 at x2 = 0
    u = -5.0
    inner = 5.1 * u**2 / (4 * math.pi**2) + 5 * u / math.pi - 5
    f1 = -inner**2 + (10 - 10 / (8 * math.pi)) * math.cos(u)
    assert F[0] == pytest.approx(f1, rel=1e-12)
    assert F[1] == pytest.approx(60 / 20, rel=1e-12)
    F, _ = evaluate(prob, [1.0, 1.0])
    assert F[1] == pytest.approx((1 - math.exp(-0.5)) * 6352 / 624, rel=1e-12)


@pytest.mark.parametrize("name, thr", [("toy", (-1.9, -2.25)), ("branin_currin", (-20, -6))])
def test_threshold_consistency(name, thr):
    prob = get_problem(name)
    X = candidate_grid(prob, 50)
    F, G = evaluate_batch(prob, X)
    feasible = np.all(G >= 0, axis=1)
    direct = (F[:, 0] >= thr[0]) & (F[:, 1] >= thr[1])
    np.testing.assert_array_equal(feasible, direct)


def test_evaluate_pure():
    prob = get_problem("branin_currin")
    X = np.random.default_rng(1).uniform(0, 1, (30, 2))
    a = evaluate_batch(prob, X)
    b = evaluate_batch(prob, X)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_observe_noiseless():
    prob = get_problem("toy").with_noise(0.0, 0.0)
    obs = observe(prob, [1.2, 1.3], np.random.default_rng(0))
    F, G = evaluate(prob, [1.2, 1.3])
    np.testing.assert_array_equal(obs.y_f, F)
    np.testing.assert_array_equal(obs.y_g, G)


def test_observe_repeatable():
    prob = get_problem("toy")
    a = observe(prob, [1.2, 1.3], np.random.default_rng(5))
    b = observe(prob, [1.2, 1.3], np.random.default_rng(5))
    np.testing.assert_array_equal(a.y_f, b.y_f)


def test_observe_noise_calibration():
    prob = get_problem("toy")
    rng = np.random.default_rng(2)
    ys = np.array([observe(prob, [1.2, 1.3], rng).y_f[0] for _ in range(10_000)])
    assert abs(ys.std(ddof=1) / 0.05 - 1) < 0.05


def test_plugin_problem_without_evaluator():
    with pytest.raises(UnsupportedError):
        evaluate(get_problem("penicillin"), np.zeros(7))


def test_unknown_problem():
    with pytest.raises(ConfigError):
        get_problem("nope")


# grids

def test_grid_unit_interval():
    prob = make_problem("id", lambda X: (X, np.zeros((len(X), 0))), 1, 1, 0, bounds=[[0, 1]])
    np.testing.assert_allclose(candidate_grid(prob, 3)[:, 0], [0, 0.5, 1])


def test_grid_toy_corners():
    X = candidate_grid(get_problem("toy"), (5, 5))
    assert len(X) == 25
    rows = {tuple(r) for r in X}
    assert (1.0, 1.0) in rows and (1.5, 1.5) in rows


def test_grid_spacing_uniform():
    X = candidate_grid(get_problem("toy"), (7, 4))
    for k, n in enumerate((7, 4)):
        axis = np.unique(X[:, k])
        assert len(axis) == n
        np.testing.assert_allclose(np.diff(axis), 0.5 / (n - 1), atol=1e-12)


def test_grid_cap():
    with pytest.raises(ConfigError):
        candidate_grid(get_problem("c2_dtlz2"), 100)


def test_grid_resolution_too_small():
    with pytest.raises(ConfigError):
        candidate_grid(get_problem("toy"), 1)


def test_grid_discrete_ignores_resolution():
    prob = get_problem("tanimoto_synth")
    assert len(candidate_grid(prob, 7)) == 200


# true front

def test_true_hv_infeasible():
    res = true_pareto_hv(get_problem("infeasible_toy"), (-2.1, -2.3), 11)
    assert res.hv_star == 0 and len(res.front) == 0 and not res.feasible_found


def test_true_hv_identity():
    prob = make_problem("id", lambda X: (X, np.zeros((len(X), 0))), 2, 2, 0, bounds=[[0, 1], [0, 1]])
    res = true_pareto_hv(prob, (0, 0), 6)
    np.testing.assert_array_equal(res.front, [[1, 1]])
    assert res.hv_star == 1.0


def test_true_hv_toy_refinement():
    a = true_pareto_hv(get_problem("toy"), (-2.1, -2.3), 101).hv_star
    b = true_pareto_hv(get_problem("toy"), (-2.1, -2.3), 201).hv_star
    assert a > 0
    assert abs(a - b) / b < 0.01


def test_true_hv_toy_first_order_convergence():
    hv = {r: true_pareto_hv(get_problem("toy"), (-2.1, -2.3), r).hv_star for r in (101, 201, 401)}
    assert hv[101] < hv[201] < hv[401]
    assert abs(hv[401] - hv[201]) / hv[401] < 0.01
    # halving the spacing roughly halves the gap
    assert (hv[401] - hv[201]) < 0.7 * (hv[201] - hv[101])


@pytest.mark.parametrize("name", ["toy", "branin_currin", "c2_dtlz2", "tanimoto_synth"])
def test_true_front_clean(name):
    prob = get_problem(name)
    res = true_pareto_hv(prob, prob.defaults["z"])
    X = candidate_grid(prob)
    F, G = evaluate_batch(prob, X)
    feasible_images = {tuple(f) for f, g in zip(F, G) if np.all(g >= 0)}
    for y in res.front:
        assert tuple(y) in feasible_images
        assert not any(dominates(o, y) for o in res.front)


def test_registry_fixtures():
    assert {"toy", "branin_currin", "c2_dtlz2", "tanimoto_synth", "infeasible_toy"} <= set(REGISTRY)
    for name, prob in REGISTRY.items():
        if prob.evaluator is not None:
            assert len(prob.defaults["z"]) == prob.m


def test_tanimoto_fixture_is_binary():
    prob = get_problem("tanimoto_synth")
    assert set(np.unique(prob.candidates)) <= {0.0, 1.0}
    assert np.all(prob.candidates.sum(axis=1) > 0)


def test_tabular_problem(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("x_0,x_1,f_0,f_1,g_0\n0,1,0.5,0.2,1\n1,0,0.1,0.9,-1\n")
    prob = load_tabular_problem(path)
    assert (prob.d, prob.m, prob.c) == (2, 2, 1)
    F, G = evaluate(prob, [1.0, 0.0])
    np.testing.assert_array_equal(F, [0.1, 0.9])
    with pytest.raises(InputError):
        evaluate(prob, [0.5, 0.5])


def test_tabular_bad_header(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InputError):
        load_tabular_problem(path)
