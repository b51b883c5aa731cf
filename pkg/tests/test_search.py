import math

import numpy as np
import pytest

from sphereacs.errors import ContractViolation, SearchError
from sphereacs.fields import acs_field_validity_check, default_acs_field
from sphereacs.manifold import spheres
from sphereacs.sampling import chart_safe_points, manifold_points
from sphereacs.search import (
    DISCLAIMER,
    ExperimentConfig,
    GaugeParametrization,
    SearchResult,
    energy_floor_experiment,
    finite_start,
    make_energy_objective,
    minimize_energy,
    nelder_mead,
    splitting_pressure_probe,
)

S2XS4 = spheres((2, 1.0), (4, 1.0))
S2XS2 = spheres((2, 1.0), (2, 1.0))


# ---------------------------------------------------------------------------
# Gauge parametrization
# ---------------------------------------------------------------------------

def test_parametrization_feature_counts():
    for deg, expected in ((0, 1), (1, 9), (2, 45)):
        par = GaugeParametrization(S2XS4, degree=deg, generators=4, seed=0)
        assert par.feature_count == expected == math.comb(8 + deg, deg)
        assert par.n_params == 4 * expected


def test_parametrization_validation():
    with pytest.raises(ContractViolation):
        GaugeParametrization(S2XS4, degree=-1)
    with pytest.raises(ContractViolation):
        GaugeParametrization(S2XS4, degree=0, generators=-1)


def test_features_match_monomials():
    par = GaugeParametrization(S2XS4, degree=2, generators=1, seed=0)
    pts = chart_safe_points(S2XS4, 7, seed=1)
    feats = par.features(pts)
    for idx, mono in enumerate(par.monomials):
        col = np.ones(7)
        for var in mono:
            col = col * pts[:, var]
        assert np.allclose(feats[:, idx], col, atol=1e-15)


def test_zero_parameters_reproduce_base_field():
    par = GaugeParametrization(S2XS4, degree=2, generators=4, seed=0)
    base = default_acs_field(S2XS4)
    pts = chart_safe_points(S2XS4, 10, seed=2)
    gauged = par.field(np.zeros(par.n_params), base)
    assert np.array_equal(gauged(pts), base(pts))


def test_gauge_rotations_orthogonal_and_tangent_preserving():
    par = GaugeParametrization(S2XS4, degree=1, generators=4, seed=3)
    pts = chart_safe_points(S2XS4, 12, seed=3)
    theta = 0.7 * np.random.default_rng(0).standard_normal(par.n_params)
    q = par.gauge_rotations(theta, pts)
    eye = np.eye(S2XS4.ambient_dim)
    assert np.max(np.abs(q @ q.transpose(0, 2, 1) - eye)) < 1e-12
    # normals are fixed: Q u_a = u_a per factor block
    for sl in S2XS4.ambient_slices:
        fixed = np.einsum("nij,nj->ni", q[:, sl, sl], pts[:, sl])
        assert np.max(np.abs(fixed - pts[:, sl])) < 1e-12


def test_gauged_field_is_pointwise_valid():
    par = GaugeParametrization(S2XS4, degree=1, generators=4, seed=1)
    base = default_acs_field(S2XS4)
    pts = chart_safe_points(S2XS4, 15, seed=5)
    theta = 0.5 * np.random.default_rng(4).standard_normal(par.n_params)
    assert acs_field_validity_check(par.field(theta, base), pts).passed


def test_gauge_theta_shape_contract():
    par = GaugeParametrization(S2XS4, degree=0, generators=2, seed=0)
    with pytest.raises(ContractViolation):
        par.gauge_rotations(np.zeros(5), chart_safe_points(S2XS4, 2, seed=0))


# ---------------------------------------------------------------------------
# Simplex descent
# ---------------------------------------------------------------------------

def quadratic(x):
    return float(np.sum((x - 1.5) ** 2))


def test_nelder_mead_minimises_quadratic():
    xb, fb, used = nelder_mead(quadratic, np.zeros(4), budget=800,
                               fatol=1e-13, xatol=1e-12, restart_gain=1e-12)
    assert fb < 1e-12
    assert np.allclose(xb, 1.5, atol=1e-5)
    assert used <= 800


def test_nelder_mead_deterministic():
    a = nelder_mead(quadratic, np.zeros(4), budget=300)
    b = nelder_mead(quadratic, np.zeros(4), budget=300)
    assert a[1] == b[1]
    assert np.array_equal(a[0], b[0])
    assert a[2] == b[2]


def test_nelder_mead_budget_prefix_monotone():
    best = [nelder_mead(quadratic, np.zeros(6), budget=b)[1] for b in (50, 150, 400, 800)]
    for lo, hi in zip(best[1:], best[:-1]):
        assert lo <= hi


def test_nelder_mead_zero_dimensional():
    xb, fb, used = nelder_mead(lambda x: 3.25, np.zeros(0), budget=10)
    assert fb == 3.25
    assert used == 1


def test_nelder_mead_budget_contract():
    with pytest.raises(ContractViolation):
        nelder_mead(quadratic, np.zeros(2), budget=0)


def test_finite_start_resamples_then_errors():
    calls = []

    def objective(x):
        calls.append(float(x[0]))
        return float("nan") if x[0] < 2.5 else 1.0

    draws = iter([np.array([1.0]), np.array([2.0]), np.array([3.0])])
    theta = finite_start(objective, np.array([0.0]), lambda: next(draws), max_resample=5)
    assert theta[0] == 3.0
    with pytest.raises(SearchError):
        finite_start(lambda x: float("inf"), np.zeros(1), lambda: np.zeros(1), max_resample=2)


# ---------------------------------------------------------------------------
# Energy minimisation
# ---------------------------------------------------------------------------

def small_search(man, restarts=3, budget=60, degree=0, seed=7, points=20):
    par = GaugeParametrization(man, degree=degree, generators=4, seed=seed)
    pts = chart_safe_points(man, points, seed=seed)
    return minimize_energy(man, par, pts, restarts=restarts, seed=seed, budget=budget)


def test_search_recovers_integrable_member_on_2_sphere_product():
    res = small_search(S2XS2, restarts=2, budget=40)
    assert res.best_energy <= 1e-8
    assert res.best_energy == min(res.restart_energies)
    assert res.best_energy >= 0.0


def test_search_restart_zero_starts_at_base_field():
    # restart 0 starts at theta = 0, so its energy can never exceed the base
    # field's own energy
    man = S2XS4
    par = GaugeParametrization(man, degree=0, generators=4, seed=7)
    pts = chart_safe_points(man, 20, seed=7)
    base = default_acs_field(man)
    objective = make_energy_objective(par, base, pts, 1, pair_seed=7)
    base_energy = objective(np.zeros(par.n_params))
    res = minimize_energy(man, par, pts, restarts=1, seed=7, budget=25)
    assert res.restart_energies[0] <= base_energy


def test_search_deterministic():
    a = small_search(S2XS4)
    b = small_search(S2XS4)
    assert a.best_energy == b.best_energy
    assert a.restart_energies == b.restart_energies
    assert np.array_equal(a.best_params, b.best_params)
    assert a.config == b.config


def test_search_restart_prefix_nesting():
    short = small_search(S2XS4, restarts=2)
    long = small_search(S2XS4, restarts=4)
    assert long.restart_energies[:2] == short.restart_energies
    assert long.best_energy <= short.best_energy
    assert long.best_for_restart_prefix(2) == short.best_energy


def test_search_budget_monotone():
    small = small_search(S2XS4, budget=30)
    large = small_search(S2XS4, budget=90)
    assert large.best_energy <= small.best_energy
    assert all(lo <= hi for lo, hi in zip(large.restart_energies, small.restart_energies))


def test_search_trivial_family_keeps_base_energy():
    man = spheres((6, 1.0))
    par = GaugeParametrization(man, degree=0, generators=0, seed=1)
    pts = manifold_points(man, 25, seed=1)
    res = minimize_energy(man, par, pts, restarts=3, seed=1, budget=10)
    assert len(set(res.restart_energies)) == 1
    base_energy = make_energy_objective(
        par, default_acs_field(man), pts, 1, pair_seed=1
    )(np.zeros(0))
    assert res.best_energy == base_energy


def test_search_contracts():
    par = GaugeParametrization(S2XS4, degree=0, generators=1, seed=0)
    pts = chart_safe_points(S2XS4, 5, seed=0)
    with pytest.raises(ContractViolation):
        minimize_energy(S2XS4, par, pts, restarts=0, seed=0, budget=10)
    with pytest.raises(ContractViolation):
        minimize_energy(S2XS4, par, pts, restarts=1, seed=0, budget=0)


def test_best_params_reconstruct_valid_field():
    # the reported parameter vector must rebuild a field whose pointwise
    # restriction passes the validator at every sample point
    par = GaugeParametrization(S2XS4, degree=1, generators=4, seed=9)
    pts = chart_safe_points(S2XS4, 15, seed=9)
    res = minimize_energy(S2XS4, par, pts, restarts=2, seed=9, budget=50)
    rebuilt = par.field(res.best_params, default_acs_field(S2XS4))
    assert acs_field_validity_check(rebuilt, pts).passed


# ---------------------------------------------------------------------------
# Grid experiment
# ---------------------------------------------------------------------------

def test_energy_floor_experiment_structure():
    cfg = ExperimentConfig(
        manifold=S2XS4, degrees=(0, 1), restarts=2, budget=25, points=12,
        frame_pairs=1, seed=5,
    )
    report = energy_floor_experiment(cfg)
    assert set(report.results) == {0, 1}
    assert report.floor == min(report.cell_minima().values())
    assert report.floor > 0.0
    assert report.disclaimer == DISCLAIMER
    rows = report.rows()
    assert len(rows) == 4  # two degrees x two restarts
    for deg in (0, 1):
        sub = [r for r in rows if r["degree"] == deg]
        best = np.inf
        for r in sub:
            best = min(best, r["energy"])
            assert r["best_so_far"] == best  # monotone best-so-far


def test_energy_floor_experiment_deterministic():
    cfg = ExperimentConfig(
        manifold=S2XS4, degrees=(0,), restarts=2, budget=20, points=10, seed=3
    )
    a = energy_floor_experiment(cfg)
    b = energy_floor_experiment(cfg)
    assert a.cell_minima() == b.cell_minima()
    assert a.rows() == b.rows()


# ---------------------------------------------------------------------------
# Splitting pressure probe
# ---------------------------------------------------------------------------

def test_probe_summaries():
    man = spheres((2, 1.0), (4, 1.0))
    probe = splitting_pressure_probe(man, samples=400, seed=11)
    assert probe.samples == 400
    assert probe.subsample_count > 200
    # over the mixed subsample the core defect is bounded below exactly
    assert probe.min_core_defect_mixed >= probe.alpha * probe.threshold**2 * (1 - 1e-9)
    # generic sampling reaches nearly fully mixing structures
    assert probe.max_abs_defect_mixed >= probe.alpha * 0.81 * (1 - 1e-3)
    assert np.all(probe.defects <= 1e-12)


def test_probe_alpha_scaling():
    # matched seeds draw the same structures, so the 2-sphere part of the
    # defect (defect minus the complement term) scales linearly in alpha
    man1 = spheres((2, 1.0), (4, 0.7))
    man2 = spheres((2, 2.0), (4, 0.7))
    p1 = splitting_pressure_probe(man1, samples=50, seed=4)
    p2 = splitting_pressure_probe(man2, samples=50, seed=4)
    core1 = p1.second_factor_terms - p1.defects
    core2 = p2.second_factor_terms - p2.defects
    assert np.allclose(core2, 2.0 * core1, atol=1e-11)


def test_probe_split_structures_have_zero_defect():
    from sphereacs.acs import random_block_diagonal_acs
    from sphereacs.identities import splitting_defect
    from sphereacs.manifold import CurvatureOracle

    man = spheres((2, 1.0), (4, 1.0))
    oracle = CurvatureOracle(man)
    x = np.zeros(6)
    y = np.zeros(6)
    x[0], y[1] = 1.0, 1.0
    for s in range(30):
        d = splitting_defect(oracle, random_block_diagonal_acs(man, s), x, y)
        assert abs(d.direct) < 1e-10


def test_probe_needs_2_sphere_first():
    with pytest.raises(ContractViolation):
        splitting_pressure_probe(spheres((4, 1.0), (2, 1.0)), samples=5, seed=0)
