import numpy as np
import pytest

from sphereacs.config import TOL
from sphereacs.errors import ContractViolation, DegenerateInput, InvalidManifold, StepSizeError
from sphereacs.fields import (
    ACSField,
    EmbeddedPoint,
    acs_field_validity_check,
    cross_matrix,
    default_acs_field,
    lie_bracket_fd,
    lie_bracket_fd_batch,
    linear_field,
    nijenhuis,
    nijenhuis_batch,
    nijenhuis_energy,
    nijenhuis_norms,
    nijenhuis_tensoriality_check,
    normalize_blocks,
    product_acs_field,
    projected_constant_field,
    rotation_field,
    s2_rotation_blocks,
    s4_chart_blocks,
    s4_integrable_chart_blocks,
    s6_octonion_blocks,
    sample_tangent_pairs,
    tangent_bases,
    tangent_project,
)
from sphereacs.manifold import spheres
from sphereacs.octonion import cross7
from sphereacs.sampling import (
    chart_safe_points,
    fibonacci_sphere,
    low_discrepancy_directions,
    manifold_points,
)

S2 = spheres((2, 1.0))
S6 = spheres((6, 1.0))


# ---------------------------------------------------------------------------
# Basic geometry plumbing
# ---------------------------------------------------------------------------

def test_embedded_point_validation():
    man = spheres((2, 1.0), (4, 1.0))
    good = np.zeros(8)
    good[0] = 1.0
    good[3] = 1.0
    p = EmbeddedPoint(man, good)
    assert np.allclose(p.factor_direction(0), [1.0, 0.0, 0.0])
    with pytest.raises(ContractViolation):
        EmbeddedPoint(man, np.ones(8))
    with pytest.raises(ContractViolation):
        EmbeddedPoint(man, np.zeros(5))


def test_normalize_blocks_and_projection():
    man = spheres((2, 1.0), (4, 1.0))
    rng = np.random.default_rng(0)
    q = rng.standard_normal((10, 8))
    u = normalize_blocks(man, q)
    for sl in man.ambient_slices:
        assert np.allclose(np.linalg.norm(u[:, sl], axis=1), 1.0, atol=1e-13)
    v = rng.standard_normal((10, 8))
    t = tangent_project(man, u, v)
    for sl in man.ambient_slices:
        assert np.max(np.abs(np.sum(t[:, sl] * u[:, sl], axis=1))) < 1e-13
    with pytest.raises(DegenerateInput):
        normalize_blocks(man, np.zeros((1, 8)))


def test_tangent_bases_orthonormal():
    man = spheres((2, 1.0), (6, 2.0))
    pts = manifold_points(man, 30, seed=1)
    bases = tangent_bases(man, pts)
    assert bases.shape == (30, 10, 8)
    for k in range(30):
        b = bases[k]
        assert np.allclose(b.T @ b, np.eye(8), atol=1e-12)
        # columns are tangent: orthogonal to each factor direction
        for sl in man.ambient_slices:
            assert np.max(np.abs(pts[k, sl] @ b[sl])) < 1e-12


# ---------------------------------------------------------------------------
# Lie brackets
# ---------------------------------------------------------------------------

AXIS_1 = np.array([1.0, 0.2, -0.3])
AXIS_2 = np.array([-0.4, 1.1, 0.5])


def closed_form_rotation_bracket(pts):
    # [X_a, X_b](x) = -(a x b) x x for rotation fields on the unit 2-sphere
    return pts @ cross_matrix(-np.cross(AXIS_1, AXIS_2)).T


def test_bracket_matches_rotation_oracle():
    X = rotation_field(S2, 0, AXIS_1)
    Y = rotation_field(S2, 0, AXIS_2)
    pts = fibonacci_sphere(12, seed=3)
    got = lie_bracket_fd_batch(X, Y, pts)
    assert np.max(np.linalg.norm(got - closed_form_rotation_bracket(pts), axis=1)) < TOL.fd_bracket


def test_bracket_second_order_convergence():
    # halving h must quarter the error against the closed form
    X = rotation_field(S2, 0, AXIS_1)
    Y = rotation_field(S2, 0, AXIS_2)
    pts = fibonacci_sphere(9, seed=3)
    expected = closed_form_rotation_bracket(pts)
    errs = {}
    for h in (4e-3, 2e-3, 1e-3):
        got = lie_bracket_fd_batch(X, Y, pts, h=h)
        errs[h] = np.linalg.norm(got - expected, axis=1)
    for big, small in ((4e-3, 2e-3), (2e-3, 1e-3)):
        ratio = float(np.median(errs[big] / errs[small]))
        assert 3.5 <= ratio <= 4.5


def test_bracket_of_field_with_itself_vanishes():
    X = rotation_field(S2, 0, AXIS_1)
    pts = fibonacci_sphere(15, seed=1)
    assert np.max(np.abs(lie_bracket_fd_batch(X, X, pts))) < 1e-8


def test_bracket_bilinearity():
    X = rotation_field(S2, 0, AXIS_1)
    Y = rotation_field(S2, 0, AXIS_2)
    Z = rotation_field(S2, 0, np.array([0.3, -0.7, 0.9]))
    pts = fibonacci_sphere(8, seed=5)
    lhs = lie_bracket_fd_batch(X, Y + Z, pts)
    rhs = lie_bracket_fd_batch(X, Y, pts) + lie_bracket_fd_batch(X, Z, pts)
    assert np.max(np.abs(lhs - rhs)) < TOL.fd_linear


def test_bracket_radius_scaling():
    # the same unit-direction fields on a radius-r sphere scale the bracket
    man_r = spheres((2, 4.0))  # radius 1/2
    X1, Y1 = rotation_field(S2, 0, AXIS_1), rotation_field(S2, 0, AXIS_2)
    Xr, Yr = rotation_field(man_r, 0, AXIS_1), rotation_field(man_r, 0, AXIS_2)
    pts = fibonacci_sphere(6, seed=2)
    b1 = lie_bracket_fd_batch(X1, Y1, pts)
    br = lie_bracket_fd_batch(Xr, Yr, pts)
    # linear fields scale with radius, so the bracket does too
    assert np.allclose(br, 0.5 * b1, atol=1e-8)


def test_bracket_step_size_contract():
    X = rotation_field(S2, 0, AXIS_1)
    p = EmbeddedPoint(S2, np.array([0.0, 0.0, 1.0]))
    with pytest.raises(StepSizeError):
        lie_bracket_fd(X, X, p, h=1e-10)
    with pytest.raises(StepSizeError):
        lie_bracket_fd(X, X, p, h=0.5)


def test_bracket_tangency_before_projection():
    X = rotation_field(S2, 0, AXIS_1)
    Y = rotation_field(S2, 0, AXIS_2)
    pts = fibonacci_sphere(10, seed=7)
    raw = lie_bracket_fd_batch(X, Y, pts, project=False)
    normal = np.sum(raw * pts, axis=1)
    assert np.max(np.abs(normal)) < TOL.fd_bracket


def test_linear_field_requires_skew():
    with pytest.raises(ContractViolation):
        linear_field(S2, 0, np.eye(3))


# ---------------------------------------------------------------------------
# Nijenhuis tensor: integrable and non-integrable references
# ---------------------------------------------------------------------------

def test_canonical_s2_structure_is_integrable():
    Jf = default_acs_field(S2)
    X = projected_constant_field(S2, np.array([1.0, 0.0, 0.0]))
    Y = projected_constant_field(S2, np.array([0.0, 1.0, 0.5]))
    for row in fibonacci_sphere(20, seed=2):
        sample = nijenhuis(Jf, X, Y, EmbeddedPoint(S2, row))
        assert sample.norm < TOL.fd_bracket


def exact_s6_nijenhuis(u, a, b):
    """Exact-bracket oracle for the octonionic structure with the
    projected-constant coordinate fields of ambient vectors a, b.

    Every field involved has a closed-form derivative, so the four brackets
    in the tensor's definition are evaluated without finite differences:
    only octonion algebra enters.
    """

    def proj(w):
        return w - np.dot(w, u) * u

    x, y = proj(a), proj(b)

    def d_coord(vec, w):
        # derivative of q -> vec - <vec, n> n along tangent w at u
        return -np.dot(vec, w) * u - np.dot(vec, u) * w

    def d_jcoord(vec, value, w):
        # derivative of q -> n(q) x (vec - <vec, n> n) along tangent w
        return cross7(w, value) + cross7(u, d_coord(vec, w))

    jx, jy = cross7(u, x), cross7(u, y)
    b_xy = d_coord(b, x) - d_coord(a, y)
    b_jxjy = d_jcoord(b, y, jx) - d_jcoord(a, x, jy)
    b_jxy = d_coord(b, jx) - d_jcoord(a, x, y)
    b_xjy = d_jcoord(b, y, x) - d_coord(a, jy)
    return b_jxjy - b_xy - cross7(u, b_jxy) - cross7(u, b_xjy)


def test_octonionic_s6_matches_exact_bracket_oracle():
    Jf = default_acs_field(S6)
    rng = np.random.default_rng(0)
    for k in range(8):
        u = low_discrepancy_directions(1, 7, seed=10 + k)[0]
        a, b = rng.standard_normal((2, 7))
        X = projected_constant_field(S6, a)
        Y = projected_constant_field(S6, b)
        sample = nijenhuis(Jf, X, Y, EmbeddedPoint(S6, u))
        oracle = exact_s6_nijenhuis(u, a, b)
        assert np.max(np.abs(sample.value - oracle)) < TOL.fd_bracket


def test_octonionic_s6_is_far_from_integrable():
    # coordinate fields at a generic point
    Jf = default_acs_field(S6)
    u = low_discrepancy_directions(1, 7, seed=9)[0]
    X = projected_constant_field(S6, np.eye(7)[0])
    Y = projected_constant_field(S6, np.eye(7)[2])
    sample = nijenhuis(Jf, X, Y, EmbeddedPoint(S6, u))
    assert sample.norm >= 0.1


def test_octonionic_s6_nearly_kaehler_closed_form():
    # the exact oracle reduces to N(X, Y) = -4 u x proj(x x y) pointwise
    rng = np.random.default_rng(3)
    for k in range(10):
        u = low_discrepancy_directions(1, 7, seed=20 + k)[0]
        a, b = rng.standard_normal((2, 7))
        x = a - np.dot(a, u) * u
        y = b - np.dot(b, u) * u
        cand = -4.0 * cross7(u, cross7(x, y) - np.dot(cross7(x, y), u) * u)
        assert np.max(np.abs(exact_s6_nijenhuis(u, a, b) - cand)) < 1e-12


def test_product_restriction_to_second_factor():
    man = spheres((2, 1.0), (6, 1.0))
    Jf = product_acs_field(man, [s2_rotation_blocks, s6_octonion_blocks], "s2xs6")
    amb_x = np.zeros(10)
    amb_y = np.zeros(10)
    amb_x[3], amb_y[5] = 1.0, 1.0
    X = projected_constant_field(man, amb_x)
    Y = projected_constant_field(man, amb_y)
    J6 = default_acs_field(S6)
    X6 = projected_constant_field(S6, amb_x[3:])
    Y6 = projected_constant_field(S6, amb_y[3:])
    u2 = fibonacci_sphere(3, seed=4)
    u6 = low_discrepancy_directions(3, 7, seed=4)
    pts = np.concatenate([u2, u6], axis=1)
    full = nijenhuis_batch(Jf, X, Y, pts)
    alone = nijenhuis_batch(J6, X6, Y6, u6)
    assert np.max(np.abs(full[:, :3])) < TOL.fd_linear
    assert np.max(np.abs(full[:, 3:] - alone)) < TOL.fd_linear


def test_nijenhuis_antisymmetry_and_j_invariance():
    Jf = default_acs_field(S6)
    rng = np.random.default_rng(8)
    u = low_discrepancy_directions(1, 7, seed=31)[0]
    p = EmbeddedPoint(S6, u)
    X = projected_constant_field(S6, rng.standard_normal(7))
    Y = projected_constant_field(S6, rng.standard_normal(7))
    n_xy = nijenhuis(Jf, X, Y, p).value
    n_yx = nijenhuis(Jf, Y, X, p).value
    assert np.max(np.abs(n_xy + n_yx)) < TOL.fd_linear
    JX, JY = Jf.image(X), Jf.image(Y)
    n_jj = nijenhuis(Jf, JX, JY, p).value
    assert np.max(np.abs(n_jj + n_xy)) < TOL.fd_linear


def test_nijenhuis_sample_tangency():
    Jf = default_acs_field(S6)
    u = low_discrepancy_directions(1, 7, seed=2)[0]
    p = EmbeddedPoint(S6, u)
    X = projected_constant_field(S6, np.eye(7)[1])
    Y = projected_constant_field(S6, np.eye(7)[4])
    sample = nijenhuis(Jf, X, Y, p)
    assert abs(np.dot(sample.value, u)) < 1e-12


# ---------------------------------------------------------------------------
# Tensoriality
# ---------------------------------------------------------------------------

def test_tensoriality_canonical_s2():
    Jf = default_acs_field(S2)
    p = EmbeddedPoint(S2, fibonacci_sphere(5, seed=6)[2])
    assert nijenhuis_tensoriality_check(Jf, p, seed=3).passed


def test_tensoriality_octonion_first_coordinate():
    Jf = default_acs_field(S6)
    p = EmbeddedPoint(S6, low_discrepancy_directions(1, 7, seed=5)[0])

    def first_coordinate(pts):
        return pts[:, 0]

    report = nijenhuis_tensoriality_check(Jf, p, seed=4, scalar_field=first_coordinate)
    assert report.passed


def test_tensoriality_gauged_field():
    from sphereacs.search import GaugeParametrization

    man = spheres((2, 1.0), (4, 1.0))
    par = GaugeParametrization(man, degree=1, generators=3, seed=5)
    theta = 0.3 * np.random.default_rng(5).standard_normal(par.n_params)
    Jf = par.field(theta, default_acs_field(man))
    pts = chart_safe_points(man, 4, seed=6)
    report = nijenhuis_tensoriality_check(Jf, EmbeddedPoint(man, pts[0]), seed=11)
    assert report.passed


# ---------------------------------------------------------------------------
# Built-in structures: validity and integrability fixtures
# ---------------------------------------------------------------------------

def test_builtin_fields_pointwise_validity():
    cases = [
        (S2, default_acs_field(S2)),
        (S6, default_acs_field(S6)),
        (spheres((4, 1.0)), default_acs_field(spheres((4, 1.0)))),
        (spheres((2, 1.0), (4, 1.0), (6, 2.0)),
         default_acs_field(spheres((2, 1.0), (4, 1.0), (6, 2.0)))),
    ]
    for man, field in cases:
        pts = chart_safe_points(man, 100, seed=3)
        assert acs_field_validity_check(field, pts).passed


def test_s4_chart_variants():
    man4 = spheres((4, 1.0))
    pts = chart_safe_points(man4, 60, seed=8)
    integrable = product_acs_field(man4, [s4_integrable_chart_blocks], "flat-chart")
    twisted = product_acs_field(man4, [s4_chart_blocks], "twisted-chart")
    assert acs_field_validity_check(integrable, pts[:20]).passed
    assert acs_field_validity_check(twisted, pts[:20]).passed
    # the pole-rotation frame carries the locally integrable chart structure;
    # the twisted frame is genuinely non-integrable
    assert nijenhuis_energy(integrable, pts, frame_pairs=2, seed=1) < 1e-12
    assert nijenhuis_energy(twisted, pts, frame_pairs=2, seed=1) > 0.1


def test_s4_chart_bad_set_rejected():
    antipode = np.zeros((1, 5))
    antipode[0, -1] = -1.0
    with pytest.raises(DegenerateInput):
        s4_chart_blocks(antipode)


def test_default_field_rejects_unknown_dimension():
    with pytest.raises(InvalidManifold):
        default_acs_field(spheres((8, 1.0)))


# ---------------------------------------------------------------------------
# Energy
# ---------------------------------------------------------------------------

def test_energy_canonical_product_2_spheres():
    man = spheres((2, 1.0), (2, 1.0))
    Jf = default_acs_field(man)
    pts = manifold_points(man, 200, seed=5)
    assert nijenhuis_energy(Jf, pts, frame_pairs=2, seed=5) < 1e-10


def test_energy_octonionic_positive_and_seed_stable():
    Jf = default_acs_field(S6)
    energies = []
    for k in range(3):
        pts = low_discrepancy_directions(200, 7, seed=100 + k)
        energies.append(nijenhuis_energy(Jf, pts, frame_pairs=3, seed=200 + k))
    assert min(energies) > 0.0
    assert (max(energies) - min(energies)) / min(energies) < 0.05


def test_energy_deterministic():
    Jf = default_acs_field(S6)
    pts = low_discrepancy_directions(50, 7, seed=1)
    a = nijenhuis_energy(Jf, pts, frame_pairs=2, seed=3)
    b = nijenhuis_energy(Jf, pts, frame_pairs=2, seed=3)
    assert a == b


def test_energy_needs_points():
    Jf = default_acs_field(S6)
    with pytest.raises(ContractViolation):
        nijenhuis_energy(Jf, np.zeros((0, 7)), frame_pairs=1, seed=0)


def test_nijenhuis_norms_match_energy():
    Jf = default_acs_field(S6)
    pts = low_discrepancy_directions(30, 7, seed=2)
    norms = nijenhuis_norms(Jf, pts, frame_pairs=2, seed=9)
    energy = nijenhuis_energy(Jf, pts, frame_pairs=2, seed=9)
    assert norms.shape == (30,)
    assert float(np.mean(norms**2)) == pytest.approx(energy, rel=1e-12)


def test_sample_tangent_pairs_orthonormal():
    man = spheres((2, 1.0), (4, 1.0))
    pts = chart_safe_points(man, 20, seed=4)
    pts_rep, xs, ys = sample_tangent_pairs(man, pts, 3, seed=1)
    assert pts_rep.shape == (60, 8)
    assert np.allclose(np.linalg.norm(xs, axis=1), 1.0, atol=1e-12)
    assert np.allclose(np.linalg.norm(ys, axis=1), 1.0, atol=1e-12)
    assert np.max(np.abs(np.sum(xs * ys, axis=1))) < 1e-12
    for sl in man.ambient_slices:
        assert np.max(np.abs(np.sum(xs[:, sl] * pts_rep[:, sl], axis=1))) < 1e-12


def test_energy_gauge_sensitivity_is_smooth():
    # central and forward difference quotients of the energy along a fixed
    # gauge direction agree, i.e. the objective responds smoothly
    from sphereacs.search import GaugeParametrization, make_energy_objective

    man = spheres((2, 1.0), (4, 1.0))
    par = GaugeParametrization(man, degree=0, generators=3, seed=2)
    pts = chart_safe_points(man, 40, seed=2)
    objective = make_energy_objective(par, default_acs_field(man), pts, 1, pair_seed=2)
    theta = 0.2 * np.random.default_rng(1).standard_normal(par.n_params)
    direction = np.zeros(par.n_params)
    direction[0] = 1.0
    delta = 1e-3
    e_p, e_m = objective(theta + delta * direction), objective(theta - delta * direction)
    central = (e_p - e_m) / (2 * delta)
    forward = (e_p - objective(theta)) / delta
    assert abs(central) > 1e-4  # a genuinely responsive direction
    assert abs(forward - central) < 0.05 * abs(central) + 1e-8
