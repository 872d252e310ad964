import numpy as np
import pytest

import kreinext as kx
from kreinext import (
    ExcludedPointError,
    ExtensionParams,
    ExtensionSingularError,
    GreenCombination,
)

from helpers import one_sided_derivatives, random_hermitian, random_params

PI = np.pi
FOUR_PI = 4 * np.pi


@pytest.fixture(scope="module")
def interval_pi():
    return kx.interval_weyl(kx.IntervalModel(PI))


@pytest.fixture(scope="module")
def point_one():
    return kx.point_weyl(kx.PointModel([[0.0, 0.0, 0.0]]))


# ---------------------------------------------------------------------------
# parameter validation


def test_validate_params_passes_full_swap():
    p = ExtensionParams(np.eye(2), np.array([[0, 1], [1, 0]], dtype=complex))
    assert kx.validate_params(p).passed


def test_validate_params_range_violation():
    p = ExtensionParams(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    report = kx.validate_params(p)
    assert not report.passed
    assert report.residuals["operator_on_range"] > 1e-6


def test_validate_params_non_selfadjoint_projector():
    p = ExtensionParams(np.array([[1, 1], [0, 0]], dtype=complex), np.zeros((2, 2)))
    report = kx.validate_params(p)
    assert not report.passed
    assert report.residuals["projector_selfadjoint"] > 1e-6


# ---------------------------------------------------------------------------
# secular matrix


def test_secular_matrix_trivial_projector(interval_pi):
    p = ExtensionParams.trivial(2)
    m = kx.secular_matrix(interval_pi, p, 1.5 + 0.5j)
    assert m.shape == (0, 0)


def test_secular_matrix_interval_closed_form(interval_pi):
    p = ExtensionParams.full(np.zeros((2, 2)))
    m = kx.secular_matrix(interval_pi, p, 1.0)
    expected = np.array(
        [[1 / np.tanh(PI), -1 / np.sinh(PI)], [-1 / np.sinh(PI), 1 / np.tanh(PI)]]
    )
    assert np.allclose(m, expected, atol=1e-12)
    assert abs(m[0, 0] - 1.003742) < 1e-6
    assert abs(m[0, 1] + 0.086589) < 1e-6


def test_secular_matrix_point_scalar(point_one):
    alpha = -0.25
    p = ExtensionParams.full([[alpha]])
    m = kx.secular_matrix(point_one, p, 1.0)
    assert np.allclose(m, [[alpha + 1 / FOUR_PI]])


# ---------------------------------------------------------------------------
# regular points


def test_regular_point_nonreal(interval_pi):
    p = ExtensionParams.full(np.zeros((2, 2)))
    assert kx.is_regular_point(interval_pi, p, 1j)


def test_regular_point_fails_at_secular_root(interval_pi):
    p = ExtensionParams.full(np.zeros((2, 2)))
    assert not kx.is_regular_point(interval_pi, p, 0.0)


def test_regular_point_point_model_bound_state(point_one):
    p = ExtensionParams.full([[-1 / FOUR_PI]])
    assert not kx.is_regular_point(point_one, p, 1.0)


def test_nonreal_always_regular_all_models():
    rng = np.random.default_rng(5)
    systems = [
        kx.interval_weyl(kx.IntervalModel(1.7)),
        kx.graph_weyl(kx.GraphModel((1.0, 2.0))),
        kx.point_weyl(kx.PointModel([[0, 0, 0], [1.0, 0, 0]])),
        kx.spin_weyl(kx.SpinPointModel([[0, 0, 0]], (0.0, 5.0))),
    ]
    for system in systems:
        for _ in range(50):
            params = random_params(rng, system.n, scale=rng.uniform(0.2, 4.0))
            z = complex(rng.uniform(-20, 20), rng.choice([-1, 1]) * rng.uniform(0.05, 10))
            assert kx.is_regular_point(system, params, z)


# ---------------------------------------------------------------------------
# Krein correction


def test_correction_trivial_projector(interval_pi):
    p = ExtensionParams.trivial(2)
    assert np.allclose(kx.krein_correction(interval_pi, p, 2j), np.zeros((2, 2)))


def test_correction_is_secular_inverse(interval_pi):
    p = ExtensionParams.full(np.zeros((2, 2)))
    c = kx.krein_correction(interval_pi, p, 1.0)
    m = kx.secular_matrix(interval_pi, p, 1.0)
    assert np.allclose(c, np.linalg.inv(m), atol=1e-12)


def test_correction_point_scalar(point_one):
    alpha = 0.3
    p = ExtensionParams.full([[alpha]])
    c = kx.krein_correction(point_one, p, 4.0)
    assert np.allclose(c, [[1.0 / (alpha + 1.0 / (2 * np.pi))]])


def test_correction_raises_extension_singular(point_one):
    p = ExtensionParams.full([[-1 / FOUR_PI]])
    with pytest.raises(ExtensionSingularError) as excinfo:
        kx.krein_correction(point_one, p, 1.0)
    assert excinfo.value.sigma_min < 1e-12


def test_correction_conjugation_random(interval_pi):
    rng = np.random.default_rng(21)
    for _ in range(10):
        params = random_params(rng, 2)
        z = complex(rng.uniform(-3, 3), rng.uniform(0.2, 3))
        c = kx.krein_correction(interval_pi, params, z)
        cbar = kx.krein_correction(interval_pi, params, np.conj(z))
        assert np.linalg.norm(c.conj().T - cbar) <= 1e-10


# ---------------------------------------------------------------------------
# resolvent application


def test_resolvent_trivial_projector_is_free(interval_pi):
    x = np.linspace(0, PI, 1200)
    psi = np.sin(2 * x) + 0j
    p = ExtensionParams.trivial(2)
    phi = kx.apply_resolvent(interval_pi, p, 1 + 1j, psi, x)
    free = interval_pi.r_apply(1 + 1j, psi, x)
    assert np.allclose(phi, free)


def test_resolvent_neumann_boundary_derivatives(interval_pi):
    x = np.linspace(0, PI, 2000)
    psi = np.sin(x) + 0j
    p = ExtensionParams.full(np.zeros((2, 2)))
    phi = kx.apply_resolvent(interval_pi, p, 1.0, psi, x)
    d0, da_in = one_sided_derivatives(phi, x[1] - x[0])
    assert abs(d0) < 1e-6
    assert abs(da_in) < 1e-6


def test_resolvent_fd_residual_random_coupling(interval_pi):
    rng = np.random.default_rng(2)
    theta = random_hermitian(rng, 2)
    p = ExtensionParams.full(theta)
    z = 1 + 1j
    n = 2000
    x = np.linspace(0, PI, n)
    psi = x * (PI - x) + 0j
    phi = kx.apply_resolvent(interval_pi, p, z, psi, x)
    h = x[1] - x[0]
    residual = -(phi[:-2] - 2 * phi[1:-1] + phi[2:]) / h**2 + z * phi[1:-1] - psi[1:-1]
    assert np.max(np.abs(residual)) / np.max(np.abs(psi)) < 1e-3


def test_resolvent_identity_probe(interval_pi):
    rng = np.random.default_rng(4)
    p = ExtensionParams.full(random_hermitian(rng, 2))
    x = np.linspace(0, PI, 2000)
    psi = x * (PI - x) + 0j
    za, wb = 1 + 1j, 2 - 1j
    rz = kx.apply_resolvent(interval_pi, p, za, psi, x)
    rw = kx.apply_resolvent(interval_pi, p, wb, psi, x)
    rwz = kx.apply_resolvent(interval_pi, p, wb, rz, x)
    lhs = (za - wb) * rwz
    assert np.max(np.abs(lhs - (rw - rz))) <= 1e-3 * np.max(np.abs(psi))


def test_resolvent_grid_too_coarse(interval_pi):
    x = np.linspace(0, PI, 100)
    with pytest.raises(kx.GridTooCoarseError):
        kx.apply_resolvent(
            interval_pi, ExtensionParams.trivial(2), 1j, np.sin(x), x
        )


def test_resolvent_green_combination(point_one):
    # apply the resolvent to psi = G(z0) eta in closed form and check the
    # result against the defining algebra
    alpha = 0.5
    p = ExtensionParams.full([[alpha]])
    z0, z = 2.0, 1 + 1j
    combo = GreenCombination(((z0, np.array([1.0 + 0j])),))
    out = kx.apply_resolvent_green(point_one, p, z, combo)
    coeff_z = out.coefficient(z)
    coeff_z0 = out.coefficient(z0)
    # free part: (G(z) - G(z0)) / (z0 - z)
    assert np.allclose(coeff_z0, -1.0 / (z0 - z))
    corr = kx.krein_correction(point_one, p, z)
    expected_z = 1.0 / (z0 - z) + corr @ point_one.gram(z0, z) @ np.array([1.0])
    assert np.allclose(coeff_z, expected_z)


def test_green_norm_matches_direct_integral(point_one):
    # || G(z) ||^2 for one center has the closed form 1 / (8 pi Re sqrt(z))
    z = 2.0 + 0j
    combo = GreenCombination(((z, np.array([1.0 + 0j])),))
    norm = kx.green_norm(point_one, combo)
    exact = np.sqrt(1.0 / (8 * np.pi * np.sqrt(2.0)))
    assert abs(norm - exact) < 1e-12


# ---------------------------------------------------------------------------
# Weyl family identities


def test_difference_identity_same_point(interval_pi):
    assert kx.difference_identity_residual(interval_pi, 1j, 1j) == 0.0


def test_difference_identity_interval_quadrature():
    system = kx.interval_weyl(kx.IntervalModel(PI), gram_nodes=2001)
    assert kx.difference_identity_residual(system, 1j, -1j) < 1e-8


def test_difference_identity_point_closed_form(point_one):
    assert kx.difference_identity_residual(point_one, 1 + 1j, 3 - 2j) < 1e-12


def test_conjugation_residuals(interval_pi, point_one):
    # real admissible points: hermitian
    assert kx.conjugation_residual(interval_pi, 0.7) < 1e-12
    system1 = kx.interval_weyl(kx.IntervalModel(1.0))
    assert kx.conjugation_residual(system1, 2 + 3j) < 1e-12
    assert kx.conjugation_residual(point_one, 1 + 1j) < 1e-12


def test_excluded_point_rejected(interval_pi):
    with pytest.raises(ExcludedPointError):
        interval_pi.gamma(-1.0)  # Dirichlet point for a = pi
    with pytest.raises(ExcludedPointError):
        kx.secular_matrix(interval_pi, ExtensionParams.full(np.zeros((2, 2))), -4.0)


# ---------------------------------------------------------------------------
# Green identity


def test_green_identity_zero_charges(interval_pi):
    phi = (kx.sine_mode(1.0), np.zeros(2))
    psi = (kx.sine_mode(2.0), np.zeros(2))
    assert kx.green_identity_residual(interval_pi, phi, psi) < 1e-10


def test_green_identity_manufactured(interval_pi):
    phi = (kx.sine_mode(1.0), np.array([1.0, 0.0], dtype=complex))
    psi = (kx.sine_mode(2.0), np.array([0.0, 1.0], dtype=complex))
    assert kx.green_identity_residual(interval_pi, phi, psi, n_nodes=4001) < 1e-4


def test_green_identity_antisymmetry(interval_pi):
    phi = (kx.sine_mode(1.0), np.array([0.3 + 1j, -0.2], dtype=complex))
    assert kx.green_identity_residual(interval_pi, phi, phi) < 1e-12


def test_green_identity_unsupported_for_points(point_one):
    with pytest.raises(kx.UnsupportedModelError):
        kx.green_identity_residual(point_one, (None, [0.0]), (None, [0.0]))


# ---------------------------------------------------------------------------
# boundary condition residuals


def test_boundary_residuals_neumann_cosine(interval_pi):
    # psi = cos(x) satisfies the Neumann condition on (0, pi); decompose with
    # charge = its boundary values and regular part cos - G_* charge
    zeta = np.array([1.0, -1.0], dtype=complex)
    model = kx.IntervalModel(PI)
    g_star = 0.5 * (kx.interval_green(model, 1j, zeta) + kx.interval_green(model, -1j, zeta))
    part = kx.cosine_mode(1.0) - g_star
    p = ExtensionParams.full(np.zeros((2, 2)))
    report = kx.boundary_condition_residuals(interval_pi, p, part, zeta)
    assert report.range_residual < 1e-12
    assert report.coupling_residual < 1e-12


def test_boundary_residuals_trivial_projector(interval_pi):
    p = ExtensionParams.trivial(2)
    ok = kx.boundary_condition_residuals(interval_pi, p, kx.sine_mode(1.0), np.zeros(2))
    assert ok.range_residual < 1e-14 and ok.coupling_residual < 1e-14
    bad = kx.boundary_condition_residuals(
        interval_pi, p, kx.sine_mode(1.0), np.array([1.0, 0.0])
    )
    assert bad.range_residual > 0.5


def test_boundary_residuals_point_eigenfunction(point_one):
    alpha = -1.0 / FOUR_PI
    lam = 16 * np.pi**2 * alpha**2
    model = kx.PointModel([[0.0, 0.0, 0.0]])
    zeta = np.array([1.0], dtype=complex)
    part = kx.point_green_regular_part(model, lam, zeta)
    p = ExtensionParams.full([[alpha]])
    report = kx.boundary_condition_residuals(point_one, p, part, zeta)
    assert report.range_residual < 1e-10
    assert report.coupling_residual < 1e-10


# ---------------------------------------------------------------------------
# interval determinant identity


def test_interval_determinant_identity_random():
    rng = np.random.default_rng(12)
    system = kx.interval_weyl(kx.IntervalModel(PI))
    checked = 0
    while checked < 100:
        z = complex(rng.uniform(-40, 25), rng.uniform(-15, 15))
        if system.excluded.contains(z):
            continue
        det = np.linalg.det(system.gamma(z))
        assert abs(det - z) <= 1e-10 * (1 + abs(z))
        checked += 1


def test_boundary_residuals_graph_kirchhoff():
    # ground state of two glued Neumann edges is the constant function; its
    # charge is the boundary-value vector and the regular part is
    # G(0) zeta - G_* zeta edge by edge
    lengths = (1.0, 2.0)
    graph = kx.GraphModel(lengths)
    system = kx.graph_weyl(graph)
    params = kx.vertex_params(
        graph,
        [
            kx.VertexGroup(((0, "left"),), 0.0),
            kx.VertexGroup(((0, "right"), (1, "left")), 0.0),
            kx.VertexGroup(((1, "right"),), 0.0),
        ],
    )
    zeta = np.ones(4, dtype=complex)
    parts = []
    for k, a in enumerate(lengths):
        edge = kx.IntervalModel(a)
        zslice = zeta[2 * k : 2 * k + 2]
        g0 = kx.interval_green(edge, 0.0, zslice)
        gstar = 0.5 * (
            kx.interval_green(edge, 1j, zslice) + kx.interval_green(edge, -1j, zslice)
        )
        parts.append(g0 - gstar)
    report = kx.boundary_condition_residuals(system, params, parts, zeta)
    assert report.range_residual < 1e-12
    assert report.coupling_residual < 1e-10


def test_green_identity_on_graph():
    system = kx.graph_weyl(kx.GraphModel((1.0, 2.0)))
    phi = (
        [kx.sine_mode(np.pi), kx.sine_mode(np.pi / 2.0)],
        np.array([1.0, 0.0, 0.5j, 0.0]),
    )
    psi = (
        [kx.sine_mode(2 * np.pi), kx.sine_mode(np.pi)],
        np.array([0.0, 1.0, 0.0, -0.3]),
    )
    assert kx.green_identity_residual(system, phi, psi, n_nodes=4001) < 1e-4


def test_resolvent_green_rejects_matching_node(point_one):
    combo = GreenCombination(((2.0 + 0j, np.array([1.0 + 0j])),))
    with pytest.raises(ValueError):
        kx.apply_resolvent_green(
            point_one, ExtensionParams.full([[0.5]]), 2.0 + 0j, combo
        )


def test_graph_resolvent_vertex_conditions():
    # glued edges: the resolvent output must be continuous across the vertex
    # with matching derivatives (Kirchhoff) and Neumann outer ends
    lengths = (1.0, 2.0)
    graph = kx.GraphModel(lengths)
    system = kx.graph_weyl(graph)
    params = kx.vertex_params(
        graph,
        [
            kx.VertexGroup(((0, "left"),), 0.0),
            kx.VertexGroup(((0, "right"), (1, "left")), 0.0),
            kx.VertexGroup(((1, "right"),), 0.0),
        ],
    )
    z = 1 + 1j
    grids = [np.linspace(0, a, 2001) for a in lengths]
    psi = [np.sin(np.pi * x / a) + 0j for a, x in zip(lengths, grids)]
    phi = kx.apply_resolvent(system, params, z, psi, grids)

    for k, (a, x) in enumerate(zip(lengths, grids)):
        h = x[1] - x[0]
        res = -(phi[k][:-2] - 2 * phi[k][1:-1] + phi[k][2:]) / h**2 + z * phi[k][1:-1]
        res -= psi[k][1:-1]
        assert np.max(np.abs(res)) < 1e-3 * np.max(np.abs(psi[k]))

    d_left = []
    d_right = []
    for k, x in enumerate(grids):
        h = x[1] - x[0]
        f = phi[k]
        d0 = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
        da = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
        d_left.append(d0)
        d_right.append(da)
    # continuity and Kirchhoff at the shared vertex
    assert abs(phi[0][-1] - phi[1][0]) < 1e-8
    assert abs(-d_right[0] + d_left[1]) < 1e-6
    # Neumann outer ends
    assert abs(d_left[0]) < 1e-6
    assert abs(d_right[1]) < 1e-6


def test_resolvent_green_spin_blocks():
    # the channel shifts cancel inside the resolvent difference quotient, so
    # the spin route must agree blockwise with two scalar point models
    model = kx.SpinPointModel([[0.0, 0.0, 0.0]], (0.0, 5.0))
    spin = kx.spin_weyl(model)
    point = kx.point_weyl(kx.PointModel([[0.0, 0.0, 0.0]]))
    alpha = 0.4
    params_spin = ExtensionParams.full(np.diag([alpha, alpha]).astype(complex))
    params_point = ExtensionParams.full([[alpha]])
    z0, z = 7.0 + 0j, 6.0 + 2j
    combo_spin = kx.apply_resolvent_green(
        spin, params_spin, z, GreenCombination(((z0, np.array([1.0, 1.0 + 0j])),))
    )
    for channel, b in enumerate(model.b):
        scalar = kx.apply_resolvent_green(
            point,
            params_point,
            z - b,
            GreenCombination(((z0 - b, np.array([1.0 + 0j])),)),
        )
        spin_z = combo_spin.coefficient(z)[channel]
        spin_z0 = combo_spin.coefficient(z0)[channel]
        assert np.allclose(spin_z, scalar.coefficient(z - b)[0])
        assert np.allclose(spin_z0, scalar.coefficient(z0 - b)[0])
