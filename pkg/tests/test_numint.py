import numpy as np
import pytest

from segre_ode.errors import NotLinear, PathTooClose, Psi1Vanishes
from segre_ode.fixtures import (ex68_ode, fixture_graph, graph_samples, log_graph, m_gamma_graph,
                                m_gamma_ode, mm0_ode, mm0_solution)
from segre_ode.numint import (PathSpec, StepControl, associated_map_linear,
                              collinearity_residual, growth_exponent, integrate_path, monodromy,
                              monodromy_linear, monodromy_probe, segre_residual)
from segre_ode.ode import NonminimalODE
from segre_ode.series import TruncatedSeries as S

N = 16
ZERO = S.zero(N)
FLAT = NonminimalODE(1, ZERO, ZERO, ZERO, ZERO, ZERO, ZERO)
GAMMAS = [0.25, 1 / 3, 0.5, 1.0, 2 ** 0.5]


def pair_distance(a, b):
    """Distance between two eigenvalue pairs under the best matching."""
    a, b = np.asarray(a), np.asarray(b)
    return min(np.max(np.abs(a - b)), np.max(np.abs(a - b[::-1])))


def flat_like(m, A=ZERO, B=ZERO, C=ZERO, D=ZERO, E=ZERO, F=ZERO):
    return NonminimalODE(m, A, B, C, D, E, F)


# -- integrate_path ---------------------------------------------------------------------

@pytest.mark.parametrize("init,expected", [((1, 1), 2.0), ((1, -1), 0.5)])
def test_segment_closed_forms(init, expected):
    res = integrate_path(m_gamma_ode(1.0), init, PathSpec.segment(1, 2))
    assert abs(res.z - expected) < 1e-8
    assert res.w_end == 2


def test_single_valued_solution_returns():
    res = integrate_path(m_gamma_ode(1.0), (1, 1), PathSpec.circle(1.0))
    assert abs(res.z - 1) < 1e-8 and abs(res.dz - 1) < 1e-8


def test_polyline_matches_closed_form():
    pts = [0.6, 0.6 + 0.6j, -0.5 + 0.4j]
    w = np.array(pts[0])
    z0, dz0, _ = m_gamma_graph(2.0, w)
    res = integrate_path(m_gamma_ode(2.0), (z0, dz0), PathSpec.polyline(pts))
    z1, dz1, _ = m_gamma_graph(2.0, np.array(pts[-1]))
    assert abs(res.z - z1) < 1e-8 * abs(z1) and abs(res.dz - dz1) < 1e-8 * abs(dz1)


def test_vector_initial_data():
    res = integrate_path(m_gamma_ode(1.0), ([1, 1], [1, -1]), PathSpec.segment(1, 2))
    assert np.allclose(res.z, [2, 0.5], atol=1e-8)


def test_path_too_close():
    with pytest.raises(PathTooClose):
        integrate_path(m_gamma_ode(1.0), (1, 1), PathSpec.segment(-1, 1))
    with pytest.raises(PathTooClose):
        integrate_path(m_gamma_ode(1.0), (1, 1), PathSpec.circle(1e-4))


def test_fixed_step_order():
    """Halving the step of the fifth-order propagator cuts the error about 32-fold."""
    errs = []
    for n in (8, 16, 32):
        res = integrate_path(m_gamma_ode(2.0), (1, -2), PathSpec.segment(1, 2),
                             StepControl(fixed_steps=n))
        errs.append(abs(res.z - 0.25))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(20 < r < 48 for r in ratios), ratios


def test_adaptive_tolerance_reduces_error():
    errs = []
    for tol in (1e-6, 1e-9, 1e-12):
        res = integrate_path(m_gamma_ode(0.5), (1, -0.5), PathSpec.segment(1, 3),
                             StepControl(atol=tol, rtol=tol))
        errs.append(abs(res.z - 3 ** -0.5))
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-13
    assert errs[2] < 1e-11


# -- monodromy ------------------------------------------------------------------------------

@pytest.mark.parametrize("gamma", [0.25, 0.5, 1.0, 2.0, 3.0])
def test_monodromy_eigenvalues(gamma):
    rep = monodromy_linear(m_gamma_ode(gamma))
    want = np.exp(2j * np.pi * gamma * np.array([1, -1]))
    assert pair_distance(rep.eigenvalues, want) < 1e-5
    assert rep.trivial == (gamma in (1.0, 2.0, 3.0))
    assert abs(np.linalg.det(rep.matrix)) > 0.5


def test_monodromy_half_is_minus_identity():
    rep = monodromy_linear(m_gamma_ode(0.5))
    assert np.allclose(rep.matrix, -np.eye(2), atol=1e-6)


def test_monodromy_quarter_trace():
    rep = monodromy_linear(m_gamma_ode(0.25))
    assert abs(np.trace(rep.matrix)) < 1e-6


def test_monodromy_rejects_nonlinear():
    ode = flat_like(1, A=S.monomial(1, 3j, N), B=S.constant(-1, N), C=S.monomial(2, 1, N),
                    D=S.monomial(1, 1j, N), F=S.monomial(1, 1, N))
    with pytest.raises(NotLinear):
        monodromy_linear(ode)
    assert monodromy(ode).method == "probe"


def test_probe_log_solution():
    rep = monodromy_probe(m_gamma_ode(0.0), (0, 1), radius=1.0)
    assert abs(rep.probe_deviation - 2 * np.pi) < 1e-5
    assert not rep.trivial


def test_probe_ex68_trivial():
    rep = monodromy_probe(ex68_ode(), (0.3 + 0.1j, -1.2 + 0.5j))
    assert rep.probe_deviation < 1e-8 and rep.trivial


def test_probe_mm0_trivial():
    rep = monodromy_probe(mm0_ode(2), (0.3 + 0.1j, -1.2 + 0.5j))
    assert rep.probe_deviation < 1e-6 and rep.trivial


@pytest.mark.parametrize("gamma", GAMMAS)
def test_loop_radius_invariance(gamma):
    a = monodromy_linear(m_gamma_ode(gamma), radius=0.5)
    b = monodromy_linear(m_gamma_ode(gamma), radius=0.8)
    assert pair_distance(a.eigenvalues, b.eigenvalues) < 1e-5


@pytest.mark.parametrize("gamma", GAMMAS)
def test_basepoint_covariance(gamma):
    a = monodromy_linear(m_gamma_ode(gamma), theta0=0.0)
    b = monodromy_linear(m_gamma_ode(gamma), theta0=2.1)
    assert pair_distance(a.eigenvalues, b.eigenvalues) < 1e-5


@pytest.mark.parametrize("gamma", GAMMAS)
def test_reverse_loop_is_inverse(gamma):
    fwd = monodromy_linear(m_gamma_ode(gamma), turns=1.0)
    rev = monodromy_linear(m_gamma_ode(gamma), turns=-1.0)
    assert np.max(np.abs(rev.matrix - np.linalg.inv(fwd.matrix))) < 1e-5


# -- growth ---------------------------------------------------------------------------------

@pytest.mark.parametrize("theta", [0.0, 1.0, -2.5])
def test_growth_power_law(theta):
    w0 = 0.5 * np.exp(1j * theta)
    init = (w0 ** -0.5, -0.5 * w0 ** -1.5)
    rep = growth_exponent(m_gamma_ode(0.5), init, theta=theta)
    assert rep.verdict == "moderate"
    assert abs(rep.exponent + 0.5) < 0.05


def test_growth_constant_solution():
    rep = growth_exponent(ex68_ode(), (1.0, 0.0), theta=0.7)
    assert rep.verdict == "moderate" and abs(rep.exponent) < 0.05


def test_growth_irregular_on_essential_singularity():
    rep = growth_exponent(mm0_ode(2), theta=-np.pi / 2)
    assert rep.verdict == "irregular" and rep.super_polynomial


def test_growth_decaying_ray_is_not_super_polynomial():
    # on theta = +pi/2 the exponential factor decays
    rep = growth_exponent(mm0_ode(2), theta=np.pi / 2)
    assert not rep.super_polynomial


def test_growth_rejects_bad_radii():
    with pytest.raises(ValueError):
        growth_exponent(ex68_ode(), r0=0.5, r_min=0.6)


# -- associated map --------------------------------------------------------------------------

ARC = np.exp(1j * np.linspace(0.0, 1.0, 7)[1:])


def test_associated_map_mm0():
    e = np.exp(-2j)
    amap = associated_map_linear(mm0_ode(2), 1.0, (1.0, 0.0), (e / 2j, e))
    psi = amap.psi(ARC)
    want = np.exp(-2j / ARC) / 2j
    assert np.max(np.abs(psi[:, 1] - want) / np.abs(want)) < 1e-6
    assert np.allclose(psi[:, 0], 1, atol=1e-9)


def test_associated_map_gamma1_collinear():
    amap = associated_map_linear(m_gamma_ode(1.0), 1.0, (1.0, 1.0), (1.0, -1.0))
    ws = np.exp(1j * np.linspace(0.1, 1.2, 5))
    z = (ws - 1 / ws) / 2j
    img = amap(z, ws)
    assert np.allclose(img[:, 1], ws ** -2, atol=1e-8)
    assert amap.collinearity(z, ws) < 1e-8


def test_associated_map_flat_is_identity():
    amap = associated_map_linear(FLAT, 1.0, (1.0, 0.0), (1.0, 1.0))
    ws = np.array([1.5, 2.0 + 0.5j, 1.2 - 0.3j])
    z = np.array([0.3, -1.0, 2j])
    img = amap(z, ws)
    assert np.allclose(img, np.stack([z, ws], axis=1), atol=1e-12)
    assert amap.collinearity(2 * ws + 1, ws) < 1e-12


def test_associated_map_errors():
    with pytest.raises(NotLinear):
        associated_map_linear(flat_like(1, F=S.constant(1, N)))
    amap = associated_map_linear(m_gamma_ode(1.0), 1.0, (0.0, 1.0), (1.0, 0.0))
    # psi1 = (w - 1/w)/2 vanishes at the basepoint's neighbour w = 1
    with pytest.raises(Psi1Vanishes):
        amap(np.array([0.5]), np.array([1.0]))


@pytest.mark.parametrize("name", ["m-gamma:1", "mm0:2"])
def test_collinearity_on_random_graphs(name):
    rng = np.random.default_rng(3)
    ws = 1.2 * np.exp(1j * np.linspace(0.05, 0.9, 6))
    if name == "m-gamma:1":
        amap = associated_map_linear(m_gamma_ode(1.0), 1.0, (1.0, 1.0), (1.0, -1.0))
        basis = np.stack([ws, 1 / ws])
    else:
        e = np.exp(-2j)
        amap = associated_map_linear(mm0_ode(2), 1.0, (1.0, 0.0), (e / 2j, e))
        basis = np.stack([np.ones_like(ws), mm0_solution(ws, 0.0, 1.0)[0]])
    psi_cache = amap.psi(ws)
    assert np.allclose(psi_cache.T, basis, rtol=1e-7)
    for _ in range(20):
        c = rng.normal(size=2) + 1j * rng.normal(size=2)
        z = c @ basis
        assert amap.collinearity(z, ws) < 1e-6


def test_collinearity_residual_detects_bend():
    assert collinearity_residual([[0, 0], [1, 1], [2, 2]]) < 1e-15
    assert collinearity_residual([[0, 0], [1, 0], [0, 1]]) > 0.1


# -- Segre residual ------------------------------------------------------------------------

def test_segre_residual_rotation_graph():
    w = graph_samples(50)
    assert segre_residual(m_gamma_ode(2.0), w, *m_gamma_graph(2.0, w)) < 1e-10


def test_segre_residual_log_graph():
    w = graph_samples(50)
    assert segre_residual(m_gamma_ode(0.0), w, *log_graph(w)) < 1e-12


def test_segre_residual_constant_graph():
    w = graph_samples(10)
    one = np.ones_like(w)
    assert segre_residual(ex68_ode(), w, one, 0 * one, 0 * one) == 0


@pytest.mark.parametrize("name,ode", [("ex68", ex68_ode()), ("mm0:2", mm0_ode(2)),
                                      ("m-gamma:0.5", m_gamma_ode(0.5))])
def test_segre_residual_fixture_graphs(name, ode):
    w = graph_samples(20)
    assert segre_residual(ode, w, *fixture_graph(name, w)) < 1e-10


def test_segre_residual_detects_wrong_ode():
    w = graph_samples(10)
    assert segre_residual(m_gamma_ode(3.0), w, *m_gamma_graph(2.0, w)) > 1e-3
