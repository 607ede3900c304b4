import numpy as np
import pytest
from scipy.linalg import expm

from oddwalk import ConfigurationError
from oddwalk.graph_core import build_odd_graph, closed_form_intersection, stratify
from oddwalk.jacobi import jacobi_from_intersection
from oddwalk.spectral import gauss_measure
from oddwalk.walk import WalkOracle, amplitude, amplitude_series, direct_oracle, vertex_probability

S73 = np.sqrt(73)
LO = 0.5 * np.sqrt(26 - 2 * S73)
HI = 0.5 * np.sqrt(26 + 2 * S73)


def printed_k4(t):
    """The four k=4 amplitudes exactly as typeset (q3 included verbatim)."""
    t = np.asarray(t, float)
    q0 = S73 / 146 * ((5 + S73) * np.cos(LO * t) + (-5 + S73) * np.cos(HI * t))
    q1 = -1j * S73 / 584 * (
        (5 + S73) * np.sqrt(26 - 2 * S73) * np.sin(LO * t)
        + (-5 + S73) * np.sqrt(26 + 2 * S73) * np.sin(HI * t)
    )
    q2 = 2 * np.sqrt(3) / S73 * (-np.cos(LO * t) + np.cos(HI * t))
    q3 = -1j * S73 / (584 * np.sqrt(2)) * (
        -(13 + S73) * np.sqrt(26 - 2 * S73) * np.sin(LO * t)
        + (-13 + S73) * np.sqrt(26 + 2 * S73) * np.sin(HI * t)
    )
    return np.array([q0, q1, q2, q3])


def corrected_q3(t):
    t = np.asarray(t, float)
    return -1j * S73 / (584 * np.sqrt(2)) * (
        -(13 + S73) * np.sqrt(26 - 2 * S73) * np.sin(LO * t)
        + (13 - S73) * np.sqrt(26 + 2 * S73) * np.sin(HI * t)
    )


def setup(k, mode):
    j = jacobi_from_intersection(closed_form_intersection(k), mode)
    return gauss_measure(j), j


def test_amplitude_at_zero():
    mu, j = setup(4, "exact")
    assert amplitude(mu, j, 0, 0.0) == pytest.approx(1, abs=1e-14)
    for m in (1, 2, 3):
        assert abs(amplitude(mu, j, m, 0.0)) < 1e-14


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_k4_q0_printed(t):
    mu, j = setup(4, "paper")
    assert abs(amplitude(mu, j, 0, t) - printed_k4(t)[0]) < 1e-12


def test_k4_q2_printed():
    mu, j = setup(4, "paper")
    assert abs(amplitude(mu, j, 2, 1.0) - printed_k4(1.0)[2]) < 1e-12


def test_k4_q3_matches_sign_corrected_form():
    mu, j = setup(4, "paper")
    t = np.linspace(0, 10, 101)
    assert np.max(np.abs(amplitude(mu, j, 3, t) - corrected_q3(t))) < 1e-12


def test_k4_printed_q3_breaks_conservation():
    t = np.linspace(0.1, 10, 100)
    q = printed_k4(t)
    assert np.max(np.abs(np.sum(np.abs(q) ** 2, axis=0) - 1)) > 0.1
    q[3] = corrected_q3(t)
    assert np.max(np.abs(np.sum(np.abs(q) ** 2, axis=0) - 1)) < 1e-12


def test_amplitude_range_checks():
    mu, j = setup(4, "exact")
    with pytest.raises(ConfigurationError):
        amplitude(mu, j, 4, 1.0)
    with pytest.raises(ConfigurationError):
        amplitude(mu, j, -1, 1.0)


def test_series_at_zero():
    mu, j = setup(5, "exact")
    s = amplitude_series(mu, j, [0.0])
    assert np.allclose(s.q[:, 0], [1, 0, 0, 0, 0], atol=1e-14)
    assert s.strata_sizes == (1, 5, 20, 40, 60)


@pytest.mark.parametrize("mode", ["paper", "exact"])
@pytest.mark.parametrize("k", [2, 3, 4, 5, 7, 12, 30])
def test_conservation(k, mode):
    mu, j = setup(k, mode)
    s = amplitude_series(mu, j, np.linspace(0, 10, 101))
    assert s.conserved
    assert np.max(s.conservation_error) < 1e-10


def test_conservation_breach_is_flagged():
    mu, j = setup(4, "exact")
    s = amplitude_series(mu, j, np.linspace(0, 1, 5), tol=-1.0)
    assert not s.conserved and s.breaches.size == 5


def test_series_validates_grid():
    mu, j = setup(4, "exact")
    with pytest.raises(ConfigurationError):
        amplitude_series(mu, j, [1.0, 0.0])
    with pytest.raises(ConfigurationError):
        amplitude_series(mu, j, [0.0, np.inf])
    with pytest.raises(ConfigurationError):
        amplitude_series(mu, j, [0.0], m_max=4)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_spectral_equals_oracle(k):
    g = build_odd_graph(k)
    s = stratify(g)
    mu, j = setup(k, "exact")
    t = np.linspace(0, 5, 51)
    oracle = direct_oracle(g, s, t)
    series = amplitude_series(mu, j, t)
    assert np.max(np.abs(series.q.T - oracle)) < 1e-9


def test_oracle_agrees_with_pade_expm():
    g = build_odd_graph(4)
    s = stratify(g)
    oracle = WalkOracle(g, s)
    a = g.adjacency_dense()
    for t in (0.3, 1.7, 4.2):
        ref = expm(-1j * t * a)[:, 0]
        assert np.max(np.abs(oracle.state(t) - ref)) < 1e-12


def test_oracle_unitarity_and_uniform_strata():
    g = build_odd_graph(5)
    s = stratify(g)
    oracle = WalkOracle(g, s)
    for t in np.linspace(0, 5, 11):
        psi = oracle.state(t)
        assert abs(np.linalg.norm(psi) - 1) < 1e-12
        for members in s.strata:
            vals = psi[members]
            assert np.max(np.abs(vals - vals[0])) < 1e-12


def test_oracle_at_zero():
    g = build_odd_graph(3)
    assert np.allclose(direct_oracle(g, stratify(g), 0.0), [1, 0, 0], atol=1e-14)


def test_time_reversal():
    mu, j = setup(6, "exact")
    t = np.linspace(0.1, 5, 20)
    for m in range(6):
        assert np.allclose(amplitude(mu, j, m, -t), np.conj(amplitude(mu, j, m, t)), atol=1e-13)


def test_paper_mode_departs_from_oracle():
    g = build_odd_graph(4)
    s = stratify(g)
    mu, j = setup(4, "paper")
    gap = np.max(np.abs(direct_oracle(g, s, 1.0) - amplitude_series(mu, j, [1.0]).q[:, 0]))
    assert gap > 1e-3


def test_vertex_probability():
    g = build_odd_graph(3)
    s = stratify(g)
    mu, j = setup(3, "exact")
    series = amplitude_series(mu, j, [0.0, 1.0])
    assert vertex_probability(series, 0, 0) == pytest.approx(1, abs=1e-14)
    assert vertex_probability(series, 2, 0) == pytest.approx(0, abs=1e-28)
    psi = WalkOracle(g, s).state(1.0)
    p = vertex_probability(series, 2, 1)
    assert p == pytest.approx(abs(series.q[2, 1]) ** 2 / 6)
    for v in s.strata[2]:
        assert abs(abs(psi[v]) ** 2 - p) < 1e-9
    total = sum(vertex_probability(series, m, 1) * s.sizes[m] for m in range(3))
    assert total == pytest.approx(1, abs=1e-12)
