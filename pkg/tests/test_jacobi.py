import json
from fractions import Fraction

import numpy as np
import pytest

from oddwalk import ConfigurationError, InvariantViolation
from oddwalk.graph_core import K_MAX, build_odd_graph, closed_form_intersection, intersection_numbers, stratify
from oddwalk.jacobi import (
    JacobiSequence,
    Mode,
    jacobi_from_intersection,
    jacobi_limit,
    jacobi_paper,
    omega_closed_form,
    quantum_decompose,
    stratum_vector,
    verify_ladder_action,
)


def _setup(k):
    g = build_odd_graph(k)
    s = stratify(g)
    return g, s, intersection_numbers(g, s)


def test_paper_k4():
    jac = jacobi_from_intersection(closed_form_intersection(4), "paper")
    assert jac.omega == (4, 3, 6)
    assert jac.alpha == (0, 0, 0, 0)
    assert jac.n_levels == 4
    assert jac == jacobi_paper(4)


def test_exact_k4_and_k3():
    jac = jacobi_from_intersection(closed_form_intersection(4), "exact")
    assert jac.omega == (4, 3, 6) and jac.alpha == (0, 0, 0, 2)
    jac = jacobi_from_intersection(closed_form_intersection(3), "exact")
    assert jac.omega == (3, 2) and jac.alpha == (0, 0, 2)


def test_values_are_exact_rationals():
    jac = jacobi_from_intersection(closed_form_intersection(6), "exact")
    assert all(isinstance(w, Fraction) for w in jac.omega + jac.alpha)


def test_paper_and_exact_differ_only_in_last_alpha():
    for k in range(2, 30):
        inter = closed_form_intersection(k)
        p = jacobi_from_intersection(inter, Mode.PAPER)
        e = jacobi_from_intersection(inter, Mode.EXACT)
        assert p.omega == e.omega
        assert p.alpha[:-1] == e.alpha[:-1]
        assert e.alpha[-1] == inter.a[-1] > 0


def test_omega_formula_equals_c_times_b_up_to_10000():
    for k in range(2, 10_001):
        i = np.arange(1, k)
        b = (i + 1) // 2
        c_prev = k - i // 2  # c_{i-1} = k - ceil((i-1)/2)
        omega = np.where(i % 2 == 1, (i + 1) // 2 * (k - (i - 1) // 2), i // 2 * (k - i // 2))
        assert np.array_equal(omega, c_prev * b), k
    assert [omega_closed_form(i, 4) for i in (1, 2, 3)] == [4, 3, 6]


def test_limit_sequence():
    jac = jacobi_limit(8)
    assert jac.omega == (1, 1, 2, 2, 3, 3, 4, 4)
    assert set(jac.alpha) == {0}
    assert jac.k is None and jac.mode is Mode.LIMIT
    assert jacobi_limit(1).omega == (1,)


def test_scaled_paper_omega_tends_to_limit():
    assert abs(omega_closed_form(5, 1000) / 1000 - 3) / 3 < 0.003
    lim = jacobi_limit(12).omega_array()
    gaps = []
    for k in (10**2, 10**3, 10**4):
        scaled = np.array([omega_closed_form(i, k) / k for i in range(1, 13)])
        gaps.append(np.max(np.abs(scaled - lim)))
    assert gaps[0] > gaps[1] > gaps[2]


def test_bad_arguments():
    with pytest.raises(ConfigurationError):
        jacobi_from_intersection(closed_form_intersection(4), "limit")
    with pytest.raises(ConfigurationError):
        jacobi_from_intersection(closed_form_intersection(4), "nonsense")
    with pytest.raises(ConfigurationError):
        jacobi_limit(0)
    with pytest.raises(InvariantViolation):
        JacobiSequence(Mode.EXACT, 3, (Fraction(1),), (Fraction(0),))
    with pytest.raises(InvariantViolation):
        JacobiSequence(Mode.EXACT, 3, (Fraction(0),), (Fraction(0),) * 2)


def test_json_round_trip():
    jac = jacobi_from_intersection(closed_form_intersection(4), "exact")
    data = json.loads(jac.to_json())
    assert data == {"mode": "exact", "k": 4, "omega": [4, 3, 6], "alpha": [0, 0, 0, 2]}
    assert JacobiSequence.from_dict(data) == jac


def test_truncate():
    jac = jacobi_limit(10).truncate(4)
    assert jac.n_levels == 4 and jac.omega == (1, 1, 2)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_decomposition_reassembles_adjacency(k):
    g, s, _ = _setup(k)
    qd = quantum_decompose(g, s)
    total = (qd.a_plus + qd.a_minus + qd.a_zero).toarray()
    assert np.array_equal(total, g.adjacency_dense())
    assert (qd.a_minus != qd.a_plus.T).nnz == 0
    assert (qd.a_zero != qd.a_zero.T).nnz == 0


def test_petersen_a_zero_lives_in_last_stratum():
    g, s, _ = _setup(3)
    a0 = quantum_decompose(g, s).a_zero.tocoo()
    assert a0.nnz > 0
    assert set(s.level[a0.row]) == {2} and set(s.level[a0.col]) == {2}


def test_lowering_kills_vacuum():
    g, s, _ = _setup(4)
    qd = quantum_decompose(g, s)
    assert np.all(qd.a_minus @ stratum_vector(s, 0, g.vertex_count) == 0)


@pytest.mark.parametrize("k", range(2, K_MAX + 1))
def test_ladder_action_exact_mode(k):
    g, s, inter = _setup(k)
    jac = jacobi_from_intersection(inter, "exact")
    report = verify_ladder_action(quantum_decompose(g, s), s, jac)
    assert report.ok
    assert max(max(r) for r in report.max_deviation) <= 1e-12


def test_ladder_specific_levels():
    g, s, inter = _setup(3)
    qd = quantum_decompose(g, s)
    n = g.vertex_count
    phi0, phi1 = stratum_vector(s, 0, n), stratum_vector(s, 1, n)
    assert np.allclose(qd.a_plus @ phi0, np.sqrt(3) * phi1, atol=1e-14)
    g, s, inter = _setup(4)
    qd = quantum_decompose(g, s)
    n = g.vertex_count
    assert np.allclose(qd.a_zero @ stratum_vector(s, 2, n), 0, atol=1e-14)
    phi3 = stratum_vector(s, 3, n)
    assert np.allclose(qd.a_zero @ phi3, 2 * phi3, atol=1e-14)


def test_ladder_rejects_paper_mode_and_reports_mismatch():
    g, s, inter = _setup(4)
    qd = quantum_decompose(g, s)
    with pytest.raises(ConfigurationError):
        verify_ladder_action(qd, s, jacobi_from_intersection(inter, "paper"))
    wrong = JacobiSequence(Mode.EXACT, 4, (Fraction(4), Fraction(3), Fraction(6)), (Fraction(0),) * 4)
    report = verify_ladder_action(qd, s, wrong, strict=False)
    assert not report.ok
    assert report.max_deviation[3][2] == pytest.approx(2 / np.sqrt(18))
    with pytest.raises(InvariantViolation):
        verify_ladder_action(qd, s, wrong)
