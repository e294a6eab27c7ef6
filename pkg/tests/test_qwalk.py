import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.linalg import expm

from weldlab.qwalk import (NumericalError, chebyshev_evolve, column_hamiltonian, cross_check, evolve,
                           exit_probability, sweep, walk_cost, welded_tree_adjacency)

# p*(k) on the 0.05 grid up to 50k; reproduced with scipy.linalg.expm stepping
P_STAR = {2: 0.9859573253, 3: 0.9719992197, 4: 0.9623326899, 5: 0.7840231773, 6: 0.7643854203,
          7: 0.6630211304, 8: 0.5893247358, 9: 0.7619658967, 10: 0.7703070389, 11: 0.6893623905,
          12: 0.5037060572}
WALK_COST = {2: 14, 3: 18, 4: 24, 5: 30, 6: 36, 7: 40, 8: 46, 9: 52, 10: 58, 11: 62, 12: 68}


@pytest.mark.parametrize("k", sorted(P_STAR))
def test_p_star_frozen(k):
    s = sweep(k)
    assert s.p_star == pytest.approx(P_STAR[k], abs=1e-9)
    assert s.p_star >= 1 / (2 * k)
    assert walk_cost(k) == WALK_COST[k]


def test_column_walk_against_expm():
    cw = column_hamiltonian(4)
    psi = np.zeros(10, complex)
    psi[0] = 1
    for t in (0.3, 2.0, 7.5):
        assert np.allclose(cw.evolve(t), expm(-1j * cw.H * t) @ psi, atol=1e-12)


def test_sweep_probability_bounds():
    s = sweep(5)
    assert s.p_exit[0] == pytest.approx(0, abs=1e-15) and s.p_entrance[0] == pytest.approx(1)
    assert np.all((s.p_exit >= 0) & (s.p_exit + s.p_entrance <= 1 + 1e-12))
    assert s.p_half >= s.p_star / 2
    assert exit_probability(5, s.t_argmax) == pytest.approx(s.p_star)


def test_full_graph_shape():
    A, column = welded_tree_adjacency(3)
    assert A.shape == (2 * (2 ** 4 - 1),) * 2
    assert np.bincount(column).tolist() == [1, 2, 4, 8, 8, 4, 2, 1]
    deg = np.asarray(A.sum(axis=1)).ravel()
    assert set(deg[column == 0]) == {2} and set(deg[column == 3]) == {3}


@pytest.mark.parametrize("k", [2, 4, 6])
def test_cross_check(k):
    assert cross_check(k, np.linspace(0, 4 * k, 25), np.random.default_rng(k)) <= 1e-9


def test_chebyshev_matches_dense():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(12, 12))
    H = (M + M.T) / 2
    psi = rng.normal(size=12) + 0j
    psi /= np.linalg.norm(psi)
    ref = expm(-1j * H * 3.0) @ psi
    assert np.allclose(chebyshev_evolve(sp.csr_matrix(H), 3.0, psi), ref, atol=1e-11)
    assert np.allclose(evolve(H, 3.0, psi), ref, atol=1e-11)


def test_evolve_input_checks():
    H = np.array([[0, 1], [0, 0]], float)
    with pytest.raises(ValueError):
        evolve(H, 1.0, np.array([1, 0]))
    with pytest.raises(ValueError):
        evolve(np.eye(2), -1.0, np.array([1, 0]))
    with pytest.raises(ValueError):
        evolve(np.eye(2), 1.0, np.array([1, 1]))
