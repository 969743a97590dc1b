import numpy as np
import pytest
from hypothesis import given, strategies as st

from csdsynth.exceptions import NotGrayError, NotPowerOfTwoError
from csdsynth.graycode import (
    GrayCode,
    binary_reflected_gray,
    fwht,
    gamma,
    m_matrix,
    m_matrix_entry,
    solve_rotation_angles,
    transition_positions,
    zeta,
)
from oracles import dense_m


def test_brgc_small():
    assert binary_reflected_gray(1).words == (0, 1)
    assert binary_reflected_gray(3).bitstrings() == ["000", "001", "011", "010", "110", "111", "101", "100"]
    assert binary_reflected_gray(0).words == (0,)


def test_brgc_cyclic_closure():
    words = binary_reflected_gray(2).words
    assert bin(words[-1] ^ words[0]).count("1") == 1


@pytest.mark.parametrize("k", range(0, 9))
def test_brgc_is_cyclic_gray(k):
    code = binary_reflected_gray(k)
    assert sorted(code.words) == list(range(1 << k))
    for a, b in zip(code.words, code.words[1:] + code.words[:1]):
        assert k == 0 or bin(a ^ b).count("1") == 1


def test_transition_positions_examples():
    assert transition_positions(binary_reflected_gray(3)) == [3, 2, 3, 1, 3, 2, 3, 1]
    assert transition_positions(binary_reflected_gray(1)) == [1, 1]
    assert transition_positions(binary_reflected_gray(0)) == []


@given(st.integers(1, 10), st.integers(0, 2000))
def test_transition_positions_even_counts(k, shift):
    code = binary_reflected_gray(k).rotated(shift)
    pos = transition_positions(code)
    assert len(pos) == 1 << k
    for p in range(1, k + 1):
        assert pos.count(p) % 2 == 0


def test_transition_positions_rejects_non_gray():
    with pytest.raises(NotGrayError):
        transition_positions(GrayCode(2, (0, 3, 1, 2)))
    with pytest.raises(NotGrayError):
        GrayCode(2, (0, 1, 1, 2))


def test_m_matrix_examples():
    assert all(m_matrix_entry(3, 1, j) == 1 for j in range(1, 9))
    np.testing.assert_array_equal(m_matrix(1), [[1, 1], [1, -1]])
    assert m_matrix_entry(2, 3, 3) == -1
    with pytest.raises(IndexError):
        m_matrix_entry(2, 5, 1)


def test_m_matrix_frozen_k2():
    # BRGC words 00, 01, 11, 10
    np.testing.assert_array_equal(
        m_matrix(2), [[1, 1, 1, 1], [1, -1, -1, 1], [1, 1, -1, -1], [1, -1, 1, -1]]
    )


@pytest.mark.parametrize("k", range(0, 7))
def test_m_matrix_matches_bitlist_oracle_and_is_orthogonal(k):
    code = binary_reflected_gray(k)
    m = m_matrix(k)
    np.testing.assert_array_equal(m, dense_m(k, code.words))
    # entries are +-1, so the product is an exact integer matrix
    np.testing.assert_array_equal(m @ m.T, (1 << k) * np.eye(1 << k))


def test_fwht_matches_hadamard(rng):
    for k in range(0, 7):
        n = 1 << k
        h = np.array([[(-1) ** bin(i & j).count("1") for j in range(n)] for i in range(n)])
        x = rng.normal(size=n)
        np.testing.assert_allclose(fwht(x), h @ x, atol=1e-12)
    with pytest.raises(NotPowerOfTwoError):
        fwht(np.ones(3))


def test_solve_examples():
    np.testing.assert_allclose(solve_rotation_angles(np.full(8, 0.3)), [0.3] + [0.0] * 7, atol=1e-16)
    np.testing.assert_allclose(solve_rotation_angles([0.5, 0.1]), [0.3, 0.2], atol=1e-16)


@pytest.mark.parametrize("k", range(1, 7))
def test_solve_is_exact_inverse(k, rng):
    m = m_matrix(k)
    alphas = rng.uniform(-np.pi, np.pi, size=(200, 1 << k))
    for a in alphas:
        theta = solve_rotation_angles(a)
        assert np.max(np.abs(m @ theta - a)) <= 1e-12
        np.testing.assert_allclose(theta, m.T @ a / (1 << k), atol=1e-13)


@given(st.integers(1, 5), st.integers(0, 100), st.integers(0, 2 ** 32 - 1))
def test_solve_rotated_code(k, shift, seed):
    code = binary_reflected_gray(k).rotated(shift)
    a = np.random.default_rng(seed).normal(size=1 << k)
    theta = solve_rotation_angles(a, code)
    np.testing.assert_allclose(m_matrix(k, code) @ theta, a, atol=1e-12)


def test_zeta_examples():
    assert (zeta(2, 1, 3), zeta(1, 1, 3), zeta(2, 2, 3)) == (1, 2, 3)
    assert zeta(1, 1, 4) == 4
    with pytest.raises(ValueError):
        zeta(3, 1, 3)


def test_gamma_examples():
    assert [gamma(j, 3) for j in (1, 2, 3)] == [2, 1, 2]
    assert gamma(4, 4) == 1
    with pytest.raises(ValueError):
        gamma(4, 3)


def _unrolled_levels(n):
    # A-factor levels in product order from the recursion itself
    def rec(i):
        if i == n:
            return []
        inner = rec(i + 1)
        return inner + [i] + inner

    return rec(1)


@pytest.mark.parametrize("n", range(2, 11))
def test_zeta_gamma_bijection(n):
    seen = {}
    for i in range(1, n):
        for j in range(1, (1 << (i - 1)) + 1):
            seen[zeta(i, j, n)] = i
    assert sorted(seen) == list(range(1, 1 << (n - 1)))
    assert all(gamma(pos, n) == lvl for pos, lvl in seen.items())
    assert [gamma(j, n) for j in range(1, 1 << (n - 1))] == _unrolled_levels(n)
