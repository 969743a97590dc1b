import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csdsynth.blockdiag import BlockDiagUnitary, decompose_bj
from csdsynth.circuit import Circuit, Cnot, GateCounts, GlobalPhase, Rot, count_gates, reconstruct
from csdsynth.exceptions import NotPowerOfTwoError, NotUnitaryError
from csdsynth.graycode import binary_reflected_gray, gamma
from csdsynth.matcore import frobenius_distance, haar_random_unitary
from csdsynth.synth import (
    AFactor,
    apply_factor,
    build_plan,
    cnot_lower_bound,
    csd_factor_chain,
    expected_cnot_count,
    expected_one_qubit_count,
    factor_product,
    synthesize,
    synthesize_diagonal,
)
from csdsynth.ucr import ucr_matrix
from oracles import circuit_dense, haar


def dense(factor, n):
    return apply_factor(factor, np.eye(1 << n), n)


def test_closed_forms():
    assert [expected_cnot_count(n) for n in range(2, 7)] == [8, 48, 224, 960, 3968]
    assert [expected_one_qubit_count(n) for n in range(1, 5)] == [4, 16, 64, 256]
    assert [cnot_lower_bound(n) for n in (2, 3, 4)] == [3, 14, 61]


def test_a_factor_is_ry_of_double_angle(rng):
    th = rng.uniform(0, np.pi / 2, size=4)
    a = AFactor(1, 2, th)
    m = dense(a, 3)
    np.testing.assert_allclose(m, ucr_matrix(a.ucr(3), 3).matrix, atol=1e-15)
    # direct cosine-sine structure on qubit 2: rows/cols differing in bit weight 2
    c, s = np.cos(th[0]), np.sin(th[0])
    np.testing.assert_allclose(m[np.ix_([0, 2], [0, 2])], [[c, s], [-s, c]], atol=1e-15)


def test_factor_chain_layout_n3():
    b, a = csd_factor_chain(haar_random_unitary(3, seed=4))
    assert [f.level for f in a] == [2, 1, 2]
    assert len(b) == 4 and all(isinstance(f, BlockDiagUnitary) for f in b)
    assert all(f.thetas.shape == (4,) for f in a)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_raw_chain_reconstructs(n, rng):
    u = haar(1 << n, rng)
    b, a = csd_factor_chain(u)
    chain = [f for pair in zip(b, a + [None]) for f in pair if f is not None]
    assert np.linalg.norm(factor_product(chain, n) - u) <= 1e-10
    assert [f.level for f in a] == [gamma(j, n) for j in range(1, 1 << (n - 1))]


def test_plan_identity():
    plan = build_plan(np.eye(8))
    for a in plan.a_factors:
        np.testing.assert_allclose(a.thetas, 0, atol=1e-15)
    for b in plan.b_factors:
        np.testing.assert_allclose(b.blocks, np.broadcast_to(np.eye(2), (4, 2, 2)), atol=1e-15)


@pytest.mark.parametrize("n", range(2, 7))
def test_plan_product(n, rng):
    u = haar(1 << n, rng)
    plan = build_plan(u)
    assert len(plan.b_factors) == 1 << (n - 1)
    assert len(plan.a_factors) == (1 << (n - 1)) - 1
    assert np.linalg.norm(factor_product(plan.factors(), n) - u) <= 1e-10


def test_absorption_in_isolation(rng):
    # insert P P^H after every B_j in the raw chain, then regroup
    n = 3
    u = haar(8, rng)
    raw_b, a = csd_factor_chain(u)
    chain = []
    carry = None
    for j, af in enumerate(a):
        b = raw_b[j] if carry is None else raw_b[j].left_phase(-carry)
        _, _, _, p = decompose_bj(b, af.level)
        pm = p.matrix()
        a_m = dense(af, n)
        # the pattern commutes with the neighbouring cosine-sine factor
        assert np.max(np.abs(pm @ a_m - a_m @ pm)) <= 1e-12
        chain += [dense(raw_b[j], n), pm, pm.conj().T, a_m]
        carry = p.expand()
    chain.append(dense(raw_b[-1], n))
    prod = np.eye(8)
    for m in chain:
        prod = prod @ m
    assert np.linalg.norm(prod - u) <= 1e-12
    # regrouped: (B_j P_j) A_j (P_j^H B_{j+1}) ... equals the absorbed plan
    plan = build_plan(u)
    prod = np.eye(8)
    for f in plan.factors():
        prod = prod @ dense(f, n)
    assert np.linalg.norm(prod - u) <= 1e-10


@pytest.mark.parametrize("n", range(1, 7))
def test_counts_and_reconstruction(n):
    u = haar_random_unitary(n, seed=100 + n)
    c, report = synthesize(u)
    expected = GateCounts(expected_cnot_count(n), 4 ** n)
    assert report.counts == expected == count_gates(c)
    assert report.reconstruction_error <= 1e-10
    assert sum(isinstance(g, GlobalPhase) for g in c.gates) == 1


def test_n2_against_dense_oracle():
    u = haar_random_unitary(2, seed=3)
    c, _ = synthesize(u)
    np.testing.assert_allclose(circuit_dense(c), u.matrix, atol=1e-13)


def test_frozen_n2_circuit_prefix():
    c, _ = synthesize(haar_random_unitary(2, seed=3))
    expected = [
        GlobalPhase(0.59114378705740678),
        Rot("Z", 1, 0.0034132958669871316),
        Rot("Z", 2, -2.0126954847399268),
        Cnot(1, 2),
        Rot("Z", 2, 1.855890262519944),
        Rot("Y", 2, -0.99891083447769635),
        Cnot(1, 2),
    ]
    for got, want in zip(c.gates, expected):
        assert type(got) is type(want)
        if isinstance(want, Cnot):
            assert got == want
        else:
            assert got.angle == pytest.approx(want.angle, abs=1e-9)


def test_section_accounting_n3():
    _, report = synthesize(haar_random_unitary(3, seed=9))
    assert report.sections == [GateCounts(12, 16)] * 4


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_section_accounting(n):
    _, report = synthesize(haar_random_unitary(n, seed=n))
    per = GateCounts((1 << (n + 1)) - 4, 1 << (n + 1))
    assert report.sections == [per] * (1 << (n - 1))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_no_mirror(n):
    u = haar_random_unitary(n, seed=50 + n)
    c, report = synthesize(u, mirror=False)
    assert report.reconstruction_error <= 1e-10
    # every k = n-1 rotation keeps its 2^(n-1) CNOTs
    assert report.counts.cnot == 4 ** n - 2
    assert report.counts.cnot >= expected_cnot_count(n) + (1 << (n + 1)) - 2
    assert report.counts.one_qubit == 4 ** n


def test_identity_prune():
    c, report = synthesize(np.eye(8), prune_zero=True)
    assert report.reconstruction_error < 1e-10
    assert all(isinstance(g, Cnot) for g in c.gates)
    c, _ = synthesize(np.eye(8))
    angles = [g.angle for g in c.gates if not isinstance(g, Cnot)]
    assert max(abs(a) for a in angles) < 1e-12


def test_rotated_gray_code(rng):
    u = haar(16, rng)
    c, report = synthesize(u, gray=lambda k: binary_reflected_gray(k).rotated(3))
    assert report.counts == GateCounts(224, 256)
    assert report.reconstruction_error <= 1e-10
    with pytest.raises(TypeError):
        synthesize(u, gray=binary_reflected_gray(2))


def test_n1():
    u = haar_random_unitary(1, seed=1)
    c, report = synthesize(u)
    assert report.counts == GateCounts(0, 4)
    assert report.reconstruction_error <= 1e-14


def test_verify_off():
    _, report = synthesize(haar_random_unitary(2, seed=1), verify=False)
    assert np.isnan(report.reconstruction_error)
    assert "frobenius_error=skipped" in report.format()


def test_report_format_keys():
    _, report = synthesize(haar_random_unitary(2, seed=1))
    keys = [line.split("=")[0] for line in report.format().splitlines()]
    assert keys == ["cnot", "one_qubit", "expected_cnot", "expected_one_qubit", "lower_bound", "frobenius_error", "elapsed_ms"]


def test_near_unitary_input_is_projected(rng):
    u = haar(8, rng)
    noisy = u + 1e-9 * rng.normal(size=(8, 8))
    with pytest.raises(NotUnitaryError):
        synthesize(noisy)
    c, report = synthesize(noisy, tol=1e-7)
    assert report.counts == GateCounts(48, 64)
    assert report.reconstruction_error == pytest.approx(frobenius_distance(reconstruct(c), noisy))
    assert report.reconstruction_error < 1e-7


def test_input_errors():
    with pytest.raises(NotUnitaryError):
        synthesize(np.ones((4, 4)))
    with pytest.raises(NotPowerOfTwoError):
        synthesize(np.eye(6))


@settings(max_examples=25)
@given(st.integers(2, 4), st.integers(0, 2 ** 32 - 1))
def test_synthesis_property(n, seed):
    u = haar(1 << n, np.random.default_rng(seed))
    c, report = synthesize(u)
    assert report.counts == GateCounts(expected_cnot_count(n), 4 ** n)
    assert frobenius_distance(reconstruct(c), u) <= 1e-10


def test_diagonal_examples():
    c, report = synthesize_diagonal([0.4, -0.2])
    assert report.counts == GateCounts(0, 2)
    np.testing.assert_allclose(reconstruct(c).matrix, np.diag(np.exp(1j * np.array([0.4, -0.2]))), atol=1e-15)
    c, report = synthesize_diagonal(np.zeros(8))
    np.testing.assert_allclose(reconstruct(c).matrix, np.eye(8), atol=1e-15)
    with pytest.raises(NotPowerOfTwoError):
        synthesize_diagonal(np.zeros(6))
    with pytest.raises(ValueError):
        synthesize_diagonal([np.nan, 0.0])


@pytest.mark.parametrize("n", range(1, 9))
def test_diagonal_counts(n, rng):
    phases = rng.uniform(-np.pi, np.pi, 1 << n)
    c, report = synthesize_diagonal(phases)
    assert report.counts == GateCounts((1 << n) - 2, 1 << n)
    assert report.reconstruction_error <= 1e-10
