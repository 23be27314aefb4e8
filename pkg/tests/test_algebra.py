import cmath
import math

import numpy as np
import pytest

from quditrb.algebra import (
    PauliOperator,
    canonical_phase,
    cz_matrix,
    embed_cz,
    embed_single,
    fourier_matrix,
    gate,
    is_prime,
    pauli_inverse,
    pauli_membership,
    pauli_power,
    pauli_product,
    pauli_to_dense,
    phase_distance,
    phase_gate_matrix,
    phase_order,
    phase_unit,
    root_of_unity,
    symmetric_block,
    t_gate_matrix,
    weyl_operators,
    x_matrix,
    z_matrix,
)

DIMS = (2, 3, 5, 7)


def test_is_prime():
    primes = {2, 3, 5, 7, 11, 13}
    for k in range(2, 14):
        assert is_prime(k) == (k in primes)
    assert not is_prime(1)


@pytest.mark.parametrize("d", DIMS)
def test_commutation_relation(d):
    w = root_of_unity(d)
    X, Z = x_matrix(d), z_matrix(d)
    assert np.abs(Z @ X - w * X @ Z).max() < 1e-12


@pytest.mark.parametrize("d", DIMS)
def test_gate_unitarity_and_orders(d):
    for name in ("X", "Z", "F", "P", "T", "CZ"):
        u = gate(name, d)
        assert np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() < 1e-12
    # X and Z have order d, F has order 4
    assert np.abs(np.linalg.matrix_power(x_matrix(d), d) - np.eye(d)).max() < 1e-12
    assert np.abs(np.linalg.matrix_power(z_matrix(d), d) - np.eye(d)).max() < 1e-12
    f4 = np.linalg.matrix_power(fourier_matrix(d), 4)
    assert phase_distance(f4, np.eye(d)) < 1e-12


@pytest.mark.parametrize("d", DIMS)
def test_fourier_conjugation(d):
    F, X, Z = fourier_matrix(d), x_matrix(d), z_matrix(d)
    assert np.abs(F @ X @ F.conj().T - Z).max() < 1e-12
    x_inv = np.linalg.matrix_power(X, d - 1)
    assert np.abs(F @ Z @ F.conj().T - x_inv).max() < 1e-12


@pytest.mark.parametrize("d", DIMS)
def test_phase_gate_conjugation(d):
    P, X, Z = phase_gate_matrix(d), x_matrix(d), z_matrix(d)
    wt = root_of_unity(d, tilde=True)
    assert np.abs(P @ X @ P.conj().T - wt * X @ Z).max() < 1e-12
    assert np.abs(P @ Z @ P.conj().T - Z).max() < 1e-12


def test_phase_gate_qubit_is_s():
    assert np.abs(phase_gate_matrix(2) - np.diag([1, 1j])).max() < 1e-12


def test_t_gate_diagonal_and_nonclifford():
    d = 3
    T = t_gate_matrix(d)
    # T|s> = omega^(s^3/d^2)|s> with omega = exp(2 pi i/d), i.e. a d^3-rd root
    expect = np.diag([np.exp(2j * np.pi * s**3 / d**3) for s in range(d)])
    assert np.abs(T - expect).max() < 1e-12
    # conjugating X by T leaves the Pauli group
    conj = T @ x_matrix(d) @ T.conj().T
    assert pauli_membership(conj, d, 1) is None


def test_cz_symmetric_and_diagonal():
    for d in (2, 3, 5):
        cz = cz_matrix(d)
        w = root_of_unity(d)
        assert np.abs(cz - np.diag([w ** (s * t % d) for s in range(d) for t in range(d)])).max() < 1e-12


def test_phase_order_and_unit():
    assert phase_order(3) == 3 and phase_unit(3) == 1
    assert phase_order(2) == 4 and phase_unit(2) == 2
    assert phase_order(5) == 5 and phase_unit(5) == 1
    # omega-tilde squares to omega for even d
    assert abs(root_of_unity(2, tilde=True) ** 2 - root_of_unity(2)) < 1e-15


def test_embed_single_and_cz():
    d, n = 3, 3
    u = fourier_matrix(d)
    e1 = embed_single(u, d, n, 1)
    assert np.abs(e1 - np.kron(np.kron(np.eye(d), u), np.eye(d))).max() < 1e-12
    full = embed_cz(d, n, 0, 2)
    w = root_of_unity(d)
    # diagonal entry for |s0 s1 s2> is omega^(s0 s2)
    diag = np.diagonal(full)
    for s0 in range(d):
        for s1 in range(d):
            for s2 in range(d):
                idx = s0 * d * d + s1 * d + s2
                assert abs(diag[idx] - w ** (s0 * s2 % d)) < 1e-12
    assert np.abs(embed_cz(d, n, 2, 0) - full).max() < 1e-12


# ---------------------------------------------------------------------------
# Pauli word calculus
# ---------------------------------------------------------------------------


def test_pauli_word_dense_homomorphism():
    rng = np.random.default_rng(101)
    for d, n in ((2, 2), (3, 1), (3, 2), (5, 1)):
        dphi = phase_order(d)
        for _ in range(250):
            ps = [
                PauliOperator(
                    d,
                    n,
                    tuple(rng.integers(0, d, n)),
                    tuple(rng.integers(0, d, n)),
                    int(rng.integers(0, dphi)),
                )
                for _ in range(3)
            ]
            p1, p2, p3 = ps
            left = pauli_product(pauli_product(p1, p2), p3)
            right = pauli_product(p1, pauli_product(p2, p3))
            assert left == right
            dense = pauli_to_dense(p1) @ pauli_to_dense(p2)
            assert np.abs(pauli_to_dense(pauli_product(p1, p2)) - dense).max() < 1e-10


def test_pauli_inverse_and_power():
    rng = np.random.default_rng(55)
    for d, n in ((2, 1), (2, 2), (3, 1), (5, 1)):
        dphi = phase_order(d)
        for _ in range(60):
            p = PauliOperator(
                d,
                n,
                tuple(rng.integers(0, d, n)),
                tuple(rng.integers(0, d, n)),
                int(rng.integers(0, dphi)),
            )
            assert pauli_product(p, pauli_inverse(p)).is_identity_word()
            assert pauli_product(pauli_inverse(p), p).is_identity_word()
            k = int(rng.integers(0, 2 * d))
            dense_pow = np.linalg.matrix_power(pauli_to_dense(p), k)
            assert np.abs(pauli_to_dense(pauli_power(p, k)) - dense_pow).max() < 1e-9


def test_pauli_example_qubit_xz():
    # d=2 word with a=b=1, phi=0 is exactly X Z
    p = PauliOperator(2, 1, (1,), (1,), 0)
    assert np.abs(pauli_to_dense(p) - x_matrix(2) @ z_matrix(2)).max() < 1e-15


def test_pauli_vector_round_trip():
    p = PauliOperator(3, 2, (1, 2), (0, 1), 2)
    assert PauliOperator.from_vector(3, p.vector, p.phi) == p


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def test_membership_recovers_all_single_qudit_words():
    for d in (2, 3, 5):
        for a in range(d):
            for b in range(d):
                for phi in range(phase_order(d)):
                    p = PauliOperator(d, 1, (a,), (b,), phi)
                    m = pauli_membership(pauli_to_dense(p), d, 1)
                    assert m is not None
                    assert m.a == (a,) and m.b == (b,)
                    want = cmath.phase(root_of_unity(d, tilde=True) ** phi)
                    assert abs(cmath.exp(1j * m.phase) - cmath.exp(1j * want)) < 1e-9


def test_membership_examples():
    m = pauli_membership(x_matrix(3), 3, 1)
    assert m is not None and m.a == (1,) and m.b == (0,) and abs(m.phase) < 1e-12
    m = pauli_membership(np.exp(1j * np.pi / 7) * z_matrix(3), 3, 1)
    assert m is not None and m.a == (0,) and m.b == (1,)
    assert abs(m.phase - np.pi / 7) < 1e-12


def test_membership_rejects_non_paulis():
    assert pauli_membership(fourier_matrix(3), 3, 1) is None
    assert pauli_membership(np.eye(3) * 0.5, 3, 1) is None
    near = pauli_to_dense(PauliOperator(3, 1, (1,), (1,), 0))
    bumped = near.copy()
    bumped[0, 0] += 1e-6
    assert pauli_membership(bumped, 3, 1) is None
    # but a bump below tolerance is accepted
    bumped = near.copy()
    bumped[0, 0] += 1e-12
    assert pauli_membership(bumped, 3, 1) is not None


def test_membership_two_sites():
    u = np.kron(x_matrix(3), z_matrix(3))
    m = pauli_membership(u, 3, 2)
    assert m is not None and m.a == (1, 0) and m.b == (0, 1)


def test_membership_shape_error():
    with pytest.raises(ValueError):
        pauli_membership(np.eye(4), 3, 1)


def test_weyl_operators():
    for d in (2, 3, 5):
        ws = weyl_operators(d)
        assert len(ws) == d * d
        # orthogonal unitary basis: tr(W_i^dag W_j) = d delta_ij
        for i, wi in enumerate(ws):
            for j, wj in enumerate(ws):
                ov = np.trace(wi.conj().T @ wj)
                assert abs(ov - (d if i == j else 0)) < 1e-9


# ---------------------------------------------------------------------------
# Phase helpers and the symmetric-subspace block
# ---------------------------------------------------------------------------


def test_canonical_phase_fixes_first_entry():
    rng = np.random.default_rng(8)
    for _ in range(20):
        z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        u, _ = np.linalg.qr(z)
        c = canonical_phase(u)
        flat = c.reshape(-1)
        piv = flat[np.flatnonzero(np.abs(flat) > 1e-8)[0]]
        assert abs(piv.imag) < 1e-12 and piv.real > 0
        assert phase_distance(c, u) < 1e-12


def test_phase_distance_zero_for_phased_copies():
    rng = np.random.default_rng(9)
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    u, _ = np.linalg.qr(z)
    assert phase_distance(u, np.exp(0.321j) * u) < 1e-12
    assert phase_distance(u, np.exp(0.321j) * u + 1e-3) > 1e-4


def test_symmetric_block_schur_weyl():
    rng = np.random.default_rng(77)
    for _ in range(100):
        z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        u, r = np.linalg.qr(z)
        u = u * (np.diagonal(r) / np.abs(np.diagonal(r)))
        blk = symmetric_block(np.kron(u, u))
        assert blk.offdiag_norm < 1e-12
        # the symmetric block is unitary on its own
        assert np.abs(blk.sym @ blk.sym.conj().T - np.eye(3)).max() < 1e-10


def test_symmetric_block_hadamard_counterexample():
    h = fourier_matrix(2)
    blk = symmetric_block(np.kron(h, h))
    r = 0.5 * np.array(
        [[1, math.sqrt(2), 1], [math.sqrt(2), 0, -math.sqrt(2)], [1, -math.sqrt(2), 1]]
    )
    assert np.abs(blk.sym - r).max() < 1e-12
    assert abs(blk.antisym + 1.0) < 1e-12
    assert blk.offdiag_norm < 1e-12
    # the symmetric block is not a qutrit Pauli under conjugation
    conj = r @ x_matrix(3) @ r.conj().T
    assert pauli_membership(conj, 3, 1) is None
    assert pauli_membership(r @ x_matrix(3) @ r, 3, 1) is None


def test_symmetric_block_shape_error():
    with pytest.raises(ValueError):
        symmetric_block(np.eye(3))
