import numpy as np
import pytest

from quditrb.algebra import PauliOperator, pauli_to_dense, phase_distance, phase_order
from quditrb.tableau import (
    CliffordTableau,
    compose,
    conjugate_pauli,
    generator_dense,
    generator_tableaux,
    identity_tableau,
    invert,
    is_symplectic,
    random_clifford,
    reduction_to_identity,
    sample_symplectic,
    symplectic_form,
    tableau_to_dense,
    validate_tableau,
)

from conftest import assert_same_action, generator_paulis

PAIRS = ((2, 1), (2, 2), (3, 1), (3, 2), (5, 1))


@pytest.mark.parametrize("d,n", PAIRS)
def test_generator_tableaux_match_dense(d, n):
    for name, t in generator_tableaux(d, n):
        validate_tableau(t)
        assert_same_action(t, generator_dense(name, d, n))


@pytest.mark.parametrize("d,n", PAIRS)
def test_compose_matches_dense_products(d, n):
    rng = np.random.default_rng(210)
    gens = generator_tableaux(d, n)
    for _ in range(15):
        n1, t1 = gens[int(rng.integers(len(gens)))]
        n2, t2 = gens[int(rng.integers(len(gens)))]
        u1, u2 = generator_dense(n1, d, n), generator_dense(n2, d, n)
        # compose(first, then) applies t1 then t2
        assert_same_action(compose(t1, t2), u2 @ u1)
        assert_same_action(invert(t1), u1.conj().T)


def test_identity_tableau_is_neutral():
    for d, n in PAIRS:
        ident = identity_tableau(d, n)
        for _, t in generator_tableaux(d, n):
            assert compose(ident, t) == t
            assert compose(t, ident) == t
        for w in generator_paulis(d, n):
            assert conjugate_pauli(ident, w) == w


def test_conjugate_pauli_respects_products():
    rng = np.random.default_rng(33)
    for d, n in ((2, 2), (3, 1), (5, 1)):
        dphi = phase_order(d)
        for _ in range(40):
            t = random_clifford(d, n, rng)
            p = PauliOperator(d, n, tuple(rng.integers(0, d, n)), tuple(rng.integers(0, d, n)), int(rng.integers(dphi)))
            q = PauliOperator(d, n, tuple(rng.integers(0, d, n)), tuple(rng.integers(0, d, n)), int(rng.integers(dphi)))
            from quditrb.algebra import pauli_product

            lhs = conjugate_pauli(t, pauli_product(p, q))
            rhs = pauli_product(conjugate_pauli(t, p), conjugate_pauli(t, q))
            assert lhs == rhs


@pytest.mark.parametrize("d,n", PAIRS)
def test_invert_round_trip(d, n):
    rng = np.random.default_rng(77)
    ident = identity_tableau(d, n)
    for _ in range(25):
        t = random_clifford(d, n, rng)
        assert invert(invert(t)) == t
        assert compose(t, invert(t)) == ident
        assert compose(invert(t), t) == ident


@pytest.mark.parametrize("d,n", PAIRS)
def test_synthesis_matches_generator_words(d, n):
    rng = np.random.default_rng(91)
    gens = generator_tableaux(d, n)
    for _ in range(8):
        t = identity_tableau(d, n)
        u = np.eye(d**n, dtype=complex)
        for _ in range(10):
            name, gt = gens[int(rng.integers(len(gens)))]
            t = compose(t, gt)
            u = generator_dense(name, d, n) @ u
        v = tableau_to_dense(t)
        assert_same_action(t, v)
        assert phase_distance(v, u) < 1e-9


@pytest.mark.parametrize("d,n", PAIRS)
def test_random_clifford_valid_and_synthesizable(d, n):
    rng = np.random.default_rng(2718)
    for _ in range(20):
        t = random_clifford(d, n, rng)
        validate_tableau(t)
        assert_same_action(t, tableau_to_dense(t))


def test_reduction_word_reaches_identity():
    from quditrb.tableau import prim_tableau

    rng = np.random.default_rng(14)
    for d, n in PAIRS:
        for _ in range(5):
            t = random_clifford(d, n, rng)
            cur = t
            for pr in reduction_to_identity(t):
                cur = compose(cur, prim_tableau(pr, d, n))
            assert cur == identity_tableau(d, n)


@pytest.mark.parametrize("d,n", PAIRS)
def test_sample_symplectic_preserves_form(d, n):
    rng = np.random.default_rng(5)
    j = symplectic_form(d, n)
    for _ in range(50):
        m = sample_symplectic(d, n, rng)
        assert is_symplectic(m, d)
        assert np.array_equal((m.T @ j @ m) % d, j % d)


def test_sampling_is_reproducible():
    a = [random_clifford(3, 1, np.random.default_rng(12)) for _ in range(10)]
    b = [random_clifford(3, 1, np.random.default_rng(12)) for _ in range(10)]
    assert a == b


def test_even_dimension_phase_parity():
    # d=2 column phases must match the parity a_j . b_j of the column
    rng = np.random.default_rng(10)
    for _ in range(40):
        t = random_clifford(2, 2, rng)
        m = t.matrix()
        for j in range(4):
            par = int(np.dot(m[:2, j], m[2:, j])) % 2
            assert t.phases[j] % 2 == par


def test_validate_rejects_bad_tableaux():
    t = identity_tableau(3, 1)
    bad_mat = ((1, 1), (1, 1))
    with pytest.raises(ValueError):
        validate_tableau(CliffordTableau(3, 1, bad_mat, (0, 0)))
    # odd phase on identity matrix violates the d=2 parity rule
    with pytest.raises(ValueError):
        validate_tableau(CliffordTableau(2, 1, ((1, 0), (0, 1)), (1, 0)))
    with pytest.raises(ValueError):
        CliffordTableau(4, 1, ((1, 0), (0, 1)), (0, 0))
    assert validate_tableau(t) is None


def test_unrealizable_phases_rejected_in_synthesis():
    bad = CliffordTableau(2, 1, ((1, 0), (0, 1)), (1, 0))
    with pytest.raises(ValueError):
        reduction_to_identity(bad)


def test_tableau_hashable_and_dedups():
    rng = np.random.default_rng(4)
    ts = [random_clifford(3, 1, rng) for _ in range(50)]
    assert len(set(ts)) == len({(t.mat, t.phases) for t in ts})
