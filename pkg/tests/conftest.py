import numpy as np
import pytest

from quditrb import PauliOperator, enumerate_group
from quditrb.algebra import pauli_to_dense
from quditrb.tableau import conjugate_pauli


@pytest.fixture(scope="session")
def group21():
    return enumerate_group(2, 1)


@pytest.fixture(scope="session")
def group31():
    return enumerate_group(3, 1)


def generator_paulis(d, n):
    """The 2n Pauli generators X_0..X_{n-1}, Z_0..Z_{n-1}."""
    out = []
    for j in range(2 * n):
        a = [0] * n
        b = [0] * n
        if j < n:
            a[j] = 1
        else:
            b[j - n] = 1
        out.append(PauliOperator(d, n, tuple(a), tuple(b), 0))
    return out


def assert_same_action(t, u, tol=1e-9):
    """The tableau t and the dense unitary u must conjugate every Pauli
    generator to the same operator, phases included."""
    for w in generator_paulis(t.d, t.n):
        lhs = u @ pauli_to_dense(w) @ u.conj().T
        rhs = pauli_to_dense(conjugate_pauli(t, w))
        err = float(np.abs(lhs - rhs).max())
        assert err < tol, f"action mismatch on {w}: {err}"
