"""Generalized Pauli operators and elementary qudit gates as dense matrices.

Conventions used throughout the package:

- The single-qudit computational basis is {|0>, ..., |d-1>} and arithmetic on
  basis labels is modulo d.
- Multi-qudit registers index basis states big-endian: site 0 is the most
  significant digit, so |s_0 s_1 ... s_{n-1}> maps to sum_i s_i * d^(n-1-i).
  Tensor products follow the same order (np.kron(site0, site1)).
- omega = exp(2*pi*i/d).  Phases of Pauli words are tracked as integer powers
  of omega-tilde, where omega-tilde = omega for odd d and exp(pi*i/d) for even
  d (the square root of omega).  The phase exponent therefore lives in Z_d for
  odd d and Z_{2d} for even d.
- Pauli words are kept in the canonical per-site order X^a Z^b.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple

import numpy as np

GATE_NAMES = ("X", "Z", "F", "P", "CZ", "T")


def is_prime(d: int) -> bool:
    if d < 2:
        return False
    for q in range(2, int(math.isqrt(d)) + 1):
        if d % q == 0:
            return False
    return True


def root_of_unity(d: int, tilde: bool = False) -> complex:
    """Primitive d-th root of unity omega, or omega-tilde when tilde=True.

    omega-tilde equals omega for odd d and exp(pi*i/d) for even d, so that
    omega-tilde generates the phase group of the d-dimensional Pauli group.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if tilde and d % 2 == 0:
        return cmath.exp(1j * cmath.pi / d)
    return cmath.exp(2j * cmath.pi / d)


def phase_order(d: int) -> int:
    """Order of omega-tilde: d for odd d, 2d for even d."""
    return d if d % 2 == 1 else 2 * d


def phase_unit(d: int) -> int:
    """omega expressed in omega-tilde units: 1 for odd d, 2 for even d."""
    return 1 if d % 2 == 1 else 2


# ---------------------------------------------------------------------------
# Elementary gates
# ---------------------------------------------------------------------------


def x_matrix(d: int) -> np.ndarray:
    """Cyclic shift X|s> = |s+1 mod d>."""
    return np.roll(np.eye(d, dtype=complex), shift=1, axis=0)


def z_matrix(d: int) -> np.ndarray:
    """Clock matrix Z|s> = omega^s |s>."""
    omega = root_of_unity(d)
    return np.diag(omega ** np.arange(d))


def fourier_matrix(d: int) -> np.ndarray:
    """Qudit Fourier gate F|s> = d^{-1/2} sum_t omega^{s t} |t>."""
    omega = root_of_unity(d)
    s = np.arange(d)
    return omega ** np.outer(s, s) / math.sqrt(d)


def phase_gate_matrix(d: int) -> np.ndarray:
    """Diagonal phase gate P|s> = omega^{s(s+rho)/2} |s>, rho = d mod 2.

    For even d the exponent s^2/2 is half-integer; it is interpreted through
    omega^{1/2} = exp(pi*i/d), i.e. P|s> = omega-tilde^{s^2} |s>.  For d=2
    this gives diag(1, i).
    """
    s = np.arange(d)
    if d % 2 == 1:
        omega = root_of_unity(d)
        return np.diag(omega ** (s * (s + 1) // 2 % d))
    wt = root_of_unity(d, tilde=True)
    return np.diag(wt ** (s * s % (2 * d)))


def t_gate_matrix(d: int) -> np.ndarray:
    """Cubic phase gate T|s> = omega^{s^3/d^2} |s> (not a Clifford gate)."""
    s = np.arange(d)
    return np.diag(np.exp(2j * np.pi * s**3 / d**3))


def cz_matrix(d: int) -> np.ndarray:
    """Two-qudit controlled-Z, CZ|s,t> = omega^{s t} |s,t>."""
    omega = root_of_unity(d)
    s = np.arange(d)
    return np.diag((omega ** np.outer(s, s).ravel()).astype(complex))


def gate(name: str, d: int) -> np.ndarray:
    """Dense matrix of a named elementary gate in dimension d.

    Single-qudit names: X, Z, F, P, T.  CZ acts on a qudit pair (d^2 x d^2).
    """
    builders = {
        "X": x_matrix,
        "Z": z_matrix,
        "F": fourier_matrix,
        "P": phase_gate_matrix,
        "T": t_gate_matrix,
        "CZ": cz_matrix,
    }
    if name not in builders:
        raise ValueError(f"unknown gate {name!r}, expected one of {GATE_NAMES}")
    return builders[name](d)


def embed_single(u: np.ndarray, d: int, n: int, site: int) -> np.ndarray:
    """Embed a single-qudit operator at the given site of an n-qudit register."""
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for n={n}")
    factors = [np.eye(d, dtype=complex)] * n
    factors[site] = u
    return reduce(np.kron, factors)


def embed_cz(d: int, n: int, site_a: int, site_b: int) -> np.ndarray:
    """CZ between two (not necessarily adjacent) sites of an n-qudit register."""
    if site_a == site_b or not (0 <= site_a < n and 0 <= site_b < n):
        raise ValueError(f"invalid CZ sites ({site_a}, {site_b}) for n={n}")
    dim = d**n
    digits = np.arange(dim)
    sa = digits // d ** (n - 1 - site_a) % d
    sb = digits // d ** (n - 1 - site_b) % d
    omega = root_of_unity(d)
    return np.diag(omega ** (sa * sb % d))


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------


def assert_unitary(u: np.ndarray, tol: float = 1e-10) -> None:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    err = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))
    if err > tol:
        raise ValueError(f"matrix is not unitary: ||U^dag U - I|| = {err:.3e}")


def assert_state_vector(psi: np.ndarray, tol: float = 1e-12) -> None:
    psi = np.asarray(psi)
    if psi.ndim != 1:
        raise ValueError(f"expected a vector, got shape {psi.shape}")
    err = abs(np.linalg.norm(psi) - 1.0)
    if err > tol:
        raise ValueError(f"state vector norm deviates from 1 by {err:.3e}")


def assert_density_matrix(rho: np.ndarray, trace_tol: float = 1e-10, psd_floor: float = -1e-10) -> None:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if np.linalg.norm(rho - rho.conj().T) > trace_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {np.trace(rho):.6f} != 1")
    lo = float(np.linalg.eigvalsh(rho).min())
    if lo < psd_floor:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


def basis_state(dim: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def canonical_phase(u: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Fix the global phase: first entry with |u_ij| > tol (row-major scan)
    is made real positive."""
    u = np.asarray(u, dtype=complex)
    flat = u.ravel()
    idx = np.flatnonzero(np.abs(flat) > tol)
    if idx.size == 0:
        raise ValueError("matrix is numerically zero")
    pivot = flat[idx[0]]
    return u * (abs(pivot) / pivot)


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over theta of ||a - e^{i theta} b||_F.

    Computed by aligning b to the optimal phase and subtracting, which stays
    accurate near zero where the textbook sqrt(|a|^2+|b|^2-2|tr a^dag b|)
    form loses half the digits to cancellation.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    z = np.trace(b.conj().T @ a)
    factor = z / abs(z) if abs(z) > 0 else 1.0
    return float(np.linalg.norm(a - factor * b))


# ---------------------------------------------------------------------------
# Pauli words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PauliOperator:
    """A phased Pauli word omega-tilde^phi * prod_i X_i^{a_i} Z_i^{b_i}.

    Exponent vectors are reduced mod d and the phase exponent mod
    phase_order(d), so equality of instances is exact operator equality.
    """

    d: int
    n: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    phi: int = 0

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if self.n < 1:
            raise ValueError(f"need at least one site, got n={self.n}")
        if len(self.a) != self.n or len(self.b) != self.n:
            raise ValueError("exponent vectors must have length n")
        object.__setattr__(self, "a", tuple(int(x) % self.d for x in self.a))
        object.__setattr__(self, "b", tuple(int(x) % self.d for x in self.b))
        object.__setattr__(self, "phi", int(self.phi) % phase_order(self.d))

    @classmethod
    def identity(cls, d: int, n: int) -> "PauliOperator":
        return cls(d, n, (0,) * n, (0,) * n, 0)

    @classmethod
    def from_vector(cls, d: int, vec, phi: int = 0) -> "PauliOperator":
        """Build from a length-2n symplectic vector (a_0..a_{n-1}, b_0..b_{n-1})."""
        vec = [int(x) for x in vec]
        if len(vec) % 2 != 0:
            raise ValueError("symplectic vector must have even length")
        n = len(vec) // 2
        return cls(d, n, tuple(vec[:n]), tuple(vec[n:]), phi)

    @property
    def vector(self) -> tuple[int, ...]:
        return self.a + self.b

    def is_identity_word(self) -> bool:
        """True when the X/Z part is trivial (any phase)."""
        return all(x == 0 for x in self.a) and all(x == 0 for x in self.b)


def pauli_product(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Operator product p @ q, with the exact reordering phase.

    Moving Z^{b} past X^{a} on a site contributes omega^{b a}; exponents
    reduce mod d with no extra phase because X^d = Z^d = 1 exactly.
    """
    if (p.d, p.n) != (q.d, q.n):
        raise ValueError("operands act on different registers")
    d = p.d
    cross = sum(pb * qa for pb, qa in zip(p.b, q.a)) % d
    phi = p.phi + q.phi + phase_unit(d) * cross
    a = tuple(pa + qa for pa, qa in zip(p.a, q.a))
    b = tuple(pb + qb for pb, qb in zip(p.b, q.b))
    return PauliOperator(d, p.n, a, b, phi)


def pauli_power(p: PauliOperator, k: int) -> PauliOperator:
    if k < 0:
        return pauli_power(pauli_inverse(p), -k)
    out = PauliOperator.identity(p.d, p.n)
    for _ in range(k):
        out = pauli_product(out, p)
    return out


def pauli_inverse(p: PauliOperator) -> PauliOperator:
    d = p.d
    cross = sum(x * y for x, y in zip(p.a, p.b)) % d
    phi = -p.phi + phase_unit(d) * cross
    return PauliOperator(d, p.n, tuple(-x for x in p.a), tuple(-x for x in p.b), phi)


def pauli_to_dense(p: PauliOperator) -> np.ndarray:
    wt = root_of_unity(p.d, tilde=True)
    x = x_matrix(p.d)
    z = z_matrix(p.d)
    factors = [
        np.linalg.matrix_power(x, ai) @ np.linalg.matrix_power(z, bi)
        for ai, bi in zip(p.a, p.b)
    ]
    return wt**p.phi * reduce(np.kron, factors)


class PauliMatch(NamedTuple):
    """Result of pauli_membership: exponent vectors plus the global phase
    angle theta such that the word carries a factor e^(i theta)."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    phase: float


def pauli_membership(u: np.ndarray, d: int, n: int, tol: float = 1e-9) -> PauliMatch | None:
    """Decide whether u equals e^{i theta} prod_i X_i^{a_i} Z_i^{b_i}.

    Membership is in the phase-extended Pauli group: any global phase theta is
    accepted and returned (in (-pi, pi]). Returns None when u is not a phased
    Pauli word within entrywise tolerance tol.
    """
    u = np.asarray(u, dtype=complex)
    dim = d**n
    if u.shape != (dim, dim):
        raise ValueError(f"expected shape {(dim, dim)}, got {u.shape}")

    # A Pauli word is a monomial matrix: column s has its only entry at row
    # s (+) a, with value phase * omega^(b . s).
    col0 = u[:, 0]
    rows = np.flatnonzero(np.abs(col0) > tol)
    if rows.size != 1:
        return None
    r0 = int(rows[0])
    phase = col0[r0]
    if abs(abs(phase) - 1.0) > tol:
        return None
    a = tuple(r0 // d ** (n - 1 - i) % d for i in range(n))

    omega = root_of_unity(d)
    b = []
    for i in range(n):
        col = d ** (n - 1 - i)  # basis state |0..010..0> with the 1 at site i
        digits = list(a)
        digits[i] = (digits[i] + 1) % d
        row = sum(dig * d ** (n - 1 - j) for j, dig in enumerate(digits))
        val = u[row, col] / phase
        if abs(abs(val) - 1.0) > tol:
            return None
        k = round(d * (cmath.phase(val) / (2 * math.pi))) % d
        if abs(val - omega**k) > tol:
            return None
        b.append(int(k))

    candidate = phase * pauli_to_dense(PauliOperator(d, n, a, tuple(b), 0))
    if np.max(np.abs(u - candidate)) > tol:
        return None
    return PauliMatch(a, tuple(b), float(cmath.phase(phase)))


def weyl_operators(d: int) -> list[np.ndarray]:
    """All d^2 single-qudit Pauli words X^a Z^b (phases omitted)."""
    x = x_matrix(d)
    z = z_matrix(d)
    xp = [np.linalg.matrix_power(x, a) for a in range(d)]
    zp = [np.linalg.matrix_power(z, b) for b in range(d)]
    return [xp[a] @ zp[b] for a in range(d) for b in range(d)]


# ---------------------------------------------------------------------------
# Symmetric/antisymmetric block decomposition of a two-qubit gate
# ---------------------------------------------------------------------------

# Basis columns: |00>, (|01>+|10>)/sqrt(2), |11>, (|01>-|10>)/sqrt(2).
_RT2 = 1.0 / math.sqrt(2.0)
SYMMETRIC_BASIS = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, _RT2, 0.0, _RT2],
        [0.0, _RT2, 0.0, -_RT2],
        [0.0, 0.0, 1.0, 0.0],
    ],
    dtype=complex,
)


class SymmetricBlock(NamedTuple):
    sym: np.ndarray  # 3x3 block on the symmetric (triplet) subspace
    antisym: complex  # 1x1 block on the antisymmetric (singlet) state
    offdiag_norm: float  # Frobenius norm of the coupling blocks


def symmetric_block(u: np.ndarray, tol: float = 1e-10) -> SymmetricBlock:
    """Decompose a two-qubit unitary in the symmetric/antisymmetric basis.

    For gates commuting with the qubit swap the coupling blocks vanish and
    the gate splits as sym (+) antisym.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {u.shape}")
    assert_unitary(u, tol=tol)
    block = SYMMETRIC_BASIS.conj().T @ u @ SYMMETRIC_BASIS
    off = math.sqrt(
        float(np.linalg.norm(block[:3, 3]) ** 2 + np.linalg.norm(block[3, :3]) ** 2)
    )
    return SymmetricBlock(block[:3, :3].copy(), complex(block[3, 3]), off)
