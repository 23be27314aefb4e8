"""Clifford tableaux over prime-dimensional qudits.

A Clifford unitary U on n qudits of prime dimension d is represented, up to
global phase, by its conjugation action on the Pauli generators:

    U X_i U^dag = wt^{r_i}     W(m_i),        i = 0..n-1
    U Z_i U^dag = wt^{r_{n+i}} W(m_{n+i}),    i = 0..n-1

where wt is omega-tilde (see algebra), m_j is column j of a 2n x 2n matrix M
over Z_d and W(v) denotes the canonically ordered Pauli word with symplectic
vector v = (a_0..a_{n-1}, b_0..b_{n-1}).  M preserves the symplectic form
(M^T J M = J mod d with J = [[0, I], [-I, 0]]) and the phase vector r lives
in Z_d (odd d) or Z_{2d} (even d).

Composition, inversion and Pauli conjugation are exact integer arithmetic;
dense synthesis decomposes the symplectic part into a word over the
elementary generators {F, P, CZ} plus a Pauli correction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .algebra import (
    PauliOperator,
    canonical_phase,
    cz_matrix,
    embed_cz,
    embed_single,
    fourier_matrix,
    is_prime,
    pauli_power,
    pauli_product,
    phase_gate_matrix,
    phase_order,
    phase_unit,
    x_matrix,
    z_matrix,
)

# ---------------------------------------------------------------------------
# Tableau type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CliffordTableau:
    """Symplectic matrix plus phase vector; hashable and exact.

    mat is stored as a tuple of row tuples; column j is the image vector of
    generator j (X_0..X_{n-1}, Z_0..Z_{n-1}).
    """

    d: int
    n: int
    mat: tuple[tuple[int, ...], ...]
    phases: tuple[int, ...]

    def __post_init__(self) -> None:
        if not is_prime(self.d):
            raise ValueError(f"qudit dimension must be prime, got d={self.d}")
        if self.n < 1:
            raise ValueError(f"need at least one site, got n={self.n}")
        m = 2 * self.n
        if len(self.mat) != m or any(len(row) != m for row in self.mat):
            raise ValueError(f"tableau matrix must be {m}x{m}")
        if len(self.phases) != m:
            raise ValueError(f"phase vector must have length {m}")
        object.__setattr__(
            self, "mat", tuple(tuple(int(x) % self.d for x in row) for row in self.mat)
        )
        order = phase_order(self.d)
        object.__setattr__(self, "phases", tuple(int(r) % order for r in self.phases))

    def matrix(self) -> np.ndarray:
        return np.array(self.mat, dtype=np.int64)

    def column(self, j: int) -> PauliOperator:
        """Image of generator j as a phased Pauli word."""
        vec = [self.mat[r][j] for r in range(2 * self.n)]
        return PauliOperator.from_vector(self.d, vec, phi=self.phases[j])


def identity_tableau(d: int, n: int) -> CliffordTableau:
    m = 2 * n
    mat = tuple(tuple(1 if r == c else 0 for c in range(m)) for r in range(m))
    return CliffordTableau(d, n, mat, (0,) * m)


def symplectic_form(d: int, n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n), dtype=np.int64)
    j[:n, n:] = np.eye(n, dtype=np.int64)
    j[n:, :n] = (-np.eye(n, dtype=np.int64)) % d
    return j


def is_symplectic(mat: np.ndarray, d: int) -> bool:
    mat = np.asarray(mat, dtype=np.int64)
    n2 = mat.shape[0]
    if mat.shape != (n2, n2) or n2 % 2 != 0:
        return False
    j = symplectic_form(d, n2 // 2)
    return bool(np.array_equal(mat.T @ j @ mat % d, j % d))


def validate_tableau(t: CliffordTableau) -> None:
    """Raise ValueError unless t describes a realizable Clifford unitary."""
    if not is_symplectic(t.matrix(), t.d):
        raise ValueError("tableau matrix does not preserve the symplectic form")
    if t.d % 2 == 0:
        # (image of a generator)^d must equal the identity; for even d this
        # pins the phase parity to the column's a.b overlap.
        for j in range(2 * t.n):
            col = t.column(j)
            parity = sum(x * y for x, y in zip(col.a, col.b)) % 2
            if t.phases[j] % 2 != parity:
                raise ValueError(
                    f"phase entry {j} has parity {t.phases[j] % 2}, expected {parity}"
                )


# ---------------------------------------------------------------------------
# Group operations
# ---------------------------------------------------------------------------


def conjugate_pauli(t: CliffordTableau, p: PauliOperator) -> PauliOperator:
    """Image U p U^dag of a phased Pauli word under the tableau's unitary."""
    if (p.d, p.n) != (t.d, t.n):
        raise ValueError("Pauli operand acts on a different register")
    out = PauliOperator(t.d, t.n, (0,) * t.n, (0,) * t.n, p.phi)
    for i in range(t.n):
        if p.a[i]:
            out = pauli_product(out, pauli_power(t.column(i), p.a[i]))
    for i in range(t.n):
        if p.b[i]:
            out = pauli_product(out, pauli_power(t.column(t.n + i), p.b[i]))
    return out


def compose(first: CliffordTableau, then: CliffordTableau) -> CliffordTableau:
    """Tableau of (then o first): apply `first`, then `then`.

    The composed unitary is U_then U_first; its action on a Pauli P is
    then(first(P)).
    """
    if (first.d, first.n) != (then.d, then.n):
        raise ValueError("tableaux act on different registers")
    m = 2 * first.n
    cols = []
    phs = []
    for j in range(m):
        q = conjugate_pauli(then, first.column(j))
        cols.append(q.vector)
        phs.append(q.phi)
    mat = tuple(tuple(cols[c][r] for c in range(m)) for r in range(m))
    return CliffordTableau(first.d, first.n, mat, tuple(phs))


def invert(t: CliffordTableau) -> CliffordTableau:
    """Tableau of the inverse unitary."""
    d, n = t.d, t.n
    j = symplectic_form(d, n)
    minv = (-j @ t.matrix().T @ j) % d  # M^T J M = J  =>  M^-1 = -J M^T J
    m = 2 * n
    phs = []
    order = phase_order(d)
    for i in range(m):
        # U W(M^-1 e_i) U^dag = wt^f W(e_i)  =>  U^dag W(e_i) U = wt^-f W(M^-1 e_i)
        img = conjugate_pauli(t, PauliOperator.from_vector(d, minv[:, i]))
        phs.append((-img.phi) % order)
    mat = tuple(tuple(int(minv[r, c]) for c in range(m)) for r in range(m))
    return CliffordTableau(d, n, mat, tuple(phs))


# ---------------------------------------------------------------------------
# Elementary generator tableaux and dense forms
# ---------------------------------------------------------------------------


class Prim(NamedTuple):
    """One elementary gate application: kind in {F, P, CZ, X, Z}, site tuple,
    integer power."""

    kind: str
    sites: tuple[int, ...]
    power: int


def _gen_tableau(kind: str, sites: tuple[int, ...], d: int, n: int) -> CliffordTableau:
    m = 2 * n
    mat = np.eye(m, dtype=np.int64)
    phases = [0] * m
    c = phase_unit(d)
    if kind == "F":
        (k,) = sites
        mat[:, k] = 0
        mat[n + k, k] = 1  # X_k -> Z_k
        mat[:, n + k] = 0
        mat[k, n + k] = (d - 1) % d  # Z_k -> X_k^-1
    elif kind == "P":
        (k,) = sites
        mat[n + k, k] = 1  # X_k -> wt X_k Z_k
        phases[k] = 1
    elif kind == "CZ":
        i, k = sites
        mat[n + k, i] = 1  # X_i -> X_i Z_k
        mat[n + i, k] = 1  # X_k -> Z_i X_k
    elif kind == "X":
        (k,) = sites
        phases[n + k] = (-c) % phase_order(d)  # Z_k -> omega^-1 Z_k
    elif kind == "Z":
        (k,) = sites
        phases[k] = c  # X_k -> omega X_k
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return CliffordTableau(d, n, tuple(map(tuple, mat % d)), tuple(phases))


def prim_tableau(pr: Prim, d: int, n: int) -> CliffordTableau:
    base = _gen_tableau(pr.kind, pr.sites, d, n)
    out = identity_tableau(d, n)
    for _ in range(pr.power):
        out = compose(out, base)
    return out


def _gen_dense(kind: str, sites: tuple[int, ...], d: int, n: int) -> np.ndarray:
    if kind == "CZ":
        if n == 2 and sites == (0, 1):
            return cz_matrix(d)
        return embed_cz(d, n, sites[0], sites[1])
    single = {"F": fourier_matrix, "P": phase_gate_matrix, "X": x_matrix, "Z": z_matrix}
    return embed_single(single[kind](d), d, n, sites[0])


def prim_dense(pr: Prim, d: int, n: int) -> np.ndarray:
    return np.linalg.matrix_power(_gen_dense(pr.kind, pr.sites, d, n), pr.power)


def generator_tableaux(d: int, n: int) -> list[tuple[str, CliffordTableau]]:
    """Named generating set of the Clifford group: F_k, P_k, Z_k and CZ pairs."""
    gens: list[tuple[str, CliffordTableau]] = []
    for kind in ("F", "P", "Z"):
        for k in range(n):
            gens.append((f"{kind}{k}", _gen_tableau(kind, (k,), d, n)))
    for i in range(n):
        for k in range(i + 1, n):
            gens.append((f"CZ{i}{k}", _gen_tableau("CZ", (i, k), d, n)))
    return gens


def generator_dense(name: str, d: int, n: int) -> np.ndarray:
    kind = name.rstrip("0123456789")
    digits = name[len(kind):]
    sites = tuple(int(ch) for ch in digits)
    return _gen_dense(kind, sites, d, n)


# ---------------------------------------------------------------------------
# Symplectic reduction into generator words
# ---------------------------------------------------------------------------


def _prim_symplectic(pr: Prim, d: int, n: int) -> np.ndarray:
    m = 2 * n
    e = np.eye(m, dtype=np.int64)
    if pr.kind == "F":
        (k,) = pr.sites
        ak, bk = k, n + k
        f = np.eye(m, dtype=np.int64)
        f[ak, ak] = 0
        f[ak, bk] = (-1) % d  # a_k <- -b_k
        f[bk, bk] = 0
        f[bk, ak] = 1  # b_k <- a_k
        out = np.eye(m, dtype=np.int64)
        for _ in range(pr.power):
            out = f @ out % d
        return out
    if pr.kind == "P":
        (k,) = pr.sites
        e[n + k, k] = pr.power % d  # b_k += m a_k
    elif pr.kind == "CZ":
        i, k = pr.sites
        e[n + i, k] = pr.power % d  # b_i += m a_k
        e[n + k, i] = pr.power % d  # b_k += m a_i
    # X and Z leave the symplectic part alone.
    return e % d


def _mv_f(k: int) -> list[Prim]:
    return [Prim("F", (k,), 1)]


def _mv_p(k: int, m: int, d: int) -> list[Prim]:
    m %= d
    return [Prim("P", (k,), m)] if m else []


def _mv_shear_a(k: int, m: int, d: int) -> list[Prim]:
    """a_k += m * b_k, realized as F^3 P^-m F read right to left."""
    m %= d
    if not m:
        return []
    return [Prim("F", (k,), 1), Prim("P", (k,), (-m) % d), Prim("F", (k,), 3)]


def _mv_scale(k: int, lam: int, d: int) -> list[Prim]:
    """(a_k, b_k) -> (lam a_k, lam^-1 b_k) for invertible lam."""
    lam %= d
    if lam == 1:
        return []
    inv = pow(lam, -1, d)
    return (
        _mv_f(k)
        + _mv_shear_a(k, lam, d)
        + _mv_p(k, (-inv) % d, d)
        + _mv_shear_a(k, lam, d)
    )


def _mv_csum(c: int, t: int, m: int, d: int) -> list[Prim]:
    """a_t += m a_c and b_c -= m b_t (a Fourier-conjugated CZ word)."""
    m %= d
    if not m:
        return []
    return [Prim("F", (t,), 1), Prim("CZ", (min(c, t), max(c, t)), m), Prim("F", (t,), 3)]


def _reduction_word(t: CliffordTableau) -> list[Prim]:
    """Prims w_1..w_k with M(w_k) ... M(w_1) M(t) = identity mod d."""
    d, n = t.d, t.n
    mat = t.matrix() % d
    word: list[Prim] = []

    def apply(prims: Iterable[Prim]) -> None:
        nonlocal mat
        for pr in prims:
            mat = _prim_symplectic(pr, d, n) @ mat % d
            word.append(pr)

    for k in range(n):
        ak, bk = k, n + k
        xcol, zcol = k, n + k

        # Bring the X_k image to e_{a_k}.
        if mat[ak, xcol] == 0 and mat[bk, xcol] == 0:
            helper = next(
                j for j in range(k + 1, n) if mat[j, xcol] or mat[n + j, xcol]
            )
            if mat[helper, xcol] == 0:
                apply(_mv_f(helper))
            apply(_mv_csum(helper, k, 1, d))
        if mat[ak, xcol] == 0:
            apply(_mv_f(k))
        if mat[bk, xcol]:
            apply(_mv_p(k, -int(mat[bk, xcol]) * pow(int(mat[ak, xcol]), -1, d), d))
        if mat[ak, xcol] != 1:
            apply(_mv_scale(k, pow(int(mat[ak, xcol]), -1, d), d))
        for j in range(k + 1, n):
            if mat[j, xcol]:
                apply(_mv_csum(k, j, -int(mat[j, xcol]), d))  # junk lands in b_k
            if mat[n + j, xcol]:
                apply([Prim("CZ", (k, j), (-int(mat[n + j, xcol])) % d)])
        if mat[bk, xcol]:
            apply(_mv_p(k, -int(mat[bk, xcol]), d))

        # The Z_k image now has b_k component 1 (forced by the preserved form);
        # clear its other components without touching e_{a_k}.
        for j in range(k + 1, n):
            if mat[j, zcol] or mat[n + j, zcol]:
                if mat[n + j, zcol] == 0:
                    apply(_mv_f(j))
                elif mat[j, zcol]:
                    apply(
                        _mv_shear_a(
                            j, -int(mat[j, zcol]) * pow(int(mat[n + j, zcol]), -1, d), d
                        )
                    )
                apply(_mv_csum(j, k, int(mat[n + j, zcol]), d))
        if mat[ak, zcol]:
            apply(_mv_shear_a(k, -int(mat[ak, zcol]), d))

        assert mat[bk, zcol] == 1 and not any(
            mat[r, zcol] for r in range(2 * n) if r != bk
        ), "symplectic reduction failed on the Z column"

    assert np.array_equal(mat, np.eye(2 * n, dtype=np.int64)), "reduction incomplete"
    return word


def reduction_to_identity(t: CliffordTableau) -> list[Prim]:
    """Full generator word w with compose(t, w_1, ..., w_k) = identity tableau,
    including the trailing Pauli correction."""
    d, n = t.d, t.n
    word = _reduction_word(t)
    cur = t
    for pr in word:
        cur = compose(cur, prim_tableau(pr, d, n))

    c = phase_unit(d)
    pauli_fix: list[Prim] = []
    for k in range(n):
        rx, rz = cur.phases[k], cur.phases[n + k]
        if rx % c or rz % c:
            raise ValueError("tableau phases are not realizable")
        alpha = (rz // c) % d  # X_k^alpha shifts the Z_k phase by -c*alpha
        beta = (-(rx // c)) % d  # Z_k^beta shifts the X_k phase by +c*beta
        if alpha:
            pauli_fix.append(Prim("X", (k,), alpha))
        if beta:
            pauli_fix.append(Prim("Z", (k,), beta))
    for pr in pauli_fix:
        cur = compose(cur, prim_tableau(pr, d, n))
    assert cur == identity_tableau(d, n), "phase correction failed"
    return word + pauli_fix


def tableau_to_dense(t: CliffordTableau) -> np.ndarray:
    """Dense unitary realizing the tableau, with canonical global phase."""
    word = reduction_to_identity(t)
    u = np.eye(t.d**t.n, dtype=complex)
    # compose(t, w_1..w_k) = 1 means U_k ... U_1 U_t is a phase, so
    # U_t = U_1^dag ... U_k^dag up to phase.
    for pr in word:
        u = u @ prim_dense(pr, t.d, t.n).conj().T
    return canonical_phase(u)


# ---------------------------------------------------------------------------
# Uniform sampling
# ---------------------------------------------------------------------------


def _affine_solutions(
    rows: list[np.ndarray], rhs: list[int], d: int, dim: int
) -> tuple[np.ndarray, np.ndarray]:
    """Particular solution and nullspace basis of row_i . x = rhs_i over Z_d."""
    if not rows:
        return np.zeros(dim, dtype=np.int64), np.eye(dim, dtype=np.int64)
    a = np.array(rows, dtype=np.int64) % d
    b = np.array(rhs, dtype=np.int64) % d
    m = a.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(dim):
        hit = next((i for i in range(r, m) if a[i, c] % d), None)
        if hit is None:
            continue
        if hit != r:
            a[[r, hit]] = a[[hit, r]]
            b[[r, hit]] = b[[hit, r]]
        inv = pow(int(a[r, c]), -1, d)
        a[r] = a[r] * inv % d
        b[r] = b[r] * inv % d
        for i in range(m):
            if i != r and a[i, c]:
                f = int(a[i, c])
                a[i] = (a[i] - f * a[r]) % d
                b[i] = (b[i] - f * b[r]) % d
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(b[i] and not a[i].any() for i in range(r, m)):
        raise ValueError("inconsistent linear system over Z_d")
    x0 = np.zeros(dim, dtype=np.int64)
    for i, c in enumerate(pivots):
        x0[c] = b[i]
    free = [c for c in range(dim) if c not in pivots]
    basis = np.zeros((len(free), dim), dtype=np.int64)
    for bi, f in enumerate(free):
        basis[bi, f] = 1
        for i, c in enumerate(pivots):
            basis[bi, c] = (-a[i, f]) % d
    return x0, basis


def _form_row(v: np.ndarray, d: int, n: int) -> np.ndarray:
    """Row vector of sigma(v, .) = v_b . x_a - v_a . x_b."""
    return np.concatenate([v[n:], (-v[:n]) % d]) % d


def sample_symplectic(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exactly uniform element of Sp(2n, Z_d), built pair by pair.

    Each X_i image is uniform over the nonzero vectors of the symplectic
    complement of the previously fixed pairs; each Z_i image is uniform over
    the affine set with sigma(x_i, z_i) = sigma(X_i, Z_i).  The transition
    counts multiply to the group order, so the draw is exactly uniform.
    """
    rows: list[np.ndarray] = []
    rhs: list[int] = []
    xs: list[np.ndarray] = []
    zs: list[np.ndarray] = []
    for _ in range(n):
        _, basis = _affine_solutions(rows, rhs, d, 2 * n)
        while True:
            coeff = rng.integers(0, d, size=basis.shape[0])
            if coeff.any():
                break
        v = coeff @ basis % d
        row_v = _form_row(v, d, n)
        x0, basis = _affine_solutions(rows + [row_v], rhs + [(-1) % d], d, 2 * n)
        coeff = rng.integers(0, d, size=basis.shape[0])
        w = (x0 + coeff @ basis) % d
        xs.append(v)
        zs.append(w)
        rows += [row_v, _form_row(w, d, n)]
        rhs += [0, 0]
    return np.column_stack(xs + zs).astype(np.int64)


def random_clifford(d: int, n: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniformly random Clifford tableau (symplectic part plus Pauli coset).

    For odd d every phase vector in Z_d^{2n} is realizable; for d = 2 the
    phase parity of each column is pinned to its a.b overlap and the even
    offsets are uniform.
    """
    mat = sample_symplectic(d, n, rng)
    m = 2 * n
    if d % 2 == 1:
        phases = rng.integers(0, d, size=m)
    else:
        parity = np.array(
            [int(np.dot(mat[:n, j], mat[n:, j])) % 2 for j in range(m)], dtype=np.int64
        )
        phases = parity + 2 * rng.integers(0, d, size=m)
    return CliffordTableau(
        d, n, tuple(tuple(int(x) for x in row) for row in mat), tuple(int(r) for r in phases)
    )
