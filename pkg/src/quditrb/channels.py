"""Quantum channels: Kraus form, superoperators, twirling and 2-design checks.

Superoperators use the column-stacking convention throughout: vec(A rho B) =
(B^T (x) A) vec(rho), so a Kraus channel rho -> sum_e K_e rho K_e^dag has
superoperator sum_e conj(K_e) (x) K_e acting on vec(rho) = rho.reshape(-1,
order="F").
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .algebra import weyl_operators, x_matrix

_TWIRL_CHUNK = 1024


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive map given by Kraus operators; trace preservation
    is validated on construction (sum K^dag K = I within tp_tol)."""

    dim: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError(f"channel dimension must be >= 2, got {self.dim}")
        if not self.kraus:
            raise ValueError("need at least one Kraus operator")
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        for k in ops:
            if k.shape != (self.dim, self.dim):
                raise ValueError(
                    f"Kraus operator shape {k.shape} does not match dim {self.dim}"
                )
        object.__setattr__(self, "kraus", ops)
        total = sum(k.conj().T @ k for k in ops)
        err = float(np.linalg.norm(total - np.eye(self.dim)))
        if err > 1e-9:
            raise ValueError(f"channel is not trace preserving: ||sum K^dag K - I|| = {err:.3e}")


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Dense dim^2 x dim^2 matrix acting on column-stacked density matrices."""

    dim: int
    mat: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.mat, dtype=complex)
        if mat.shape != (self.dim**2, self.dim**2):
            raise ValueError(
                f"superoperator shape {mat.shape} does not match dim {self.dim}"
            )
        object.__setattr__(self, "mat", mat)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(dim, dim, order="F")


def apply_channel(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    return sum(k @ rho @ k.conj().T for k in ch.kraus)


def apply_channel_adjoint(ch: KrausChannel, op: np.ndarray) -> np.ndarray:
    """Heisenberg-picture action, sum K^dag op K (dual to apply_channel)."""
    return sum(k.conj().T @ op @ k for k in ch.kraus)


def channel_superoperator(ch: KrausChannel) -> Superoperator:
    mat = sum(np.kron(k.conj(), k) for k in ch.kraus)
    return Superoperator(ch.dim, mat)


def unitary_superoperator(u: np.ndarray) -> Superoperator:
    u = np.asarray(u, dtype=complex)
    return Superoperator(u.shape[0], np.kron(u.conj(), u))


def apply_superoperator(s: Superoperator, rho: np.ndarray) -> np.ndarray:
    return unvec(s.mat @ vec(rho), s.dim)


def compose_channels(first: KrausChannel, then: KrausChannel, truncate: bool = False) -> KrausChannel:
    """Channel `then o first` (apply `first`, then `then`).

    Kraus operators are the pairwise products; with truncate=True the list is
    re-extracted from the Choi matrix, bounding the rank by dim^2.
    """
    if first.dim != then.dim:
        raise ValueError("channel dimensions differ")
    if truncate:
        mat = channel_superoperator(then).mat @ channel_superoperator(first).mat
        return kraus_from_superoperator(Superoperator(first.dim, mat))
    ops = tuple(t @ f for f in first.kraus for t in then.kraus)
    return KrausChannel(first.dim, ops)


def superoperator_to_choi(s: Superoperator) -> np.ndarray:
    d = s.dim
    s4 = s.mat.reshape(d, d, d, d)
    return s4.transpose(3, 1, 2, 0).reshape(d * d, d * d)


def kraus_from_superoperator(
    s: Superoperator, psd_floor: float = -1e-9, keep_tol: float = 1e-12
) -> KrausChannel:
    """Extract a Kraus representation from the Choi eigendecomposition.

    Raises ValueError when the map is not completely positive (Choi
    eigenvalue below psd_floor).
    """
    choi = superoperator_to_choi(s)
    asym = float(np.linalg.norm(choi - choi.conj().T))
    if asym > 1e-8:
        raise ValueError(f"map is not Hermiticity preserving: ||C - C^dag|| = {asym:.3e}")
    evals, evecs = np.linalg.eigh((choi + choi.conj().T) / 2.0)
    if float(evals.min()) < psd_floor:
        raise ValueError(f"map is not completely positive: Choi eigenvalue {evals.min():.3e}")
    ops = [
        math.sqrt(float(lam)) * unvec(evecs[:, i], s.dim)
        for i, lam in enumerate(evals)
        if lam > keep_tol
    ]
    return KrausChannel(s.dim, tuple(ops))


# ---------------------------------------------------------------------------
# Fidelity and depolarizing channels
# ---------------------------------------------------------------------------


def average_fidelity(ch: KrausChannel) -> float:
    """Haar-average gate fidelity, (D + sum_e |tr K_e|^2) / (D (D + 1))."""
    d = ch.dim
    tr_sq = sum(abs(np.trace(k)) ** 2 for k in ch.kraus)
    return float((d + tr_sq) / (d * (d + 1)))


def average_fidelity_from_p(p: float, dim: int) -> float:
    return p + (1.0 - p) / dim


def p_from_average_fidelity(fbar: float, dim: int) -> float:
    return (dim * fbar - 1.0) / (dim - 1.0)


def depolarizing(p: float, dim: int) -> KrausChannel:
    """Depolarizing channel rho -> p rho + (1-p) I/dim.

    Complete positivity requires -1/(dim^2-1) <= p <= 1.
    """
    lo = -1.0 / (dim**2 - 1)
    if not lo - 1e-12 <= p <= 1.0 + 1e-12:
        raise ValueError(f"depolarizing parameter {p} outside CP range [{lo:.6f}, 1]")
    # Uniform Weyl conjugation fully depolarizes, so mix it with identity.
    w_weight = (1.0 - p) / dim**2
    id_weight = p + w_weight
    ops = [math.sqrt(max(id_weight, 0.0)) * np.eye(dim, dtype=complex)]
    if abs(1.0 - p) > 0:
        root = math.sqrt(max(w_weight, 0.0))
        ops.extend(root * w for w in weyl_operators(dim)[1:])
    return KrausChannel(dim, tuple(ops))


def depolarizing_superoperator(p: float, dim: int) -> Superoperator:
    """Closed form p * Id + (1-p) |vec(I/dim)><vec(I)| (no CP restriction)."""
    ident = vec(np.eye(dim, dtype=complex))
    mat = p * np.eye(dim**2, dtype=complex) + (1.0 - p) / dim * np.outer(ident, ident.conj())
    return Superoperator(dim, mat)


def is_depolarizing(s: Superoperator, tol: float = 1e-9) -> float | None:
    """Return p when s equals a depolarizing superoperator within Frobenius
    tolerance tol, else None.

    p is read off the action on one traceless basis element and then verified
    globally, so a channel merely close to depolarizing on that element still
    fails the check.
    """
    d = s.dim
    e = np.zeros((d, d), dtype=complex)
    e[0, 0] = 1.0
    e -= np.eye(d) / d
    ve = vec(e)
    p = float(np.real(np.vdot(ve, s.mat @ ve) / np.vdot(ve, ve)))
    dist = float(np.linalg.norm(s.mat - depolarizing_superoperator(p, d).mat))
    return p if dist <= tol else None


# ---------------------------------------------------------------------------
# Twirling and unitary designs
# ---------------------------------------------------------------------------


def _unitary_stack(unitaries: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    stack = np.asarray(unitaries, dtype=complex)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {stack.shape}")
    return stack


def twirl(
    channel: KrausChannel | Superoperator,
    unitaries: Sequence[np.ndarray] | np.ndarray,
) -> Superoperator:
    """Average of C^-1 o channel o C over the given unitaries.

    The reduction is a mean over a stacked axis (pairwise summation), so the
    result is independent of element order to well below 1e-12.
    """
    s = channel if isinstance(channel, Superoperator) else channel_superoperator(channel)
    stack = _unitary_stack(unitaries)
    if stack.shape[1] != s.dim:
        raise ValueError("unitary dimension does not match the channel")
    k, d, _ = stack.shape
    partials = []
    for lo in range(0, k, _TWIRL_CHUNK):
        chunk = stack[lo : lo + _TWIRL_CHUNK]
        sg = np.einsum("kac,kbd->kabcd", chunk.conj(), chunk).reshape(-1, d * d, d * d)
        terms = np.matmul(sg.conj().transpose(0, 2, 1), np.matmul(s.mat, sg))
        partials.append(terms.sum(axis=0))
    return Superoperator(s.dim, np.sum(partials, axis=0) / k)


def frame_potential(unitaries: Sequence[np.ndarray] | np.ndarray) -> float:
    """Second frame potential (1/K^2) sum_ij |tr(U_i^dag U_j)|^4.

    Equals 2 exactly for a unitary 2-design and exceeds 2 otherwise.
    """
    stack = _unitary_stack(unitaries)
    gram = np.einsum("aij,bij->ab", stack.conj(), stack)
    return float(np.mean(np.abs(gram) ** 4))


# ---------------------------------------------------------------------------
# Random channels and noise presets
# ---------------------------------------------------------------------------


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Gaussian matrix with the R-diagonal
    phase correction."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_cptp_channel(
    dim: int, rng: np.random.Generator, env_dim: int | None = None
) -> KrausChannel:
    """Random CPTP channel from a Haar Stinespring isometry with the given
    environment dimension (default: dim)."""
    env = env_dim or dim
    isometry = haar_random_unitary(dim * env, rng)[:, :dim]
    blocks = isometry.reshape(dim, env, dim)
    return KrausChannel(dim, tuple(blocks[:, e, :] for e in range(env)))


def unitary_channel(u: np.ndarray) -> KrausChannel:
    u = np.asarray(u, dtype=complex)
    return KrausChannel(u.shape[0], (u,))


def over_rotation(dim: int, angle: float) -> KrausChannel:
    """Coherent noise exp(-i angle G) with G = (X + X^dag)/2."""
    x = x_matrix(dim)
    gen = (x + x.conj().T) / 2.0
    return unitary_channel(scipy.linalg.expm(-1j * angle * gen))


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


# ---------------------------------------------------------------------------
# JSON round trip for Kraus sets
# ---------------------------------------------------------------------------


def _matrix_to_pairs(m: np.ndarray) -> list[list[list[float]]]:
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _matrix_from_pairs(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def kraus_to_json_dict(ch: KrausChannel) -> dict:
    """Row-major [re, im] pair encoding of the Kraus operators."""
    return {"dim": ch.dim, "kraus": [_matrix_to_pairs(k) for k in ch.kraus]}


def kraus_from_json_dict(obj: dict) -> KrausChannel:
    try:
        dim = int(obj["dim"])
        ops = tuple(_matrix_from_pairs(k) for k in obj["kraus"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed Kraus JSON: {exc}") from exc
    return KrausChannel(dim, ops)
