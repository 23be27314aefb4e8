"""Randomized benchmarking sequence generation, simulation and serialization.

Sequences of length j contain j - 1 uniformly random Clifford gates followed
by the inverse of their product, so the ideal circuit is the identity. The
noise channel is applied after every gate, including the inverse. Each
(length, sequence index) pair owns an independent RNG stream seeded by
(seed, length, index); gate draws and shot draws come from that stream in a
fixed order, which makes every artifact reproducible regardless of how the
lengths are scheduled across threads.
"""

from __future__ import annotations

import importlib.metadata
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import basis_state, is_prime, projector
from .channels import (
    KrausChannel,
    apply_channel,
    apply_channel_adjoint,
    channel_superoperator,
    kraus_to_json_dict,
    vec,
)
from .group import CliffordGroupTable, clifford_group_order, enumerate_group
from .tableau import CliffordTableau, compose, identity_tableau, invert, random_clifford, tableau_to_dense

# Above this group order sequences fall back to tableau sampling with on-the-fly
# dense synthesis instead of a precomputed per-element superoperator table.
GROUP_TABLE_LIMIT = 4096

try:
    CODE_VERSION = importlib.metadata.version("quditrb")
except importlib.metadata.PackageNotFoundError:  # pragma: no cover
    CODE_VERSION = "0.0.0"

DATASET_SCHEMA = 1


@dataclass(frozen=True, eq=False)
class RBConfig:
    """Experiment description; validated on construction."""

    d: int
    n: int
    max_length: int
    num_sequences: int
    seed: int
    noise: KrausChannel
    exact: bool = False
    num_shots: int | None = None
    spam_prep: KrausChannel | None = None
    spam_meas: KrausChannel | None = None
    threads: int | None = None

    def __post_init__(self) -> None:
        if not is_prime(self.d):
            raise ValueError(f"qudit dimension must be prime, got {self.d}")
        if self.n < 1:
            raise ValueError(f"need at least one qudit, got n={self.n}")
        if self.max_length < 2:
            raise ValueError(f"max sequence length must be >= 2, got {self.max_length}")
        if self.num_sequences < 1:
            raise ValueError(f"need at least one sequence, got {self.num_sequences}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if not self.exact:
            if self.num_shots is None or self.num_shots < 1:
                raise ValueError("sampled mode requires a positive shot count")
        dim = self.d**self.n
        for label, ch in (("noise", self.noise), ("spam_prep", self.spam_prep), ("spam_meas", self.spam_meas)):
            if ch is not None and ch.dim != dim:
                raise ValueError(f"{label} channel dimension {ch.dim} does not match d^n = {dim}")
        if self.threads is not None and self.threads < 1:
            raise ValueError(f"thread count must be positive, got {self.threads}")

    @property
    def dim(self) -> int:
        return self.d**self.n

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(range(2, self.max_length + 1))


@dataclass(frozen=True)
class SequenceRecord:
    length: int
    seq_index: int
    survival: float
    shots: int | None
    gates: tuple[int, ...] | None


@dataclass(frozen=True, eq=False)
class RBDataset:
    config: RBConfig
    lengths: tuple[int, ...]
    mean_survival: tuple[float, ...]
    records: tuple[SequenceRecord, ...]
    provenance: dict = field(default_factory=dict)


def sequence_rng(seed: int, length: int, seq_index: int) -> np.random.Generator:
    """The stream owned by one (length, sequence index) cell of a run."""
    return np.random.default_rng((seed, length, seq_index))


def generate_sequence(
    d: int,
    n: int,
    length: int,
    rng: np.random.Generator,
    table: CliffordGroupTable | None = None,
) -> tuple:
    """Draw length - 1 uniform Cliffords and append the inverse of their product.

    With a group table the result is a tuple of element indices; without one it
    is a tuple of tableaux. Either way composing all entries gives the identity
    (up to phase conventions handled by the tableau calculus exactly).
    """
    if length < 2:
        raise ValueError(f"sequence length must be >= 2, got {length}")
    if table is not None:
        draws = rng.integers(0, len(table), size=length - 1)
        running = 0
        for g in draws:
            running = table.prod(running, int(g))
        return tuple(int(g) for g in draws) + (table.inv(running),)
    gates = [random_clifford(d, n, rng) for _ in range(length - 1)]
    running = identity_tableau(d, n)
    for g in gates:
        running = compose(running, g)
    return tuple(gates) + (invert(running),)


def exact_sequence_fidelity(
    gates,
    noise: KrausChannel,
    spam_prep: KrausChannel | None = None,
    spam_meas: KrausChannel | None = None,
) -> float:
    """Survival probability of one explicit sequence, computed densely.

    gates may be tableaux or dense unitaries. This is the reference path; the
    run engine reproduces it through superoperator algebra.
    """
    mats = [g if isinstance(g, np.ndarray) else tableau_to_dense(g) for g in gates]
    dim = mats[0].shape[0]
    if noise.dim != dim:
        raise ValueError("noise dimension does not match the gates")
    rho = projector(basis_state(dim))
    if spam_prep is not None:
        rho = apply_channel(spam_prep, rho)
    for u in mats:
        rho = apply_channel(noise, u @ rho @ u.conj().T)
    effect = projector(basis_state(dim))
    if spam_meas is not None:
        effect = apply_channel_adjoint(spam_meas, effect)
    return float(np.real(np.trace(effect @ rho)))


@dataclass(frozen=True)
class DecayPrediction:
    """Exact single-exponential decay implied by a gate-independent channel."""

    p: float
    a0: float
    b0: float

    def curve(self, lengths) -> np.ndarray:
        lengths = np.asarray(lengths, dtype=float)
        return self.a0 * self.p ** (lengths - 1) + self.b0


def predicted_decay(
    p: float,
    noise: KrausChannel,
    spam_prep: KrausChannel | None = None,
    spam_meas: KrausChannel | None = None,
) -> DecayPrediction:
    """Coefficients of F(j) = A0 p^(j-1) + B0 for the given depolarizing
    strength p and the channel applied after the final inverse.

    A0 = tr[E Lambda(rho - I/D)] and B0 = tr[E Lambda(I)]/D with E and rho
    absorbing any SPAM channels.
    """
    dim = noise.dim
    rho = projector(basis_state(dim))
    if spam_prep is not None:
        rho = apply_channel(spam_prep, rho)
    effect = projector(basis_state(dim))
    if spam_meas is not None:
        effect = apply_channel_adjoint(spam_meas, effect)
    ident = np.eye(dim, dtype=complex)
    a0 = np.trace(effect @ apply_channel(noise, rho - ident / dim))
    b0 = np.trace(effect @ apply_channel(noise, ident)) / dim
    return DecayPrediction(p=float(p), a0=float(np.real(a0)), b0=float(np.real(b0)))


# ---------------------------------------------------------------------------
# Run engine
# ---------------------------------------------------------------------------


def _resolve_threads(config: RBConfig) -> int:
    if config.threads is not None:
        return config.threads
    env = os.environ.get("QRB_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValueError(f"QRB_THREADS must be an integer, got {env!r}") from exc
    return 1


# Enumerated groups are deterministic, so runs sharing (d, n) share one table.
_TABLE_MEMO: dict[tuple[int, int], CliffordGroupTable] = {}


def _shared_table(d: int, n: int) -> CliffordGroupTable:
    table = _TABLE_MEMO.get((d, n))
    if table is None:
        table = enumerate_group(d, n)
        if len(table) <= 1024:
            table.ensure_prod_table()
        table.inv(0)
        _TABLE_MEMO[(d, n)] = table
    return table


class _Engine:
    """Per-run immutable state shared by all length tasks (thread safe)."""

    def __init__(self, config: RBConfig):
        self.config = config
        dim = config.dim
        self.noise_super = channel_superoperator(config.noise).mat
        self.table: CliffordGroupTable | None = None
        self.steps: np.ndarray | None = None
        if clifford_group_order(config.d, config.n) <= GROUP_TABLE_LIMIT:
            self.table = _shared_table(config.d, config.n)
            stack = self.table.dense_stack()
            gates_super = np.einsum("kac,kbd->kabcd", stack.conj(), stack).reshape(
                len(self.table), dim * dim, dim * dim
            )
            self.steps = np.matmul(self.noise_super, gates_super)

        rho = projector(basis_state(dim))
        if config.spam_prep is not None:
            rho = apply_channel(config.spam_prep, rho)
        self.rho_vec = vec(rho)
        effect = projector(basis_state(dim))
        if config.spam_meas is not None:
            effect = apply_channel_adjoint(config.spam_meas, effect)
        self.effect_vec = vec(effect)

    def run_length(self, length: int) -> list[SequenceRecord]:
        config = self.config
        dim = config.dim
        k = config.num_sequences
        rngs = [sequence_rng(config.seed, length, i) for i in range(k)]
        if self.table is not None:
            idx = np.empty((k, length), dtype=np.int64)
            for i, rng in enumerate(rngs):
                idx[i] = generate_sequence(config.d, config.n, length, rng, self.table)
            states = np.broadcast_to(self.rho_vec, (k, dim * dim)).copy()
            for step in range(length):
                states = np.einsum("kab,kb->ka", self.steps[idx[:, step]], states)
            stored = [tuple(int(g) for g in row) for row in idx]
        else:
            states = np.empty((k, dim * dim), dtype=complex)
            for i, rng in enumerate(rngs):
                gates = generate_sequence(config.d, config.n, length, rng)
                v = self.rho_vec
                for t in gates:
                    u = tableau_to_dense(t)
                    v = self.noise_super @ np.kron(u.conj(), u) @ v
                states[i] = v
            stored = [None] * k
        probs = np.real(states @ self.effect_vec.conj())
        records = []
        for i, rng in enumerate(rngs):
            q = float(probs[i])
            if q < -1e-9 or q > 1.0 + 1e-9:
                raise RuntimeError(
                    f"survival probability {q} outside [0, 1] at length {length}, sequence {i}"
                )
            q = min(max(q, 0.0), 1.0)
            if config.exact:
                survival, shots = q, None
            else:
                shots = config.num_shots
                survival = float(rng.binomial(shots, q)) / shots
            records.append(
                SequenceRecord(
                    length=length, seq_index=i, survival=survival, shots=shots, gates=stored[i]
                )
            )
        return records


def run_rb(config: RBConfig) -> RBDataset:
    """Simulate the full experiment described by config.

    Length tasks are independent and may be dispatched across threads
    (config.threads, else the QRB_THREADS environment variable); results are
    byte-identical for any thread count because each sequence owns its RNG
    stream and records are assembled in length order.
    """
    engine = _Engine(config)
    lengths = config.lengths
    threads = min(_resolve_threads(config), len(lengths))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_length = list(pool.map(engine.run_length, lengths))
    else:
        per_length = [engine.run_length(j) for j in lengths]
    records = tuple(rec for batch in per_length for rec in batch)
    means = tuple(float(np.mean([rec.survival for rec in batch])) for batch in per_length)
    provenance = {
        "seed": config.seed,
        "code_version": CODE_VERSION,
        "gate_source": "table" if engine.table is not None else "tableau",
    }
    return RBDataset(
        config=config,
        lengths=lengths,
        mean_survival=means,
        records=records,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def dataset_to_json(dataset: RBDataset) -> str:
    """Versioned JSON document; deliberately carries no timestamps so repeated
    runs of the same experiment are byte-identical."""
    config = dataset.config
    doc = {
        "schema": DATASET_SCHEMA,
        "config": {
            "d": config.d,
            "n": config.n,
            "max_length": config.max_length,
            "num_sequences": config.num_sequences,
            "num_shots": None if config.exact else config.num_shots,
            "seed": config.seed,
            "exact": config.exact,
            "noise": kraus_to_json_dict(config.noise),
            "spam_prep": None if config.spam_prep is None else kraus_to_json_dict(config.spam_prep),
            "spam_meas": None if config.spam_meas is None else kraus_to_json_dict(config.spam_meas),
        },
        "provenance": dataset.provenance,
        "lengths": list(dataset.lengths),
        "mean_survival": list(dataset.mean_survival),
        "records": [
            {
                "length": rec.length,
                "seq_index": rec.seq_index,
                "survival": rec.survival,
                "shots": rec.shots,
                "gates": None if rec.gates is None else list(rec.gates),
            }
            for rec in dataset.records
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def dataset_to_csv(dataset: RBDataset) -> str:
    lines = ["length,seq_index,survival,shots"]
    for rec in dataset.records:
        shots = "" if rec.shots is None else str(rec.shots)
        lines.append(f"{rec.length},{rec.seq_index},{rec.survival!r},{shots}")
    return "\n".join(lines) + "\n"


def write_dataset(dataset: RBDataset, outdir: str | Path, stem: str = "dataset") -> tuple[Path, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    json_path = outdir / f"{stem}.json"
    csv_path = outdir / f"{stem}.csv"
    json_path.write_bytes(dataset_to_json(dataset).encode("utf-8"))
    csv_path.write_bytes(dataset_to_csv(dataset).encode("utf-8"))
    return json_path, csv_path
