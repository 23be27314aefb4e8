"""Command line interface.

Verbs:
  run SPEC        simulate the experiment described by an INI file, fit the
                  decay, write dataset/fit artifacts and print the error rate
  verify SUITE    built-in self checks (design | counterexample | cardinality)
  enumerate D N   enumerate a Clifford group, optionally writing a cache file

Exit codes: 0 success, 1 runtime failure, 2 invalid input, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .algebra import fourier_matrix, pauli_membership, symmetric_block, weyl_operators, x_matrix
from .channels import (
    average_fidelity,
    depolarizing_superoperator,
    frame_potential,
    is_depolarizing,
    random_cptp_channel,
    twirl,
)
from .config import ExperimentSpecError, load_experiment
from .fitting import DecayFitError, error_rate_from_p, fit_decay
from .group import clifford_group_order, enumerate_group, write_group_cache
from .plotting import save_decay_plot
from .protocol import run_rb, write_dataset

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3


class VerificationFailure(Exception):
    pass


def _check(ok: bool, label: str, detail: str) -> bool:
    print(f"{'ok  ' if ok else 'FAIL'} {label}: {detail}")
    return ok


def cmd_run(args) -> int:
    config = load_experiment(
        args.spec,
        seed_override=args.seed,
        exact_override=args.exact,
        threads=args.threads,
    )
    dataset = run_rb(config)
    fit = fit_decay(dataset.lengths, dataset.mean_survival)
    r = error_rate_from_p(fit.p, config.d, config.n)

    outdir = Path(args.out)
    json_path, csv_path = write_dataset(dataset, outdir)
    fit_doc = {
        "schema": 1,
        "p": fit.p,
        "a0": fit.a0,
        "b0": fit.b0,
        "error_rate": r,
        "average_fidelity": 1.0 - r,
        "residual_rms": fit.residual_rms,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "covariance": [list(row) for row in np.asarray(fit.covariance)],
    }
    fit_path = outdir / "fit.json"
    fit_path.write_bytes((json.dumps(fit_doc, indent=2) + "\n").encode("utf-8"))
    written = [json_path, csv_path, fit_path]
    if args.emit_plot:
        written.append(save_decay_plot(outdir / "decay.svg", dataset.lengths, dataset.mean_survival, fit=fit))

    mode = "exact" if config.exact else f"sampled ({config.num_shots} shots)"
    print(f"d={config.d} n={config.n} lengths 2..{config.max_length} "
          f"k={config.num_sequences} seed={config.seed} mode={mode}")
    print(f"fitted decay: p = {fit.p:.10g}, A0 = {fit.a0:.6g}, B0 = {fit.b0:.6g} "
          f"(rms residual {fit.residual_rms:.3g}, {'converged' if fit.converged else 'not converged'})")
    for p in written:
        print(f"wrote {p}")
    print(repr(float(r)))
    return EXIT_OK


def _verify_cardinality(_args) -> bool:
    expected = {(2, 1): 24, (3, 1): 216, (5, 1): 3000}
    ok = True
    for (d, n), want in expected.items():
        table = enumerate_group(d, n, keep_dense=False)
        formula = clifford_group_order(d, n)
        ok &= _check(
            len(table) == want == formula,
            f"cardinality d={d} n={n}",
            f"enumerated {len(table)}, formula {formula}, expected {want}",
        )
    return ok


def _verify_design(args) -> bool:
    ok = True
    for d in (2, 3):
        table = enumerate_group(d, 1)
        fp = frame_potential(table.dense_stack())
        ok &= _check(abs(fp - 2.0) <= 1e-9, f"frame potential d={d} n=1", f"{fp:.12f} (want 2)")
    pauli_fp = frame_potential(weyl_operators(3))
    ok &= _check(pauli_fp > 2.0 + 1e-6, "qutrit Pauli group is not a 2-design", f"frame potential {pauli_fp:.6f} > 2")

    table = enumerate_group(3, 1)
    stack = table.dense_stack()
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    for trial in range(3):
        ch = random_cptp_channel(3, rng)
        twirled = twirl(ch, stack)
        p = (3.0 * average_fidelity(ch) - 1.0) / 2.0
        dist = float(np.linalg.norm(twirled.mat - depolarizing_superoperator(p, 3).mat))
        readoff = is_depolarizing(twirled)
        ok &= _check(
            dist <= 1e-9 and readoff is not None,
            f"twirl of random channel {trial}",
            f"Frobenius distance {dist:.3e} from depolarizing(p={p:.6f})",
        )
    return ok


def _verify_counterexample(_args) -> bool:
    h2 = fourier_matrix(2)
    block = symmetric_block(np.kron(h2, h2))
    root2 = np.sqrt(0.5)
    r_expected = 0.5 * np.array(
        [[1, np.sqrt(2), 1], [np.sqrt(2), 0, -np.sqrt(2)], [1, -np.sqrt(2), 1]]
    )
    ok = True
    np.set_printoptions(precision=6, suppress=True)
    print("symmetric block of H(x)H:")
    print(np.real_if_close(block.sym))
    ok &= _check(
        float(np.abs(block.sym - r_expected).max()) <= 1e-12,
        "symmetric block",
        f"max deviation {float(np.abs(block.sym - r_expected).max()):.3e}, "
        f"off-diagonal entries at sqrt(2)/2 = {root2:.12f}",
    )
    ok &= _check(
        abs(block.antisym + 1.0) <= 1e-12,
        "antisymmetric scalar",
        f"{block.antisym.real:.12f} (want -1)",
    )
    ok &= _check(
        block.offdiag_norm <= 1e-12,
        "subspace coupling",
        f"off-block norm {block.offdiag_norm:.3e}",
    )

    r = np.real(block.sym)
    x3 = x_matrix(3)
    conj = r @ x3 @ r.conj().T
    print("R X3 R^dag:")
    print(np.real_if_close(np.round(conj, 12)))
    member = pauli_membership(conj, 3, 1)
    ok &= _check(member is None, "R X3 R^dag membership", "absent" if member is None else f"found {member}")
    undaggered = pauli_membership(r @ x3 @ r, 3, 1)
    ok &= _check(
        undaggered is None,
        "R X3 R membership",
        "absent" if undaggered is None else f"found {undaggered}",
    )
    return ok


def cmd_verify(args) -> int:
    suites = {
        "cardinality": _verify_cardinality,
        "design": _verify_design,
        "counterexample": _verify_counterexample,
    }
    if not suites[args.suite](args):
        raise VerificationFailure(f"suite {args.suite!r} failed")
    print(f"suite {args.suite!r} passed")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    table = enumerate_group(args.d, args.n, max_size=args.max_size, keep_dense=False)
    print(f"Clifford group d={args.d} n={args.n}: {len(table)} elements")
    if args.cache is not None:
        write_group_cache(table, args.cache)
        print(f"wrote {args.cache}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditrb",
        description="Randomized benchmarking of qudit Clifford gates (simulation and fitting).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate an experiment file and fit the decay")
    p_run.add_argument("spec", help="INI experiment description")
    p_run.add_argument("--seed", type=int, default=None, help="override the seed in the file")
    p_run.add_argument("--exact", action="store_true", help="force exact survival probabilities")
    p_run.add_argument("--out", default="qrb-results", help="output directory (default: qrb-results)")
    p_run.add_argument("--emit-plot", action="store_true", help="also render decay.svg")
    p_run.add_argument("--threads", type=int, default=None, help="length-level parallelism (default: QRB_THREADS or 1)")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run a built-in verification suite")
    p_verify.add_argument("suite", choices=["design", "counterexample", "cardinality"])
    p_verify.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    p_verify.set_defaults(func=cmd_verify)

    p_enum = sub.add_parser("enumerate", help="enumerate a Clifford group")
    p_enum.add_argument("d", type=int, help="prime qudit dimension")
    p_enum.add_argument("n", type=int, help="number of qudits")
    p_enum.add_argument("--cache", default=None, help="write the group to this cache file")
    p_enum.add_argument("--max-size", type=int, default=10**6, help="refuse groups larger than this")
    p_enum.set_defaults(func=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except DecayFitError as exc:
        # A valid experiment whose data cannot be fitted is a runtime failure,
        # not a usage error, even though DecayFitError is a ValueError.
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ExperimentSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
