"""INI experiment descriptions.

A minimal file looks like:

    [experiment]
    d = 3
    n = 1
    max_length = 20
    num_sequences = 100
    num_shots = 500
    seed = 7
    mode = sampled

    [noise]
    kind = depolarizing
    p = 0.9

Optional [spam_prep] and [spam_meas] sections use the same channel kinds as
[noise]: depolarizing (p), over-rotation (angle, radians) and kraus-file
(path, resolved relative to the INI file, pointing at a JSON Kraus document).
Unknown sections or keys are errors, not warnings.
"""

from __future__ import annotations

import configparser
import json
from pathlib import Path

from .channels import KrausChannel, depolarizing, kraus_from_json_dict, over_rotation
from .protocol import RBConfig


class ExperimentSpecError(ValueError):
    """Malformed or inconsistent experiment file."""


_EXPERIMENT_KEYS = {"d", "n", "max_length", "num_sequences", "num_shots", "seed", "mode"}
_REQUIRED_EXPERIMENT_KEYS = {"d", "n", "max_length", "num_sequences", "mode"}
_CHANNEL_SECTIONS = ("noise", "spam_prep", "spam_meas")
_CHANNEL_KEYS = {
    "depolarizing": {"p"},
    "over-rotation": {"angle"},
    "kraus-file": {"path"},
}


def _fail(path: Path, message: str) -> ExperimentSpecError:
    return ExperimentSpecError(f"{path}: {message}")


def _get_int(section, key: str, path: Path) -> int:
    try:
        return int(section[key])
    except ValueError:
        raise _fail(path, f"[{section.name}] {key} must be an integer, got {section[key]!r}") from None


def _get_float(section, key: str, path: Path) -> float:
    try:
        return float(section[key])
    except ValueError:
        raise _fail(path, f"[{section.name}] {key} must be a number, got {section[key]!r}") from None


def _build_channel(section, dim: int, path: Path) -> KrausChannel:
    if "kind" not in section:
        raise _fail(path, f"[{section.name}] is missing the 'kind' key")
    kind = section["kind"].strip()
    if kind not in _CHANNEL_KEYS:
        choices = ", ".join(sorted(_CHANNEL_KEYS))
        raise _fail(path, f"[{section.name}] unknown channel kind {kind!r} (choices: {choices})")
    allowed = _CHANNEL_KEYS[kind] | {"kind"}
    extra = set(section.keys()) - allowed
    if extra:
        raise _fail(path, f"[{section.name}] unknown keys for kind {kind!r}: {sorted(extra)}")
    missing = _CHANNEL_KEYS[kind] - set(section.keys())
    if missing:
        raise _fail(path, f"[{section.name}] missing keys for kind {kind!r}: {sorted(missing)}")
    try:
        if kind == "depolarizing":
            return depolarizing(_get_float(section, "p", path), dim)
        if kind == "over-rotation":
            return over_rotation(dim, _get_float(section, "angle", path))
        kraus_path = Path(section["path"])
        if not kraus_path.is_absolute():
            kraus_path = path.parent / kraus_path
        try:
            obj = json.loads(kraus_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise _fail(path, f"[{section.name}] cannot read {kraus_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise _fail(path, f"[{section.name}] {kraus_path} is not valid JSON: {exc}") from exc
        ch = kraus_from_json_dict(obj)
        if ch.dim != dim:
            raise _fail(
                path,
                f"[{section.name}] Kraus dimension {ch.dim} does not match d^n = {dim}",
            )
        return ch
    except ExperimentSpecError:
        raise
    except ValueError as exc:
        raise _fail(path, f"[{section.name}] {exc}") from exc


def load_experiment(
    path: str | Path,
    seed_override: int | None = None,
    exact_override: bool = False,
    threads: int | None = None,
) -> RBConfig:
    """Parse an INI experiment file into a validated RBConfig.

    seed_override and exact_override mirror the CLI flags and take precedence
    over the file contents.
    """
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ExperimentSpecError(f"cannot read {path}: {exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ExperimentSpecError(f"{path}: {exc}") from exc

    known = {"experiment", *_CHANNEL_SECTIONS}
    extra_sections = set(parser.sections()) - known
    if extra_sections:
        raise _fail(path, f"unknown sections: {sorted(extra_sections)}")
    if "experiment" not in parser:
        raise _fail(path, "missing [experiment] section")
    if "noise" not in parser:
        raise _fail(path, "missing [noise] section")

    exp = parser["experiment"]
    extra = set(exp.keys()) - _EXPERIMENT_KEYS
    if extra:
        raise _fail(path, f"[experiment] unknown keys: {sorted(extra)}")
    missing = _REQUIRED_EXPERIMENT_KEYS - set(exp.keys())
    if missing:
        raise _fail(path, f"[experiment] missing keys: {sorted(missing)}")

    mode = exp["mode"].strip()
    if mode not in ("exact", "sampled"):
        raise _fail(path, f"[experiment] mode must be 'exact' or 'sampled', got {mode!r}")
    exact = exact_override or mode == "exact"

    d = _get_int(exp, "d", path)
    n = _get_int(exp, "n", path)
    dim = d**n
    num_shots = _get_int(exp, "num_shots", path) if "num_shots" in exp else None
    if not exact and num_shots is None:
        raise _fail(path, "[experiment] sampled mode requires num_shots")
    seed = seed_override if seed_override is not None else (
        _get_int(exp, "seed", path) if "seed" in exp else 0
    )

    channels: dict[str, KrausChannel | None] = {"spam_prep": None, "spam_meas": None}
    channels["noise"] = _build_channel(parser["noise"], dim, path)
    for name in ("spam_prep", "spam_meas"):
        if name in parser:
            channels[name] = _build_channel(parser[name], dim, path)

    try:
        return RBConfig(
            d=d,
            n=n,
            max_length=_get_int(exp, "max_length", path),
            num_sequences=_get_int(exp, "num_sequences", path),
            seed=seed,
            noise=channels["noise"],
            exact=exact,
            num_shots=None if exact else num_shots,
            spam_prep=channels["spam_prep"],
            spam_meas=channels["spam_meas"],
            threads=threads,
        )
    except ValueError as exc:
        raise _fail(path, str(exc)) from exc
