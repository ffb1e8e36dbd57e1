"""Command line interface.

Subcommands:

* ``exponent``   optimal two-hop exponent, argmax, types, regime
* ``bound``      finite-blocklength converse bound for a given n
* ``bruteforce`` exact optimal protocol at tiny n, certified against the bound
* ``simulate``   Monte Carlo protocol runs at moderate n (JSONL output)
* ``sweep``      exponent over a grid of channel pairs (CSV output)
* ``replay``     re-execute a recorded run manifest and compare outputs

Every run emits a manifest recording the command, its parameters, the seed,
the tool version, wall time, and a digest of the produced output, so that
``replay`` can verify bit-for-bit reproducibility (wall time excluded).

Exit codes: 0 success, 2 input error, 3 resource cap, 4 violated
certification or replay mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .bounds import theorem3_bound
from .bruteforce import certify_theorem3
from .channel import (
    BinaryInputChannel,
    bec,
    bsc,
    noiseless,
    to_jsonable,
    validate,
    z_channel,
)
from .errors import CapExceeded, TandembitError
from .exponent import report_jsonable, two_hop_exponent
from .simulator import RelayStrategy, simulate

_LN2 = math.log(2.0)

# Fields holding quantities in nats; --bits mirrors each into "<name>_bits".
_NAT_FIELDS = {
    "e_star",
    "e1_p",
    "e1_q",
    "bound",
    "bound_per_n",
    "lhs",
    "slack",
    "pe_exponent",
}

_SWEEP_MAX_CELLS = 10_000
_SWEEP_COLUMNS = ("p", "q", "e_star", "s_star", "e1_p", "e1_q", "regime", "ambiguous")


# ---------------------------------------------------------------------------
# channel specs


def parse_channel_spec(spec: str) -> BinaryInputChannel:
    """Build a channel from a spec string.

    Accepted forms: ``bsc:P``, ``z:Q``, ``bec:E``, ``noiseless``, or a path
    to a JSON file holding either ``{"name": ..., "rows": [[...], [...]]}``
    or one of the shorthands ``{"bsc": P}``, ``{"z": Q}``, ``{"bec": E}``.
    """
    if spec == "noiseless":
        return noiseless()
    if ":" in spec:
        kind, _, raw = spec.partition(":")
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"bad channel parameter {raw!r} in spec {spec!r}") from None
        if kind == "bsc":
            return bsc(value)
        if kind == "z":
            return z_channel(value)
        if kind == "bec":
            return bec(value)
        raise ValueError(f"unknown channel kind {kind!r} in spec {spec!r}")
    path = Path(spec)
    if not path.is_file():
        raise ValueError(
            f"channel spec {spec!r} is neither a known shorthand nor a readable file"
        )
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return _channel_from_json(obj, label=path.stem)


def _channel_from_json(obj: Any, label: str) -> BinaryInputChannel:
    if not isinstance(obj, dict):
        raise ValueError("channel file must hold a JSON object")
    if "rows" in obj:
        name = obj.get("name", label)
        if not isinstance(name, str):
            raise ValueError("channel name must be a string")
        return validate(obj["rows"], label=name)
    for key, factory in (("bsc", bsc), ("z", z_channel), ("bec", bec)):
        if key in obj:
            value = obj[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"channel parameter {key!r} must be a number")
            return factory(float(value))
    raise ValueError(
        'channel file must hold "rows" or one of the shorthands "bsc", "z", "bec"'
    )


def parse_strategy_spec(spec: str) -> RelayStrategy:
    """Parse ``best-guess``, ``forward``, or ``forward:BITS``."""
    if spec == "best-guess":
        return RelayStrategy.best_guess()
    if spec == "forward":
        return RelayStrategy.forward_quantized()
    if spec.startswith("forward:"):
        raw = spec[len("forward:"):]
        if not raw or any(ch not in "01" for ch in raw):
            raise ValueError(f"forward partition must be a 0/1 string, got {raw!r}")
        return RelayStrategy.forward_quantized(tuple(int(ch) for ch in raw))
    raise ValueError(f"unknown strategy {spec!r}")


def _parse_encoder_spec(spec: str) -> tuple[str, str]:
    parts = spec.split(",")
    if len(parts) != 2:
        raise ValueError(f"encoder spec must be two comma-separated codewords, got {spec!r}")
    w0, w1 = parts
    if len(w0) != len(w1):
        raise ValueError("encoder codewords must have equal length")
    for w in (w0, w1):
        if not w or any(ch not in "01" for ch in w):
            raise ValueError(f"encoder codeword must be a nonempty 0/1 string, got {w!r}")
    return w0, w1


# ---------------------------------------------------------------------------
# output shaping


def _round12(x: float) -> float:
    # 12 significant digits, applied before hashing so replay compares
    # the exact emitted values.
    return float(f"{x:.12g}")


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        return _round12(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def _add_bits_fields(obj: Any) -> Any:
    """Mirror nat-valued fields into ``*_bits`` companions, recursively."""
    if isinstance(obj, list):
        return [_add_bits_fields(v) for v in obj]
    if not isinstance(obj, dict):
        return obj
    out: dict[str, Any] = {}
    for key, value in obj.items():
        out[key] = _add_bits_fields(value)
        if key in _NAT_FIELDS and isinstance(value, float):
            out[key + "_bits"] = _round12(value / _LN2)
    return out


def _canonical_bytes(payload: Any) -> bytes:
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode()


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _build_manifest(
    command: str,
    parameters: dict[str, Any],
    seed: int | None,
    wall_time_s: float,
    outputs: list[dict[str, str]],
) -> dict[str, Any]:
    return {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "tool_version": __version__,
        "wall_time_s": wall_time_s,
        "outputs": outputs,
    }


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_single(
    command: str,
    payload: dict[str, Any],
    parameters: dict[str, Any],
    seed: int | None,
    wall_time_s: float,
    out: str | None,
) -> None:
    target = "stdout" if out is None else out
    manifest = _build_manifest(
        command,
        parameters,
        seed,
        wall_time_s,
        [{"target": target, "sha256": _digest(_canonical_bytes(payload))}],
    )
    obj = dict(payload)
    obj["manifest"] = manifest
    _write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


# ---------------------------------------------------------------------------
# command cores (pure: params dict in, payload out; shared with replay)


def _run_exponent(params: dict[str, Any]) -> dict[str, Any]:
    p = parse_channel_spec(params["p"])
    q = parse_channel_spec(params["q"])
    report = two_hop_exponent(p, q, grid_points=params["s_grid"])
    payload = report_jsonable(report)
    payload["p"] = to_jsonable(p)
    payload["q"] = to_jsonable(q)
    payload = _round_floats(payload)
    if params["bits"]:
        payload = _add_bits_fields(payload)
    return payload


def _run_bound(params: dict[str, Any]) -> dict[str, Any]:
    p = parse_channel_spec(params["p"])
    q = parse_channel_spec(params["q"])
    n = params["n"]
    bound = theorem3_bound(n, p, q)
    report = two_hop_exponent(p, q)
    payload: dict[str, Any] = {
        "n": n,
        "e_star": report.e_star,
        "bound": bound,
        "bound_per_n": bound / n,
        "p": to_jsonable(p),
        "q": to_jsonable(q),
    }
    payload = _round_floats(payload)
    if params["bits"]:
        payload = _add_bits_fields(payload)
    return payload


def _run_bruteforce(params: dict[str, Any]) -> dict[str, Any]:
    p = parse_channel_spec(params["p"])
    q = parse_channel_spec(params["q"])
    report = certify_theorem3(p, q, params["n"], override_cap=params["override_cap"])
    payload = report.to_jsonable()
    payload["p"] = to_jsonable(p)
    payload["q"] = to_jsonable(q)
    payload = _round_floats(payload)
    if params["bits"]:
        payload = _add_bits_fields(payload)
    return payload


def _run_simulate(params: dict[str, Any]) -> list[dict[str, Any]]:
    p = parse_channel_spec(params["p"])
    q = parse_channel_spec(params["q"])
    strategy = parse_strategy_spec(params["strategy"])
    encoder = None
    if params["encoder"] is not None:
        encoder = _parse_encoder_spec(params["encoder"])
    lines = []
    for n in params["n"]:
        result = simulate(
            p,
            q,
            n,
            strategy,
            trials=params["trials"],
            seed=params["seed"],
            encoder=encoder,
        )
        line = result.to_jsonable()
        line["type"] = "sim_result"
        lines.append(_round_floats(line))
    return lines


def _run_sweep(params: dict[str, Any]) -> str:
    p_specs = params["p_specs"]
    q_specs = params["q_specs"]
    cells = len(p_specs) * len(q_specs)
    if cells == 0:
        raise ValueError("sweep grid is empty")
    if cells > _SWEEP_MAX_CELLS:
        raise CapExceeded(
            f"sweep grid has {cells} cells, cap is {_SWEEP_MAX_CELLS}", size=cells
        )
    rows = [",".join(_SWEEP_COLUMNS)]
    try:
        for p_spec in p_specs:
            p = parse_channel_spec(p_spec)
            for q_spec in q_specs:
                q = parse_channel_spec(q_spec)
                report = two_hop_exponent(p, q, grid_points=params["s_grid"])
                payload = report_jsonable(report)
                rows.append(
                    ",".join(
                        [
                            p_spec,
                            q_spec,
                            _csv_cell(payload["e_star"]),
                            _csv_cell(payload["s_star"]),
                            _csv_cell(payload["e1_p"]),
                            _csv_cell(payload["e1_q"]),
                            str(payload["regime"]),
                            str(payload["ambiguous"]).lower(),
                        ]
                    )
                )
    except KeyboardInterrupt:
        rows.append("# truncated")
        raise _SweepTruncated("\n".join(rows) + "\n") from None
    return "\n".join(rows) + "\n"


class _SweepTruncated(Exception):
    """Carries the partial CSV produced before an interrupt."""

    def __init__(self, csv_text: str):
        super().__init__("sweep interrupted")
        self.csv_text = csv_text


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{_round12(value):.12g}"
    return str(value)


# ---------------------------------------------------------------------------
# subcommand handlers


def _exponent_params(args: argparse.Namespace) -> dict[str, Any]:
    return {"p": args.p, "q": args.q, "s_grid": args.s_grid, "bits": args.bits}


def cmd_exponent(args: argparse.Namespace) -> int:
    params = _exponent_params(args)
    t0 = time.perf_counter()
    payload = _run_exponent(params)
    wall = time.perf_counter() - t0
    _emit_single("exponent", payload, params, None, wall, args.out)
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    params = {"p": args.p, "q": args.q, "n": args.n, "bits": args.bits}
    t0 = time.perf_counter()
    payload = _run_bound(params)
    wall = time.perf_counter() - t0
    _emit_single("bound", payload, params, None, wall, args.out)
    return 0


def cmd_bruteforce(args: argparse.Namespace) -> int:
    params = {
        "p": args.p,
        "q": args.q,
        "n": args.n,
        "override_cap": args.override_cap,
        "bits": args.bits,
    }
    t0 = time.perf_counter()
    payload = _run_bruteforce(params)
    wall = time.perf_counter() - t0
    _emit_single("bruteforce", payload, params, None, wall, args.out)
    return 0 if payload["ok"] else 4


def cmd_simulate(args: argparse.Namespace) -> int:
    params = {
        "p": args.p,
        "q": args.q,
        "n": args.n,
        "strategy": args.strategy,
        "encoder": args.encoder,
        "trials": args.trials,
        "seed": args.seed,
    }
    # Parse eagerly so input errors surface before any work is done.
    parse_channel_spec(args.p)
    parse_channel_spec(args.q)
    parse_strategy_spec(args.strategy)
    if args.encoder is not None:
        _parse_encoder_spec(args.encoder)

    out_lines: list[str] = []
    payload_bytes = b""
    t0 = time.perf_counter()
    truncated = False
    try:
        lines = _run_simulate(params)
    except KeyboardInterrupt:
        truncated = True
        lines = []
    for line in lines:
        chunk = _canonical_bytes(line)
        payload_bytes += chunk
        out_lines.append(chunk.decode().rstrip("\n"))
    if truncated:
        out_lines.append(json.dumps({"type": "truncated"}, separators=(",", ":")))
    wall = time.perf_counter() - t0
    target = "stdout" if args.out is None else args.out
    manifest = _build_manifest(
        "simulate",
        params,
        args.seed,
        wall,
        [{"target": target, "sha256": _digest(payload_bytes)}],
    )
    manifest_line = dict(manifest)
    manifest_line["type"] = "manifest"
    out_lines.append(json.dumps(manifest_line, sort_keys=True, separators=(",", ":")))
    _write_text("\n".join(out_lines) + "\n", args.out)
    return 130 if truncated else 0


def cmd_sweep(args: argparse.Namespace) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError("sweep config must be a JSON object")
    p_specs = config.get("p")
    q_specs = config.get("q")
    for name, specs in (("p", p_specs), ("q", q_specs)):
        if not isinstance(specs, list) or not all(isinstance(s, str) for s in specs):
            raise ValueError(f'sweep config field "{name}" must be a list of spec strings')
    s_grid = config.get("s_grid", 4097)
    if not isinstance(s_grid, int) or s_grid < 2:
        raise ValueError('sweep config field "s_grid" must be an integer >= 2')
    params = {"p_specs": p_specs, "q_specs": q_specs, "s_grid": s_grid}

    t0 = time.perf_counter()
    truncated = False
    try:
        csv_text = _run_sweep(params)
    except _SweepTruncated as exc:
        csv_text = exc.csv_text
        truncated = True
    wall = time.perf_counter() - t0
    target = "stdout" if args.out is None else args.out
    manifest = _build_manifest(
        "sweep",
        params,
        None,
        wall,
        [{"target": target, "sha256": _digest(csv_text.encode())}],
    )
    _write_text(csv_text, args.out)
    manifest_text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    if args.out is None:
        sys.stderr.write(manifest_text)
    else:
        Path(args.out + ".manifest.json").write_text(manifest_text, encoding="utf-8")
    return 130 if truncated else 0


_REPLAY_RUNNERS: dict[str, Callable[[dict[str, Any]], Any]] = {
    "exponent": _run_exponent,
    "bound": _run_bound,
    "bruteforce": _run_bruteforce,
}


def _load_manifest(path: str) -> dict[str, Any]:
    text = Path(path).read_text(encoding="utf-8")
    first = text.lstrip()[:1]
    if first == "{" and "\n{" not in text.strip():
        obj = json.loads(text)
        if "manifest" in obj:
            return obj["manifest"]
        if "command" in obj:
            return obj
        raise ValueError(f"{path} holds neither a manifest nor an output with one")
    # JSONL: the manifest is the line tagged with type "manifest".
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if isinstance(obj, dict) and obj.get("type") == "manifest":
            obj = dict(obj)
            obj.pop("type")
            return obj
    raise ValueError(f"no manifest record found in {path}")


def cmd_replay(args: argparse.Namespace) -> int:
    manifest = _load_manifest(args.manifest)
    command = manifest.get("command")
    parameters = manifest.get("parameters")
    outputs = manifest.get("outputs")
    if not isinstance(parameters, dict) or not isinstance(outputs, list) or not outputs:
        raise ValueError("manifest is missing parameters or outputs")
    expected = outputs[0].get("sha256")
    if not isinstance(expected, str):
        raise ValueError("manifest output record is missing its sha256 digest")

    if command in _REPLAY_RUNNERS:
        payload = _REPLAY_RUNNERS[command](parameters)
        actual = _digest(_canonical_bytes(payload))
    elif command == "simulate":
        lines = _run_simulate(parameters)
        actual = _digest(b"".join(_canonical_bytes(line) for line in lines))
    elif command == "sweep":
        actual = _digest(_run_sweep(parameters).encode())
    else:
        raise ValueError(f"manifest names unknown command {command!r}")

    ok = actual == expected
    result = {
        "command": command,
        "expected_sha256": expected,
        "actual_sha256": actual,
        "replay_ok": ok,
    }
    sys.stdout.write(json.dumps(result, indent=2, sort_keys=True) + "\n")
    return 0 if ok else 4


# ---------------------------------------------------------------------------
# parser


def _add_pair_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p", required=True, help="first-hop channel spec")
    sub.add_argument("--q", required=True, help="second-hop channel spec")


def _add_common_output_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", default=None, help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tandembit",
        description="Two-hop one-bit relaying: exponents, bounds, oracles, simulation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("exponent", help="optimal two-hop error exponent")
    _add_pair_args(sub)
    sub.add_argument("--s-grid", type=int, default=4097, help="grid points on [0, 1/2]")
    sub.add_argument("--bits", action="store_true", help="also report values in bits")
    _add_common_output_args(sub)
    sub.set_defaults(func=cmd_exponent)

    sub = subs.add_parser("bound", help="finite-blocklength converse bound")
    _add_pair_args(sub)
    sub.add_argument("--n", type=int, required=True, help="blocklength")
    sub.add_argument("--bits", action="store_true", help="also report values in bits")
    _add_common_output_args(sub)
    sub.set_defaults(func=cmd_bound)

    sub = subs.add_parser("bruteforce", help="exact optimal protocol at tiny n")
    _add_pair_args(sub)
    sub.add_argument("--n", type=int, required=True, help="blocklength")
    sub.add_argument(
        "--override-cap",
        action="store_true",
        help="bypass the default blocklength cap (still bounded by table size)",
    )
    sub.add_argument("--bits", action="store_true", help="also report values in bits")
    _add_common_output_args(sub)
    sub.set_defaults(func=cmd_bruteforce)

    sub = subs.add_parser("simulate", help="Monte Carlo protocol runs (JSONL)")
    _add_pair_args(sub)
    sub.add_argument(
        "--n",
        type=int,
        action="append",
        required=True,
        help="blocklength; repeat the flag for several runs",
    )
    sub.add_argument(
        "--strategy",
        default="best-guess",
        help='relay strategy: "best-guess", "forward", or "forward:BITS"',
    )
    sub.add_argument(
        "--encoder",
        default=None,
        help='codeword pair "W0,W1" (default: repetition at each n)',
    )
    sub.add_argument("--trials", type=int, default=1_000_000, help="Monte Carlo trials")
    sub.add_argument("--seed", type=int, default=0, help="PRNG seed")
    _add_common_output_args(sub)
    sub.set_defaults(func=cmd_simulate)

    sub = subs.add_parser("sweep", help="exponent over a grid of channel pairs (CSV)")
    sub.add_argument("--config", required=True, help="JSON file with spec lists p and q")
    _add_common_output_args(sub)
    sub.set_defaults(func=cmd_sweep)

    sub = subs.add_parser("replay", help="re-run a manifest and compare outputs")
    sub.add_argument("manifest", help="manifest file, or an output file embedding one")
    sub.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (TandembitError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
