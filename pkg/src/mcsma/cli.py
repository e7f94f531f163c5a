"""Command-line front end.

Exit codes: 0 success, 1 failed check, 2 input error, 3 resource cap.
Reports are JSON with an embedded run manifest; per-nu sweeps are CSV.
Set ``SOURCE_DATE_EPOCH`` to pin the manifest timestamp for byte-stable output.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import warnings
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analysis import (
    DEFAULT_NU_GRID,
    SolverError,
    UnsupportedModelError,
    analyze,
    hitting_exponent,
    mixing_bound,
    starvation_indices,
    _json_num,
)
from .conflict_graph import NetworkError, SizeCapError, network_from_dict
from .simulator import Distribution, SimConfig, simulate
from .state_space import DEFAULT_STATE_CAP, enumerate_states
from .verify import run_verify, sweep_channels
from .virtual_network import build_virtual

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class CheckFailure(Exception):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    if path.is_dir():
        for f in sorted(path.glob("*.json")):
            h.update(f.name.encode())
            h.update(f.read_bytes())
    else:
        h.update(path.read_bytes())
    return h.hexdigest()


def manifest(args, input_path: Path | None) -> dict:
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "output", "command") and not callable(v)}
    return {
        "command": args.command,
        "config": json.loads(json.dumps(config, default=str)),
        "input_sha256": _digest(input_path) if input_path is not None else None,
        "tool_version": __version__,
        "seed": getattr(args, "seed", None),
        "timestamp": _timestamp(),
    }


def _load(args):
    path = Path(args.network)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise NetworkError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise NetworkError(f"{path}: invalid JSON ({exc})") from exc
    net = network_from_dict(data, name=data.get("name", path.stem) if isinstance(data, dict) else "")
    if getattr(args, "channels", None):
        net = net.with_channels(args.channels)
    if getattr(args, "nu", None) is not None:
        net = net.with_nu(args.nu)
    return net, path


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad nu grid {text!r}") from None


def _parse_state(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad state {text!r}; expected e.g. 1,0,2") from None


def _parse_states(text: str) -> list[tuple[int, ...]]:
    return [_parse_state(part) for part in text.split(";") if part.strip()]


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(args, doc: dict):
    _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _emit_csv(args, man: dict, rows, header=("nu", "value", "log_nu_value")):
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in r])
    _emit(args, buf.getvalue())


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args):
    net, path = _load(args)
    space = enumerate_states(net, args.cap)
    rep = analyze(space, args.nu_grid, mixing=args.mixing)
    if args.emit_virtual:
        Path(args.emit_virtual).write_text(
            json.dumps(build_virtual(net).to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    doc = rep.to_dict()
    doc["num_nodes"] = net.num_nodes
    doc["num_channels"] = net.num_channels
    doc["manifest"] = manifest(args, path)
    _emit_json(args, doc)


def cmd_dominants(args):
    net, path = _load(args)
    space = enumerate_states(net, args.cap)
    _emit_json(args, {"A_C": _json_num(space.A_C),
                      "dominants": [list(x) for x in space.dominant_states()],
                      "manifest": manifest(args, path)})


def cmd_starvation(args):
    net, path = _load(args)
    space = enumerate_states(net, args.cap)
    per_node, ups = starvation_indices(space)
    _emit_json(args, {"upsilon_per_node": [_json_num(v) for v in per_node],
                      "upsilon": _json_num(ups), "manifest": manifest(args, path)})


def cmd_hitting(args):
    net, path = _load(args)
    space = enumerate_states(net, args.cap)
    doms = space.dominant_states()
    start = args.start or (doms[0] if doms else None)
    target = args.target or [d for d in doms if d != start]
    if not target:
        raise NetworkError("need a target set (only one dominant state)")
    fit = hitting_exponent(space, start, target, args.nu_grid)
    man = manifest(args, path)
    man["slope"] = fit.slope
    _emit_csv(args, man, fit.rows())


def cmd_mixing(args):
    net, path = _load(args)
    space = enumerate_states(net, args.cap)
    rep = mixing_bound(space, args.nu_grid, args.epsilon)
    if rep is None:
        raise CheckFailure("mixing bound undefined: a single dominant state",
                           {"gamma": "undefined"})
    man = manifest(args, path)
    man.update({"gamma": _json_num(rep.gamma), "bound_exponent": rep.bound_exponent,
                "conductance_exponent": rep.conductance_exponent,
                "boundary_ok": rep.boundary_ok})
    rows = [(r["nu"], r["bound"], math.log(r["bound"]) / math.log(r["nu"])) for r in rep.rows]
    _emit_csv(args, man, rows)


def cmd_simulate(args):
    net, path = _load(args)
    mode = {"exact": "exact", "event": "event"}[args.mode]
    config = SimConfig(seed=args.seed, replicas=args.replicas, horizon=args.horizon,
                       max_events=args.max_events, backoff=args.backoff, transmit=args.transmit,
                       mode=mode, record_events=bool(args.event_log))
    space = enumerate_states(net, args.cap) if mode == "exact" else None
    stats = simulate(net, config, space=space, start=args.start)
    if args.event_log:
        with open(args.event_log, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("time", "node", "channel", "kind"))
            for row in stats.event_log:
                w.writerow((repr(row[0]),) + tuple(row[1:]))
    doc = stats.to_dict()
    doc["manifest"] = manifest(args, path)
    _emit_json(args, doc)


def cmd_sweep(args):
    net, path = _load(args)
    table = sweep_channels(net, args.c_max, cap=args.cap)
    doc = {"rows": table["rows"], "findings": table["findings"],
           "errors": table["errors"], "manifest": manifest(args, path)}
    if table["errors"]:
        _emit_json(args, doc)
        raise CheckFailure("; ".join(table["errors"]), None)
    _emit_json(args, doc)


def cmd_verify(args):
    from . import corpus as corpus_mod

    root = corpus_mod.figures_dir() if args.paper_figures else (
        Path(args.corpus) if args.corpus else corpus_mod.corpus_dir())
    if not root.is_dir():
        raise NetworkError(f"{root} is not a directory")
    result = run_verify(root, cap=args.cap, hitting=args.hitting, nu_grid=args.nu_grid)
    doc = {"checks": result["checks"], "passed": result["passed"], "failed": result["failed"],
           "manifest": manifest(args, root)}
    _emit_json(args, doc)
    if result["failed"]:
        raise CheckFailure(f"{len(result['failed'])} checks failed", None)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcsma", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, network=True):
        if network:
            sp.add_argument("network", help="network JSON file")
            sp.add_argument("--channels", type=int, help="override the channel count (shared graphs)")
        sp.add_argument("--nu-grid", type=_parse_grid, default=list(DEFAULT_NU_GRID),
                        help="comma-separated activation rates (default 100,1000,10000)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP, help="state-count cap")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")

    sp = sub.add_parser("analyze", help="full asymptotic report")
    common(sp)
    sp.add_argument("--mixing", action="store_true", help="also fit the conductance exponent")
    sp.add_argument("--emit-virtual", metavar="PATH", help="write the virtual conflict graph")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("dominants", help="dominant states and A(C)")
    common(sp)
    sp.set_defaults(func=cmd_dominants)

    sp = sub.add_parser("starvation", help="per-node and network starvation indices")
    common(sp)
    sp.set_defaults(func=cmd_starvation)

    sp = sub.add_parser("hitting", help="exact hitting times over a nu grid (CSV)")
    common(sp)
    sp.add_argument("--start", type=_parse_state, help="start state, e.g. 1,0,1,0")
    sp.add_argument("--target", type=_parse_states, help="target states, e.g. '0,1,0,1;0,0,0,1'")
    sp.set_defaults(func=cmd_hitting)

    sp = sub.add_parser("mixing", help="conductance lower bound on the mixing time (CSV)")
    common(sp)
    sp.add_argument("--epsilon", type=float, default=0.25)
    sp.set_defaults(func=cmd_mixing)

    sp = sub.add_parser("simulate", help="stochastic simulation (JSON stats)")
    common(sp)
    sp.add_argument("--nu", type=float, help="activation rate (default: the file's)")
    sp.add_argument("--replicas", type=int, default=1)
    sp.add_argument("--horizon", type=float, default=1e4)
    sp.add_argument("--max-events", type=int, default=10_000_000)
    sp.add_argument("--backoff", type=Distribution.parse, default=Distribution("exp"),
                    help="exp | det | unif:a,b")
    sp.add_argument("--transmit", type=Distribution.parse, default=Distribution("exp"),
                    help="exp | det | unif:a,b")
    sp.add_argument("--mode", choices=("exact", "event"), default="exact")
    sp.add_argument("--start", type=_parse_state)
    sp.add_argument("--event-log", metavar="PATH", help="write the event log as CSV")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep-channels", help="throughput and starvation for C = 1..c_max")
    common(sp)
    sp.add_argument("--c-max", type=int, required=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run the property suites over a corpus directory")
    common(sp, network=False)
    sp.add_argument("corpus", nargs="?", help="directory of network files (default: shipped corpus)")
    sp.add_argument("--paper-figures", action="store_true",
                    help="verify the reconstructed figure networks instead")
    sp.add_argument("--hitting", action="store_true", help="include the hitting-exponent suite")
    sp.set_defaults(func=cmd_verify)
    return p


def _fail(code: int, kind: str, message: str, extra: dict | None = None) -> int:
    doc = {"error": {"type": kind, "message": message}, "exit_code": code}
    if extra:
        doc["error"].update(extra)
    sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.func(args)
    except SizeCapError as exc:
        return _fail(EXIT_CAP, "size_cap", str(exc), {"bound": exc.bound, "cap": exc.cap})
    except CheckFailure as exc:
        return _fail(EXIT_CHECK, "check_failed", str(exc), exc.payload)
    except (NetworkError, UnsupportedModelError, ValueError, KeyError) as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    except SolverError as exc:
        return _fail(EXIT_CHECK, "solver", str(exc), {"condition": exc.condition})
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
