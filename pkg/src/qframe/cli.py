"""``qframe`` command-line entry point.

Exit status: 0 on success, 1 when a request is outside an operation's
domain, 2 on usage errors. Every report echoes the master seed.
"""
from __future__ import annotations

import argparse
import csv
import difflib
import io
import json
import os
import sys

import numpy as np

from . import arithmetic, cauchy, dfs, frames, gauge
from .states import ParseError, StringRational, canonicalize, parse, value
from .superpose import ContractViolation

DOMAIN_ERRORS = (arithmetic.DomainError, ParseError, ContractViolation, gauge.SupportCapExceeded,
                 gauge.NotSU2, frames.TopologyError, frames.PathError, dfs.DecodeError,
                 dfs.PreconditionError, ValueError, OSError, KeyError)


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """Argument parser that suggests the closest known flag for a typo."""

    def _known_flags(self) -> list[str]:
        flags = []
        for action in self._actions:
            flags.extend(action.option_strings)
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    flags.extend(sub._known_flags())
        return flags

    def error(self, message: str):
        hint = ""
        if "unrecognized arguments" in message:
            bad = [w for w in message.split(":", 1)[1].split() if w.startswith("-")]
            for word in bad:
                close = difflib.get_close_matches(word.split("=")[0], self._known_flags(), n=1)
                if close:
                    hint = f" (did you mean {close[0]}?)"
                    break
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}{hint}\n")

    def parse_args(self, args=None, namespace=None):
        args, extras = self.parse_known_args(args, namespace)
        if extras:
            self.error("unrecognized arguments: " + " ".join(extras))
        return args


# -- config -----------------------------------------------------------------

def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` comments; values parsed as JSON when possible."""
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, raw = (s.strip() for s in line.split("=", 1))
            try:
                val = json.loads(raw)
            except json.JSONDecodeError:
                val = raw.strip("'\"")
            out[key.replace("-", "_")] = val
    return out


def _apply_config(parser: argparse.ArgumentParser, config: dict, top: bool = True) -> None:
    known = {a.dest for a in parser._actions}
    if not top:
        known -= set(COMMON_DESTS)
    parser.set_defaults(**{k: v for k, v in config.items() if k in known})
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                _apply_config(sub, config, top=False)


# -- output ----------------------------------------------------------------

def _plain(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return v


def emit(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for r in records:
            out.write(json.dumps(r, sort_keys=True) + "\n")
    elif fmt == "csv":
        keys = sorted({k for r in records for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow({k: _plain(r.get(k, "")) for k in keys})
        out.write(buf.getvalue())
    else:
        for i, r in enumerate(records):
            if i:
                out.write("\n")
            for k, v in r.items():
                out.write(f"{k}: {_plain(v)}\n")


# -- helpers ----------------------------------------------------------------

def _state(text: str) -> StringRational:
    return canonicalize(parse(text))


def _gauge(spec: str) -> gauge.GaugeTransform:
    """Gauge from a JSON file, a named matrix, or ``random`` (needs the seed)."""
    if spec == "identity":
        return gauge.GaugeTransform.identity()
    if spec == "hadamard":
        return gauge.GaugeTransform.global_(gauge.HADAMARD)
    return gauge.GaugeTransform.load(spec)


def _sequence(path: str) -> cauchy.StateSequence:
    with open(path) as fh:
        spec = json.load(fh)
    return cauchy.StateSequence.from_spec(spec, base_dir=os.path.dirname(os.path.abspath(path)))


def _superposition_json(psi) -> list[dict]:
    return [{"state": str(k), "re": a.real, "im": a.imag} for k, a in psi.sorted_items()]


# -- subcommands ------------------------------------------------------------

def cmd_eval(a) -> list[dict]:
    if a.action == "value":
        raw = parse(a.state)
        v = value(raw)
        return [{"state": a.state, "canonical": str(canonicalize(raw)), "value": v.decimal(),
                 "fraction": str(v.to_fraction())}]
    if a.action == "canon":
        return [{"state": a.state, "canonical": str(_state(a.state))}]
    if a.action == "accuracy":
        x = arithmetic.accuracy_state(a.ell)
        return [{"ell": a.ell, "state": str(x), "value": x.value().decimal()}]
    x, y = _state(a.x), _state(a.y)
    if a.action in arithmetic.RELATIONS:
        return [{"relation": a.action, "x": str(x), "y": str(y),
                 "holds": arithmetic.RELATIONS[a.action](x, y)}]
    if a.action == "div":
        r = arithmetic.div_A(x, y, a.ell)
    else:
        r = arithmetic.OPERATIONS[a.action](x, y)
    return [{"op": a.action, "x": str(x), "y": str(y), "result": str(r), "value": r.value().decimal()}]


def _resolve_gauge(a) -> gauge.GaugeTransform:
    if a.gauge == "random":
        return gauge.GaugeTransform.random_global(np.random.default_rng(a.seed))
    return _gauge(a.gauge)


def cmd_gauge(a) -> list[dict]:
    U = _resolve_gauge(a)
    x = _state(a.state)
    if a.action == "overlap":
        ov = gauge.overlap_after_gauge(U, x)
        return [{"state": str(x), "overlap_re": ov.real, "overlap_im": ov.imag, "abs": abs(ov)}]
    psi = gauge.apply_gauge(U, x, a.support_cap)
    return [{"state": str(x), "support": len(psi), "norm": psi.norm(),
             "terms": _superposition_json(psi)}]


def cmd_cauchy(a) -> list[dict]:
    seq = _sequence(a.seq)
    if a.action == "prob":
        if a.gauge:
            seq = seq.gauged(_resolve_gauge(a), lazy=False)
        est, rep = cauchy.prob_cauchy(seq, a.lmax, a.window, a.hmax, a.support_cap)
        out = rep.to_json()
        out["estimate"] = est
        return [out]
    if a.gauge:
        rep = cauchy.check_cauchy_gauged(seq, _resolve_gauge(a), a.lmax, a.budget, a.horizon)
    else:
        rep = cauchy.check_cauchy_basis(seq, a.lmax, a.budget, a.horizon)
    return [rep.to_json()]


def cmd_dfs(a) -> list[dict]:
    if a.action == "encode":
        psi = dfs.encode(a.bits)
        return [{"bits": a.bits, "qubits": 2 * len(a.bits), "norm": psi.norm(),
                 "terms": [{"state": k, "re": v.real, "im": v.imag} for k, v in sorted(psi.items())]}]
    if a.action == "decode":
        return [{"bits": a.bits, "decoded": dfs.decode(dfs.encode(a.bits), a.threshold)}]
    rep = dfs.check_invariance(a.mode, a.bits, a.trials, a.seed, require_paired=a.mode != "local-unpaired")
    return [{"bits": a.bits, **rep.to_json()}]


def cmd_frames(a) -> list[dict]:
    if a.action == "new":
        fld = frames.FrameField(frames.Topology.parse(a.topology, a.k),
                                ancestor_visibility=not a.allow_ancestor_views)
        fld.save(a.graph)
        return [{"graph": a.graph, "topology": str(fld.topology), "seed_frame": fld.seed.id}]
    fld = frames.FrameField.load(a.graph)
    if a.action == "spawn":
        child = fld.spawn(a.parent, _resolve_gauge(a))
        fld.save(a.graph)
        return [{"parent": a.parent, "frame": child.id, "stage": child.stage}]
    if a.action == "view":
        psi = fld.view_state(a.observer, a.owner, _state(a.state), cap=a.support_cap)
        if isinstance(psi, StringRational):
            return [{"observer": a.observer, "owner": a.owner, "terms": [{"state": str(psi), "re": 1.0, "im": 0.0}]}]
        return [{"observer": a.observer, "owner": a.owner, "terms": _superposition_json(psi)}]
    if a.action == "cycle":
        U = fld.cycle_gauge(a.frame)
        return [{"frame": a.frame, "is_identity": U.is_identity(), "fingerprint": U.fingerprint(),
                 "gauge": U.to_json()}]
    if a.dot:
        a.out.write(fld.to_dot())
        return []
    return [fld.to_json()]


# -- parser -------------------------------------------------------------------

COMMON_DESTS = ("format", "seed", "support_cap")


def _common(top: bool) -> argparse.ArgumentParser:
    # Below the top level the defaults are suppressed so that a flag given
    # before the subcommand is not reset by the subparser.
    def d(v):
        return v if top else argparse.SUPPRESS
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--format", choices=("human", "json", "csv"), default=d("human"))
    c.add_argument("--json", dest="format", action="store_const", const="json", default=d("human"),
                   help="shorthand for --format json")
    c.add_argument("--seed", type=int, default=d(0), help="master seed (echoed in every report)")
    c.add_argument("--support-cap", type=int, default=d(None),
                   help=f"largest expanded superposition (env {gauge.CAP_ENV})")
    return c


def build_parser() -> Parser:
    common = _common(top=False)
    p = Parser(prog="qframe", description="Rational string states, gauges, Cauchy checks and frames.",
               parents=[_common(top=True)])
    p.add_argument("--config", help="key = value file; flags override it")
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    ev = sub.add_parser("eval", help="values, relations and operations", parents=[common])
    evs = ev.add_subparsers(dest="action", required=True, parser_class=Parser)
    for name in ("value", "canon"):
        evs.add_parser(name, parents=[common]).add_argument("state")
    evs.add_parser("accuracy", parents=[common]).add_argument("ell", type=int)
    for name in (*arithmetic.RELATIONS, *arithmetic.OPERATIONS, "div"):
        sp = evs.add_parser(name, parents=[common])
        sp.add_argument("x")
        sp.add_argument("y")
        if name == "div":
            sp.add_argument("--ell", type=int, default=16)

    ga = sub.add_parser("gauge", help="apply gauge transformations", parents=[common])
    gas = ga.add_subparsers(dest="action", required=True, parser_class=Parser)
    for name in ("apply", "overlap"):
        sp = gas.add_parser(name, parents=[common])
        sp.add_argument("--gauge", required=True, help="JSON file, 'identity', 'hadamard' or 'random'")
        sp.add_argument("--state", required=True)

    ca = sub.add_parser("cauchy", help="Cauchy judgements", parents=[common])
    cas = ca.add_subparsers(dest="action", required=True, parser_class=Parser)
    ck = cas.add_parser("check", parents=[common])
    ck.add_argument("--budget", type=int, default=32)
    ck.add_argument("--horizon", type=int, default=None)
    pr = cas.add_parser("prob", parents=[common])
    pr.add_argument("--window", type=int, default=2)
    pr.add_argument("--hmax", type=int, default=None)
    for sp in (ck, pr):
        sp.add_argument("--seq", required=True, help="sequence description (JSON)")
        sp.add_argument("--lmax", type=int, default=8)
        sp.add_argument("--gauge", default=None)

    df = sub.add_parser("dfs", help="gauge-invariant logical qubits", parents=[common])
    dfss = df.add_subparsers(dest="action", required=True, parser_class=Parser)
    dfss.add_parser("encode", parents=[common]).add_argument("--bits", required=True)
    dd = dfss.add_parser("decode", parents=[common])
    dd.add_argument("--bits", required=True)
    dd.add_argument("--threshold", type=float, default=1e-6)
    fz = dfss.add_parser("fuzz", parents=[common])
    fz.add_argument("--bits", required=True)
    fz.add_argument("--trials", type=int, default=100)
    mode = fz.add_mutually_exclusive_group()
    mode.add_argument("--global", dest="mode", action="store_const", const="global")
    mode.add_argument("--local-paired", dest="mode", action="store_const", const="local-paired")
    mode.add_argument("--local-unpaired", dest="mode", action="store_const", const="local-unpaired")
    fz.set_defaults(mode="global")

    fr = sub.add_parser("frames", help="frame fields", parents=[common])
    frs = fr.add_subparsers(dest="action", required=True, parser_class=Parser)
    nw = frs.add_parser("new", parents=[common])
    nw.add_argument("--topology", required=True, help="finite, one-way, two-way or cyclic (or kind:k)")
    nw.add_argument("--k", type=int, default=None)
    nw.add_argument("--allow-ancestor-views", action="store_true")
    sp = frs.add_parser("spawn", parents=[common])
    sp.add_argument("--parent", required=True)
    sp.add_argument("--gauge", required=True)
    vw = frs.add_parser("view", parents=[common])
    vw.add_argument("--observer", required=True)
    vw.add_argument("--owner", required=True)
    vw.add_argument("--state", required=True)
    cy = frs.add_parser("cycle", parents=[common])
    cy.add_argument("--frame", default=frames.SEED_ID)
    ex = frs.add_parser("export", parents=[common])
    ex.add_argument("--dot", action="store_true")
    for sp in frs.choices.values():
        sp.add_argument("--graph", default="frames.json")
    return p


COMMANDS = {"eval": cmd_eval, "gauge": cmd_gauge, "cauchy": cmd_cauchy, "dfs": cmd_dfs, "frames": cmd_frames}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, read_config(known.config))
        args = parser.parse_args(argv)
    except UsageError as e:
        err.write(f"qframe: error: {e}\n")
        return 2
    except OSError as e:
        err.write(f"qframe: error: {e}\n")
        return 2
    except SystemExit as e:
        return int(e.code or 0)
    if args.support_cap is not None and args.support_cap < 1:
        err.write("qframe: error: --support-cap must be positive\n")
        return 2
    args.out = out
    try:
        records = COMMANDS[args.command](args)
    except DOMAIN_ERRORS as e:
        err.write(f"qframe: {type(e).__name__}: {e}\n")
        return 1
    for r in records:
        r["seed"] = args.seed
    emit(records, args.format, out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
