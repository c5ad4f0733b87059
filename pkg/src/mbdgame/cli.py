"""Command-line front end: ``mbd <command> <graph> [options]``.

Exit status: 0 success, 1 a claim or check failed, 2 usage or parse error,
3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import bounds, solver, strategies
from .engine import Player
from .errors import MBDError, ParseError, ResourceLimit
from .graph import Graph, bits, load_graph, mask_of
from .solver import Budget, Solver, count_to_json, format_count

COMMANDS = ("solve", "outcome", "verify-paper", "pairing", "cover", "dominate", "certificate")
BOUNDED_MODE_ORDER = 18

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    max_nodes: Optional[int] = None
    max_table_entries: Optional[int] = None
    wall_clock_ms: Optional[int] = None
    threads: int = 1
    output_format: str = "text"
    depth_cap: Optional[int] = None
    filter: Optional[str] = None
    anchor: list = field(default_factory=list)
    staller: list = field(default_factory=list)
    certificate_file: Optional[str] = None
    invariant: str = "gmb"
    timing: bool = True

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        for name in ("max_nodes", "max_table_entries", "wall_clock_ms", "depth_cap"):
            val = getattr(self, name)
            if val is not None and val < 1:
                raise ValueError(f"{name} must be positive")

    def budget(self) -> Budget:
        b = Budget(max_nodes=self.max_nodes)
        if self.max_table_entries is not None:
            b.max_table_entries = self.max_table_entries
        if self.wall_clock_ms is not None:
            b.wall_clock = self.wall_clock_ms / 1000
        return b


def _vertices(g: Graph, items: list) -> int:
    out = []
    for item in items:
        for tok in str(item).split():
            out.append(int(tok) if tok.isdigit() else g.index(tok))
    return mask_of(out)


def _emit(cfg: RunConfig, payload: dict, text: str) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) if cfg.output_format == "json" else text


def _solve(cfg: RunConfig, g: Graph) -> tuple[int, str]:
    s = Solver(g, cfg.budget(), cfg.threads)
    if cfg.depth_cap is not None and g.order > BOUNDED_MODE_ORDER:
        payload = {"mode": "bounded", "depth_cap": cfg.depth_cap}
        for name, first in (("gsmb", Player.DOMINATOR), ("gsmb_prime", Player.STALLER)):
            k = s.staller_bounded(first, cfg.depth_cap)
            payload[name] = k if k is not None else "unknown"
        payload["nodes_explored"] = s.nodes
        text = "\n".join(f"{k}: {v}" for k, v in payload.items())
        return EXIT_OK, _emit(cfg, payload, text)
    report = s.solve()
    payload = report.to_dict(timing=cfg.timing)
    lines = [f"outcome: {report.outcome.value}"]
    lines += [f"{k}: {format_count(v)}" for k, v in report.values().items()]
    lines.append(f"nodes_explored: {report.nodes_explored}")
    if cfg.timing:
        lines.append(f"elapsed_ms: {payload['elapsed_ms']}")
    return EXIT_OK, _emit(cfg, payload, "\n".join(lines))


def _pairing(cfg: RunConfig, g: Graph) -> tuple[int, str]:
    if cfg.certificate_file:
        with open(cfg.certificate_file, encoding="utf-8") as fh:
            cert = strategies.PairingCertificate.parse(fh.read())
    else:
        x, y = _vertices(g, cfg.anchor), _vertices(g, cfg.staller)
        cert = strategies.find_pairing(g, x, y)
        if cert is None:
            payload = {"found": False}
            return EXIT_FAIL, _emit(cfg, payload, "no pairing certificate exists")
    try:
        bound = strategies.pairing_playout(g, cert)
    except MBDError as exc:
        payload = {"valid": False, "error": str(exc)}
        return EXIT_FAIL, _emit(cfg, payload, f"invalid certificate: {exc}")
    payload = {"valid": True, "bound": bound, "anchor": list(bits(cert.anchor_set)),
               "staller": list(bits(cert.context_staller)),
               "pairs": [list(p) for p in cert.matching]}
    text = cert.serialize() + f"# valid; Dominator wins within {bound} moves"
    return EXIT_OK, _emit(cfg, payload, text)


def _cover(cfg: RunConfig, g: Graph) -> tuple[int, str]:
    method = "both" if g.order <= strategies.CONDITION_LIMIT else "search"
    exists = strategies.has_nontrivial_path_cover(g, method)
    witness = strategies.find_nontrivial_path_cover(g) if exists else None
    payload = {"nontrivial_path_cover": exists,
               "paths": witness.paths if witness else None}
    text = f"nontrivial path cover: {'yes' if exists else 'no'}"
    if witness:
        text += "\n" + "\n".join(" - ".join(g.labels[v] for v in p) for p in witness.paths)
    return EXIT_OK, _emit(cfg, payload, text)


def _certificate(cfg: RunConfig, g: Graph) -> tuple[int, str]:
    s = Solver(g, cfg.budget(), cfg.threads)
    cert = solver.extract_certificate(g, cfg.invariant, s)
    ok = solver.verify_certificate(g, cert)
    payload = {"invariant": cfg.invariant, "verified": ok,
               "claimed_value": count_to_json(cert.claimed_value),
               "entries": len(cert.move_table)}
    if cfg.certificate_file:
        with open(cfg.certificate_file, "w", encoding="utf-8") as fh:
            json.dump(cert.to_json(), fh)
    else:
        payload["certificate"] = cert.to_json()
    text = (f"{cfg.invariant} = {format_count(cert.claimed_value)}; "
            f"{len(cert.move_table)} table entries; verified: {ok}")
    return (EXIT_OK if ok else EXIT_FAIL), _emit(cfg, payload, text)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, report text)."""
    try:
        if cfg.command == "verify-paper":
            results = bounds.verify_claims(cfg.filter, cfg.budget(), cfg.threads)
            failed = any(r.status == "fail" for r in results)
            if cfg.output_format == "json":
                text = bounds.claims_json(results)
            else:
                counts = {st: sum(r.status == st for r in results)
                          for st in ("pass", "fail", "skipped")}
                text = "\n".join([r.line() for r in results] +
                                 [f"{counts['pass']} passed, {counts['fail']} failed, "
                                  f"{counts['skipped']} skipped"])
            return (EXIT_FAIL if failed else EXIT_OK), text
        if not cfg.input:
            return EXIT_USAGE, "error: a graph input is required"
        g = load_graph(cfg.input)
        if cfg.command == "solve":
            return _solve(cfg, g)
        if cfg.command == "outcome":
            o = Solver(g, cfg.budget(), cfg.threads).solve_outcome()
            return EXIT_OK, _emit(cfg, {"outcome": o.value}, o.value)
        if cfg.command == "dominate":
            gamma = bounds.domination_number(g, cfg.max_nodes)
            return EXIT_OK, _emit(cfg, {"gamma": gamma}, str(gamma))
        if cfg.command == "pairing":
            return _pairing(cfg, g)
        if cfg.command == "cover":
            return _cover(cfg, g)
        return _certificate(cfg, g)
    except ResourceLimit as exc:
        partial = {k: (list(map(count_to_json, v)) if isinstance(v, tuple)
                       else count_to_json(v)) for k, v in exc.partial.items()}
        payload = {"error": "budget exhausted", "message": str(exc), "partial": partial}
        text = f"budget exhausted: {exc}\npartial: {partial}"
        return EXIT_BUDGET, _emit(cfg, payload, text)
    except (ParseError, OSError) as exc:
        return EXIT_USAGE, f"error: {exc}"
    except MBDError as exc:
        return EXIT_USAGE, f"error: {exc}"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mbd", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("graph", nargs="?", help="edge-list file or 'gen: <expr>'")
    p.add_argument("--input", help="same as the positional graph argument")
    p.add_argument("--budget-nodes", type=int, dest="max_nodes")
    p.add_argument("--budget-ms", type=int, dest="wall_clock_ms")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.add_argument("--depth-cap", type=int)
    p.add_argument("--filter")
    p.add_argument("--anchor", action="append", default=[],
                   help="Dominator's claimed vertices (indices or labels)")
    p.add_argument("--staller", action="append", default=[],
                   help="Staller's claimed vertices (indices or labels)")
    p.add_argument("--certificate-file",
                   help="pairing: certificate to validate; certificate: where to write")
    p.add_argument("--invariant", choices=solver.INVARIANTS, default="gmb")
    p.add_argument("--no-timing", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    table = os.environ.get("MBD_TABLE_ENTRIES")
    try:
        cfg = RunConfig(
            command=args.command, input=args.input or args.graph,
            max_nodes=args.max_nodes, wall_clock_ms=args.wall_clock_ms,
            max_table_entries=int(table) if table else None,
            threads=args.threads, output_format="json" if args.json else "text",
            depth_cap=args.depth_cap, filter=args.filter, anchor=args.anchor,
            staller=args.staller, certificate_file=args.certificate_file,
            invariant=args.invariant, timing=not args.no_timing,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status, text = run(cfg)
    stream = sys.stderr if status == EXIT_USAGE else sys.stdout
    print(text, file=stream)
    return status


if __name__ == "__main__":
    sys.exit(main())
