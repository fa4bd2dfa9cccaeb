"""grid-minor-lab: generate instances, run the pipeline or the expander flow,
validate certificates and export DOT."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import io
from .certificates import Certificate, expander_certificate, validate_certificate
from .config import RunConfig, desk_for, resolve
from .expander import EmbeddingError, STRATEGIES, embed_expander_in_hairy_pos
from .fixtures import make_hairy_pos
from .graph import make_path_bundle, make_pendant_grid, make_regular_host, pendant_grid_witnesses
from .pipeline import PipelineError, crossbar_or_pos

EXIT_OK, EXIT_INVALID, EXIT_PRECONDITION = 0, 2, 3
SEED_ENV = "GRIDMINOR_SEED"

log = logging.getLogger("gridminor")


class _JsonFormatter(logging.Formatter):
    def format(self, record):
        out = {"level": record.levelname.lower(), "msg": record.getMessage()}
        out.update(getattr(record, "fields", {}))
        return json.dumps(out, sort_keys=True)


class _TextFormatter(logging.Formatter):
    def format(self, record):
        extra = " ".join(f"{k}={v}" for k, v in sorted(getattr(record, "fields", {}).items()))
        return f"{record.levelname} {record.getMessage()}" + (f" ({extra})" if extra else "")


def _setup_logging(fmt: str, verbose: bool):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonFormatter() if fmt == "json" else _TextFormatter())
    root = logging.getLogger("gridminor")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    root.propagate = False


def _info(msg, **fields):
    log.info(msg, extra={"fields": fields})


def _default_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        return 0


def cmd_gen(args) -> int:
    if args.kind == "hairy":
        if not args.hairy:
            raise ValueError("--hairy is required for kind hairy")
        h = make_hairy_pos(args.length, args.kappa)
        io.write_json(args.hairy, io.hairy_to_json(h))
        if args.graph:
            io.write_json(args.graph, io.graph_to_json(h.pos.host))
        _info("wrote hairy Path-of-Sets system", length=args.length, width=args.kappa)
        return EXIT_OK
    if not args.graph or not args.sets:
        raise ValueError("--graph and --sets are required")
    P = Q = None
    if args.kind == "pendant-grid":
        G, A, B, X = make_pendant_grid(args.kappa)
        P, Q = pendant_grid_witnesses(args.kappa)
    elif args.kind == "path-bundle":
        G, A, B, X, P, Q = make_path_bundle(args.kappa, args.length, args.cross_links, args.seed)
    else:
        G, A, B, X = make_regular_host(args.kappa, args.n or 5 * args.kappa, args.seed)
    io.write_json(args.graph, io.graph_to_json(G))
    io.write_json(args.sets, io.sets_to_json(A, B, X, P, Q))
    _info("wrote instance", kind=args.kind, kappa=args.kappa, vertices=G.n(), edges=G.m())
    return EXIT_OK


def _config(args) -> RunConfig:
    cfg = desk_for(args.kappa_hint) if args.preset == "auto" else resolve(args.preset)
    cfg.seed = args.seed
    return cfg


def cmd_pipeline(args) -> int:
    G = io.graph_from_json(io.read_json(args.graph))
    A, B, X, P, Q = io.sets_from_json(io.read_json(args.sets))
    args.kappa_hint = len(A)
    cfg = _config(args)
    res = crossbar_or_pos(G, A, B, X, cfg, P, Q)
    io.write_json(args.out, res.certificate.to_json())
    _info("certificate written", kind=res.certificate.kind, case=res.stats.get("case"),
          stage=res.stats.get("stage"), out=args.out)
    return EXIT_OK


def cmd_expander(args) -> int:
    h = io.hairy_from_json(io.read_json(args.hairy))
    emb = embed_expander_in_hairy_pos(h, args.n, args.strategy, args.seed, args.cap)
    cert = expander_certificate(emb, {"strategy": args.strategy, "seed": args.seed, "cap": emb.state.cap},
                                {"iterations": emb.state.iterations, "certified": emb.state.certified})
    io.write_json(args.out, cert.to_json())
    _info("expander embedded", iterations=emb.state.iterations, certified=emb.state.certified,
          alpha=str(emb.state.expansion.alpha))
    return EXIT_OK


def _host_of(args):
    if args.graph:
        return io.graph_from_json(io.read_json(args.graph))
    if args.hairy:
        return io.hairy_from_json(io.read_json(args.hairy)).pos.host
    raise ValueError("--graph or --hairy is required")


def cmd_validate(args) -> int:
    host = _host_of(args)
    cert = Certificate.from_json(io.read_json(args.cert))
    cfg = cert.config if cert.kind != "expander" else {}
    rep = validate_certificate(cert, host, cfg.get("cap", 12), cfg.get("samples", 200), cfg.get("seed", 0))
    for clause, msg in rep.violations:
        log.error(f"{clause}: {msg}", extra={"fields": {"clause": clause}})
    _info("valid" if rep.ok else "invalid", kind=cert.kind, violations=len(rep.violations))
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_export(args) -> int:
    host = _host_of(args)
    highlight = {}
    if args.cert:
        b = Certificate.from_json(io.read_json(args.cert)).body
        if "P" in b:
            highlight = {"red": b["P"], "blue": b["Q"]}
        elif "clusters" in b:
            highlight = {"lightblue": [v for _, img in b["minor"]["vertices"] for v in img]}
        else:
            highlight = {"orange": [p for _, p in b["vertices"]], "gray": [e[3] for e in b["edges"]]}
    text = io.to_dot(host, highlight)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_config(args) -> int:
    args.kappa_hint = args.kappa
    sys.stdout.write(io.dumps(_config(args).to_json()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grid-minor-lab", description=__doc__)
    ap.add_argument("--log", choices=("text", "json"), default="text")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    g = sub.add_parser("gen", help="write a synthetic instance")
    g.add_argument("--kind", choices=("pendant-grid", "path-bundle", "regular", "hairy"), required=True)
    g.add_argument("--kappa", type=int, required=True, help="terminal count (width for hairy)")
    g.add_argument("--length", type=int, default=5, help="path length, or cluster count for hairy")
    g.add_argument("--cross-links", type=int, default=0)
    g.add_argument("--n", type=int, default=None, help="core size of a regular host")
    g.add_argument("--seed", type=int, default=seed)
    g.add_argument("--graph")
    g.add_argument("--sets")
    g.add_argument("--hairy")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("pipeline", help="run the crossbar / Path-of-Sets dichotomy")
    p.add_argument("--graph", required=True)
    p.add_argument("--sets", required=True)
    p.add_argument("--preset", default="auto", help='"auto", "desk", "desk:k=v,..." or "paper:g=N"')
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pipeline)

    e = sub.add_parser("expander", help="embed a cut-matching expander in a hairy system")
    e.add_argument("--hairy", required=True)
    e.add_argument("--n", type=int, default=None)
    e.add_argument("--strategy", choices=STRATEGIES, default="spectral")
    e.add_argument("--cap", type=int, default=None)
    e.add_argument("--seed", type=int, default=seed)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_expander)

    v = sub.add_parser("validate", help="re-check a certificate from scratch")
    v.add_argument("--graph")
    v.add_argument("--hairy")
    v.add_argument("--cert", required=True)
    v.set_defaults(func=cmd_validate)

    x = sub.add_parser("export", help="write DOT, optionally highlighting a certificate")
    x.add_argument("--graph")
    x.add_argument("--hairy")
    x.add_argument("--cert")
    x.add_argument("--out", default="-")
    x.set_defaults(func=cmd_export)

    c = sub.add_parser("config", help="print a resolved configuration")
    c.add_argument("--preset", default="desk")
    c.add_argument("--kappa", type=int, default=0)
    c.add_argument("--seed", type=int, default=seed)
    c.set_defaults(func=cmd_config)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.log, args.verbose)
    try:
        return args.func(args)
    except (PipelineError, EmbeddingError, ValueError, KeyError, OSError) as exc:
        log.error(f"precondition failure: {exc}", extra={"fields": {"error": type(exc).__name__}})
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
