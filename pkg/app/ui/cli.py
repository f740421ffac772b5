"""
Command-line front end: one subcommand per computation or verification
"""
import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from app import __version__, config
from app.config import RunConfig
from app.errors import ResourceGuardError, StabringError, UsageError, VerificationError
from app.services.agor_service import almost_gorenstein_verdict, check_hibi_tsuchiya, decompose_r0
from app.services.ehrhart_service import (
    a_invariant,
    ehrhart_counts,
    ehrhart_polynomial,
    hstar_from_counts,
    normalized_volume,
    reciprocity_check,
)
from app.services.graph_service import (
    Graph,
    is_gorenstein_perfect,
    is_gorenstein_tperfect,
    load_graph,
    make_cycle,
)
from app.services.lattice_service import InequalitySystem, LatticeVector, enumerate_level
from app.services.trace_service import in_trace, verify_locus_theorem
from app.services.worker_pool import WorkerPool

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_GUARD = 2
EXIT_USAGE = 64

ENUMERATE_MAX_VERTICES = 20


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _graph_flags(p: argparse.ArgumentParser):
    source = p.add_mutually_exclusive_group()
    source.add_argument("--cycle", type=int, metavar="N", help="built-in cycle C_N")
    source.add_argument("--graph", dest="graph_path", metavar="PATH", help="graph JSON file")


def _output_flags(p: argparse.ArgumentParser):
    p.add_argument("--format", dest="output_format", choices=config.OUTPUT_FORMATS)
    p.add_argument("--jobs", type=int, metavar="W")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stabring",
                     description="Ehrhart and canonical-module invariants of stable set polytopes")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("hstar", help="L(t), interior counts, h*-vector and a-invariant")
    _graph_flags(p)
    p.add_argument("--max-dilation", type=int, metavar="T")
    _output_flags(p)

    p = sub.add_parser("enumerate", help="degree-d slice of U^(n)")
    _graph_flags(p)
    p.add_argument("--level", type=int, required=True, metavar="n")
    p.add_argument("--degree", type=int, required=True, metavar="d")
    _output_flags(p)

    p = sub.add_parser("verify", help="run a verification pipeline")
    p.add_argument("target", choices=("locus", "agor", "ht", "gorenstein"))
    _graph_flags(p)
    p.add_argument("--ell", type=int, metavar="L")
    p.add_argument("--max-degree", type=int, metavar="D")
    p.add_argument("--max-dilation", type=int, metavar="T")
    _output_flags(p)

    p = sub.add_parser("decompose", help="write a face-subring point as a sum of mu_i")
    _graph_flags(p)
    p.add_argument("--ell", type=int, metavar="L")
    p.add_argument("--vector", required=True, metavar="JSON", help='{"deg": d, "v": [...]}')
    _output_flags(p)

    p = sub.add_parser("trace-member", help="decide membership in the trace of the canonical ideal")
    _graph_flags(p)
    p.add_argument("--vector", required=True, metavar="JSON", help='{"deg": d, "v": [...]}')
    _output_flags(p)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    keys = ("cycle", "graph_path", "ell", "level", "degree", "max_degree",
            "max_dilation", "output_format", "jobs")
    return RunConfig.from_mapping({k: getattr(args, k, None) for k in keys})


def _graph(cfg: RunConfig) -> Graph:
    cfg.require_graph()
    if cfg.cycle is not None:
        return make_cycle(cfg.cycle)
    return load_graph(cfg.graph_path)


def _ell(cfg: RunConfig) -> int:
    if cfg.ell is not None:
        if cfg.cycle is not None and cfg.cycle != 2 * cfg.ell + 1:
            raise UsageError(f"--ell {cfg.ell} does not match --cycle {cfg.cycle}")
        return cfg.ell
    if cfg.cycle is not None and cfg.cycle % 2 == 1:
        return (cfg.cycle - 1) // 2
    raise UsageError("an odd cycle is required: --ell L or --cycle 2L+1")


def _vector(raw: str, n: int) -> LatticeVector:
    try:
        data = json.loads(raw)
        mu = LatticeVector.from_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise UsageError(f"--vector must be JSON like {{\"deg\": 3, \"v\": [...]}}: {e}")
    if mu.n != n:
        raise UsageError(f"--vector has {mu.n} values, graph has {n} vertices")
    return mu


def json_safe(value: Any) -> Any:
    """Integers outside the 53-bit range become decimal strings"""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value) if abs(value) >= config.JSON_SAFE_INT else value
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    return value


def _table_text(header: List[str], rows: List[List[Any]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue().rstrip("\n")
    return "\n".join(" ".join(str(x) for x in row) for row in [header] + rows)


def emit(payload: Dict, fmt: str, table: Optional[tuple] = None):
    """Print a report; csv and text need a flat table"""
    if fmt == "json":
        print(json.dumps(json_safe(payload)))
        return
    if table is not None:
        print(_table_text(*table, fmt))
        return
    if fmt == "csv":
        raise UsageError("csv output is only available for flat tables (hstar, enumerate)")
    for key, value in payload.items():
        print(f"{key}: {json.dumps(json_safe(value))}")


def cmd_hstar(cfg: RunConfig, pool: WorkerPool) -> int:
    g = _graph(cfg)
    d = g.n
    horizon = max(d + 1, cfg.max_dilation or 0)
    counts = ehrhart_counts(g, horizon, cell_limit=cfg.cell_limit, pool=pool)
    h = hstar_from_counts(counts.closed, d)
    reciprocity = reciprocity_check(g, horizon, counts=counts)
    if not reciprocity.passed:
        raise VerificationError(f"Ehrhart reciprocity fails at t = {reciprocity.first_failure}",
                                dict(counts.to_dict(), t=reciprocity.first_failure))
    payload = {
        "L": list(counts.closed[:d + 1]),
        "Linterior": list(counts.interior[:d + 1]),
        "hstar": h.to_list(),
        "a_invariant": a_invariant(g, counts),
        "s": h.s,
        "normalized_volume": normalized_volume(ehrhart_polynomial(counts.closed, d), d),
        "reciprocity": "pass",
    }
    rows = [[t, counts.closed[t], counts.interior[t], h[t] if t < len(h) else 0] for t in range(d + 1)]
    emit(payload, cfg.output_format, (["t", "L", "Linterior", "hstar"], rows))
    return EXIT_OK


def cmd_enumerate(cfg: RunConfig, pool: WorkerPool) -> int:
    g = _graph(cfg)
    if g.n > ENUMERATE_MAX_VERTICES:
        raise UsageError(f"enumeration is limited to {ENUMERATE_MAX_VERTICES} vertices")
    sys_ = InequalitySystem.for_graph(g, cfg.level)
    vectors = enumerate_level(sys_, cfg.degree, cell_limit=cfg.cell_limit, pool=pool)
    payload = {"level": cfg.level, "degree": cfg.degree, "count": len(vectors),
               "vectors": [mu.to_dict() for mu in vectors]}
    header = ["deg"] + list(g.vertices)
    rows = [[mu.degree] + list(mu.values) for mu in vectors]
    emit(payload, cfg.output_format, (header, rows))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, target: str, pool: WorkerPool) -> int:
    if target == "gorenstein":
        g = _graph(cfg)
        counts = ehrhart_counts(g, g.n, cell_limit=cfg.cell_limit, pool=pool)
        palindromic = hstar_from_counts(counts.closed, g.n).is_palindromic()
        verdict = is_gorenstein_tperfect(g)
        payload = {
            "gorenstein": verdict.gorenstein,
            "criterion": verdict.criterion,
            "hstar_palindromic": palindromic,
            "equal_maximal_cliques": is_gorenstein_perfect(g),
        }
        emit(payload, cfg.output_format)
        return EXIT_OK if verdict.gorenstein == palindromic else EXIT_FAIL

    ell = _ell(cfg)
    if target == "locus":
        report = verify_locus_theorem(ell, cfg.max_degree, cell_limit=cfg.cell_limit, pool=pool)
        emit(report.to_dict(), cfg.output_format)
        return EXIT_OK if report.passed else EXIT_FAIL
    if target == "ht":
        report = check_hibi_tsuchiya(ell, cfg.max_dilation, pool=pool)
        emit(report.to_dict(), cfg.output_format)
        return EXIT_OK if report.passed and report.series_identity else EXIT_FAIL
    verdict = almost_gorenstein_verdict(ell, cfg.max_degree, cell_limit=cfg.cell_limit, pool=pool)
    emit(verdict.to_dict(), cfg.output_format)
    ok = verdict.almost_gorenstein and verdict.ht.passed and verdict.ht.series_identity
    return EXIT_OK if ok else EXIT_FAIL


def cmd_decompose(cfg: RunConfig, raw_vector: str) -> int:
    ell = _ell(cfg)
    mu = _vector(raw_vector, 2 * ell + 1)
    indices = decompose_r0(mu, ell)
    emit({"mu": mu.to_dict(), "indices": indices}, cfg.output_format)
    return EXIT_OK


def cmd_trace_member(cfg: RunConfig, raw_vector: str) -> int:
    g = _graph(cfg)
    mu = _vector(raw_vector, g.n)
    member, witness = in_trace(mu, g, cfg.cell_limit)
    payload = {"mu": mu.to_dict(), "member": member, "witness": None}
    if witness is not None:
        payload["witness"] = {"eta": witness[0].to_dict(), "zeta": witness[1].to_dict()}
    emit(payload, cfg.output_format)
    return EXIT_OK


def _dispatch(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    with WorkerPool(cfg.jobs) as pool:
        if args.command == "hstar":
            return cmd_hstar(cfg, pool)
        if args.command == "enumerate":
            return cmd_enumerate(cfg, pool)
        if args.command == "verify":
            return cmd_verify(cfg, args.target, pool)
        if args.command == "decompose":
            return cmd_decompose(cfg, args.vector)
        return cmd_trace_member(cfg, args.vector)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command

    Args:
        argv: Arguments without the program name

    Returns:
        Exit code: 0 ok, 1 failed check, 2 resource guard, 64 usage error
    """
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except VerificationError as e:
        logger.error(f"❌ {e}")
        print(json.dumps(json_safe({"status": "fail", "error": str(e), "counterexample": e.counterexample})))
        return EXIT_FAIL
    except ResourceGuardError as e:
        logger.error(f"❌ {e}")
        print(f"resource guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ValueError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StabringError as e:
        logger.exception(f"❌ {e}")
        return e.exit_code
