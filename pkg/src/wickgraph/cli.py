"""Command-line front end.

Every subcommand prints one JSON document on stdout (or writes it to
``--out``). Exit status: 0 on success, 2 on invalid input, 3 when a size
guard or budget is tripped; errors are reported as a one-line JSON object.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import engine, mc, oracle
from .errors import GuardError, SamplingError, ValidationError
from .factor import c_general, c_graph
from .graph import Multigraph, enumerate_graphs, key_label
from .kernel import CovarianceKernel
from .poly import Polynomial
from .quad import ComponentIntegrals, QuadratureRule

EXIT_OK, EXIT_INVALID, EXIT_GUARD = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _load_json_arg(value: str, what: str):
    """Inline JSON text or a path to a JSON file."""
    text = value
    if not value.lstrip().startswith(("{", "[")):
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read {what} file {value}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} is not valid JSON: {exc}") from exc


class RunConfig:
    """Merged view of ``--config`` and inline flags (flags win)."""

    def __init__(self, args: argparse.Namespace):
        self.base_dir = None
        cfg: dict = {}
        if getattr(args, "config", None):
            cfg = _load_json_arg(args.config, "config")
            if not isinstance(cfg, dict):
                raise ValidationError("config must be a JSON object")
            if not args.config.lstrip().startswith("{"):
                self.base_dir = Path(args.config).parent
        self.raw = cfg
        self.args = args

    def _pick(self, flag: str, key: str, default=None):
        value = getattr(self.args, flag, None)
        return value if value is not None else self.raw.get(key, default)

    def polynomial(self) -> Polynomial:
        spec = getattr(self.args, "poly", None)
        data = _load_json_arg(spec, "polynomial") if spec else self.raw.get("polynomial")
        if isinstance(data, str):
            path = Path(data)
            if self.base_dir is not None and not path.is_absolute():
                path = self.base_dir / path
            data = _load_json_arg(str(path), "polynomial")
        if data is None:
            raise ValidationError("no polynomial given (use --poly or 'polynomial' in --config)")
        return Polynomial.from_json(data)

    def n(self) -> int:
        value = self._pick("n", "n")
        if value is None:
            raise ValidationError("order n missing (use --n)")
        try:
            n = int(value)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"order n must be an integer, got {value!r}") from exc
        if n < 0:
            raise ValidationError("order n must be >= 0")
        return n

    def kernel(self, required: bool = True) -> CovarianceKernel | None:
        if getattr(self.args, "grid", None):
            return CovarianceKernel.from_csv(self.args.grid)
        if getattr(self.args, "kernel", None):
            scale = self.args.scale if self.args.scale is not None else 1.0
            return CovarianceKernel.preset(self.args.kernel, scale=scale)
        spec = self.raw.get("kernel")
        if spec is None:
            if required:
                raise ValidationError("no kernel given (use --kernel, --grid or 'kernel' in --config)")
            return None
        if not isinstance(spec, dict):
            raise ValidationError("'kernel' must be an object")
        return CovarianceKernel.from_config(spec, self.base_dir)

    def rule(self) -> QuadratureRule:
        spec = dict(self.raw.get("quadrature") or {})
        for flag, key in (("quad_kind", "kind"), ("order", "order"), ("panels", "panels")):
            value = getattr(self.args, flag, None)
            if value is not None:
                spec[key] = value
        return QuadratureRule.from_config(spec)

    def budget(self) -> int:
        return int(self._pick("budget", "budget", engine.DEFAULT_BUDGET))

    def threads(self) -> int:
        default = os.environ.get("WICKGRAPH_THREADS", 1)
        try:
            return max(1, int(self._pick("threads", "threads", default)))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad thread count: {exc}") from exc

    def mc_config(self) -> mc.McConfig:
        raw = self.raw.get("mc") or {}
        samples = self._pick("samples", "samples", raw.get("samples", 100_000))
        seed = self._pick("seed", "seed", raw.get("seed", 0))
        return mc.McConfig(samples=int(samples), seed=int(seed), threads=self.threads())


def _common(p: argparse.ArgumentParser, *, poly=True, kernel=True, quad=True):
    p.add_argument("--config", help="JSON config file or inline JSON object")
    if poly:
        p.add_argument("--poly", help="polynomial JSON (inline or file path)")
        p.add_argument("--n", type=int, help="order (number of time slots)")
    if kernel:
        p.add_argument("--kernel", help="kernel preset name")
        p.add_argument("--scale", type=float, help="length scale for the exponential preset")
        p.add_argument("--grid", help="CSV file with a tabulated kernel")
    if quad:
        p.add_argument("--quad-kind", dest="quad_kind", choices=["gauss_legendre", "trapezoid"])
        p.add_argument("--order", type=int, help="quadrature points per axis (per panel)")
        p.add_argument("--panels", type=int, help="panels per axis")
    p.add_argument("--budget", type=int, help="maximum number of expansion terms")
    p.add_argument("--threads", type=int, help="worker threads (default $WICKGRAPH_THREADS or 1)")
    p.add_argument("--pretty", action="store_true", help="human-readable table instead of JSON")
    p.add_argument("--out", help="write JSON to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wickgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("evaluate", help="evaluate the time-ordered integral")
    _common(p)
    p.add_argument("--no-terms", action="store_true", help="omit the per-term listing")

    p = sub.add_parser("expand", help="symbolic graph expansion (kernel optional)")
    _common(p)
    p.add_argument("--no-aggregate", action="store_true")

    p = sub.add_parser("oracle", help="compare engine with the brute-force pairing oracle")
    _common(p)

    p = sub.add_parser("mc", help="Monte Carlo estimate next to the engine value")
    _common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("graphs", help="list multigraphs with a given degree vector")
    p.add_argument("vertices", type=int)
    p.add_argument("degrees", help="comma-separated degrees, e.g. 2,2,2")
    p.add_argument("--pretty", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("factor", help="symmetry factor of a matrix")
    p.add_argument("--matrix", required=True, help="JSON matrix M (upper triangular for C(graph))")
    p.add_argument("--degrees", help="JSON matrix A (n x l); omit for the graph factor")
    p.add_argument("--pretty", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("fk", help="partial sums of the formal exponential series")
    _common(p, poly=False)
    p.add_argument("--poly", help="polynomial JSON (inline or file path)")
    p.add_argument("--N", dest="N", type=int, required=True, help="truncation order (<= 6)")
    return parser


def _cmd_evaluate(args) -> dict:
    cfg = RunConfig(args)
    res = engine.evaluate(
        cfg.polynomial(), cfg.n(), cfg.kernel(), cfg.rule(), budget=cfg.budget(), threads=cfg.threads()
    )
    return res.to_json(include_terms=not args.no_terms)


def _cmd_expand(args) -> dict:
    cfg = RunConfig(args)
    n = cfg.n()
    terms = engine.expand_symbolic(cfg.polynomial(), n, aggregate=not args.no_aggregate, budget=cfg.budget())
    kernel = cfg.kernel(required=False)
    out: dict = {"n": n}
    integrals = None
    if kernel is not None:
        rule = cfg.rule()
        out["total"] = engine.evaluate_terms(terms, kernel, rule)
        out["kernel"] = kernel.to_config()
        out["quadrature"] = rule.to_config()
        memo = ComponentIntegrals(kernel, rule)
        integrals = {k: memo.by_key(k).value for t in terms for k, _ in t.components}
    out["terms"] = [engine.term_to_json(t, integrals) for t in terms]
    return out


def _cmd_oracle(args) -> dict:
    cfg = RunConfig(args)
    Q, n, kernel, rule = cfg.polynomial(), cfg.n(), cfg.kernel(), cfg.rule()
    eng = engine.evaluate(Q, n, kernel, rule, budget=cfg.budget(), keep_terms=False).total
    ref = oracle.time_ordered_total(Q, n, kernel, rule)
    return {"n": n, "engine": eng, "oracle": ref, "abs_diff": abs(eng - ref)}


def _cmd_mc(args) -> dict:
    cfg = RunConfig(args)
    Q, n, kernel, rule = cfg.polynomial(), cfg.n(), cfg.kernel(), cfg.rule()
    res = engine.evaluate(Q, n, kernel, rule, budget=cfg.budget(), keep_terms=False)
    est = mc.estimate(Q, n, kernel, cfg.mc_config())
    out = res.to_json(include_terms=False)
    out["mc"] = est.to_json()
    out["mc"]["seed"] = cfg.mc_config().seed
    out["mc"]["z"] = (est.mean - res.total) / est.stderr if est.stderr > 0 else None
    return out


def _parse_degrees(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"degrees must be comma-separated integers, got {text!r}") from exc


def _cmd_graphs(args) -> dict:
    degrees = _parse_degrees(args.degrees)
    gs = enumerate_graphs(args.vertices, degrees)
    return {
        "n": args.vertices,
        "degrees": degrees,
        "count": len(gs),
        "graphs": [{"text": g.to_text(), "C": c_graph(g), **g.to_json()} for g in gs],
    }


def _cmd_factor(args) -> dict:
    M = _load_json_arg(args.matrix, "matrix")
    if args.degrees:
        A = _load_json_arg(args.degrees, "degrees")
        return {"M": M, "A": A, "C": c_general(M, A)}
    g = Multigraph.from_matrix(M)
    return {"M": M, "A": list(g.degrees()), "C": c_graph(g)}


def _cmd_fk(args) -> dict:
    cfg = RunConfig(args)
    sums = engine.fk_partial_sum(cfg.polynomial(), args.N, cfg.kernel(), cfg.rule(), budget=cfg.budget())
    return {
        "note": "formal series partial sums; no convergence implied",
        "partial_sums": [{"n": p.n, "I_n": p.term, "S_n": p.partial_sum} for p in sums],
    }


COMMANDS = {
    "evaluate": _cmd_evaluate,
    "expand": _cmd_expand,
    "oracle": _cmd_oracle,
    "mc": _cmd_mc,
    "graphs": _cmd_graphs,
    "factor": _cmd_factor,
    "fk": _cmd_fk,
}


def _pretty(command: str, out: dict) -> str:
    lines = []
    if command == "graphs":
        lines.append(f"{out['count']} graphs with degrees {out['degrees']}")
        lines += [f"  C={g['C']:<6} {g['text'] or '(no edges)'}" for g in out["graphs"]]
    elif command == "fk":
        lines.append(f"{'n':>3} {'I_n':>22} {'S_n':>22}")
        lines += [f"{p['n']:>3} {p['I_n']:>22.15g} {p['S_n']:>22.15g}" for p in out["partial_sums"]]
    elif "terms" in out:
        for t in out["terms"]:
            comps = " * ".join(
                f"{key_label(c['key'].encode())}^{c['count']}" if c["count"] > 1 else key_label(c["key"].encode())
                for c in t["components"]
            )
            value = "" if t["value"] is None else f"{t['value']:.12g}"
            lines.append(f"{t['coeff_q']:>12.6g} x {t['coeff_comb']:>8}  {comps:<50} {value}")
        if "total" in out:
            lines.append(f"total = {out['total']:.15g}")
    else:
        lines += [f"{k}: {v}" for k, v in out.items()]
    return "\n".join(lines)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out = COMMANDS[args.command](args)
    except GuardError as exc:
        print(json.dumps({"error": "guard", "message": str(exc)}))
        return EXIT_GUARD
    except (ValidationError, SamplingError, ArithmeticError) as exc:
        print(json.dumps({"error": "invalid", "message": str(exc)}))
        return EXIT_INVALID
    text = _pretty(args.command, out) if args.pretty else json.dumps(out, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
