"""Command-line interface.

Every analysis writes a JSON report (``-o PATH``; ``-o -`` sends it to
standard output in place of the summary) and prints a short human summary.
Reports embed the tool version, the full configuration and every seed, and
are serialized with sorted keys so a repeated command reproduces them byte
for byte.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import sys
from pathlib import Path

from . import __version__
from .fixtures import FIXTURES, fixture_path, load_fixture
from .grammar import NoiseSpec, hg_winners, load_weights, me_distribution, shg_estimate
from .phonology import FinnishDefinitions
from .phonology.finnish import FLAT_READINGS, HX_READINGS, PKPROM_READINGS
from .phonology.harmony import INTERVENER_READINGS
from .tableau import (MappingId, Tableau, TableauError, parse_tableau, parse_tsv,
                      serialize_tableau, serialize_tsv, validate)
from .typology import (hg_equivalent, me_equiprobable, me_uniform_leq_necessary, shg_equiprobable,
                       shg_uniform_leq, torder)
from .verify import (DomainError, SweepSpec, WORKERS_ENV, find_me_counterexample, me_check_torder,
                     mc_validate_torder, sweep_compare)

PROG = "equiprob"
FIXTURE_PREFIX = "fixture:"


class CliError(Exception):
    """A user-facing error; reported on stderr with exit status 2."""


# -- input -----------------------------------------------------------------------

def read_source(spec: str) -> tuple[bytes, str]:
    """Raw bytes of a tableau argument and a label for the report."""
    if spec.startswith(FIXTURE_PREFIX):
        name = spec[len(FIXTURE_PREFIX):]
        if name not in FIXTURES:
            raise CliError(f"unknown fixture {name!r}; bundled fixtures: {', '.join(sorted(FIXTURES))}")
        return fixture_path(name).read_bytes(), spec
    if spec == "-":
        return sys.stdin.buffer.read(), "<stdin>"
    try:
        return Path(spec).read_bytes(), spec
    except OSError as exc:
        raise CliError(f"cannot read {spec}: {exc.strerror or exc}") from None


def decode_tableau(raw: bytes, fmt: str) -> Tableau:
    if fmt == "auto":
        fmt = "json" if raw.lstrip()[:1] == b"{" else "tsv"
    if fmt == "json":
        return parse_tableau(raw)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CliError(f"TSV input is not UTF-8: {exc}") from None
    return parse_tsv(text)


def load_input(args) -> tuple[Tableau, dict]:
    raw, label = read_source(args.tableau)
    t = decode_tableau(raw, args.format)
    return t, {"source": label, "sha256": hashlib.sha256(raw).hexdigest()}


def split_list(values) -> list[str]:
    out = []
    for v in values or ():
        out.extend(x.strip() for x in v.split(",") if x.strip())
    return out


def selected_mappings(t: Tableau, args) -> list[MappingId]:
    """Mappings named by ``--mapping``, else every mapping of the ``--ur`` inputs, else all."""
    if args.mapping:
        out = [MappingId.parse(m) for m in args.mapping]
        for m in out:
            t.resolve(m)
        return out
    urs = split_list(args.ur)
    if urs:
        for ur in urs:
            t.input(ur)
        wanted = set(urs)
        return [m for m in t.mappings() if m.ur in wanted]
    return t.mappings()


def parse_pairs(t: Tableau, args) -> list[tuple[MappingId, MappingId]] | None:
    if not args.pair:
        return None
    out = []
    for a, b in args.pair:
        ma, mb = MappingId.parse(a), MappingId.parse(b)
        t.resolve(ma)
        t.resolve(mb)
        out.append((ma, mb))
    return out


def sweep_spec(args) -> SweepSpec:
    grid = None
    if args.grid:
        try:
            grid = json.loads(Path(args.grid).read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliError(f"cannot read grid {args.grid}: {exc.strerror or exc}") from None
        except json.JSONDecodeError as exc:
            raise CliError(f"grid {args.grid} is not JSON: {exc}") from None
        if not isinstance(grid, list) or not all(isinstance(a, list) for a in grid):
            raise CliError("grid must be a JSON list of per-constraint value lists")
        grid = tuple(tuple(float(x) for x in axis) for axis in grid)
    return SweepSpec(
        grid=grid, count=args.count, max_weight=args.max_weight, sparsity=args.sparsity,
        seed=args.seed, frameworks=tuple(split_list([args.frameworks])) or ("me", "shg"),
        noise=NoiseSpec(sigma=args.sigma, clip=args.clip), trials=args.trials,
        consistent_se=args.consistent_se, different_se=args.different_se,
        me_gap=args.me_gap, me_tolerance=args.me_tolerance,
    )


# -- output ----------------------------------------------------------------------

def config_echo(args) -> dict:
    # destinations and parallelism never change a result, so they stay out of the echo
    skip = {"func", "workers", "output", "dot", "plot_data"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=True) + "\n"


def write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}") from None


def emit(args, tableau_info: dict | None, result: dict, summary: list[str]) -> None:
    report = {"tool": PROG, "version": __version__, "command": args.command,
              "config": config_echo(args), "input": tableau_info, "result": result}
    out = getattr(args, "output", None)
    if out:
        write_text(out, dumps(report))
    if out != "-":
        sys.stdout.write("\n".join(summary) + "\n")


def write_plot_data(path: str, rows: list[dict]) -> None:
    buf = io.StringIO()
    if rows:
        fields = list(rows[0])
        writer = csv.DictWriter(buf, fieldnames=fields, delimiter="\t", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                             for k, v in row.items()})
    write_text(path, buf.getvalue())


def fmt_float(x) -> str:
    return "n/a" if x is None else f"{x:.6g}"


# -- analyze ---------------------------------------------------------------------

ANALYZE_FRAMEWORKS = {
    "torder": ("shg", "me-necessary"),
    "equiprob": ("shg", "me", "hg"),
    "uniform-leq": ("shg", "me-necessary"),
}


def cmd_analyze(args) -> int:
    allowed = ANALYZE_FRAMEWORKS[args.relation]
    if args.framework not in allowed:
        raise CliError(f"--relation {args.relation} supports --framework {' or '.join(allowed)}")
    t, info = load_input(args)
    notes = t.metadata.get("annotations", {}) if isinstance(t.metadata, dict) else {}
    status = 0
    if args.relation == "torder":
        mappings = selected_mappings(t, args)
        graph = torder(t, args.framework, mappings)
        result = graph.to_json()
        result["annotations"] = {str(m): notes[str(m)] for m in mappings if str(m) in notes}
        summary = [f"{args.framework} T-order over {len(mappings)} mappings: "
                   f"{len(graph.blocks)} blocks, {len(graph.edges)} edges"]
        if args.framework == "me-necessary":
            summary.append("edges pass the necessary hull condition only")
        for i, block in enumerate(graph.blocks):
            summary.append(f"  [{i}]")
            for m in block:
                tag = f"  ({notes[str(m)]})" if str(m) in notes else ""
                summary.append(f"      {m}{tag}")
        for i, j in graph.edges:
            summary.append(f"  [{i}] <= [{j}]")
        if args.dot:
            write_text(args.dot, graph.to_dot())
        if args.confirm:
            spec = sweep_spec(args)
            if args.framework == "shg":
                rep = mc_validate_torder(t, graph, spec.noise, spec.trials, spec, workers=args.workers)
            else:
                rep = me_check_torder(t, graph, spec)
            result["confirmation"] = rep.to_json()
            summary.append(f"numeric confirmation: {rep.checked} checks, "
                           f"{len(rep.violations)} violations")
            if rep.violations:
                status = 1
    else:
        pairs = parse_pairs(t, args)
        if pairs is None:
            ms = selected_mappings(t, args)
            pairs = (list(itertools.combinations(ms, 2)) if args.relation == "equiprob"
                     else list(itertools.permutations(ms, 2)))
        verdicts = []
        summary = []
        for a, b in pairs:
            if args.relation == "equiprob":
                fn = {"shg": shg_equiprobable, "me": me_equiprobable, "hg": hg_equivalent}[args.framework]
                v = fn(t, a, b)
                summary.append(f"{'equal    ' if v.equal else 'not equal'}  {a}  ~  {b}")
            else:
                fn = shg_uniform_leq if args.framework == "shg" else me_uniform_leq_necessary
                v = fn(t, a, b)
                word = "holds" if v.holds else "fails"
                if v.holds and not v.exact:
                    word = "passes (necessary condition)"
                summary.append(f"{word:>9}  P({a}) <= P({b})")
            verdicts.append(v.to_json())
        result = {"relation": args.relation, "framework": args.framework, "verdicts": verdicts}
        summary.insert(0, f"{args.framework} {args.relation}: {len(pairs)} pairs")
    emit(args, info, result, summary)
    return status


# -- eval ------------------------------------------------------------------------

def cmd_eval(args) -> int:
    t, info = load_input(args)
    if args.weights is None:
        raise CliError("eval needs --weights FILE")
    try:
        text = Path(args.weights).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read weights {args.weights}: {exc.strerror or exc}") from None
    w = load_weights(text, t.constraints)
    urs = split_list(args.input) or [e.ur for e in t.inputs]
    noise = NoiseSpec(sigma=args.sigma, clip=args.clip)
    result = {"framework": args.framework, "weights": dict(zip(t.constraints.names, w)),
              "inputs": {}}
    summary = [f"{args.framework} at w = ({', '.join(fmt_float(x) for x in w)})"]
    for ur in urs:
        entry = t.input(ur)
        summary.append(f"/{ur}/")
        if args.framework == "me":
            dist = me_distribution(w, entry)
            result["inputs"][ur] = dist
            summary += [f"  {p:.6f}  {sr}" for sr, p in dist.items()]
        elif args.framework == "hg":
            winners = hg_winners(w, entry)
            result["inputs"][ur] = sorted(winners)
            summary += [f"  {'winner' if c.sr in winners else '      '}  {c.sr}" for c in entry.candidates]
        else:
            est = shg_estimate(w, entry, noise, args.trials, args.seed, ("eval",))
            result["inputs"][ur] = {sr: e.to_json() for sr, e in est.items()}
            summary += [f"  {e.point:.6f} +- {e.standard_error:.2g}  {sr}" for sr, e in est.items()]
    emit(args, info, result, summary)
    return 0


# -- verify ----------------------------------------------------------------------

def cmd_verify(args) -> int:
    t, info = load_input(args)
    spec = sweep_spec(args)
    summary = []
    status = 0
    if args.mode == "sweep":
        pairs = parse_pairs(t, args)
        if pairs is None:
            pairs = list(itertools.combinations(selected_mappings(t, args), 2))
        rep = sweep_compare(t, pairs, spec, relation=args.relation, workers=args.workers)
        result = rep.to_json()
        summary.append(f"sweep ({args.relation}): {len(pairs)} pairs x {len(rep.weights)} weight vectors")
        for r in rep.records:
            parts = []
            if r.me_max_gap is not None:
                parts.append(f"me={r.verdicts.get('me')} max|gap|={fmt_float(r.me_max_gap)}")
            if r.shg_max_z is not None:
                label = "shg" if r.relation == "equiprobable" else "shg_leq"
                verdict = r.verdicts.get("shg", r.verdicts.get("shg_uniform_leq"))
                parts.append(f"{label}={verdict} z={fmt_float(r.shg_max_z)}")
            summary.append(f"  {'agree   ' if r.agrees else 'DISAGREE'} {r.a} ~ {r.b}: {'; '.join(parts)}")
        if args.plot_data:
            write_plot_data(args.plot_data, rep.plot_rows())
        status = 0 if rep.agrees else 1
    elif args.mode == "counterexample":
        pairs = parse_pairs(t, args)
        if not pairs:
            raise CliError("counterexample needs --pair A B")
        results = []
        for a, b in pairs:
            res = find_me_counterexample(t, a, b, budget=args.budget, seed=args.seed,
                                         threshold=args.me_gap)
            results.append({"a": str(a), "b": str(b), **res.to_json()})
            if res.found:
                summary.append(f"{a} ~ {b}: gap {fmt_float(res.gap)} at "
                               f"w = ({', '.join(fmt_float(x) for x in res.weights)}) "
                               f"after {res.evaluations} evaluations")
            else:
                summary.append(f"{a} ~ {b}: none within {res.evaluations} evaluations")
                status = 1
        result = {"counterexamples": results}
    else:
        if args.framework not in ("shg", "me-necessary"):
            raise CliError("mc-torder supports --framework shg or me-necessary")
        graph = torder(t, args.framework, selected_mappings(t, args))
        if args.framework == "shg":
            rep = mc_validate_torder(t, graph, spec.noise, spec.trials, spec, workers=args.workers)
        else:
            rep = me_check_torder(t, graph, spec)
        result = {"graph": graph.to_json(), "report": rep.to_json()}
        summary.append(f"{args.framework} T-order: {len(graph.blocks)} blocks, {len(graph.edges)} edges; "
                       f"{rep.checked} checks over {len(rep.weights)} weight vectors, "
                       f"{len(rep.violations)} violations")
        for v in rep.violations[:20]:
            summary.append(f"  {v.kind}: {v.a} vs {v.b} gap {fmt_float(v.gap)} se {fmt_float(v.se)} "
                           f"at weight vector {v.weight_index}")
        if args.plot_data:
            write_plot_data(args.plot_data, [v.to_json() for v in rep.violations])
        status = 0 if not rep.violations else 1
    emit(args, info, result, summary)
    return status


# -- derive and fmt ---------------------------------------------------------------

def cmd_derive(args) -> int:
    from .fixtures import EXTRA_CANDIDATE_DEFINITIONS, derive_finnish, derive_harmony
    if args.choice == "finnish":
        pkprom = args.pkprom
        if pkprom is None:
            pkprom = EXTRA_CANDIDATE_DEFINITIONS.pkprom if args.extra_candidate else "unstressed-light"
        defs = FinnishDefinitions(pkprom=pkprom, hx=args.hx, flat=args.flat)
        t = derive_finnish(defs, extra_candidate=args.extra_candidate)
        frozen = "finnish-extra-candidate" if args.extra_candidate else "finnish"
    else:
        t = derive_harmony(args.interveners)
        frozen = "harmony"
    text = serialize_tableau(t)
    write_text(args.output or "-", text)
    if args.check_frozen:
        same = load_fixture(frozen) == t
        print(f"{'matches' if same else 'DIFFERS FROM'} frozen fixture {frozen}", file=sys.stderr)
        return 0 if same else 1
    return 0


def cmd_fmt(args) -> int:
    raw, label = read_source(args.tableau)
    t = decode_tableau(raw, args.format)
    problems = validate(t)
    for p in problems:
        print(f"{label}: {p}", file=sys.stderr)
    if args.check:
        print(f"{label}: {len(t.inputs)} inputs, {t.n} constraints, "
              f"{'valid' if not problems else f'{len(problems)} problems'}", file=sys.stderr)
        return 1 if problems else 0
    text = serialize_tsv(t) if args.to == "tsv" else serialize_tableau(t)
    write_text(args.output or "-", text)
    return 1 if problems else 0


# -- parser ----------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, output=True):
    p.add_argument("tableau", help="tableau file (JSON or TSV), '-' for stdin, "
                                   f"or {FIXTURE_PREFIX}NAME for a bundled fixture "
                                   f"({', '.join(sorted(FIXTURES))})")
    p.add_argument("--format", choices=("auto", "json", "tsv"), default="auto",
                   help="input format (default: auto, JSON when the file starts with '{')")
    if output:
        p.add_argument("-o", "--output", metavar="PATH",
                       help="write the JSON report here; '-' prints it instead of the summary")


def _selection(p: argparse.ArgumentParser):
    p.add_argument("--ur", action="append", metavar="UR[,UR...]",
                   help="restrict to the mappings of these inputs (repeatable)")
    p.add_argument("--mapping", action="append", metavar="'UR -> SR'",
                   help="restrict to these mappings (repeatable; overrides --ur)")


def _pairs(p: argparse.ArgumentParser):
    p.add_argument("--pair", nargs=2, action="append", metavar=("A", "B"),
                   help="mapping pair 'UR -> SR' 'UR -> SR' (repeatable; default: all pairs "
                        "of the selected mappings)")


def _sweep(p: argparse.ArgumentParser):
    g = p.add_argument_group("sweep and noise")
    g.add_argument("--grid", metavar="FILE",
                   help="JSON list of per-constraint weight lists, expanded as a product "
                        "(default: random vectors)")
    g.add_argument("--count", type=int, default=20, help="random weight vectors (default 20)")
    g.add_argument("--max-weight", type=float, default=5.0,
                   help="random weights are uniform on [0, MAX] (default 5)")
    g.add_argument("--sparsity", type=float, default=0.0,
                   help="probability of zeroing each random weight (default 0)")
    g.add_argument("--seed", type=int, default=0, help="seed for weights and sampling (default 0)")
    g.add_argument("--frameworks", default="me,shg",
                   help="frameworks compared by a sweep, comma-separated (default me,shg)")
    g.add_argument("--sigma", type=float, default=1.0, help="Gaussian noise scale (default 1)")
    g.add_argument("--clip", action="store_true",
                   help="clip noisy weights at zero (default: no clipping)")
    g.add_argument("--trials", type=int, default=100_000,
                   help="Monte Carlo trials per input and weight vector (default 100000)")
    g.add_argument("--consistent-se", type=float, default=3.0,
                   help="gaps within this many standard errors count as equal (default 3)")
    g.add_argument("--different-se", type=float, default=5.0,
                   help="gaps of at least this many standard errors count as different (default 5)")
    g.add_argument("--me-gap", type=float, default=1e-6,
                   help="MaxEnt gap that counts as a difference (default 1e-6)")
    g.add_argument("--me-tolerance", type=float, default=1e-12,
                   help="MaxEnt gap tolerated for an equal verdict (default 1e-12)")
    g.add_argument("--workers", type=int, default=None,
                   help=f"worker processes (default: ${WORKERS_ENV} or 1); never changes results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Decide equiprobability and uniform probability inequalities between "
                    "phonological mappings under MaxEnt and stochastic Harmonic Grammar.",
        epilog=f"Environment: {WORKERS_ENV} sets the default number of worker processes.",
    )
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("analyze", help="symbolic verdicts: T-orders, equiprobability, uniform inequalities",
                       description="Exact symbolic analysis of a tableau.")
    _common(p)
    p.add_argument("--relation", choices=tuple(ANALYZE_FRAMEWORKS), default="torder",
                   help="torder (blocks and edges), equiprob (pairs) or uniform-leq (ordered pairs)")
    p.add_argument("--framework", choices=("shg", "me-necessary", "me", "hg"), default="shg",
                   help="torder/uniform-leq: shg or me-necessary; equiprob: shg, me or hg")
    _selection(p)
    _pairs(p)
    p.add_argument("--dot", metavar="PATH", help="write the T-order as a Graphviz digraph")
    p.add_argument("--confirm", action="store_true",
                   help="also check the T-order numerically (Monte Carlo for shg, exact "
                        "MaxEnt for me-necessary) with the sweep options")
    _sweep(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("eval", help="probabilities of every candidate at given weights",
                       description="Evaluate a grammar at fixed weights.")
    _common(p)
    p.add_argument("--framework", choices=("me", "hg", "shg-sample"), default="me",
                   help="me: exact MaxEnt; hg: HG winners; shg-sample: Monte Carlo stochastic HG")
    p.add_argument("--weights", metavar="FILE",
                   help="weights as JSON {name: value} or 'name value' lines (required)")
    p.add_argument("--input", action="append", metavar="UR[,UR...]",
                   help="inputs to evaluate (repeatable; default: all)")
    p.add_argument("--sigma", type=float, default=1.0, help="Gaussian noise scale (default 1)")
    p.add_argument("--clip", action="store_true", help="clip noisy weights at zero")
    p.add_argument("--trials", type=int, default=100_000, help="Monte Carlo trials (default 100000)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="numeric cross-checks of symbolic verdicts",
                       description="sweep: compare verdicts with probabilities over weight vectors; "
                                   "counterexample: search for a MaxEnt gap; mc-torder: check a "
                                   "T-order's edges and blocks by simulation.")
    p.add_argument("mode", choices=("sweep", "counterexample", "mc-torder"))
    _common(p)
    p.add_argument("--relation", choices=("equiprobable", "uniform-leq"), default="equiprobable",
                   help="sweep: which verdict to test (default equiprobable)")
    p.add_argument("--framework", choices=("shg", "me-necessary"), default="shg",
                   help="mc-torder: which T-order to check (default shg)")
    _selection(p)
    _pairs(p)
    p.add_argument("--budget", type=int, default=10_000,
                   help="counterexample: probability evaluations allowed (default 10000)")
    p.add_argument("--plot-data", metavar="PATH",
                   help="write gap-versus-weight rows as TSV for external plotting")
    _sweep(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("derive", help="rebuild a bundled fixture tableau from candidate notations",
                       description="Evaluate the phonological constraints on the fixture candidates "
                                   "and print the tableau (canonical JSON).")
    p.add_argument("choice", choices=("finnish", "harmony"))
    p.add_argument("-o", "--output", metavar="PATH", help="write the tableau here (default stdout)")
    p.add_argument("--pkprom", choices=PKPROM_READINGS, default=None,
                   help="PkProm reading (default unstressed-light)")
    p.add_argument("--hx", choices=HX_READINGS, default="per-neighbor",
                   help="*H.X reading (default per-neighbor)")
    p.add_argument("--flat", choices=FLAT_READINGS, default="high-high",
                   help="*Flat reading (default high-high)")
    p.add_argument("--extra-candidate", action="store_true",
                   help="finnish: add the alternative deletion footing for stem types c-f "
                        "(uses PkProm stressed-light unless --pkprom is given)")
    p.add_argument("--interveners", choices=INTERVENER_READINGS, default="non-agreeing",
                   help="harmony: which vowels count as interveners (default non-agreeing)")
    p.add_argument("--check-frozen", action="store_true",
                   help="exit 1 unless the result equals the bundled frozen fixture")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("fmt", help="convert or validate tableau files",
                       description="Read a tableau (JSON or TSV) and write it in canonical form.")
    _common(p, output=False)
    p.add_argument("--to", choices=("json", "tsv"), default="json", help="output format (default json)")
    p.add_argument("-o", "--output", metavar="PATH", help="write here (default stdout)")
    p.add_argument("--check", action="store_true", help="validate only; exit 1 on problems")
    p.set_defaults(func=cmd_fmt)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        msg = str(exc)
    except DomainError as exc:
        msg = f"{exc}"
    except TableauError as exc:
        msg = f"tableau: {exc}"
    except (ValueError, KeyError, LookupError) as exc:
        msg = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
    print(f"{PROG}: error: {msg}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
