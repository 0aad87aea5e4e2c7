"""Command-line surface and benchmark harness.

Subcommands: validate, esp, oracle, bench, generate.  Exit codes are a
stable scripting contract: 0 success, 1 usage error, 2 curve validation
error, 3 solver or generation failure.  The bench command reproduces the
linear runtime experiment: generated curves across a size grid, per-curve
solver timing (solver loop only, no I/O or generation), CSV records and an
SVG scatter with an affine fit.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .cube_model import CurveError, classify_angles, load_curve
from .curve_gen import GenConfig, GenerationFailed, generate_curve
from .graph_oracle import (
    Disconnected,
    TooFewCriticalEdges,
    build_graph,
    graph_to_text,
    oracle_then_rba,
    shortest_cycle,
)
from .rubberband import (
    NoCriticalEdges,
    SolverConfig,
    VARIANTS,
    initialize_path,
    path_to_text,
    run_rba,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3

CSV_HEADER = "n,critical_edges,variant,epsilon,loops,time_ms,length,oracle_length,seed"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Bench records
# ---------------------------------------------------------------------------

@dataclass
class BenchRecord:
    n: int
    critical_edges: int
    variant: str
    epsilon: float
    loops: int
    time_ms: float
    length: float
    oracle_length: float | None
    seed: int
    vertex_visits: int = 0  # not part of the CSV contract

    def csv_row(self) -> list[str]:
        return [
            str(self.n),
            str(self.critical_edges),
            self.variant,
            f"{self.epsilon:.17g}",
            str(self.loops),
            f"{self.time_ms:.17g}",
            f"{self.length:.17g}",
            "" if self.oracle_length is None else f"{self.oracle_length:.17g}",
            str(self.seed),
        ]


def write_bench_csv(fh, records: list[BenchRecord]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for rec in records:
        writer.writerow(rec.csv_row())


def read_bench_csv(fh) -> list[BenchRecord]:
    reader = csv.reader(fh)
    header = next(reader)
    if header != CSV_HEADER.split(","):
        raise ValueError(f"unexpected CSV header {header!r}")
    out = []
    for row in reader:
        out.append(BenchRecord(
            n=int(row[0]),
            critical_edges=int(row[1]),
            variant=row[2],
            epsilon=float(row[3]),
            loops=int(row[4]),
            time_ms=float(row[5]),
            length=float(row[6]),
            oracle_length=None if row[7] == "" else float(row[7]),
            seed=int(row[8]),
        ))
    return out


def job_seed(base_seed: int, n: int, rep: int) -> int:
    return (base_seed * 1_000_003 + n) * 101 + rep


def _bench_worker(job) -> BenchRecord | str:
    n, rep, base_seed, variant, epsilon, oracle_m = job
    seed = job_seed(base_seed, n, rep)
    try:
        curve = generate_curve(GenConfig(n, seed))
    except GenerationFailed as exc:
        return f"skip n={n} rep={rep}: {exc}"
    cfg = SolverConfig(epsilon=epsilon, variant=variant)
    try:
        path = initialize_path(curve)
        poly, report = run_rba(path, curve, cfg)
    except NoCriticalEdges as exc:
        return f"skip n={n} rep={rep}: {exc}"
    oracle_length = None
    if oracle_m:
        try:
            _, oracle_length = shortest_cycle(build_graph(curve, oracle_m))
        except (TooFewCriticalEdges, Disconnected) as exc:
            return f"skip n={n} rep={rep}: oracle failed: {exc}"
    return BenchRecord(
        n=len(curve.cubes),
        critical_edges=len(curve.critical_edges),
        variant=variant,
        epsilon=epsilon,
        loops=report.loops,
        time_ms=report.wall_time_ms,
        length=poly.length,
        oracle_length=oracle_length,
        seed=seed,
        vertex_visits=report.vertex_visits,
    )


def worker_count() -> int:
    env = os.environ.get("CUBEPATH_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_bench(sizes, per_size: int, variant: str, epsilon: float,
              base_seed: int = 0, oracle_m: int | None = None,
              workers: int | None = None, log=None) -> list[BenchRecord]:
    """Generate, solve and time one curve per (size, replicate) job."""
    jobs = [
        (n, rep, base_seed, variant, epsilon, oracle_m)
        for n in sizes
        for rep in range(per_size)
    ]
    workers = workers if workers is not None else worker_count()
    records: list[BenchRecord] = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bench_worker, jobs))
    else:
        results = [_bench_worker(job) for job in jobs]
    for res in results:
        if isinstance(res, str):
            if log:
                log(res)
        else:
            records.append(res)
    return records


def affine_fit(xs, ys) -> tuple[float, float, float]:
    """Least-squares y = a + b*x; returns (a, b, r_squared)."""
    n = len(xs)
    if n < 2:
        return 0.0, 0.0, 1.0
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    b = sxy / sxx if sxx > 0 else 0.0
    a = my - b * mx
    ss_res = sum((y - a - b * x) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - my) ** 2 for y in ys)
    r2 = 1.0 if ss_tot <= 0 else 1.0 - ss_res / ss_tot
    return a, b, r2


def scatter_svg(records: list[BenchRecord], a: float, b: float, r2: float) -> str:
    """Static SVG scatter of time vs n with the fitted line."""
    width, height = 640, 420
    ml, mr, mt, mb = 60, 20, 30, 50
    xs = [r.n for r in records]
    ys = [r.time_ms for r in records]
    x0, x1 = (min(xs), max(xs)) if xs else (0, 1)
    y0, y1 = (0.0, max(ys) * 1.05 if ys else 1.0)
    if x1 == x0:
        x1 = x0 + 1
    if y1 <= y0:
        y1 = y0 + 1.0

    def px(x):
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr)

    def py(y):
        return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" font-size="13">cubes n</text>',
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {height / 2:.0f})">solver time (ms)</text>',
        f'<text x="{ml}" y="{height - mb + 16}" text-anchor="middle" font-size="11">{x0}</text>',
        f'<text x="{width - mr}" y="{height - mb + 16}" text-anchor="middle" font-size="11">{x1}</text>',
        f'<text x="{ml - 6}" y="{py(y1):.1f}" text-anchor="end" font-size="11">{y1:.1f}</text>',
        f'<text x="{ml - 6}" y="{height - mb}" text-anchor="end" font-size="11">{y0:.1f}</text>',
    ]
    for r in records:
        parts.append(
            f'<circle cx="{px(r.n):.2f}" cy="{py(r.time_ms):.2f}" r="3" '
            f'fill="steelblue" fill-opacity="0.7"/>'
        )
    yl, yr = a + b * x0, a + b * x1
    parts.append(
        f'<line x1="{px(x0):.2f}" y1="{py(max(y0, min(y1, yl))):.2f}" '
        f'x2="{px(x1):.2f}" y2="{py(max(y0, min(y1, yr))):.2f}" '
        f'stroke="crimson" stroke-width="1.5"/>'
    )
    parts.append(
        f'<text x="{width - mr}" y="{mt}" text-anchor="end" font-size="13">'
        f'fit: {a:.3g} + {b:.3g}*n, R&#178;={r2:.3f}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_validate(args) -> int:
    curve = load_curve(args.file)
    cls = classify_angles(curve)
    print(
        f"{len(curve.cubes)} cubes, {len(curve.critical_edges)} critical edges, "
        f"{cls.end_angle_count} end angles, {cls.middle_angle_count} middle angles"
    )
    print("first-class: unknown (requires solve)")
    return EXIT_OK


def _cmd_esp(args) -> int:
    curve = load_curve(args.file)
    cfg = SolverConfig(epsilon=args.epsilon, variant=args.variant)
    if args.seed_oracle:
        poly, report = oracle_then_rba(curve, args.seed_oracle, cfg)
    else:
        poly, report = run_rba(initialize_path(curve), curve, cfg)
    text = path_to_text(poly, report.variant, report.epsilon, report.loops)
    report_line = (
        f"length={poly.length:.17g} loops={report.loops} "
        f"time_ms={report.wall_time_ms:.3f}"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(report_line)
    else:
        sys.stdout.write(text)
        print(report_line, file=sys.stderr)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    curve = load_curve(args.file)
    graph = build_graph(curve, args.m, full=args.full_graph)
    if args.dump_graph:
        with open(args.dump_graph, "w", encoding="utf-8") as fh:
            fh.write(graph_to_text(graph))
    cycle, length = shortest_cycle(graph)
    text = path_to_text(cycle, "oracle", 0.0, 0)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"length={length:.17g}")
    else:
        sys.stdout.write(text)
        print(f"length={length:.17g}", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(args) -> int:
    lo, hi = args.sizes
    sizes = list(range(lo, hi + 1, args.step))
    records = run_bench(
        sizes,
        per_size=args.per_size,
        variant=args.variant,
        epsilon=args.epsilon,
        base_seed=args.seed,
        oracle_m=args.oracle_m,
        log=lambda msg: print(msg, file=sys.stderr),
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        write_bench_csv(fh, records)
    a, b, r2 = affine_fit([r.n for r in records], [r.time_ms for r in records])
    plot_path = args.plot or os.path.splitext(args.out)[0] + ".svg"
    with open(plot_path, "w", encoding="utf-8") as fh:
        fh.write(scatter_svg(records, a, b, r2))
    print(f"records={len(records)} fit: time_ms = {a:.6g} + {b:.6g}*n r2={r2:.4f}")
    return EXIT_OK


def _cmd_generate(args) -> int:
    curve = generate_curve(GenConfig(args.target, args.seed))
    from .cube_model import curve_to_text

    text = curve_to_text(curve)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _sizes_arg(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        return int(lo), int(hi)
    n = int(text)
    return n, n


def _positive_epsilon(parser: _Parser, value: float) -> float:
    if not value > 0.0:
        parser.error("epsilon must be > 0")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="cubepath", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a curve file and print diagnostics")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("esp", help="compute a shortest path approximation")
    p.add_argument("file")
    p.add_argument("--variant", choices=VARIANTS, default="edge")
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--seed-oracle", type=int, metavar="M", default=None,
                   help="seed the solver with the oracle cycle at M samples per edge")
    p.add_argument("--out", default=None, help="path file destination (default stdout)")
    p.set_defaults(func=_cmd_esp)

    p = sub.add_parser("oracle", help="graph-search shortest cycle")
    p.add_argument("file")
    p.add_argument("--m", type=int, default=8, help="samples per critical edge")
    p.add_argument("--full-graph", action="store_true",
                   help="also build arcs between non-consecutive critical edges")
    p.add_argument("--dump-graph", default=None, help="write node/arc dump to this file")
    p.add_argument("--out", default=None, help="cycle path file destination (default stdout)")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("bench", help="runtime scaling benchmark")
    p.add_argument("--sizes", type=_sizes_arg, default=(10, 630), metavar="LO..HI")
    p.add_argument("--step", type=int, default=20)
    p.add_argument("--per-size", type=int, default=3)
    p.add_argument("--variant", choices=VARIANTS, default="edge")
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-m", type=int, default=None,
                   help="also record the oracle length at this subdivision")
    p.add_argument("--out", default="bench.csv")
    p.add_argument("--plot", default=None, help="SVG destination (default: out with .svg)")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("generate", help="generate a random curve file")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "epsilon"):
        _positive_epsilon(parser, args.epsilon)
    try:
        return args.func(args)
    except CurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NoCriticalEdges, TooFewCriticalEdges, Disconnected, GenerationFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
