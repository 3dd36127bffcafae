"""Command line entry point.

Exit codes: 0 success, 1 verified violation or IO failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import expsums as ex
from . import suites
from .boundslab import POSITION_POLICIES, WEIGHT_SCHEMES, BoundViolation, GridPoint, run_sweep, summarize
from .modarith import DomainError, check_odd_prime, get_context, primes_up_to
from .spectral import CACHE_ENV, build_table, cache_path, cached_table, save_table

REPORT_KEYS = (
    "row",
    "grid_index",
    "p",
    "M",
    "N",
    "K",
    "L",
    "weight_scheme",
    "s_value",
    "bounds",
    "ratios",
    "seed",
    "log_power",
    "surrogates",
)


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:#.12g}"


def _round12(x):
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _round12(v) for k, v in x.items()}
    return x


@dataclass
class RunConfig:
    command: str = "sweep"
    p: int | None = None
    primes: list[int] = field(default_factory=list)
    M: list[int] = field(default_factory=list)
    N: list[int] = field(default_factory=list)
    positions: int = 1
    policy: str = "uniform"
    schemes: list[str] = field(default_factory=lambda: ["ones"])
    seed: int = 0
    jobs: int = 0
    log_power: float = 2.0
    format: str = "jsonl"
    out: str | None = None
    summary: str | None = None
    cache_dir: str | None = None

    def validate(self) -> RunConfig:
        if self.p is None and not self.primes:
            raise UsageError("a prime is required (--p)")
        for q in [self.p] if self.p is not None else self.primes:
            try:
                check_odd_prime(q)
            except DomainError as e:
                raise UsageError(str(e)) from None
        if not self.M:
            raise UsageError("at least one interval length is required (--M)")
        if self.N and len(self.N) != len(self.M):
            raise UsageError("--N must list as many lengths as --M")
        p = self.p if self.p is not None else min(self.primes)
        for m in self.M + self.N:
            if not 1 <= m <= p - 1:
                raise UsageError(f"interval length {m} does not fit in [1, {p - 1}]")
        if self.policy not in POSITION_POLICIES:
            raise UsageError(f"unknown position policy {self.policy!r}")
        for s in self.schemes:
            if s not in WEIGHT_SCHEMES:
                raise UsageError(f"unknown weight scheme {s!r}")
        if self.format not in ("csv", "jsonl"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.positions < 1:
            raise UsageError("--positions must be >= 1")
        return self

    def grid(self) -> list[GridPoint]:
        Ns = self.N or self.M
        return [
            GridPoint(m, n, self.policy, s, self.positions) for m, n in zip(self.M, Ns) for s in self.schemes
        ]


def load_config(path: str | None, args: argparse.Namespace) -> RunConfig:
    data = {}
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {path}: {e}") from None
    names = {f.name for f in fields(RunConfig)}
    unknown = set(data) - names
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(**data)
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def render_reports(reports, fmt_name: str) -> str:
    rows = []
    for r in reports:
        d = _round12(r.to_dict())
        rows.append({k: d[k] for k in REPORT_KEYS})
    buf = io.StringIO()
    if fmt_name == "jsonl":
        for d in rows:
            buf.write(json.dumps(d) + "\n")
    else:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_KEYS)
        for d in rows:
            w.writerow([json.dumps(d[k]) if isinstance(d[k], (dict, list)) else d[k] for k in REPORT_KEYS])
    return buf.getvalue()


# --- commands --------------------------------------------------------------


def _prime_arg(value: str) -> int:
    try:
        return check_odd_prime(int(value))
    except (ValueError, DomainError) as e:
        raise UsageError(f"--p {value}: {e}") from None


def cmd_ksum(args) -> int:
    p = _prime_arg(args.p)
    m, n = args.m, args.n
    if args.from_cache:
        table = cached_table(p, args.cache_dir)
        if m % p == 0 and n % p == 0:
            value = float(p - 1)
        elif m % p == 0 or n % p == 0:
            value = -1.0
        else:
            value = table[m * n % p]
    else:
        value = ex.kloosterman(p, m, n)
    bound = 2 * math.sqrt(p)
    print(f"K_{p}({m},{n}) = {fmt(value)}")
    print(f"weil_bound = {fmt(bound)}")
    print(f"ratio = {fmt(abs(value) / bound)}")
    return 0


def cmd_table(args) -> int:
    p = _prime_arg(args.p)
    ctx = get_context(p)
    out = Path(args.out) if args.out else cache_path(p, args.cache_dir)
    t0 = time.perf_counter()
    if args.method == "both":
        direct = build_table(ctx, "direct")
        spectral = build_table(ctx, "spectral")
        dev = float(abs(direct.values - spectral.values).max())
        if dev > ex.tol(p):
            print(f"spectral and direct tables differ by {dev:.3e} > tol", file=sys.stderr)
            return 1
        table = direct
        max_imag = max(direct.max_imag, spectral.max_imag)
    else:
        table = build_table(ctx, args.method)
        max_imag = table.max_imag
    elapsed = time.perf_counter() - t0
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        save_table(table, out)
    except OSError as e:
        print(f"cannot write {out}: {e}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    print(f"p = {p}  method = {args.method}  build_seconds = {elapsed:.3f}  max_imag = {max_imag:.3e}")
    return 0


def cmd_verify(args) -> int:
    if args.suite not in suites.SUITES + ("all",):
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(suites.SUITES + ('all',))}")
    primes = primes_up_to(args.pmax, args.pmin)
    if not primes:
        raise UsageError(f"no odd primes in [{args.pmin}, {args.pmax}]")
    violations = suites.run_suite(args.suite, primes, args.seed, args.count)
    if violations:
        print(f"{len(violations)} violation(s); first {min(10, len(violations))}:")
        for v in violations[:10]:
            print(f"  {v}")
        return 1
    print(f"suite {args.suite}: ok ({len(primes)} primes in [{args.pmin}, {args.pmax}])")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, args).validate()
    jobs = cfg.jobs or os.cpu_count() or 1
    primes = [cfg.p] if cfg.p is not None else cfg.primes
    reports = []
    try:
        for p in primes:
            reports += run_sweep(p, cfg.grid(), cfg.seed, cfg.log_power, jobs)
    except BoundViolation as e:
        print(f"violation: {e}", file=sys.stderr)
        return 1
    text = render_reports(reports, cfg.format)
    try:
        if cfg.out:
            Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        else:
            sys.stdout.write(text)
        summary = summarize(reports)
        if cfg.summary:
            with open(cfg.summary, "w", encoding="utf-8", newline="\n") as f:
                for s in summary:
                    f.write(json.dumps(_round12(s)) + "\n")
    except OSError as e:
        print(f"cannot write output: {e}", file=sys.stderr)
        return 1
    if cfg.out:
        for s in summary:
            key = "unweighted_mn_c0" if s["weight_scheme"] == "ones" else "l2_weighted"
            print(
                f"M={s['M']:<5d} N={s['N']:<5d} {s['weight_scheme']:<8s} rows={s['rows']:<3d} "
                f"max|S|={fmt(s['max_s_value'])}  max ratio {key}={fmt(s['max_ratios'][key])}"
            )
    return 0


# --- parser ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kloostlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    cache_default = os.environ.get(CACHE_ENV)

    k = sub.add_parser("ksum", help="evaluate one Kloosterman sum")
    k.add_argument("--p", required=True)
    k.add_argument("--m", type=int, required=True)
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--from-cache", action="store_true", help="answer from the cached K_p(., 1) table")
    k.add_argument("--cache-dir", default=cache_default)
    k.set_defaults(func=cmd_ksum)

    t = sub.add_parser("table", help="build and save a K_p(., 1) table")
    t.add_argument("--p", required=True)
    t.add_argument("--method", choices=("direct", "spectral", "both"), default="spectral")
    t.add_argument("--out")
    t.add_argument("--cache-dir", default=cache_default)
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("--suite", required=True)
    v.add_argument("--pmin", type=int, default=3)
    v.add_argument("--pmax", type=int, default=199)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=1000, help="random instances for sampled suites")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="cancellation sweep over interval lengths and positions")
    s.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    s.add_argument("--p", type=int)
    s.add_argument("--primes", type=_int_list)
    s.add_argument("--M", type=_int_list, help="comma-separated lengths of I")
    s.add_argument("--N", type=_int_list, help="lengths of J (default: same as M)")
    s.add_argument("--positions", type=int)
    s.add_argument("--policy", choices=POSITION_POLICIES)
    s.add_argument("--schemes", type=lambda t: t.split(","))
    s.add_argument("--seed", type=int)
    s.add_argument("--jobs", type=int)
    s.add_argument("--log-power", dest="log_power", type=float)
    s.add_argument("--format", choices=("csv", "jsonl"))
    s.add_argument("--out")
    s.add_argument("--summary")
    s.add_argument("--cache-dir", dest="cache_dir")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"kloostlab {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
