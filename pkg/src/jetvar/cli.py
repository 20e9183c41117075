"""Command-line front end.

    jetvar el FILE [--reduce]
    jetvar check FILE
    jetvar reduce FILE
    jetvar suite NAME... [--n N --m M --r R --seed S --samples K --problem FILE]

Problem files hold ``key = value`` lines (``#`` starts a comment) with keys
n, m, r, chart, lagrangian, equation, curve, seed, samples.  ``equation``
and ``curve`` take comma-separated components; ``curve`` may repeat.
Exit status is 0 when every check passes, 1 when a check fails and 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .multiindex import MultiIndex
from .report import Report
from .suites import SUITES, SuiteOptions, run_suite
from .symexpr import ChartSpec, Expr, ParseError, jet_order, parse
from .variational import adapted, euler_lagrange, helmholtz, homogeneous
from .variational.reduction import HomogeneityError, hom_equation_reduce, is_homogeneous, reduce

KEYS = ("n", "m", "r", "chart", "lagrangian", "equation", "curve", "seed", "samples")
DESK_CAP = 3


class UsageError(Exception):
    pass


@dataclass
class ProblemSpec:
    n: int = 1
    m: int = 1
    r: int | None = None
    chart: str = "adapted"
    lagrangian: Expr | None = None
    equation: list[Expr] = field(default_factory=list)
    curves: list[list[Expr]] = field(default_factory=list)
    seed: int = 0
    samples: int = 20

    def echo(self) -> dict:
        out = {"n": self.n, "m": self.m, "r": self.r, "chart": self.chart}
        if self.lagrangian is not None:
            out["lagrangian"] = self.lagrangian.render()
        if self.equation:
            out["equation"] = [t.render() for t in self.equation]
        if self.curves:
            out["curves"] = [[g.render() for g in c] for c in self.curves]
        return out


def parse_problem(text: str, max_order: int = DESK_CAP) -> ProblemSpec:
    raw: dict[str, list[str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in KEYS:
            raise UsageError(f"line {lineno}: expected one of {', '.join(KEYS)} as 'key = value'")
        raw.setdefault(key, []).append(value.strip())

    def single(key: str) -> str | None:
        vals = raw.get(key)
        if vals and len(vals) > 1 and key != "curve":
            raise UsageError(f"key {key!r} given more than once")
        return vals[0] if vals else None

    def integer(key: str, default):
        v = single(key)
        try:
            return default if v is None else int(v)
        except ValueError:
            raise UsageError(f"{key} must be an integer, got {v!r}") from None

    spec = ProblemSpec(n=integer("n", 1), m=integer("m", 1), r=integer("r", None),
                       chart=single("chart") or "adapted", seed=integer("seed", 0),
                       samples=integer("samples", 20))
    if spec.chart not in ("adapted", "homogeneous"):
        raise UsageError(f"chart must be adapted or homogeneous, got {spec.chart!r}")
    if not (1 <= spec.n <= DESK_CAP and 1 <= spec.m <= DESK_CAP):
        raise UsageError(f"n and m must lie in 1..{DESK_CAP}")
    chart = ChartSpec(spec.n, spec.m, max_order, spec.chart)
    try:
        if single("lagrangian") is not None:
            spec.lagrangian = parse(single("lagrangian"), chart)
        if single("equation") is not None:
            spec.equation = [parse(t, chart) for t in single("equation").split(",")]
        params = ("t",) if spec.n == 1 else tuple(f"t{a}" for a in range(1, spec.n + 1))
        for c in raw.get("curve", []):
            spec.curves.append([parse(g, params=params) for g in c.split(",")])
    except ParseError as exc:
        raise UsageError(f"parse error: {exc}") from None
    exprs = ([spec.lagrangian] if spec.lagrangian is not None else []) + spec.equation
    order = max([jet_order(e) for e in exprs] + [0])
    spec.r = order if spec.r is None else spec.r
    if spec.r > max_order or order > spec.r:
        raise UsageError(f"order {max(order, spec.r)} exceeds the cap {min(max_order, spec.r)}")
    for c in spec.curves:
        if len(c) != spec.n + spec.m:
            raise UsageError(f"a curve needs {spec.n + spec.m} components")
    return spec


# ------------------------------------------------------------------ output


@dataclass
class Output:
    command: str
    inputs: dict
    results: list[tuple[str, str]] = field(default_factory=list)
    reports: list[Report] = field(default_factory=list)
    # yes/no answers; a "no" is a result, not a failed check
    answers: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def text(self) -> str:
        lines = [f"{k} = {v}" for k, v in self.results]
        lines += [f"{k}: {'yes' if ok else 'no'}" for k, ok in self.answers]
        for rep in self.reports:
            lines.append(f"[{rep.title}]")
            for k, v in rep.values.items():
                lines.append(f"  {k} = {v}")
            for c in rep.checks:
                line = f"  {'PASS' if c.passed else 'FAIL'} {c.name}"
                if not c.passed and c.detail:
                    line += f"  ({c.detail})"
                lines.append(line)
        lines.append("status: " + ("ok" if self.passed else "failed"))
        return "\n".join(lines)

    def structured(self) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "results": [{"name": k, "value": v} for k, v in self.results],
            "answers": [{"name": k, "value": ok} for k, ok in self.answers],
            "reports": [{
                "title": rep.title,
                "values": rep.values,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in rep.checks],
            } for rep in self.reports],
            "passed": self.passed,
        }
        return json.dumps(doc, indent=2, ensure_ascii=False)


# ---------------------------------------------------------------- commands


def _require_lagrangian(spec: ProblemSpec) -> Expr:
    if spec.lagrangian is None:
        raise UsageError("the problem file has no 'lagrangian' line")
    return spec.lagrangian


def _reduced(spec: ProblemSpec, Lh: Expr) -> Expr:
    r = max(spec.r, 1)
    if not is_homogeneous(Lh, spec.n, spec.n + spec.m, r):
        raise HomogeneityError("the Lagrangian is not homogeneous")
    return reduce(Lh, spec.n, spec.m, r, check=False)


def cmd_euler_lagrange(spec: ProblemSpec, want_reduce: bool = False) -> Output:
    L = _require_lagrangian(spec)
    out = Output("el", spec.echo())
    r = max(spec.r, 1)
    if spec.chart == "homogeneous":
        for A, e in enumerate(euler_lagrange(L, homogeneous(spec.n, spec.n + spec.m), r), 1):
            out.results.append((f"E_X{A}", e.render()))
        if not want_reduce:
            return out
        L = _reduced(spec, L)
        out.results.append(("L", L.render()))
    elif want_reduce:
        raise UsageError("--reduce needs a homogeneous-chart Lagrangian")
    for s, e in enumerate(euler_lagrange(L, adapted(spec.n, spec.m), r), 1):
        out.results.append((f"E_{s}", e.render()))
    return out


def _helmholtz_label(A: int, B: int, J: MultiIndex) -> str:
    return f"H^{J.label()}_{A}{B}" if J.degree else f"H_{A}{B}"


def cmd_variational_check(spec: ProblemSpec) -> Output:
    if not spec.equation:
        raise UsageError("the problem file has no 'equation' line")
    side = homogeneous(spec.n, spec.n + spec.m) if spec.chart == "homogeneous" else adapted(spec.n, spec.m)
    if len(spec.equation) != side.labels:
        raise UsageError(f"expected {side.labels} equation components, got {len(spec.equation)}")
    H = helmholtz(spec.equation, side, max(spec.r, 1))
    out = Output("check", spec.echo())
    for (A, B, J), v in H.nonzero():
        out.results.append((_helmholtz_label(A, B, J), v.render()))
    out.answers.append(("variational", H.is_zero()))
    return out


def cmd_reduce(spec: ProblemSpec) -> Output:
    if spec.chart != "homogeneous":
        raise UsageError("reduce needs chart = homogeneous")
    out = Output("reduce", spec.echo())
    if spec.lagrangian is not None:
        out.results.append(("L", _reduced(spec, spec.lagrangian).render()))
    if spec.equation:
        T = hom_equation_reduce(spec.equation, spec.n, max(spec.r, 1))
        for s, t in enumerate(T, 1):
            out.results.append((f"T_{s}", t.render()))
    if not out.results:
        raise UsageError("the problem file has neither 'lagrangian' nor 'equation'")
    return out


def cmd_suite(names: Sequence[str], opts: SuiteOptions, inputs: dict) -> Output:
    unknown = [nm for nm in names if nm not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite {', '.join(unknown)}; available suites: {', '.join(SUITES)}")
    out = Output("suite", inputs)
    for nm in names:
        out.reports.append(run_suite(nm, opts))
    return out


# -------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    # the shared flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default=argparse.SUPPRESS)
    common.add_argument("--max-order", type=int, default=argparse.SUPPRESS, help="largest jet order accepted")
    p = argparse.ArgumentParser(prog="jetvar", description="Lagrangian formalism on Grassmann charts",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    el = sub.add_parser("el", parents=[common], help="Euler-Lagrange expressions of a Lagrangian")
    el.add_argument("file")
    el.add_argument("--reduce", action="store_true", help="also reduce a homogeneous Lagrangian")
    sub.add_parser("check", parents=[common], help="Helmholtz-Sonin test of an equation").add_argument("file")
    sub.add_parser("reduce", parents=[common], help="reduce a homogeneous Lagrangian or equation").add_argument("file")
    st = sub.add_parser("suite", parents=[common], help="run named identity suites")
    st.add_argument("names", nargs="+")
    st.add_argument("--problem", help="problem file supplying a Lagrangian, equation or curves")
    for name in ("n", "m", "r", "seed", "samples"):
        st.add_argument(f"--{name}", type=int)
    return p


def _load(path: str, max_order: int) -> ProblemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_problem(fh.read(), max_order)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _suite_options(args, max_order: int) -> tuple[SuiteOptions, dict]:
    spec = _load(args.problem, max_order) if args.problem else ProblemSpec(r=2)
    pick = lambda flag, val: val if flag is None else flag
    n, m = pick(args.n, spec.n), pick(args.m, spec.m)
    r = pick(args.r, spec.r if args.problem else 2)
    if not (1 <= n <= DESK_CAP and 1 <= m <= DESK_CAP and 1 <= r <= max_order):
        raise UsageError(f"need 1 <= n, m <= {DESK_CAP} and 1 <= r <= {max_order}")
    opts = SuiteOptions(n=n, m=m, r=r, seed=pick(args.seed, spec.seed), samples=pick(args.samples, spec.samples),
                        chart=spec.chart, lagrangian=spec.lagrangian, equation=tuple(spec.equation),
                        curves=tuple(tuple(c) for c in spec.curves))
    inputs = {"suites": list(args.names), "n": n, "m": m, "r": r, "seed": opts.seed, "samples": opts.samples}
    if args.problem:
        inputs["problem"] = spec.echo()
    return opts, inputs


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    # parents share action objects, so defaults are filled here rather than via set_defaults
    args.format = getattr(args, "format", "text")
    max_order = args.max_order = getattr(args, "max_order", DESK_CAP)
    try:
        if args.command == "suite":
            out = cmd_suite(args.names, *_suite_options(args, max_order))
        else:
            spec = _load(args.file, max_order)
            if args.command == "el":
                out = cmd_euler_lagrange(spec, args.reduce)
            elif args.command == "check":
                out = cmd_variational_check(spec)
            else:
                out = cmd_reduce(spec)
    except (UsageError, HomogeneityError, ValueError) as exc:
        print(f"jetvar: error: {exc}", file=sys.stderr)
        return 2
    print(out.structured() if args.format == "structured" else out.text())
    return 0 if out.passed else 1


if __name__ == "__main__":
    sys.exit(main())
