"""Command-line surface: single checks, parameter sweeps, verification
suites, and machine-readable reports.

This is the only module that renders decimals or schedules work.  Every
verdict and witness is produced by the exact core; decimal columns are
derived for display and never feed back into a decision.  Identical
invocations produce byte-identical json and csv output: rows are generated
in parameter order and keys in fixed order.

Exit codes: 0 on completion, 1 on an invalid invocation, 2 when any row
ended in a contract-breach error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from io import StringIO
from typing import Iterable, Sequence

from . import criteria, verify
from .errors import InvalidParameterError, KstabError, NoBracketError
from .families import (
    FamilyInstance,
    FamilyTag,
    blpp_resolve,
    blqq_resolve,
    instance_record,
    quad_resolve,
    resolve_anticanonical,
)
from .poly import Poly1, Poly2, rational_from_str, rational_to_str
from .polytope import Segment
from .quadrature import integrate_poly1, integrate_poly2_polygon

SCHEMA_VERSION = 1
JOBS_ENV_VAR = "KSTAB_JOBS"

_FAMILIES = {tag.cli_name: tag for tag in FamilyTag}
_P_FAMILIES = (FamilyTag.BLPP, FamilyTag.BLQQ)


class SpecError(Exception):
    """Invalid command line; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would sys.exit(2); we want exit 1
        raise SpecError(message)


@dataclass(frozen=True)
class RunSpec:
    command: str
    family: FamilyTag | None
    n_values: tuple[int, ...]
    p_all: bool
    p_values: tuple[int, ...]
    k_values: tuple[int, ...]
    divisor: tuple[Fraction, ...] | None
    start: tuple[Fraction, ...] | None
    end: tuple[Fraction, ...] | None
    bisections: int
    suite: str
    max_n: int
    fmt: str
    out: str | None
    jobs: int


def _parse_range(text: str, field: str) -> tuple[int, ...]:
    s = text.strip()
    try:
        if ".." in s:
            lo_s, hi_s = s.split("..")
            lo, hi = int(lo_s), int(hi_s)
        else:
            lo = hi = int(s)
    except ValueError as exc:
        raise SpecError(f"field {field}: cannot parse range {text!r}") from exc
    if hi < lo:
        raise SpecError(f"field {field}: empty range {text!r}")
    return tuple(range(lo, hi + 1))


def _parse_divisor(text: str, field: str) -> tuple[Fraction, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise SpecError(f"field {field}: no coefficients given")
    try:
        return tuple(rational_from_str(p) for p in parts)
    except InvalidParameterError as exc:
        raise SpecError(f"field {field}: {exc}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="kstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv", "markdown"), default="markdown")
        p.add_argument("--out", default=None, help="write the report to this path")
        p.add_argument("--jobs", type=int, default=None,
                       help=f"worker count (default: ${JOBS_ENV_VAR} or the available parallelism)")

    ke = sub.add_parser("ke", help="Kähler-Einstein / K-semistability classification")
    ke.add_argument("--family", required=True, choices=sorted(_FAMILIES))
    ke.add_argument("--n", required=True, help="integer or inclusive range lo..hi")
    ke.add_argument("--p", default=None, help="integer, range, or 'all'")
    ke.add_argument("--divisor", default=None,
                    help="comma-separated rational coefficients (default: anticanonical)")
    add_common(ke)

    mab = sub.add_parser("mabuchi", help="Mabuchi-metric existence tests")
    mab.add_argument("--family", required=True, choices=("blpp", "quadpt"))
    mab.add_argument("--n", required=True)
    mab.add_argument("--p", default=None)
    add_common(mab)

    coup = sub.add_parser("coupled", help="coupled Kähler-Einstein residual bracketing")
    coup.add_argument("--k", required=True)
    coup.add_argument("--bisections", type=int, default=40)
    coup.add_argument("--start", default=None, help="segment start divisor (default: built-in)")
    coup.add_argument("--end", default=None, help="segment end divisor (default: built-in)")
    add_common(coup)

    mh = sub.add_parser("mh", help="multiplier-Hermitian certificates")
    mh.add_argument("--n", required=True)
    mh.add_argument("--p", default=None)
    add_common(mh)

    ver = sub.add_parser("verify", help="run the theorem-verification suites")
    ver.add_argument("--suite", default="all", choices=("all",) + verify.SUITES)
    ver.add_argument("--max-n", type=int, default=40, dest="max_n")
    add_common(ver)

    dump = sub.add_parser("dump-instance", help="emit the structured record of one instance")
    dump.add_argument("--family", required=True, choices=sorted(_FAMILIES))
    dump.add_argument("--n", required=True, type=int)
    dump.add_argument("--p", default=None, type=int)
    dump.add_argument("--divisor", default=None)
    add_common(dump)
    return parser


def parse_spec(argv: Sequence[str]) -> RunSpec:
    ns = _build_parser().parse_args(argv)
    family = _FAMILIES.get(getattr(ns, "family", "") or "")
    n_values: tuple[int, ...] = ()
    if getattr(ns, "n", None) is not None:
        if ns.command == "dump-instance":
            n_values = (ns.n,)
        else:
            n_values = _parse_range(ns.n, "--n")

    p_all, p_values = False, ()
    p_arg = getattr(ns, "p", None)
    needs_p = family in _P_FAMILIES and ns.command in ("ke", "mabuchi") or ns.command == "mh"
    if ns.command == "mabuchi" and family is FamilyTag.BLQQ:
        raise SpecError("field --family: no Mabuchi test is defined for blqq")
    if p_arg is not None:
        if family not in _P_FAMILIES and ns.command in ("ke", "mabuchi", "dump-instance"):
            raise SpecError(f"field --p: family {family.cli_name if family else '?'} takes no p")
        if ns.command == "dump-instance":
            p_values = (int(p_arg),)
        elif str(p_arg).strip() == "all":
            p_all = True
        else:
            p_values = _parse_range(str(p_arg), "--p")
    elif needs_p:
        p_all = True

    k_values: tuple[int, ...] = ()
    if ns.command == "coupled":
        k_values = _parse_range(ns.k, "--k")

    divisor = None
    if getattr(ns, "divisor", None):
        if family is FamilyTag.BLQQ:
            raise SpecError("field --divisor: blqq exposes only the anticanonical divisor")
        divisor = _parse_divisor(ns.divisor, "--divisor")

    start = _parse_divisor(ns.start, "--start") if getattr(ns, "start", None) else None
    end = _parse_divisor(ns.end, "--end") if getattr(ns, "end", None) else None

    bisections = getattr(ns, "bisections", 40)
    if bisections < 0:
        raise SpecError("field --bisections: must be nonnegative")
    max_n = getattr(ns, "max_n", 40)
    if ns.command == "verify" and max_n < 7:
        raise SpecError("field --max-n: must be at least 7")

    jobs = ns.jobs
    if jobs is None:
        env = os.environ.get(JOBS_ENV_VAR, "").strip()
        if env:
            try:
                jobs = int(env)
            except ValueError as exc:
                raise SpecError(f"field {JOBS_ENV_VAR}: {env!r} is not an integer") from exc
        else:
            jobs = os.cpu_count() or 1
    if jobs < 1:
        raise SpecError("field --jobs: must be at least 1")

    return RunSpec(
        command=ns.command,
        family=family,
        n_values=n_values,
        p_all=p_all,
        p_values=p_values,
        k_values=k_values,
        divisor=divisor,
        start=start,
        end=end,
        bisections=bisections,
        suite=getattr(ns, "suite", "all"),
        max_n=max_n,
        fmt=ns.format,
        out=ns.out,
        jobs=jobs,
    )


# ---------------------------------------------------------------------------
# Task generation and execution
# ---------------------------------------------------------------------------


def _min_n(spec: RunSpec) -> int:
    if spec.command == "mh" or spec.family is FamilyTag.BLPP:
        return 4
    if spec.family is FamilyTag.BLQQ:
        return 6
    return 5


def _p_range(spec: RunSpec, n: int) -> range:
    if spec.family is FamilyTag.BLQQ:
        return range(3, n - 2)
    return range(2, n - 1)


def _p_span(spec: RunSpec, n: int) -> Iterable[int]:
    if not (spec.family in _P_FAMILIES or spec.command == "mh"):
        return (0,)
    if spec.p_all:
        return _p_range(spec, n)
    return list(spec.p_values)


def _tasks_for(spec: RunSpec) -> list[tuple]:
    tasks: list[tuple] = []
    if spec.command in ("ke", "mabuchi", "mh"):
        fam = spec.family.cli_name if spec.family else "blpp"
        min_n = _min_n(spec)
        if all(n < min_n for n in spec.n_values):
            raise SpecError(f"field --n: every requested n is below the family minimum {min_n}")
        takes_p = spec.family in _P_FAMILIES or spec.command == "mh"
        if takes_p and not spec.p_all:
            if not any(p in _p_range(spec, n) for n in spec.n_values for p in spec.p_values):
                raise SpecError("field --p: out of range for every requested n")
        for n in spec.n_values:
            for p in _p_span(spec, n):
                tasks.append((spec.command, fam, n, p, spec.divisor))
    elif spec.command == "coupled":
        if all(k < 2 for k in spec.k_values):
            raise SpecError("field --k: must reach at least 2")
        for k in spec.k_values:
            tasks.append((spec.command, "blpp", k, spec.bisections, spec.start, spec.end))
    return tasks


def _run_task(task: tuple) -> dict:
    started = time.perf_counter()
    command = task[0]
    try:
        if command == "ke":
            row = _ke_row(*task[1:])
        elif command == "mabuchi":
            row = _mabuchi_row(*task[1:])
        elif command == "mh":
            row = _mh_row(*task[1:])
        else:
            row = _coupled_row(*task[1:])
    except NoBracketError as exc:
        row = {"family": task[1], "params": _task_params(task), "verdict": "no-bracket",
               "witness": {}, "note": str(exc)}
    except KstabError as exc:
        row = {"family": task[1], "params": _task_params(task),
               "verdict": f"error:{exc.code}", "witness": {}, "note": str(exc)}
    row["elapsed_ms"] = (time.perf_counter() - started) * 1000.0
    return row


def _task_params(task: tuple) -> dict:
    command = task[0]
    if command == "coupled":
        return {"k": task[2]}
    params = {"n": task[2]}
    if task[1] in ("blpp", "blqq") or command == "mh":
        params["p"] = task[3]
    return params


def _resolve_for(family: str, n: int, p: int, divisor) -> FamilyInstance:
    tag = _FAMILIES[family]
    if divisor is None:
        return resolve_anticanonical(tag, n, p if tag in _P_FAMILIES else None)
    if tag is FamilyTag.BLPP:
        return blpp_resolve(n, p, divisor)
    if tag is FamilyTag.BLQQ:
        return blqq_resolve(n, p)
    return quad_resolve(tag, n, divisor)


def _ke_row(family: str, n: int, p: int, divisor) -> dict:
    inst = _resolve_for(family, n, p, divisor)
    verdict = criteria.ke_classify(inst)
    bary = criteria.instance_barycenter(inst)
    expanded = inst.weight.expand()
    if isinstance(inst.domain, Segment):
        assert isinstance(expanded, Poly1)
        mass = integrate_poly1(expanded, inst.domain)
        witness = {"mass": mass, "bary_t": bary[0], "xi_t": verdict.xi[0]}
    else:
        assert isinstance(expanded, Poly2)
        mass = integrate_poly2_polygon(expanded, inst.domain)
        witness = {"mass": mass, "bary_x": bary[0], "bary_y": bary[1],
                   "xi_x": verdict.xi[0], "xi_y": verdict.xi[1]}
    return {"family": family, "params": _named_params(family, n, p),
            "verdict": verdict.status.value, "witness": witness}


def _mabuchi_row(family: str, n: int, p: int, divisor) -> dict:
    if family == "blpp":
        verdict = criteria.mabuchi_blpp(n, p)
    else:
        verdict = criteria.mabuchi_quadpt(n)
    witness = dict(verdict.detail)
    if verdict.ratio is not None:
        witness["ratio"] = verdict.ratio
    return {"family": family, "params": _named_params(family, n, p),
            "verdict": verdict.status.value, "witness": witness}


def _mh_row(family: str, n: int, p: int, divisor) -> dict:
    cert = criteria.mh_certificate(n, p)
    witness = {"moment_integral": cert.moment_integral}
    for idx, minimum in enumerate(cert.concavity_witness):
        witness[f"factor_min_{idx}"] = minimum
    return {"family": "blpp", "params": {"n": n, "p": p},
            "verdict": "certificate", "witness": witness}


def _coupled_row(family: str, k: int, bisections: int, start, end) -> dict:
    default_start, default_end = criteria.coupled_default_endpoints(k)
    cert = criteria.coupled_search(
        k, start or default_start, end or default_end, max_bisections=bisections
    )
    witness: dict = {}
    for label, params in (("lo", cert.params_lo), ("hi", cert.params_hi), ("mid", cert.midpoint)):
        for idx, value in enumerate(params):
            witness[f"{label}_{idx}"] = value
    witness["residual_lo"] = cert.residual_lo
    witness["residual_hi"] = cert.residual_hi
    witness["residual_mid"] = cert.residual_at_midpoint
    witness["width"] = cert.width
    return {"family": "blpp", "params": {"k": k}, "verdict": "certificate", "witness": witness}


def _named_params(family: str, n: int, p: int) -> dict:
    if family in ("blpp", "blqq"):
        return {"n": n, "p": p}
    return {"n": n}


def _execute_tasks(tasks: list[tuple], jobs: int) -> list[dict]:
    if jobs > 1 and len(tasks) > 1:
        try:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(_run_task, tasks))
        except OSError:
            pass  # no usable worker pool in this environment; fall back
    return [_run_task(task) for task in tasks]


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def decimal_str(value: Fraction, digits: int = 20) -> str:
    """20-significant-digit decimal rendering; display only."""
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def _witness_strings(row: dict) -> tuple[dict, dict]:
    exact = {key: rational_to_str(value) for key, value in row["witness"].items()}
    approx = {key: decimal_str(value) for key, value in row["witness"].items()}
    return exact, approx


def _render_rows_json(command: str, rows: list[dict]) -> str:
    payload_rows = []
    for row in rows:
        exact, approx = _witness_strings(row)
        payload_rows.append({
            "family": row["family"],
            "params": row["params"],
            "verdict": row["verdict"],
            "witness": exact,
            "witness_decimal": approx,
        })
    payload = {"schema_version": SCHEMA_VERSION, "command": command, "rows": payload_rows}
    return json.dumps(payload, indent=2) + "\n"


def _collect_columns(rows: list[dict]) -> tuple[list[str], list[str]]:
    param_cols: list[str] = []
    witness_cols: list[str] = []
    for row in rows:
        for key in row["params"]:
            if key not in param_cols:
                param_cols.append(key)
        for key in row["witness"]:
            if key not in witness_cols:
                witness_cols.append(key)
    return param_cols, witness_cols


def _render_rows_csv(command: str, rows: list[dict]) -> str:
    import csv

    param_cols, witness_cols = _collect_columns(rows)
    buf = StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = (["family"] + param_cols + ["verdict"]
              + witness_cols + [f"{c}_dec" for c in witness_cols])
    writer.writerow(header)
    for row in rows:
        exact, approx = _witness_strings(row)
        record = [row["family"]]
        record += [str(row["params"].get(c, "")) for c in param_cols]
        record.append(row["verdict"])
        record += [exact.get(c, "") for c in witness_cols]
        record += [approx.get(c, "") for c in witness_cols]
        writer.writerow(record)
    return buf.getvalue()


def _render_rows_markdown(command: str, rows: list[dict]) -> str:
    param_cols, witness_cols = _collect_columns(rows)
    header = (["family"] + param_cols + ["verdict"]
              + witness_cols + [f"{c}_dec" for c in witness_cols] + ["elapsed_ms"])
    lines = [f"# kstab {command}", ""]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join("---" for _ in header) + "|")
    for row in rows:
        exact, approx = _witness_strings(row)
        record = [row["family"]]
        record += [str(row["params"].get(c, "")) for c in param_cols]
        record.append(row["verdict"])
        record += [exact.get(c, "") for c in witness_cols]
        record += [approx.get(c, "") for c in witness_cols]
        record.append(f"{row.get('elapsed_ms', 0.0):.1f}")
        lines.append("| " + " | ".join(record) + " |")
    return "\n".join(lines) + "\n"


def _render_verify(results: list[verify.CheckResult], fmt: str) -> str:
    if fmt == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "verify",
            "rows": [
                {"criterion": r.criterion, "name": r.name,
                 "status": "pass" if r.passed else "fail", "witness": r.witness}
                for r in results
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        import csv

        buf = StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["criterion", "status", "name", "witness"])
        for r in results:
            writer.writerow([r.criterion, "pass" if r.passed else "fail", r.name, r.witness])
        return buf.getvalue()
    lines = ["# kstab verify", ""]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"[{status}] criterion {r.criterion}: {r.name} ({r.witness})")
    total = sum(1 for r in results if r.passed)
    lines.append("")
    lines.append(f"{total}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"


def execute(spec: RunSpec) -> tuple[str, int]:
    """Run a spec and return (rendered report, exit code)."""
    if spec.command == "verify":
        results = verify.verify_theorems(max_n=spec.max_n, suite=spec.suite)
        return _render_verify(results, spec.fmt), 0
    if spec.command == "dump-instance":
        tag = spec.family
        assert tag is not None
        p = spec.p_values[0] if spec.p_values else None
        if tag in _P_FAMILIES and p is None:
            raise SpecError("field --p: required for this family")
        if spec.divisor is not None:
            inst = _resolve_for(tag.cli_name, spec.n_values[0], p or 0, spec.divisor)
        else:
            inst = resolve_anticanonical(tag, spec.n_values[0], p)
        return json.dumps(instance_record(inst), indent=2) + "\n", 0

    tasks = _tasks_for(spec)
    if not tasks:
        raise SpecError("field --n/--p: the requested sweep is empty")
    rows = _execute_tasks(tasks, spec.jobs)
    if spec.fmt == "json":
        text = _render_rows_json(spec.command, rows)
    elif spec.fmt == "csv":
        text = _render_rows_csv(spec.command, rows)
    else:
        text = _render_rows_markdown(spec.command, rows)
    had_breach = any(row["verdict"].startswith("error:") for row in rows)
    return text, 2 if had_breach else 0


def render_to_string(argv: Sequence[str]) -> str:
    """Parse and run an invocation, returning the rendered report."""
    spec = parse_spec(argv)
    text, _ = execute(spec)
    return text


def main(argv: Sequence[str] | None = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        spec = parse_spec(args)
    except SpecError as exc:
        print(f"kstab: invalid invocation: {exc}", file=sys.stderr)
        return 1
    try:
        text, code = execute(spec)
    except SpecError as exc:
        print(f"kstab: invalid invocation: {exc}", file=sys.stderr)
        return 1
    except KstabError as exc:
        print(f"kstab: {exc.code}: {exc}", file=sys.stderr)
        return 2
    if spec.out:
        with open(spec.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0 if code == 0 else code


if __name__ == "__main__":
    raise SystemExit(main())
