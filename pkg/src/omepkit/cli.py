from __future__ import annotations

import argparse
import itertools
import logging
import sys
from pathlib import Path

from ._util import _describe_matrix, _fmt_matrix, _fmt_spectrum
from .blocks import BlockDesign
from .constructions import (
    CATALOG_NAMES,
    SeriesVariant,
    build_a8,
    build_a12,
    build_omep_bl,
    build_series,
    catalog_design,
    half_overlap_design,
)
from .errors import ConstructionError, OmepError
from .field import oa_from_field
from .linalg import rational_spectrum
from .paths import output_dir_source, resolve_output_path
from .plan import Plan, c_matrix, classify_pair, dof_summary, full_c_matrix, replication_vector
from .storage import load_oa, read_plan, save_oa, save_plan, save_plan_csv, save_reports_csv, save_reports_json
from .verification import (
    HALF_OVERLAP_SIZES,
    REPORT_FIELDS,
    ClaimReport,
    Verdict,
    failed_claims,
    run_suite,
    verify_user_array,
)

FAMILIES = "a12:1 | a12:2 | a12:3 | a8 | series:i|ii|iii (--n) | omep-bl (--design, --k or --oa)"

# -------------------------
# Formatting helpers
# -------------------------


def _fmt_plan_table(plan: Plan) -> str:
    """Rows = factors, columns = runs: the orientation plans are printed in."""
    width = max(len(n) for n in plan.names)
    cell = max(len(lab) for f in plan.factors for lab in f.levels)
    lines = []
    for name in plan.names:
        mark = "*" if name == plan.block_factor else " "
        cells = " ".join(lab.rjust(cell) for lab in plan.labels(name))
        lines.append(f"  {name.ljust(width)}{mark}| {cells}")
    return "\n".join(lines)


def _summary(plan: Plan, title: str) -> str:
    block = (
        f"{plan.level_count(plan.block_factor)} blocks of sizes {sorted(set(plan.block_sizes()))}"
        if plan.block_factor
        else "no block factor"
    )
    return (
        f"{title}: {plan.runs} runs, {len(plan.treatment_names)} treatment factors "
        f"({plan.signature()}), {block}."
    )


def _design_from_arg(value: str) -> tuple[BlockDesign, str]:
    if value.startswith("half:"):
        try:
            v = int(value.split(":", 1)[1])
        except ValueError:
            raise ConstructionError(f"--design half:V needs an integer V (got {value!r})") from None
        return half_overlap_design(v), f"half{v}"
    return catalog_design(value), value


# -------------------------
# Commands
# -------------------------


def _build_family(args: argparse.Namespace) -> tuple[Plan, str, str]:
    family = args.family
    head, _, param = family.partition(":")
    if head == "a12":
        variant = SeriesVariant.parse(param or "1")
        return build_a12(variant), f"A_{variant.number}(12)", f"a12-{variant.number}"
    if family == "a8":
        return build_a8(), "A_8", "a8"
    if head == "series":
        if args.n is None:
            raise ConstructionError("series plans need --n")
        variant = SeriesVariant.parse(param or "i")
        return (
            build_series(variant, args.n),
            f"A_{variant.number}({4 * args.n})",
            f"series-{variant.value}-n{args.n}",
        )
    if family == "omep-bl":
        if not args.design:
            raise ConstructionError("omep-bl needs --design (a, b, c, d or half:V)")
        d, label = _design_from_arg(args.design)
        if args.oa:
            oa = load_oa(Path(args.oa).expanduser())
        else:
            k = args.k if args.k is not None else d.block_size
            if k is None:
                raise ConstructionError("block design must have equal block sizes")
            oa = oa_from_field(k)
        return build_omep_bl(d, oa), f"OMEP on design {label}", f"omep-bl-{label}"
    raise ConstructionError(f"unknown family {family!r} (expected {FAMILIES})")


def cmd_generate(args: argparse.Namespace) -> None:
    plan, title, stem = _build_family(args)
    out_path = resolve_output_path(args.out, f"{stem}.{args.format}")
    if args.format == "csv":
        save_plan_csv(out_path, plan)
    else:
        save_plan(out_path, plan)
    print(f"✅ {_summary(plan, title)}")
    for note in plan.notes:
        print(f"⚠️  {note}")
    print(f"↳ wrote {out_path}")


def cmd_analyze(args: argparse.Namespace) -> None:
    plan = read_plan(Path(args.plan).expanduser(), args.block)
    for name in (*args.factor, *args.eliminate):
        plan.index(name)

    print("=== Plan ===")
    print(_summary(plan, str(args.plan)))
    print(_fmt_plan_table(plan))
    for note in plan.notes:
        print(f"⚠️  {note}")

    print("\n=== Replication ===")
    for name in plan.names:
        print(f"  {name}: {replication_vector(plan, name)}")

    print("\n=== Pairwise orthogonality ===")
    for a, b in itertools.combinations(plan.names, 2):
        rel = classify_pair(plan, a, b)
        if rel.kind == "proportional":
            print(f"  {a},{b} proportional frequency")
        elif rel.kind == "through":
            print(f"  {a},{b} orthogonal through {rel.witness}")
        else:
            print(f"  {a},{b} not orthogonal")

    print("\n=== C-matrices ===")
    targets = args.factor or list(plan.names)
    for name in targets:
        if args.eliminate:
            elim = [e for e in args.eliminate if e != name]
            m = c_matrix(plan, name, name, elim).matrix
            label = f"C_{{{name};{','.join(elim)}}}" if elim else f"C_{{{name};}}"
        else:
            m = full_c_matrix(plan, name)
            label = f"C_{name}"
        short = _describe_matrix(m)
        print(f"{label} = {short}" if short else f"{label} =")
        print(_fmt_matrix(m, indent="  "))
        print(f"  spectrum: {_fmt_spectrum(rational_spectrum(m))}")

    dof = dof_summary(plan)
    print("\n=== Degrees of freedom ===")
    print(f"  model {dof.model_df}, residual {dof.residual_df}" + (" (saturated)" if dof.residual_df == 0 else ""))


def _verdict_mark(r: ClaimReport) -> str:
    if r.verdict is Verdict.PASS:
        return "✅"
    if r.verdict is Verdict.NOT_APPLICABLE:
        return "➖"
    return "❌" if r.expected_to_pass else "⚠️"


def cmd_verify(args: argparse.Namespace) -> None:
    if args.suite == "ww":
        if not args.plan:
            raise OmepError("suite ww needs --plan with the user-supplied array")
        reports: list[ClaimReport] = []
    else:
        reports = run_suite(args.suite)
    if args.plan:
        reports += verify_user_array(read_plan(Path(args.plan).expanduser(), args.block))

    print(f"=== Verify {args.suite} ===")
    for r in reports:
        line = f"{_verdict_mark(r)} {r.claim_id}: {r.anchor}"
        if r.verdict is not Verdict.PASS:
            line += f"\n     expected {r.expected}, computed {r.computed}"
        if r.notes and r.verdict is not Verdict.PASS:
            line += f"\n     {r.notes}"
        print(line)

    records = [r.to_record() for r in reports]
    if args.json:
        out = Path(args.json).expanduser().resolve()
        save_reports_json(out, records)
        print(f"↳ wrote {out}")
    if args.csv:
        out = Path(args.csv).expanduser().resolve()
        save_reports_csv(out, REPORT_FIELDS, records)
        print(f"↳ wrote {out}")

    failed = failed_claims(reports)
    passed = sum(r.verdict is Verdict.PASS for r in reports)
    na = sum(r.verdict is Verdict.NOT_APPLICABLE for r in reports)
    print("\n=== Summary ===")
    print(f"{len(reports)} claims: {passed} pass, {len(failed)} fail, {na} not applicable")
    if failed:
        raise SystemExit(1)


def cmd_oa(args: argparse.Namespace) -> None:
    oa = oa_from_field(args.k)
    out_path = resolve_output_path(args.out, f"oa-k{args.k}.txt")
    save_oa(out_path, oa)
    print(f"✅ OA({oa.runs},{oa.rows},{args.k},{oa.strength}) from GF({args.k})")
    print(f"↳ wrote {out_path}")


def cmd_catalog(args: argparse.Namespace) -> None:
    print("=== Built-in block designs ===")
    for name in CATALOG_NAMES:
        d = catalog_design(name)
        blocks = " ".join("{" + ",".join(str(t) for t in b) + "}" for b in d.one_indexed())
        print(f"({name}) v={d.treatments} b={d.block_count} k={d.block_size}: {blocks}")
    print("\n=== Half-overlap designs (--design half:V) ===")
    print("Two blocks {1..k} and {v-k+1..v}, k the smallest prime power with 2k > v.")
    for v in HALF_OVERLAP_SIZES:
        d = half_overlap_design(v)
        print(f"  v={v}: k={d.block_size}, {d.block_size * 2} blocks of size {d.block_size} after composition")


def cmd_where(args: argparse.Namespace) -> None:
    path, reason = output_dir_source()
    print(path)
    print(f"↳ using {reason}")


def main(argv=None) -> None:
    p = argparse.ArgumentParser(prog="omep", description="Orthogonal main effect plans on small blocks")
    p.add_argument("--verbose", "-v", action="store_true", help="Log suite progress to stderr")

    sub = p.add_subparsers(dest="cmd", required=True)

    gen = sub.add_parser("generate", help="Build a plan family and write it to a file")
    gen.add_argument("family", help=FAMILIES)
    gen.add_argument("--n", type=int, default=None, help="Number of blocks for series plans (n ≥ 3)")
    gen.add_argument("--design", default=None, help="Block design for omep-bl: a, b, c, d or half:V")
    gen.add_argument("--k", type=int, default=None, help="Block size k (prime power) for omep-bl")
    gen.add_argument("--oa", default=None, help="OA text file to use instead of the GF(k) array")
    gen.add_argument("--out", default=None, help="Output path (overrides env/default)")
    gen.add_argument("--format", choices=["json", "csv"], default="json")
    gen.set_defaults(func=cmd_generate)

    ana = sub.add_parser("analyze", help="Print orthogonality and C-matrices of a plan file")
    ana.add_argument("plan", help="Plan file (.json or .csv)")
    ana.add_argument("--factor", action="append", default=[], help="Factor to report (repeatable)")
    ana.add_argument("--eliminate", action="append", default=[], help="Eliminate only these factors (repeatable)")
    ana.add_argument("--block", default=None, help="Treat this factor as the block factor")
    ana.set_defaults(func=cmd_analyze)

    ver = sub.add_parser("verify", help="Run claim suites: a12, a8, series:N:VARIANT, omep-bl:NAME, ww, all")
    ver.add_argument("suite")
    ver.add_argument("--plan", default=None, help="User-supplied 12-run array for the ww suite")
    ver.add_argument("--block", default=None, help="Block factor of --plan")
    ver.add_argument("--json", default=None, help="Write claim records as JSON")
    ver.add_argument("--csv", default=None, help="Write claim records as CSV")
    ver.set_defaults(func=cmd_verify)

    oa = sub.add_parser("oa", help="Write the OA(k², k+1, k, 2) built from GF(k)")
    oa.add_argument("--k", type=int, required=True)
    oa.add_argument("--out", default=None, help="Output path (overrides env/default)")
    oa.set_defaults(func=cmd_oa)

    sub.add_parser("catalog", help="List the built-in block designs").set_defaults(func=cmd_catalog)
    sub.add_parser("where", help="Show where output files are written and why").set_defaults(func=cmd_where)

    args = p.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        args.func(args)
    except OmepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2) from None
