"""Command-line front end: ``carleman-ibp <command> ...``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .classify import BoundaryCondition, classify, emit_latex, emit_table
from .conjugation import FOURTH, SECOND, GroupingError, conjugate, multiply, split_multiplier
from .engine import ContractError, Trace, reduce
from .oracle import verify_identity
from .presets import PRESETS, UnknownPresetError, run_preset
from .terms import RowParseError, Schema, SchemaError, TermFile, fits_fixed, instantiate_gamma, read_terms, write_terms
from .weights import UnsupportedSymbolError, model_for


class CliError(Exception):
    pass


def _load(path: str, schema: str | None = None) -> TermFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from None
    try:
        tf = read_terms(text)
    except RowParseError as exc:
        raise CliError(f"{path}:{exc.line or 1}: {exc.message}") from None
    if schema is not None and tf.schema.value != schema:
        raise CliError(f"{path}: file schema {tf.schema.value!r} does not match --schema {schema}")
    return tf


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def cmd_reduce(args) -> int:
    tf = _load(args.input, args.schema)
    trace = Trace() if args.trace else None
    out = reduce(tf.terms, model_for(tf.schema), trace)
    _write(args.out, write_terms(out, tf.schema))
    if trace is not None:
        fmt = "fixed" if all(fits_fixed(r) for snap in trace.snapshots for r in snap) else "sparse"
        lines = [f"# schema={tf.schema.value} format={fmt}"]
        for i, snap in enumerate(trace.snapshots):
            lines.append(f"## loop {i}")
            lines.extend(write_terms(snap, tf.schema, fmt).splitlines()[1:])
        _write(args.trace, "\n".join(lines) + "\n")
    return 0


def cmd_classify(args) -> int:
    tf = _load(args.input, args.schema)
    report = classify(tf.terms, BoundaryCondition(args.bc), args.drop_time_boundary)
    _write(args.out, emit_table(report))
    if args.latex:
        _write(args.latex, emit_latex(report))
    return 0


def cmd_conjugate(args) -> int:
    schema = Schema(args.schema)
    op = SECOND if args.operator == "second" else FOURTH
    expansion = conjugate(op, model_for(schema))
    terms = list(expansion.terms)
    if args.group:
        terms = list(split_multiplier(expansion, op).group(args.group))
    if args.gamma is not None:
        terms = instantiate_gamma(terms, args.gamma)
    text = write_terms(terms, schema)
    if expansion.omitted and not args.group:
        text += "".join(f"# omitted: {m}\n" for m in expansion.omitted)
    _write(args.out, text)
    return 0


def cmd_multiply(args) -> int:
    left, right = _load(args.left), _load(args.right)
    if left.schema is not right.schema:
        raise CliError("left and right files use different schemas")
    _write(args.out, write_terms(multiply(left.terms, right.terms, cross_only=args.cross_only), left.schema))
    return 0


def cmd_verify(args) -> int:
    a, b = _load(args.input, args.schema), _load(args.output, args.schema)
    result = verify_identity(a.terms, b.terms, model_for(a.schema))
    if result.ok:
        print("ok")
        return 0
    print(f"identity fails; {len(result.diff)} residual row(s) (output - input):")
    print(write_terms(result.diff, a.schema), end="")
    return 1


def cmd_preset(args) -> int:
    result = run_preset(args.name)
    for c in result.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {args.name} {c.name}" + (f": {c.detail}" if c.detail and not c.passed else ""))
    if args.report:
        _write(args.report, emit_table(result.report))
    if args.latex:
        _write(args.latex, emit_latex(result.report))
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="carleman-ibp", description="Integration-by-parts bookkeeping for Carleman estimates.")
    sub = p.add_subparsers(dest="command", required=True)
    schemas = [s.value for s in Schema]

    r = sub.add_parser("reduce", help="rewrite rows until every row is terminal")
    r.add_argument("--schema", choices=schemas)
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--trace")
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("classify", help="group terminal rows into boundary/energy/cross")
    c.add_argument("--schema", choices=schemas)
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--bc", choices=[b.value for b in BoundaryCondition], default="none")
    c.add_argument("--drop-time-boundary", action="store_true")
    c.add_argument("--out", required=True)
    c.add_argument("--latex")
    c.set_defaults(func=cmd_classify)

    j = sub.add_parser("conjugate", help="expand the conjugated operator")
    j.add_argument("--operator", choices=["second", "fourth"], required=True)
    j.add_argument("--schema", choices=schemas, required=True)
    j.add_argument("--group", type=int, choices=[1, 2, 3], help="write only one multiplier group")
    j.add_argument("--gamma", help="substitute a numeric gamma, e.g. 1")
    j.add_argument("--out", required=True)
    j.set_defaults(func=cmd_conjugate)

    m = sub.add_parser("multiply", help="bilinear product of two unary files")
    m.add_argument("--left", required=True)
    m.add_argument("--right", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--cross-only", action="store_true")
    m.set_defaults(func=cmd_multiply)

    v = sub.add_parser("verify", help="check output == input after expanding divergences")
    v.add_argument("--schema", choices=schemas)
    v.add_argument("--input", required=True)
    v.add_argument("--output", required=True)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("preset", help="run a named scenario against its goldens")
    s.add_argument("name", choices=sorted(PRESETS))
    s.add_argument("--report")
    s.add_argument("--latex")
    s.set_defaults(func=cmd_preset)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, ContractError, GroupingError, UnsupportedSymbolError, UnknownPresetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
