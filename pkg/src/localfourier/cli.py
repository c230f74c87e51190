"""Command line front end.

Reads connection documents in the text format of the dsl module (a file
path or '-' for stdin) and dispatches to the library.  Exit codes: 0 on
success, 1 when a precondition fails, 2 on malformed input, 3 when an
internal invariant breaks.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import dsl
from .connection import canonicalize, is_isomorphic
from .errors import DomainError, InternalError, ParseError
from .exactfield import zeta
from .fourier import (
    fourier_0_inf,
    fourier_inf_0,
    fourier_inf_inf,
    fourier_s_inf,
)
from .oracle import oracle_check
from .rigidity import rigidity_breakdown, z_zhat_discrepancy
from .structure import determinant_of_sum, dual, hom, tensor

_GRID_A = (1, -1, 2, -2, Fraction(1, 2), Fraction(-3, 2))
_GRID_Q = range(1, 6)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise DomainError(f"cannot read {path}: {e.strerror or e}")


def _document(path: str) -> dsl.ParsedDocument:
    return dsl.parse(_read(path))


def _document_var(doc: dsl.ParsedDocument) -> str:
    for conn in doc.connection_list():
        for el in conn.summands:
            return el.rho.var
    return "u"


def _connection_statements(doc: dsl.ParsedDocument):
    stmts = [
        s for s in doc.statements if not isinstance(s.value, dsl.SingularityDatum)
    ]
    if not stmts:
        raise DomainError("the input contains no connection expression")
    return stmts


def _single_elementary(path: str):
    doc = _document(path)
    els = [el for conn in doc.connection_list() for el in conn.summands]
    if len(els) != 1:
        raise DomainError(
            f"{path}: expected exactly one elementary connection, found {len(els)}"
        )
    return els[0], _document_var(doc)


def _emit_connections(results, var: str, as_json: bool, provenance=None):
    if as_json:
        combined = []
        for _, m in results:
            combined.extend(dsl.relabel_variable(m, var).summands)
        payload = dsl.connection_schema(dsl.FormalConnection(tuple(combined)))
        if provenance is not None:
            payload["provenance"] = provenance
        print(json.dumps(payload, indent=2))
        return
    for name, m in results:
        text = dsl.render_connection(dsl.relabel_variable(m, var))
        print(text if name is None else f"{name} = {text};")


def _location_text(location) -> str:
    return "infinity" if repr(location) == "infinity" else dsl.render_scalar(location)


# -- subcommands -----------------------------------------------------------

def _cmd_fourier(args) -> int:
    doc = _document(args.file)
    var = _document_var(doc)
    window = args.precision
    if args.kind == "sinf":
        if args.s is None:
            raise DomainError("kind sinf needs --s with the finite point")
        s_value = dsl.parse_scalar_text(args.s)

        def apply(el):
            return fourier_s_inf(el, s_value, args.sign, window)
    elif args.kind == "0inf":
        def apply(el):
            return fourier_0_inf(el, args.sign, window)
    elif args.kind == "inf0":
        def apply(el):
            return fourier_inf_0(el, args.sign, window)
    else:
        def apply(el):
            return fourier_inf_inf(el, args.sign, window)
    if args.s is not None and args.kind != "sinf":
        raise DomainError("--s only applies to kind sinf")
    results = []
    for stmt in _connection_statements(doc):
        out = [apply(el) for el in stmt.value.summands]
        results.append((stmt.name, dsl.FormalConnection(tuple(out))))
    provenance = {"kind": args.kind, "sign": args.sign}
    if args.kind == "sinf":
        provenance["s"] = args.s
    _emit_connections(results, var, args.json, provenance)
    return 0


def _cmd_unary(args, op) -> int:
    doc = _document(args.file)
    var = _document_var(doc)
    results = [(s.name, op(s.value)) for s in _connection_statements(doc)]
    _emit_connections(results, var, args.json)
    return 0


def _cmd_tensor(args) -> int:
    a, var = _single_elementary(args.file)
    b, _ = _single_elementary(args.file2)
    _emit_connections([(None, tensor(a, b))], var, args.json)
    return 0


def _cmd_hom(args) -> int:
    a, var = _single_elementary(args.file)
    b, _ = _single_elementary(args.file2)
    _emit_connections([(None, hom(a, b))], var, args.json)
    return 0


def _cmd_invariants(args) -> int:
    doc = _document(args.file)
    if args.json:
        payload = {}
        for stmt in _connection_statements(doc):
            payload[stmt.name or "-"] = dsl.connection_schema(stmt.value)
        print(json.dumps(payload, indent=2))
        return 0
    for stmt in _connection_statements(doc):
        m = stmt.value
        slopes = ", ".join(str(s) for s in m.slopes()) or "-"
        label = stmt.name or "input"
        print(f"{label}: rank {m.rank}, irregularity {m.irregularity}, slopes [{slopes}]")
        for k, el in enumerate(m.summands):
            print(
                f"  summand {k}: p={el.p} q={el.q} r={el.reg.rank} "
                f"slope={el.slope} irr={el.irregularity} rank={el.rank}"
            )
    return 0


def _cmd_iso(args) -> int:
    doc_a = _document(args.file)
    doc_b = _document(args.file2)
    conns_a = [s.value for s in _connection_statements(doc_a)]
    conns_b = [s.value for s in _connection_statements(doc_b)]
    if len(conns_a) != 1 or len(conns_b) != 1:
        raise DomainError("iso compares exactly one connection per file")
    var = _document_var(doc_a)
    if is_isomorphic(conns_a[0], conns_b[0]):
        witness = dsl.render_connection(
            dsl.relabel_variable(canonicalize(conns_a[0]), var)
        )
        print(f"isomorphic; common canonical form: {witness}")
        return 0
    print("not isomorphic")
    return 1


def _cmd_rigidity(args) -> int:
    doc = _document(args.file)
    data = doc.data_list()
    if not data:
        raise DomainError("the input contains no Sing(...) statements")
    breakdown = rigidity_breakdown(data, genus=args.genus)
    rows = [
        {
            "location": _location_text(row["location"]),
            "rank": row["rank"],
            "end_irregularity": row["end_irregularity"],
            "centralizer_term": row["centralizer_term"],
        }
        for row in breakdown["rows"]
    ]
    if args.json:
        payload = dict(breakdown, rows=rows)
        print(json.dumps(payload, indent=2))
        return 0
    print(f"index = {breakdown['index']}")
    print(
        f"rank {breakdown['rank']}, genus {breakdown['genus']}, "
        f"euler term {breakdown['euler_term']}"
    )
    for row in rows:
        print(
            f"  at {row['location']}: end irregularity {row['end_irregularity']}, "
            f"centralizer term {row['centralizer_term']}"
        )
    return 0


def _cmd_z_zhat(args) -> int:
    data = _document(args.file).data_list()
    data_hat = _document(args.file2).data_list()
    if not data or not data_hat:
        raise DomainError("both inputs need Sing(...) statements")
    value = z_zhat_discrepancy(data, data_hat)
    print(f"discrepancy = {value}")
    return 0


def _cmd_oracle(args) -> int:
    if args.grid:
        for a in _GRID_A:
            for q in _GRID_Q:
                report = oracle_check(a, q)
                print(report.lines()[0] + ": all stages agree")
        return 0
    if args.a is None or args.q is None:
        raise DomainError("oracle-check needs --a and --q (or --grid)")
    report = oracle_check(dsl.parse_scalar_text(args.a), args.q)
    for line in report.lines():
        print(line)
    return 0


# -- wiring ----------------------------------------------------------------

def _add_common(sp, json_flag: bool = True):
    if json_flag:
        sp.add_argument("--json", action="store_true", help="emit JSON")
    sp.add_argument(
        "--precision",
        type=int,
        default=None,
        help="working window for truncated series",
    )
    sp.add_argument(
        "--field-order",
        type=int,
        default=None,
        help="cyclotomic order to admit up front",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localfourier",
        description="Local Fourier-Laplace transforms of formal connections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fourier", help="apply a local transform")
    sp.add_argument("file", help="connection document, or - for stdin")
    sp.add_argument(
        "--kind", required=True, choices=["0inf", "inf0", "sinf", "infinf"]
    )
    sp.add_argument("--sign", choices=["plus", "minus"], default="minus")
    sp.add_argument("--s", default=None, help="finite point for kind sinf")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fourier)

    for name, op, help_text in (
        ("dual", lambda m: dsl.FormalConnection(tuple(dual(el) for el in m.summands)), "termwise dual"),
        ("det", lambda m: dsl.FormalConnection((determinant_of_sum(m),)), "determinant connection"),
        ("canon", canonicalize, "canonical form"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file")
        _add_common(sp)
        sp.set_defaults(func=lambda a, _op=op: _cmd_unary(a, _op))

    sp = sub.add_parser("invariants", help="rank, irregularity, slopes")
    sp.add_argument("file")
    _add_common(sp)
    sp.set_defaults(func=_cmd_invariants)

    for name, fn, help_text in (
        ("tensor", _cmd_tensor, "tensor product of two elementaries"),
        ("hom", _cmd_hom, "internal hom of two elementaries"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file")
        sp.add_argument("file2")
        _add_common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("iso", help="decide isomorphism of two connections")
    sp.add_argument("file")
    sp.add_argument("file2")
    _add_common(sp, json_flag=False)
    sp.set_defaults(func=_cmd_iso)

    sp = sub.add_parser("rigidity", help="index of rigidity of singularity data")
    sp.add_argument("file")
    sp.add_argument("--genus", type=int, default=0)
    _add_common(sp)
    sp.set_defaults(func=_cmd_rigidity)

    sp = sub.add_parser(
        "z-zhat", help="centralizer bookkeeping across a transform"
    )
    sp.add_argument("file")
    sp.add_argument("file2")
    _add_common(sp, json_flag=False)
    sp.set_defaults(func=_cmd_z_zhat)

    sp = sub.add_parser("oracle-check", help="operator-route consistency check")
    sp.add_argument("--a", default=None, help="pole coefficient (DSL scalar)")
    sp.add_argument("--q", type=int, default=None, help="pole order")
    sp.add_argument("--grid", action="store_true", help="run the standard grid")
    _add_common(sp, json_flag=False)
    sp.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "field_order", None) is not None:
            zeta(args.field_order)
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except InternalError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 3
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
