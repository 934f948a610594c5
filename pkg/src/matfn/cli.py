"""Batch command line interface.

    matfn eval      -p params.json -z 0.5 -z 0.1,0.2
    matfn classify  -p params.json -z 1
    matfn verify    -p params.json -z 0.3 --identities all
    matfn integral  -p params.json -z 0.4 --nodes 128
    matfn frac      -p params.json -z 0.5 --mu 0.5 --index 1
    matfn special   -p params.json -z 0.25 --special laguerre --degree 3

Parameter files are JSON objects with keys A, B (matrices) and C, D (lists
of matrices). A matrix is a list of rows, each entry a [re, im] pair.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error,
3 parse error, 4 precondition, 5 domain, 6 numeric, 7 accuracy,
10 any other library error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fraccalc, integralrep, relations, series, special
from .errors import MatfnError, ParseError
from .matcore import fro_norm
from .series import ParameterSet, SeriesOptions

EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

DEFAULT_CHECK_TOL = {"verify": 1e-9, "integral": 1e-8, "frac": 1e-6}
VALUE_COLUMNS = ["row", "col", "re", "im"]


# parameter files


def _matrix_from_json(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ParseError(f"{where}: expected a non-empty list of rows")
    n_cols = None
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ParseError(f"{where}: row {i} is not a list")
        if n_cols is None:
            n_cols = len(row)
        elif len(row) != n_cols:
            raise ParseError(f"{where}: ragged row {i} has {len(row)} entries, row 0 has {n_cols}")
        vals = []
        for k, entry in enumerate(row):
            loc = f"{where}[{i}][{k}]"
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ParseError(f"{loc}: entry must be a [re, im] pair")
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry):
                raise ParseError(f"{loc}: entry parts must be numbers")
            x, y = float(entry[0]), float(entry[1])
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ParseError(f"{loc}: non-finite entry")
            vals.append(complex(x, y))
        out.append(vals)
    if len(out) != n_cols:
        raise ParseError(f"{where}: matrix is {len(out)}x{n_cols}, expected square")
    return np.array(out, dtype=complex)


def params_from_obj(obj, source: str = "<params>") -> ParameterSet:
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: top level must be a JSON object")
    extra = sorted(set(obj) - {"A", "B", "C", "D"})
    if extra:
        raise ParseError(f"{source}: unknown keys {', '.join(extra)}")
    for key in ("A", "B"):
        if key not in obj:
            raise ParseError(f"{source}: missing key {key}")
    A = _matrix_from_json(obj["A"], f"{source}: A")
    B = _matrix_from_json(obj["B"], f"{source}: B")
    fams = {}
    for key in ("C", "D"):
        items = obj.get(key, [])
        if not isinstance(items, list):
            raise ParseError(f"{source}: {key} must be a list of matrices")
        fams[key] = tuple(_matrix_from_json(m, f"{source}: {key}[{n}]") for n, m in enumerate(items))
    r = A.shape[0]
    named = [("B", B)] + [(f"{k}[{n}]", m) for k in ("C", "D") for n, m in enumerate(fams[k])]
    for name, M in named:
        if M.shape != (r, r):
            raise ParseError(f"{source}: {name} is {M.shape[0]}x{M.shape[1]}, A is {r}x{r}")
    return ParameterSet(A, B, fams["C"], fams["D"])


def parse_params(path: str) -> ParameterSet:
    """Read and validate a JSON parameter file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return params_from_obj(obj, path)


def _matrix_to_json(M: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in M]


def params_to_obj(params: ParameterSet) -> dict:
    return {
        "A": _matrix_to_json(params.A),
        "B": _matrix_to_json(params.B),
        "C": [_matrix_to_json(c) for c in params.C],
        "D": [_matrix_to_json(d) for d in params.D],
    }


def dump_params(params: ParameterSet, path: str | None = None) -> str:
    """Serialize to JSON; float repr round-trips every entry exactly."""
    text = json.dumps(params_to_obj(params))
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


# number formatting


def fmt_real(x, digits: int) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"  # drop the sign of -0.0
    return f"{x:.{digits}g}"


def fmt_complex(z, digits: int) -> str:
    z = complex(z)
    if z.imag == 0:
        return fmt_real(z.real, digits)
    sign = "-" if z.imag < 0 else "+"
    return f"{fmt_real(z.real, digits)}{sign}{fmt_real(abs(z.imag), digits)}j"


def _json_text(obj, digits: int = 17) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return "null" if not math.isfinite(obj) else fmt_real(obj, digits)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_text(v, digits)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v, digits) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_complex(text: str) -> complex:
    """'re' or 're,im' -> complex."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"non-finite number in {text!r}")
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


# reports


@dataclass
class Report:
    """Rows of one job. ``failed`` is set when an asserted check did not pass."""

    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    failed: bool = False
    text_lines: list[str] | None = None  # custom text rendering, if any


def _value_rows(base: dict, M: np.ndarray) -> list[dict]:
    rows = []
    for i in range(M.shape[0]):
        for k in range(M.shape[1]):
            rows.append({**base, "row": i, "col": k, "re": M[i, k].real, "im": M[i, k].imag})
    return rows


def _point_cols(z: complex) -> dict:
    z = complex(z)
    return {"z_re": z.real, "z_im": z.imag}


def _matrix_text(M: np.ndarray, indent: str = "  ") -> list[str]:
    cells = [[fmt_complex(v, 12) for v in row] for row in M]
    width = max(len(c) for row in cells for c in row)
    return [indent + "[" + "  ".join(c.rjust(width) for c in row) + "]" for row in cells]


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _eval_text(z, res) -> list[str]:
    lines = [f"z = {fmt_complex(z, 12)}"]
    if res.value.shape == (1, 1):
        lines.append(f"value = {fmt_complex(res.value[0, 0], 12)}")
    else:
        lines += ["value ="] + _matrix_text(res.value)
    lines.append(
        f"terms_used = {res.terms_used}  last_term_norm = {fmt_real(res.last_term_norm, 12)}  "
        f"verdict = {res.verdict}  terminated = {_yes(res.terminated_polynomially)}  truncated = {_yes(res.truncated)}"
    )
    return lines


def cmd_eval(params, points, args, opts) -> Report:
    rep = Report(["point", "z_re", "z_im", *VALUE_COLUMNS, "terms_used", "last_term_norm", "verdict", "terminated", "truncated"], text_lines=[])
    for n, z in enumerate(points):
        res = series.eval(params, z, opts)
        diag = {
            "terms_used": res.terms_used,
            "last_term_norm": res.last_term_norm,
            "verdict": str(res.verdict.tag),
            "terminated": res.terminated_polynomially,
            "truncated": res.truncated,
        }
        for row in _value_rows({"point": n, **_point_cols(z)}, res.value):
            rep.rows.append({**row, **diag})
        rep.text_lines += _eval_text(z, res)
    return rep


def cmd_classify(params, points, args, opts) -> Report:
    rep = Report(["point", "z_re", "z_im", "verdict", "margin", "hypotheses_met"], text_lines=[])
    for n, z in enumerate(points):
        v = series.classify(params, z)
        rep.rows.append({"point": n, **_point_cols(z), "verdict": str(v.tag), "margin": v.detail, "hypotheses_met": v.hypotheses_met})
        rep.text_lines.append(str(v))
    return rep


def _status(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def cmd_verify(params, points, args, opts) -> Report:
    tol = args.check_tol if args.check_tol is not None else DEFAULT_CHECK_TOL["verify"]
    rep = Report(["point", "z_re", "z_im", "identity", "residual", "hypotheses_met", "status"])
    for n, z in enumerate(points):
        for r in relations.run_suite(params, z, args.identities, args.order, opts, strict=False):
            if r.skipped:
                status = "skip"
            elif not r.hypotheses_met:
                status = "unasserted"  # hypotheses fail, identity not claimed
            else:
                status = _status(r.residual <= tol)
                rep.failed |= status != "pass"
            rep.rows.append({"point": n, **_point_cols(z), "identity": r.label, "residual": r.residual, "hypotheses_met": r.hypotheses_met, "status": status})
    return rep


def cmd_integral(params, points, args, opts) -> Report:
    tol = args.check_tol if args.check_tol is not None else DEFAULT_CHECK_TOL["integral"]
    rep = Report(["point", "z_re", "z_im", "discrepancy", "doubling_change", "hypotheses_met", "status"])
    for n, z in enumerate(points):
        r = integralrep.integral_report(params, z, args.nodes, opts, strict=False)
        if r.hypotheses_met:
            status = _status(r.discrepancy <= tol)
            rep.failed |= status != "pass"
        else:
            status = "unasserted"
        rep.rows.append({"point": n, **_point_cols(z), "discrepancy": r.discrepancy, "doubling_change": r.doubling_change, "hypotheses_met": r.hypotheses_met, "status": status})
    return rep


def _real_point(z: complex) -> float:
    if z.imag != 0 or not z.real > 0:
        raise ParseError(f"this command needs positive real points, got {fmt_complex(z, 17)}")
    return z.real


def cmd_frac(params, points, args, opts) -> Report:
    if args.mu is None:
        raise ParseError("frac needs --mu")
    tol = args.check_tol if args.check_tol is not None else DEFAULT_CHECK_TOL["frac"]
    j = args.index
    mu = args.mu
    order = fraccalc.FracOrder(mu)
    rep = Report(["point", "z_re", "z_im", "operator", "closed_vs_oracle", "status"])
    for n, z in enumerate(points):
        x = _real_point(z)
        closed = fraccalc.frac_integral(params, j, mu, x, opts)
        oracle = fraccalc.frac_integral_oracle(params, j, mu, x, opts, args.nodes)
        err = fro_norm(closed - oracle) / max(1e-300, fro_norm(oracle))
        ok = err <= tol
        rep.failed |= not ok
        rep.rows.append({"point": n, **_point_cols(z), "operator": "integral", "closed_vs_oracle": err, "status": _status(ok)})
        # the composition oracle for the derivative needs beta(D_j) > ceil(Re mu)
        Dj = params.D[j - 1]
        if np.linalg.eigvals(Dj).real.min() > order.n_ceil:
            closed = fraccalc.frac_derivative(params, j, mu, x, opts)
            oracle = fraccalc.frac_derivative_oracle(params, j, mu, x, opts, args.nodes)
            err = fro_norm(closed - oracle) / max(1e-300, fro_norm(oracle))
            ok = err <= tol
            rep.failed |= not ok
            status = _status(ok)
        else:
            err, status = math.nan, "skip"
        rep.rows.append({"point": n, **_point_cols(z), "operator": "derivative", "closed_vs_oracle": err, "status": status})
    return rep


def build_special(name: str, params: ParameterSet, degree: int | None, k: int) -> special.SpecialForm:
    """Map a parameter file onto the named constructor's arguments."""
    P = params

    def need(cond, what):
        if not cond:
            raise ParseError(f"special {name!r} needs {what}")

    def deg():
        need(degree is not None and degree >= 0, "--degree >= 0")
        return degree

    if name == "hypergeometric":
        return special.hypergeometric_pFq(P.C, P.D, dim=P.r)
    if name == "gauss_2f1":
        need(P.p >= 2 and P.q >= 1, "C with 2 matrices and D with 1")
        return special.gauss_2F1(P.C[0], P.C[1], P.D[0])
    if name == "confluent_1f1":
        need(P.p >= 1 and P.q >= 1, "C and D with 1 matrix each")
        return special.confluent_1F1(P.C[0], P.D[0])
    if name == "m_series":
        return special.m_series(P.A, P.B, P.C, P.D)
    if name == "mittag_leffler":
        return special.mittag_leffler(P.A)
    if name == "mittag_leffler_2":
        return special.mittag_leffler_2(P.A, P.B)
    if name == "mittag_leffler_3":
        need(P.p >= 1, "C with 1 matrix")
        return special.mittag_leffler_3(P.A, P.B, P.C[0])
    if name == "mittag_leffler_4":
        need(P.p >= 1 and P.q >= 1, "C and D with 1 matrix each")
        return special.mittag_leffler_4(P.A, P.B, P.C[0], P.D[0])
    if name == "bessel_maitland":
        return special.bessel_maitland(P.A, P.B)
    if name == "jacobi":
        need(P.p >= 1, "C with 1 matrix")
        return special.jacobi_poly(P.A, P.C[0], deg())
    if name == "legendre":
        need(P.q >= 1, "D with 1 matrix")
        return special.legendre_poly(P.D[0], deg(), P.B)
    if name == "gegenbauer":
        need(P.q >= 1, "D with 1 matrix")
        return special.gegenbauer_poly(P.D[0], deg(), P.B)
    if name == "konhauser":
        need(P.p >= 1, "C with 1 matrix")
        return special.konhauser_poly(P.C[0], k, deg())
    if name == "laguerre":
        need(P.p >= 1, "C with 1 matrix")
        return special.laguerre_poly(P.C[0], deg())
    raise ParseError(f"unknown special function {name!r}")


def cmd_special(params, points, args, opts) -> Report:
    if args.special is None:
        raise ParseError("special needs --special")
    form = build_special(args.special, params, args.degree, args.k)
    rep = Report(["point", "z_re", "z_im", *VALUE_COLUMNS, "terms_used", "terminated"], text_lines=[f"{form.label}"])
    for n, z in enumerate(points):
        res = form.evaluate(z, opts)
        diag = {"terms_used": res.terms_used, "terminated": res.terminated_polynomially}
        for row in _value_rows({"point": n, **_point_cols(z)}, res.value):
            rep.rows.append({**row, **diag})
        rep.text_lines += _eval_text(z, res)
    return rep


COMMANDS = {
    "eval": cmd_eval,
    "classify": cmd_classify,
    "verify": cmd_verify,
    "integral": cmd_integral,
    "frac": cmd_frac,
    "special": cmd_special,
}


# rendering


def _cell(v, digits: int) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_real(v, digits)
    return str(v)


def render(rep: Report, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(rep.columns)
        for row in rep.rows:
            w.writerow([_cell(row.get(c), 17) for c in rep.columns])
        return buf.getvalue()
    if fmt == "json":
        return _json_text({"rows": [{c: row.get(c) for c in rep.columns} for row in rep.rows], "failed": rep.failed}) + "\n"
    if rep.text_lines is not None:
        return "\n".join(rep.text_lines) + "\n"
    cells = [[_cell(row.get(c), 12) for c in rep.columns] for row in rep.rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(rep.columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(rep.columns, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


# entry point


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _identity_list(text: str) -> list[str]:
    if text == "all":
        return list(relations.IDENTITY_IDS)
    wanted = [t.strip() for t in text.split(",") if t.strip()]
    unknown = [t for t in wanted if t not in relations.IDENTITY_IDS]
    if unknown or not wanted:
        raise argparse.ArgumentTypeError(f"unknown identities {unknown}; choose from {', '.join(relations.IDENTITY_IDS)} or 'all'")
    return wanted


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matfn", description="Matrix pRq functions: evaluation, convergence, identities, integrals.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("eval", "evaluate the series at each point"),
        ("classify", "convergence verdict at each point"),
        ("verify", "check the contiguous and differential identities"),
        ("integral", "series vs Gauss-Jacobi integral representation"),
        ("frac", "fractional integral and derivative, closed form vs quadrature"),
        ("special", "evaluate a named special function or polynomial"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-p", "--params", required=True, help="JSON parameter file")
        p.add_argument("-z", dest="points", action="append", type=parse_complex, required=True, metavar="RE[,IM]", help="evaluation point (repeatable)")
        p.add_argument("--tol", type=_positive_float, default=None, help="series relative tolerance (env MATFN_DEFAULT_TOL)")
        p.add_argument("--max-terms", type=_positive_int, default=SeriesOptions.max_terms)
        p.add_argument("--format", choices=("text", "csv", "json"), default="text")
        if name in ("integral", "frac"):
            p.add_argument("--nodes", type=_positive_int, default=128, help="quadrature nodes")
        if name in ("verify", "integral", "frac"):
            p.add_argument("--check-tol", type=_positive_float, default=None, help="tolerance for asserted checks")
        if name == "verify":
            p.add_argument("--identities", type=_identity_list, default=list(relations.IDENTITY_IDS), help="comma list or 'all'")
            p.add_argument("--order", type=_positive_int, default=1, help="derivative order for the derivative identities")
        if name == "frac":
            p.add_argument("--mu", type=parse_complex, default=None, metavar="RE[,IM]", help="fractional order")
            p.add_argument("--index", type=_positive_int, default=1, help="1-based index j of the weight z^(D_j - I)")
        if name == "special":
            p.add_argument("--special", choices=sorted(special.CONSTRUCTORS), default=None)
            p.add_argument("--degree", type=int, default=None)
            p.add_argument("--k", type=_positive_int, default=1, help="Konhauser k")
    return parser


def _default_tol(parser: argparse.ArgumentParser) -> float:
    env = os.environ.get("MATFN_DEFAULT_TOL")
    if env is None:
        return SeriesOptions.rel_tol
    try:
        v = float(env)
    except ValueError:
        v = math.nan
    if not (math.isfinite(v) and v > 0):
        parser.error(f"MATFN_DEFAULT_TOL must be a positive number, got {env!r}")
    return v


def run(args: argparse.Namespace, rel_tol: float) -> Report:
    params = parse_params(args.params)
    opts = SeriesOptions(rel_tol=rel_tol, max_terms=args.max_terms)
    if args.command == "frac" and not 1 <= args.index <= params.q:
        raise ParseError(f"--index {args.index} out of range 1..{params.q}")
    return COMMANDS[args.command](params, args.points, args, opts)


_NEGATIVE = re.compile(r"^-\.?\d")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-z -0.3,0.2" as two options; glue such values on
    out, k = [], 0
    while k < len(argv):
        a = argv[k]
        if a in ("-z", "--mu") and k + 1 < len(argv) and _NEGATIVE.match(argv[k + 1]):
            out.append(f"{a}={argv[k + 1]}")
            k += 2
        else:
            out.append(a)
            k += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_glue_negative_values(argv))
    rel_tol = args.tol if args.tol is not None else _default_tol(parser)
    try:
        rep = run(args, rel_tol)
    except MatfnError as exc:
        print(f"matfn: error exit={exc.exit_code} kind={type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, IndexError, ArithmeticError) as exc:
        print(f"matfn: error exit={MatfnError.exit_code} kind={type(exc).__name__}: {exc}", file=sys.stderr)
        return MatfnError.exit_code
    sys.stdout.write(render(rep, args.format))
    if rep.failed:
        bad = sum(1 for row in rep.rows if row.get("status") == "FAIL")
        print(f"matfn: check failed exit={EXIT_CHECK_FAILED}: {bad} row(s) above tolerance", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return 0


if __name__ == "__main__":
    sys.exit(main())
