"""Command-line front end: ``rcfm <command> [options]``.

Exit status is 0 on success, 1 when the answer is a mathematical negative
(nontrivial, inequivalent, dependent, not Fredholm, failed check) and 2 on
usage or evaluation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from importlib import resources

from . import expr as ex
from .bpfmatrix import BPFMatrix
from .errors import DependentMonomials, NotFredholm, NotFredholmEvidence, NotIndexZero, RcfmError
from .extensions import (
    classify_trivial,
    conjugation_is_exact,
    diag_independence_report,
    embed,
    equivalence_check,
    family_Tn,
    make_extension,
    matrix_units,
)
from .fredholm import cokernel_basis, fredholm_inverse, index, index_zero_split, kernel_basis
from .verify import SUITES, run_suite

SCHEMA = "rcfm-report/1"
DEFAULTS = {"max_trunc": 256, "window": 16, "depth": 6, "json": False}


def report_schema() -> dict:
    """The JSON schema that every ``--json`` report satisfies."""
    return json.loads(resources.files("rcfm").joinpath("report.schema.json").read_text("utf-8"))


class _Negative(Exception):
    """Carries a result whose verdict is negative (exit status 1)."""

    def __init__(self, result: dict, text: list[str]):
        super().__init__()
        self.result = result
        self.text = text


def _dense(m: list[list[Fraction]]) -> list[list[str]]:
    return [[str(v) for v in row] for row in m]


def _format_dense(m: list[list[Fraction]]) -> list[str]:
    cells = _dense(m)
    width = max((len(c) for row in cells for c in row), default=1)
    return ["  ".join(c.rjust(width) for c in row) for row in cells]


def _matrix(text: str) -> BPFMatrix:
    return ex.evaluate(ex.parse(text))


def _vec_text(v: dict) -> str:
    return " + ".join(f"{c}*e{k}" if c != 1 else f"e{k}" for k, c in sorted(v.items()))


# -- commands ---------------------------------------------------------------------

def cmd_index(a):
    m = _matrix(a.expr)
    try:
        res = index(m, a.max_trunc, a.window)
    except NotFredholm as exc:
        raise _Negative({"fredholm": False, "reason": str(exc)}, [f"not Fredholm: {exc}"])
    text = [
        f"index: {res.index}",
        f"dim ker: {res.kernel_dim}",
        f"dim coker: {res.coker_dim}",
        f"certified: {str(res.certified).lower()}",
    ]
    return res.to_json(), text, res.certified


def _basis_cmd(fn, label):
    def run(a):
        m = _matrix(a.expr)
        try:
            kb = fn(m, a.max_trunc, a.window)
        except NotFredholmEvidence as exc:
            raise _Negative({"fredholm": False, "reason": str(exc)}, [f"not Fredholm: {exc}"])
        text = [f"{label} dimension: {kb.dim}", f"certified: {str(kb.certified).lower()}"]
        text += [f"  {_vec_text(v)}" for v in kb.vectors]
        return kb.to_json(), text, kb.certified

    return run


def cmd_split(a):
    m = _matrix(a.expr)
    try:
        s = index_zero_split(m, a.max_trunc, a.window)
    except NotIndexZero as exc:
        raise _Negative({"index_zero": False, "reason": str(exc)}, [f"no splitting: {exc}"])
    return s.to_json(), [f"u = {s.u!r}", f"t = {s.t!r}"], True


def cmd_finverse(a):
    c = fredholm_inverse(a.expr)
    return c.to_json(), [f"a0 = {c.a0!r}", f"r  = {c.r!r}", f"s  = {c.s!r}"], True


def cmd_classify(a):
    ext = make_extension(_matrix(a.x), _matrix(a.y), "input", a.depth)
    v = classify_trivial(ext, a.max_trunc, a.window)
    text = [f"trivial: {str(v.trivial).lower()}", f"index: {v.index}"]
    if v.splitting is not None:
        text += [f"sigma(x)    = {v.splitting[0]!r}", f"sigma(x)^-1 = {v.splitting[1]!r}"]
    if v.diagnostic:
        text.append(v.diagnostic)
    if not v.trivial:
        raise _Negative(v.to_json(), text)
    return v.to_json(), text, True


def cmd_family(a):
    if a.n < 0:
        raise ValueError("--n must be nonnegative")
    ext = family_Tn(a.n, a.depth)
    v = classify_trivial(ext, a.max_trunc, a.window)
    result = {"extension": ext.to_json(), "classification": v.to_json()}
    text = [
        f"{ext.label}: x -> {ext.x_image!r}",
        f"{' ' * len(ext.label)}  x^-1 -> {ext.y_image!r}",
        f"index of x image: {v.index}",
        f"trivial: {str(v.trivial).lower()}",
    ]
    return result, text, True


def cmd_equiv(a):
    e1 = make_extension(_matrix(a.x1), _matrix(a.y1), "e1", a.depth)
    e2 = make_extension(_matrix(a.x2), _matrix(a.y2), "e2", a.depth)
    u_node = ex.parse(a.u)
    u, u_inv = ex.evaluate(u_node), ex.inverse_of(u_node)
    ok = equivalence_check(e1, e2, u, u_inv)
    exact = ok and conjugation_is_exact(e1, e2, u, u_inv)
    result = {"equivalent": ok, "exact": exact}
    text = [f"equivalent: {str(ok).lower()}", f"exact conjugation: {str(exact).lower()}"]
    if not ok:
        raise _Negative(result, text)
    return result, text, True


def cmd_indep(a):
    try:
        exps = [int(t) for t in a.exps.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"--exps expects comma-separated integers, got {a.exps!r}") from None
    rep = diag_independence_report(exps, a.cutoff)
    text = [
        f"independent: {str(rep.independent).lower()}",
        f"symbolic: {str(rep.symbolic).lower()}",
        f"vandermonde (rows {rep.cutoff}..{rep.cutoff + len(exps) - 1}): {str(rep.numeric).lower()}",
    ]
    if not rep.independent:
        raise _Negative(rep.to_json(), text)
    return rep.to_json(), text, True


def cmd_units(a):
    u = matrix_units(_matrix(a.x), _matrix(a.y), a.n)
    text = [f"E({i},{j}) = {m!r}" for (i, j), m in sorted(u.cache.items())]
    return u.to_json(), text, True


def cmd_embed(a):
    u = matrix_units(_matrix(a.x), _matrix(a.y), a.n)
    m = embed(_matrix(a.a), u, a.n)
    return {"n": a.n, "matrix": _dense(m)}, _format_dense(m), True


def cmd_truncate(a):
    m = _matrix(a.expr).truncate(a.n, a.n)
    return {"n": a.n, "matrix": _dense(m)}, _format_dense(m), True


def cmd_verify(a):
    checks = run_suite(a.suite, a.seed)
    result = {"suite": a.suite, "seed": a.seed, "checks": [c.to_json() for c in checks]}
    text = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in checks]
    if not all(c.passed for c in checks):
        raise _Negative(result, text)
    return result, text, True


def _dependent(exc: DependentMonomials) -> _Negative:
    w = {str(k): str(v) for k, v in exc.witness.items()}
    return _Negative({"dependent": True, "witness": w}, [f"dependent monomials: {w}"])


# -- parser ----------------------------------------------------------------------------

def _globals(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--json", action="store_true", default=s, help="emit a JSON report")
    p.add_argument("--max-trunc", type=int, default=s, help="largest truncation for uncertified searches (256)")
    p.add_argument("--window", type=int, default=s, help="stabilisation window (16)")
    p.add_argument("--depth", type=int, default=s, help="monomial independence depth (6)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rcfm", description="Exact computations with banded infinite matrices.")
    _globals(p)
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        _globals(sp)
        sp.set_defaults(func=fn)
        return sp

    for name, fn, help_ in (
        ("index", cmd_index, "Fredholm index of an expression"),
        ("kernel", _basis_cmd(kernel_basis, "kernel"), "kernel basis"),
        ("cokernel", _basis_cmd(cokernel_basis, "cokernel"), "cokernel basis (kernel of the transpose)"),
        ("split", cmd_split, "index-zero splitting a = u + t"),
        ("finverse", cmd_finverse, "Fredholm inverse with residuals"),
    ):
        add(name, fn, help_).add_argument("expr")

    sp = add("classify", cmd_classify, "triviality of the extension defined by x, y")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)

    sp = add("family", cmd_family, "member T_n of the standard family")
    sp.add_argument("--n", type=int, required=True)

    sp = add("equiv", cmd_equiv, "check an equivalence witness u")
    for name in ("--x1", "--y1", "--x2", "--y2", "--u"):
        sp.add_argument(name, required=True)

    sp = add("indep", cmd_indep, "independence of Dgeo(2)^n modulo finite matrices")
    sp.add_argument("--exps", required=True, help="comma-separated exponents; use --exps=-1,0,1 for negatives")
    sp.add_argument("--cutoff", type=int, default=1)

    sp = add("units", cmd_units, "matrix units from x, y")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("embed", cmd_embed, "top-left block of the embedding of a")
    for name in ("--a", "--x", "--y"):
        sp.add_argument(name, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("truncate", cmd_truncate, "top-left n x n block")
    sp.add_argument("expr")
    sp.add_argument("--n", type=int, required=True)

    sp = add("verify", cmd_verify, "run built-in self-checks")
    sp.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    sp.add_argument("--seed", type=int, default=0)
    return p


def _inputs(ns: argparse.Namespace) -> dict:
    skip = {"func", "command", "json", "max_trunc", "window", "depth"}
    return {k: v for k, v in sorted(vars(ns).items()) if k not in skip}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for k, v in DEFAULTS.items():
        if not hasattr(ns, k):
            setattr(ns, k, v)

    report = {
        "schema": SCHEMA,
        "command": ns.command,
        "inputs": _inputs(ns),
        "params": {"max_trunc": ns.max_trunc, "window": ns.window, "depth": ns.depth},
    }
    t0 = time.perf_counter()
    certified = None
    try:
        result, text, certified = ns.func(ns)
        code = 0
    except _Negative as neg:
        result, text, code = neg.result, neg.text, 1
    except DependentMonomials as exc:
        neg = _dependent(exc)
        result, text, code = neg.result, neg.text, 1
    except (RcfmError, ValueError) as exc:
        result, text, code = None, [], 2
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        print(f"rcfm {ns.command}: {type(exc).__name__}: {exc}", file=err)
    report["result"] = result
    report["certified"] = certified
    report["exit_code"] = code
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}

    if ns.json:
        print(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False), file=out)
    else:
        for line in text:
            print(line, file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
