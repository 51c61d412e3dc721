"""Command-line front end: state expressions, A_n tables, Omega_n, induction
and the verification suites.

State expressions follow

    expr   := term (('+'|'-') term)*
    term   := [rational] factor* ket
    factor := gen '(' int ')' ['^' uint]
    gen    := 'a' | 'L'
    ket    := '|0>' | '|h>' | '|l>'

Modes in a term are applied right to left onto the ket.  A term with no
factors is the ket itself (the canonical printer needs it for lowest
vectors), and a lone ``0`` is the zero state.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from dataclasses import dataclass

from . import __version__, suites
from .anv import AnModule, CutoffInsufficientError, an_table, psi_n_reduce
from .linalg import ONE, Q, SpanHandle, fmt
from .regrep import induce, induce_level_limit, omega_n_basis, verma_oracle
from .voa import (HEISENBERG, VIRASORO, ModuleRealization, StateVector, construct_voa, gram_determinant,
                  level)


class StateSyntaxError(ValueError):
    """Malformed state expression; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}\n  {text}\n  {' ' * pos}^")
        self.pos = pos
        self.text = text


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<gen>[A-Za-z]+)|(?P<ket>\|[^>\s]*>)|(?P<op>[()^/+\-]))")


def _tokens(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise StateSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _ket_for(M: ModuleRealization) -> str:
    if M.kind == "voa-self":
        return "|0>"
    return "|l>" if M.algebra == HEISENBERG else "|h>"


def _gen_for(M: ModuleRealization) -> str:
    return "a" if M.algebra == HEISENBERG else "L"


class _Parser:
    def __init__(self, text: str, M: ModuleRealization):
        self.text, self.M = text, M
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            raise StateSyntaxError(f"expected {want!r}, found {got!r}", self.text, tok[2])
        self.i += 1
        return tok

    def error(self, message, tok):
        return StateSyntaxError(message, self.text, tok[2])

    def expr(self) -> StateVector:
        M = self.M
        if self.peek()[:2] == ("num", "0") and self.toks[self.i + 1][0] == "end":
            return M.zero()
        sign = ONE
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -ONE
        total = {}
        self.term(sign, total)
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = ONE if self.take()[1] == "+" else -ONE
            self.term(sign, total)
        self.take("end")
        return StateVector(M, {p: c for p, c in total.items() if c})

    def rational(self):
        num = int(self.take("num")[1])
        if self.peek()[:2] == ("op", "/"):
            self.take()
            tok = self.take("num")
            den = int(tok[1])
            if den == 0:
                raise self.error("zero denominator", tok)
            return Q(num, den)
        return Q(num)

    def integer(self) -> int:
        neg = False
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            neg = self.take()[1] == "-"
        val = int(self.take("num")[1])
        return -val if neg else val

    def term(self, sign, total: dict):
        coeff = sign
        if self.peek()[0] == "num":
            coeff = coeff * self.rational()
        factors = []
        while self.peek()[0] == "gen":
            tok = self.take()
            if tok[1] not in ("a", "L"):
                raise self.error(f"unknown generator {tok[1]!r}", tok)
            if tok[1] != _gen_for(self.M):
                raise self.error(f"generator {tok[1]!r} does not act on {self.M.describe()}", tok)
            self.take("op", "(")
            j = self.integer()
            self.take("op", ")")
            power = 1
            if self.peek()[:2] == ("op", "^"):
                self.take()
                power = int(self.take("num")[1])
            factors.extend([j] * power)
        tok = self.peek()
        if tok[0] != "ket":
            raise self.error(f"expected a ket, found {tok[1] or 'end of input'!r}", tok)
        self.take()
        if tok[1] not in ("|0>", "|h>", "|l>"):
            raise self.error(f"unknown ket {tok[1]!r}", tok)
        if tok[1] != _ket_for(self.M):
            raise self.error(f"ket {tok[1]} does not denote the lowest vector of {self.M.describe()}", tok)
        vec = {(): coeff}
        for j in reversed(factors):
            vec = self.M.gen_vec(j, vec)
        for p, c in vec.items():
            total[p] = total.get(p, 0) + c


def parse_state(text: str, M: ModuleRealization) -> StateVector:
    """Parse a state expression on the realization ``M``."""
    return _Parser(text, M).expr()


def format_state(v: StateVector) -> str:
    """Canonical text: PBW order, grouped exponents, unit coefficients omitted."""
    M = v.module
    if not v.terms:
        return "0"
    gen, ket = _gen_for(M), _ket_for(M)
    out = []
    for p, c in sorted(v.terms.items(), key=lambda t: (level(t[0]), -len(t[0]), t[0])):
        ops = []
        for n in sorted(set(p), reverse=True):
            e = p.count(n)
            ops.append(f"{gen}({-n})" + (f"^{e}" if e > 1 else ""))
        mono = "".join(ops) + ket
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = mono if mag == 1 else f"{fmt(mag)} {mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


# -- configuration -------------------------------------------------------------

@dataclass
class RunConfig:
    voa: str = HEISENBERG
    c: object = None
    h: object = None
    lam: object = None
    n: int = 0
    cutoff: int = 8
    levels: int = 4
    vmax: int = 6
    seed: int = 0
    output: str = "json"

    def as_json(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = fmt(v) if type(v).__name__ == "mpq" else v
        return out


def _rational(text: str):
    try:
        return Q(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"{text!r} is not an exact rational (expected p or p/q)") from None


def _algebra(cfg: RunConfig):
    if cfg.voa == VIRASORO:
        if cfg.c is None:
            raise SystemExit("error: --voa virasoro needs --c")
        return construct_voa(VIRASORO, cfg.c)
    return construct_voa(HEISENBERG)


def _module(V, cfg: RunConfig):
    if V.algebra == VIRASORO:
        return V.verma(cfg.h) if cfg.h is not None else V
    return V.fock(cfg.lam) if cfg.lam is not None else V


# -- commands ------------------------------------------------------------------

def cmd_an_table(cfg: RunConfig, psi: bool = False) -> tuple[dict, list]:
    V = _algebra(cfg)
    warnings = []
    table = an_table(V, cfg.n, cfg.cutoff)
    states = [format_state(table.rep_state(i)) for i in range(len(table.reps))]
    products = [[i, j, {str(k): fmt(c) for k, c in sorted(coords.items())}]
                for (i, j), coords in sorted(table.products.items())]
    if table.flags:
        need = max(table.flags.values())
        warnings.append(f"{len(table.flags)} products need cutoff up to {need}; rerun with --cutoff {need}")
    ident = table.identity
    identity_ok = all(table.products.get((ident, j), {j: ONE}) == {j: ONE}
                      and table.products.get((j, ident), {j: ONE}) == {j: ONE}
                      for j in range(len(table.reps)))
    # independence of the powers of [omega] that fit the cutoff
    powers, cur = [table.coords(V.vacuum())], table.coords(V.vacuum())
    omega = table.coords(V.omega())
    k = 1
    while 2 * k <= cfg.cutoff:
        cur = table.multiply(omega, cur) if k > 1 else omega
        powers.append(cur)
        k += 1
    span = SpanHandle(track=False)
    omega_rank = sum(1 for p in powers if span.add(p))
    result = {
        "basis": states,
        "levels": table.rep_levels(),
        "filtration_dims": table.filtration_dims(),
        "identity": ident,
        "identity_ok": identity_ok,
        "omega": {str(k): fmt(c) for k, c in sorted(omega.items())},
        "omega_powers": len(powers),
        "omega_powers_rank": omega_rank,
        "products": products,
        "theta": [[i, {str(k): fmt(c) for k, c in sorted(t.items())}] for i, t in sorted(table.theta.items())],
        "internal_cutoff": table.D,
        "flagged_products": len(table.flags),
    }
    if psi and cfg.n >= 1:
        lo = an_table(V, cfg.n - 1, cfg.cutoff)
        result["psi"] = [[i, {str(k): fmt(c) for k, c in sorted(psi_n_reduce({i: ONE}, table, lo).items())}]
                         for i in range(len(table.reps))]
        result["psi_target_basis"] = [format_state(lo.rep_state(i)) for i in range(len(lo.reps))]
    return result, warnings


def cmd_omega(cfg: RunConfig) -> tuple[dict, list]:
    V = _algebra(cfg)
    W = _module(V, cfg)
    ob = omega_n_basis(W, V, cfg.n, cfg.levels, cfg.vmax)
    result = {
        "module": W.describe(),
        "n": cfg.n,
        "K": cfg.levels,
        "vmax": cfg.vmax,
        "label": "candidate" if ob.candidate else "certified",
        "dims": ob.dims,
        "dim": ob.dim,
        "basis": [format_state(b) for b in ob.basis],
    }
    return result, []


class PulledBackModule:
    """An ``A_0(V)``-module seen as an ``A_n(V)``-module through ``psi``.

    The identity map of V induces the surjection onto ``A_0(V)``, so a
    representative acts by the matrix of its class in ``A_0(V)``.
    """

    def __init__(self, base: AnModule, n: int):
        from .anv import build_on_span
        self.base, self.V, self.n, self.dim = base, base.V, n, base.dim
        self.level_limit = base.level_limit
        self.ctx = build_on_span(self.V, n, base.level_limit + 2 * n, "O_n(V)")

    def rho_rep(self, rep: tuple) -> tuple:
        return self.base.rho(StateVector(self.V, {rep: ONE}))

    def rho(self, x: StateVector) -> tuple:
        return self.base.rho(x)

    def lowest_weight(self):
        return self.base.lowest_weight()


def cmd_induce(cfg: RunConfig, udim: int = 1, vmax_given: bool = False, oracle: bool = False) -> tuple[dict, list]:
    V = _algebra(cfg)
    K = cfg.levels
    vmax = cfg.vmax if vmax_given else None
    limit = induce_level_limit(V, cfg.n, K, vmax)
    if V.algebra == VIRASORO:
        gens = [(V.omega(), Q(0) if cfg.h is None else cfg.h)]
    else:
        gens = [(V.generator(), Q(0) if cfg.lam is None else cfg.lam)]
    base = AnModule(V, 0, udim, gens if udim else [], level_limit=limit)
    U = base if cfg.n == 0 or not udim else PulledBackModule(base, cfg.n)
    ref = verma_oracle(K) if oracle else None
    r = induce(V, cfg.n, U, K, vmax=vmax, oracle=ref)
    warnings = list(r.warnings)
    singular = []
    if V.algebra == VIRASORO and udim:
        W = V.verma(gens[0][1])
        singular = [k for k in range(1, K + 1) if not gram_determinant(W, k)]
        if singular:
            warnings.append(f"Verma(c={fmt(cfg.c)}, h={fmt(gens[0][1])}) has a vanishing Gram determinant at "
                            f"levels {singular}; the induced dims can fall below the Verma oracle there")
    result = {
        "n": cfg.n,
        "K": K,
        "dim_U": r.dim_U,
        "lowest_weight": fmt(r.h) if r.h is not None else None,
        "dims": r.dims,
        "below_lowest": {str(k): d for k, d in sorted(r.low_dims.items())},
        "support_ok": r.support_ok,
        "singular_levels": singular,
        "vmax": r.vmax,
        "test_level": r.test_level,
        "label": "certified functionals; dims are ranks on states up to the test level",
    }
    if ref is not None:
        result["oracle"] = ref
        result["oracle_equal"] = r.matches_oracle
        result["oracle_bounded"] = r.bounded_by_oracle
    return result, warnings


def _tampered_theta(v):
    """A broken involution: doubles every component of weight >= 2."""
    from .voa import theta_apply
    t = theta_apply(v)
    return StateVector(t.module, {p: (2 * c if level(p) >= 2 else c) for p, c in t.terms.items()})


def cmd_verify(cfg: RunConfig, suite: str, tamper_theta: bool = False, cutoff_given: bool = False):
    """Run a suite; returns (results, warnings, exit status)."""
    if tamper_theta:
        suites.theta = _tampered_theta
    fixed = cfg.cutoff if cutoff_given else None
    results, warnings = [], []
    try:
        for run in suites.SUITES[suite]:
            kw = {"cutoff": fixed} if getattr(run, "number", 0) in (2, 3, 5) and fixed is not None else {}
            results.append(run(cfg.seed, **kw))
    finally:
        suites.theta = suites._voa.theta_apply
    status = 0
    for r in results:
        for c in r.checks:
            if c.inconclusive:
                warnings.append(f"criterion {r.number}: {c.name}: {c.inconclusive} inconclusive at cutoff")
            if c.kind == suites.LITERAL and c.mismatches:
                warnings.append(f"criterion {r.number}: {c.name}: stated form fails on "
                                f"{c.mismatches}/{c.total} samples (corrected form checked separately)")
        if r.exact_failures:
            status = 1
    return results, warnings, status


# -- output --------------------------------------------------------------------

def _document(cfg: RunConfig, result, warnings) -> dict:
    return {"config": cfg.as_json(), "result": result, "warnings": warnings, "version": __version__}


def _csv_rows(command: str, result: dict) -> list:
    rows = []
    if command == "an-table":
        rows.append(["kind", "i", "j", "k", "value"])
        for i, s in enumerate(result["basis"]):
            rows.append(["basis", i, "", "", s])
        for i, j, coords in result["products"]:
            for k, c in coords.items():
                rows.append(["product", i, j, k, c])
        for i, coords in result["theta"]:
            for k, c in coords.items():
                rows.append(["theta", i, "", k, c])
    elif command == "verify":
        rows.append(["criterion", "check", "kind", "passed", "total", "inconclusive"])
        for r in result:
            for c in r["checks"]:
                rows.append([r["number"], c["name"], c["kind"], c["passed"], c["total"], c["inconclusive"]])
    else:
        rows.append(["level", "dim"])
        for k, d in enumerate(result["dims"]):
            rows.append([k, d])
        if command == "induce" and "oracle" in result:
            rows.append(["oracle", " ".join(map(str, result["oracle"]))])
    return rows


def _emit(command: str, doc: dict, form: str, out) -> None:
    if form == "csv":
        w = csv.writer(out, lineterminator="\n")
        for row in _csv_rows(command, doc["result"]):
            w.writerow(row)
        for warn in doc["warnings"]:
            w.writerow(["warning", warn])
    else:
        json.dump(doc, out, indent=2)
        out.write("\n")


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("VOAFORGE_SEED")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--voa", choices=[HEISENBERG, VIRASORO], default=HEISENBERG)
    common.add_argument("--c", type=_rational, help="central charge (Virasoro)")
    common.add_argument("--h", type=_rational, help="lowest weight (Virasoro Verma module)")
    common.add_argument("--lambda", dest="lam", type=_rational, help="charge (Heisenberg Fock module)")
    common.add_argument("--n", type=int, default=0, help="level n of A_n (default 0)")
    common.add_argument("--cutoff", type=int, default=None, help="weight cutoff D (default 8)")
    common.add_argument("--levels", type=int, default=4, help="level cutoff K (default 4)")
    common.add_argument("--vmax", type=int, default=None, help="generator weight bound (default 6; induce uses 2K for Virasoro, K+1 for Heisenberg)")
    common.add_argument("--seed", type=int, default=int(env_seed) if env_seed else 0,
                        help="random seed (default 0, or $VOAFORGE_SEED)")
    common.add_argument("--oracle", action="store_true", help="compare with the Verma/Fock oracle")
    common.add_argument("--format", dest="fmt", choices=["json", "csv"], default=None)
    p = argparse.ArgumentParser(prog="voaforge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    t = sub.add_parser("an-table", parents=[common], help="A_n(V) representatives and structure constants")
    t.add_argument("--psi", action="store_true", help="also reduce the basis to A_{n-1}(V)")
    sub.add_parser("omega", parents=[common], help="Omega_n candidate space of a module")
    i = sub.add_parser("induce", parents=[common], help="graded dims of the module induced from U")
    i.add_argument("--udim", type=int, choices=[0, 1], default=1, help="dimension of U (0 or 1)")
    v = sub.add_parser("verify", parents=[common], help="run the instance suites")
    v.add_argument("--suite", choices=sorted(suites.SUITES), default="all")
    v.add_argument("--tamper-theta", action="store_true", help=argparse.SUPPRESS)
    s = sub.add_parser("parse", parents=[common], help="parse and canonically print a state")
    s.add_argument("expression")
    return p


def _config(args) -> RunConfig:
    if args.voa == VIRASORO and args.lam is not None:
        raise SystemExit("error: --lambda applies to the Heisenberg VOA")
    if args.voa == HEISENBERG and (args.c is not None or args.h is not None):
        raise SystemExit("error: --c and --h apply to the Virasoro VOA")
    return RunConfig(args.voa, args.c, args.h, args.lam, args.n,
                     8 if args.cutoff is None else args.cutoff, args.levels,
                     6 if args.vmax is None else args.vmax, args.seed, args.fmt or "json")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    try:
        if args.command == "an-table":
            result, warnings = cmd_an_table(cfg, args.psi)
        elif args.command == "omega":
            result, warnings = cmd_omega(cfg)
        elif args.command == "induce":
            result, warnings = cmd_induce(cfg, args.udim, args.vmax is not None, args.oracle)
        elif args.command == "parse":
            V = _algebra(cfg)
            W = _module(V, cfg)
            state = parse_state(args.expression, W)
            result = {"state": format_state(state),
                      "terms": {format_state(StateVector(W, {p: ONE})): fmt(c) for p, c in state.terms.items()}}
            warnings = []
        else:
            results, warnings, status = cmd_verify(cfg, args.suite, args.tamper_theta, args.cutoff is not None)
            if args.fmt is None:
                for r in results:
                    print(r.report(), file=out)
                for w in warnings:
                    print(f"warning: {w}", file=out)
                failed = sorted({c.name for r in results for c in r.exact_failures})
                print(f"exit status {status}" + (f"; failing identities: {'; '.join(failed)}" if failed else ""),
                      file=out)
                return status
            payload = [{"number": r.number, "title": r.title, "accepted": r.accepted,
                        "seconds": round(r.seconds, 2), "notes": r.notes,
                        "checks": [{"name": c.name, "kind": c.kind, "passed": c.passed, "total": c.total,
                                    "inconclusive": c.inconclusive, "failures": c.failures}
                                   for c in r.checks]} for r in results]
            _emit("verify", _document(cfg, payload, warnings), cfg.output, out)
            return status
    except CutoffInsufficientError as exc:
        print(f"error: {exc}; required cutoff {exc.required}", file=sys.stderr)
        return 2
    except StateSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(args.command, _document(cfg, result, warnings), cfg.output, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
