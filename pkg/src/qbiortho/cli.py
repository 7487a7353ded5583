"""Verification campaigns from the command line.

Config files are flat ``key = value`` text with ``#`` comments. Rationals are
written ``num/den``; the racah campaign refuses decimals so exact-zero claims
never pass through floating point.

Exit codes: 0 every row passed, 1 any row failed or was skipped (or no rows
ran), 2 usage or config error.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import classical, qracah, qwilson
from .errors import ConfigError, GridTooCoarse, QBiorthoError, TolNotReached
from .qcore import qpochhammer_inf
from .report import EXACT_ZERO, VerificationReport, format_value, to_csv, to_json

FAMILIES = ("racah", "qwilson", "classical", "askey-roy")

DEFAULTS = {
    "racah": {"N": "3", "alpha": "1/3", "gamma": "1/5", "gamma_p": "1/7", "c": "3/2", "q": "1/2"},
    "qwilson": {
        "a": "0.35,0.3", "b": "0.3,0.25", "c": "0.2", "d": "0.3", "beta": "0.4", "beta_alt": "0.55",
        "q": "0.5", "max_degree": "2", "grid": "128", "tolerance": "1e-6", "phi": "0.7,-1.1",
    },
    "classical": {"a": "1", "b": "0.8", "c": "0.6", "d": "0.4", "max_degree": "3", "tolerance": "1e-6",
                  "x": "0.3,1.2,2.5"},
    "limit": {"a": "0.5,0.7", "b": "0.6,0.4", "c": "0.8", "d": "0.9", "x": "0.3,-0.2",
              "degrees": "1,0;0,1;1,1", "q_values": "0.9,0.99,0.999"},
}

REQUIRED = {
    "racah": ("N", "alpha", "gamma", "gamma_p", "c", "q"),
    "qwilson": ("a", "b", "c", "d", "beta", "q"),
    "classical": ("a", "b", "c", "d"),
    "limit": ("a", "b", "c", "d", "x"),
}


@dataclass
class CampaignConfig:
    family: str
    values: dict = field(default_factory=dict)
    tolerance: float | None = None
    jobs: int = 1

    def get(self, key: str) -> str:
        try:
            return self.values[key]
        except KeyError:
            raise ConfigError(f"missing required key {key!r}") from None

    def rational(self, key: str) -> Fraction:
        text = self.get(key)
        if any(ch in text.lower() for ch in ".e") and "/" not in text:
            raise ConfigError(f"{key} = {text!r}: exact campaigns need integers or num/den rationals")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{key} = {text!r} is not a rational") from None

    def real(self, key: str) -> float:
        text = self.get(key)
        try:
            return float(Fraction(text)) if "/" in text else float(text)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{key} = {text!r} is not a real number") from None

    def reals(self, key: str) -> tuple[float, ...]:
        parts = [s.strip() for s in self.get(key).split(",") if s.strip()]
        if not parts:
            raise ConfigError(f"{key} must list at least one value")
        out = []
        for s in parts:
            try:
                out.append(float(Fraction(s)) if "/" in s else float(s))
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"{key}: {s!r} is not a real number") from None
        return tuple(out)

    def integer(self, key: str) -> int:
        try:
            return int(self.get(key))
        except ValueError:
            raise ConfigError(f"{key} must be an integer") from None


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(family: str, path: str | None, tolerance: float | None, jobs: int) -> CampaignConfig:
    values = dict(DEFAULTS[family]) if path is None else {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                values = parse_config_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    declared = values.pop("family", None)
    if declared is not None and declared not in FAMILIES:
        raise ConfigError(f"unknown family {declared!r}")
    expected = {"racah": ("racah",), "qwilson": ("qwilson", "askey-roy"), "classical": ("classical",),
                "limit": ("qwilson",)}[family]
    if declared is not None and declared not in expected:
        raise ConfigError(f"config declares family {declared!r}, which this command does not run")
    for key in REQUIRED[family]:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    for key, value in DEFAULTS[family].items():
        values.setdefault(key, value)
    if tolerance is not None:
        if family == "racah":
            raise ConfigError("--tolerance applies to float campaigns only")
        if not tolerance > 0:
            raise ConfigError("--tolerance must be positive")
    return CampaignConfig(family, values, tolerance, jobs)


def _timed(fn: Callable[[], VerificationReport]) -> VerificationReport:
    start = time.perf_counter()
    row = fn()
    row.runtime_ms = int((time.perf_counter() - start) * 1000)
    return row


def _run_rows(tasks: list[Callable[[], VerificationReport]], jobs: int) -> list[VerificationReport]:
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_timed, tasks))
    else:
        rows = [_timed(t) for t in tasks]
    return sorted(rows, key=VerificationReport.sort_key)


def _exact_row(identity: str, inputs: dict, computed, reference) -> VerificationReport:
    diff = computed - reference
    residual = EXACT_ZERO if diff == 0 else float(abs(diff))
    return VerificationReport(identity, inputs, format_value(computed), format_value(reference), residual,
                              "pass" if diff == 0 else "fail", 0)


def _float_row(identity: str, inputs: dict, computed, reference, residual: float, tol: float,
               notes: str = "") -> VerificationReport:
    status = "pass" if residual <= tol else "fail"
    return VerificationReport(identity, inputs, format_value(computed), format_value(reference), residual,
                              status, 0, notes)


# racah


def racah_tasks(params: qracah.RacahParams) -> list[tuple[str, dict, Callable]]:
    """(identity, inputs, thunk) for every row; thunk returns (computed, reference)."""
    base = params.as_dict()
    pairs = qracah.degree_pairs(params.N)
    tasks = []
    for (m, n), (m2, n2) in itertools.product(pairs, pairs):
        def thunk(m=m, n=n, m2=m2, n2=n2):
            ref = qracah.racah_norm(m, n, params) if (m, n) == (m2, n2) else Fraction(0)
            return qracah.inner_product(m, n, m2, n2, params), ref
        tasks.append(("racah-biorthogonality", {**base, "mn": f"{m},{n}", "mn2": f"{m2},{n2}"}, thunk))
    tasks.append(("racah-weight-sum", dict(base), lambda: (qracah.weight_sum(params), Fraction(1))))
    for m, n in pairs:
        for label, f, g in (("F", qracah.racah_F, qracah.racah_F_alt), ("G", qracah.racah_G, qracah.racah_G_alt)):
            def thunk(m=m, n=n, f=f, g=g):
                worst = max(abs(f(m, n, x, y, params) - g(m, n, x, y, params)) for x, y in qracah.support(params.N))
                return worst, Fraction(0)
            tasks.append((f"racah-{label}-representations", {**base, "mn": f"{m},{n}"}, thunk))
    return tasks


def cmd_verify_racah(config: CampaignConfig) -> list[VerificationReport]:
    N = config.integer("N")
    try:
        params = qracah.RacahParams(N, *(config.rational(k) for k in ("alpha", "gamma", "gamma_p", "c", "q")))
    except QBiorthoError as exc:
        raise ConfigError(str(exc)) from None
    violations = qracah.validate_params(params)
    tasks = racah_tasks(params)
    if violations:
        notes = "inadmissible parameters: " + "; ".join(violations)
        return sorted((VerificationReport(ident, inputs, "", "", math.nan, "skipped", 0, notes)
                       for ident, inputs, _ in tasks), key=VerificationReport.sort_key)

    def row(task):
        ident, inputs, thunk = task
        return lambda: _exact_row(ident, inputs, *thunk())

    return _run_rows([row(t) for t in tasks], config.jobs)


# qwilson and askey-roy


def _continuous_params(config: CampaignConfig, beta_key: str = "beta") -> qwilson.ContinuousParams:
    try:
        return qwilson.ContinuousParams(config.reals("a"), config.reals("b"), config.real("c"), config.real("d"),
                                        config.real(beta_key), config.real("q"))
    except QBiorthoError as exc:
        raise ConfigError(str(exc)) from None


def cmd_verify_qwilson(config: CampaignConfig) -> list[VerificationReport]:
    params = _continuous_params(config)
    if params.p > qwilson.MAX_VERIFY_DIM:
        raise ConfigError(f"quadrature campaigns support p <= {qwilson.MAX_VERIFY_DIM}")
    tol = config.tolerance or config.real("tolerance")
    grid = config.integer("grid")
    max_degree = config.integer("max_degree")
    base = {**params.as_dict(), "grid": str(grid)}
    tasks = []

    def total_weight():
        value, est = qwilson.total_weight_quadrature(params, grid)
        ref = qwilson.total_weight_closed(params)
        return _float_row("qwilson-total-weight", base, value, ref, abs(value - ref) / abs(ref), tol,
                          f"two-resolution estimate {est:.3e}")

    tasks.append(total_weight)

    degrees = [n for n in itertools.product(range(max_degree + 1), repeat=params.p) if sum(n) <= max_degree]
    scale = max(abs(qwilson.inner_product_closed(n, n, params)) for n in degrees)
    for n, m in itertools.product(degrees, degrees):
        def bio(n=n, m=m):
            try:
                return qwilson.verify_biorthogonality(n, m, params, grid, tol,
                                                      scale=None if sum(n) == sum(m) else scale)
            except GridTooCoarse as exc:
                ident = "qwilson-diagonal" if sum(n) == sum(m) else "qwilson-off-diagonal"
                inputs = {**base, "n": ",".join(map(str, n)), "m": ",".join(map(str, m))}
                return VerificationReport(ident, inputs, "", "", math.inf, "fail", 0, str(exc))
        tasks.append(bio)

    if params.p >= 2 and "beta_alt" in config.values:
        alt = _continuous_params(config, "beta_alt")

        def beta_free(prm):
            def f(th):
                w = qwilson.weight_q(th, prm)
                for k in range(1, prm.p):
                    t = prm.b[k] * prm.betas[k]
                    w = w / (qpochhammer_inf(t, prm.q) * qpochhammer_inf(prm.q / t, prm.q))
                return w
            return qwilson.torus_quadrature(f, prm, grid)[0]

        def beta_invariance():
            v1, v2 = beta_free(params), beta_free(alt)
            return _float_row("qwilson-beta-invariance", {**base, "beta_alt": repr(alt.beta)}, v2, v1,
                              abs(v2 - v1) / abs(v1), tol)

        tasks.append(beta_invariance)

        for phi in config.reals("phi"):
            def askey_roy(phi=phi):
                try:
                    ar = qwilson.AskeyRoyParams(params.a[0], params.a[1], params.b[0], params.b[1],
                                                params.beta, phi, params.q)
                except QBiorthoError as exc:
                    raise ConfigError(str(exc)) from None
                value, est = qwilson.askey_roy_quadrature(ar, 256)
                ref = qwilson.askey_roy_closed(ar)
                return _float_row("askey-roy", ar.as_dict(), value, ref, abs(value - ref) / abs(ref), tol,
                                  f"two-resolution estimate {est:.3e}")
            tasks.append(askey_roy)

    return _run_rows(tasks, config.jobs)


# classical


def cmd_verify_classical(config: CampaignConfig) -> list[VerificationReport]:
    try:
        params = classical.WilsonParams(*(config.real(k) for k in ("a", "b", "c", "d")))
    except QBiorthoError as exc:
        raise ConfigError(str(exc)) from None
    tol = config.tolerance or config.real("tolerance")
    max_degree = config.integer("max_degree")
    base = {k: repr(getattr(params, k)) for k in ("a", "b", "c", "d")}
    norms = {n: classical.wilson_norm(n, params) for n in range(max_degree + 1)}
    tasks = []
    for n, m in itertools.product(range(max_degree + 1), repeat=2):
        def ortho(n=n, m=m):
            inputs = {**base, "n": str(n), "m": str(m)}
            try:
                value, est = classical.wilson_inner_product(n, m, params)
            except TolNotReached as exc:
                return VerificationReport("wilson-orthogonality", inputs, "", "", math.inf, "fail", 0, str(exc))
            if n == m:
                ref = norms[n]
                residual = abs(value - ref) / ref
            else:
                ref = 0.0
                residual = abs(value) / math.sqrt(norms[n] * norms[m])
            return _float_row("wilson-orthogonality", inputs, value, ref, residual, tol, f"error estimate {est:.3e}")
        tasks.append(ortho)

    tparams = classical.TratnikParams((params.a,), (params.b,), params.c, params.d)
    for n in range(max_degree + 1):
        for x in config.reals("x"):
            def reduction(n=n, x=x):
                ref = classical.wilson_poly(n, x, params)
                vp = classical.tratnik_P((n,), (x,), tparams)
                vb = classical.tratnik_Pbar((n,), (x,), tparams)
                residual = max(abs(vp - ref), abs(vb - ref)) / max(1.0, abs(ref))
                return _float_row("tratnik-single-variable", {**base, "n": str(n), "x": repr(x)}, vp, ref,
                                  residual, tol)
            tasks.append(reduction)
    return _run_rows(tasks, config.jobs)


# q -> 1 limits


def _parse_degrees(text: str, p: int) -> list[tuple[int, ...]]:
    out = []
    for chunk in text.split(";"):
        try:
            n = tuple(int(s) for s in chunk.split(","))
        except ValueError:
            raise ConfigError(f"bad degree vector {chunk!r}") from None
        if len(n) != p or min(n) < 0:
            raise ConfigError(f"degree vector {chunk!r} must have {p} nonnegative entries")
        out.append(n)
    return out


def cmd_limit_check(config: CampaignConfig) -> list[VerificationReport]:
    a, b, x = config.reals("a"), config.reals("b"), config.reals("x")
    c, d = config.real("c"), config.real("d")
    if not len(a) == len(b) == len(x):
        raise ConfigError("a, b and x must have the same length")
    try:
        tparams = classical.TratnikParams(a, b, c, d)
    except QBiorthoError as exc:
        raise ConfigError(str(exc)) from None
    qs = config.reals("q_values")
    if any(not 0 < q < 1 for q in qs) or list(qs) != sorted(qs):
        raise ConfigError("q_values must be increasing and inside (0, 1)")
    base = {"a": config.get("a"), "b": config.get("b"), "c": repr(c), "d": repr(d), "x": config.get("x"),
            "q_values": config.get("q_values")}
    tasks = []
    for n in _parse_degrees(config.get("degrees"), len(a)):
        for label, scaled, target in (("P", qwilson.scaled_qP, classical.tratnik_P),
                                      ("Pbar", qwilson.scaled_qPbar, classical.tratnik_Pbar)):
            def limit(n=n, scaled=scaled, target=target, label=label):
                ref = target(n, x, tparams)
                gaps = [abs(scaled(n, x, a, b, c, d, q) - ref) for q in qs]
                ratios = [g2 / g1 if g1 else math.inf for g1, g2 in zip(gaps, gaps[1:])]
                worst = max(ratios) if ratios else 0.0
                status = "pass" if all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:])) else "fail"
                return VerificationReport(f"qwilson-limit-{label}", {**base, "n": ",".join(map(str, n))},
                                          ",".join(repr(g) for g in gaps), format_value(ref), worst, status, 0,
                                          "computed lists |scaled q-value - limit| along q_values; residual is "
                                          "the largest successive ratio")
            tasks.append(limit)
    return _run_rows(tasks, config.jobs)


COMMANDS = {
    "verify-racah": ("racah", cmd_verify_racah),
    "verify-qwilson": ("qwilson", cmd_verify_qwilson),
    "verify-classical": ("classical", cmd_verify_classical),
    "limit-check": ("limit", cmd_limit_check),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbiortho", description="Verify biorthogonality identities.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value file; built-in defaults when omitted")
        p.add_argument("--output", help="report path; stdout when omitted")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--tolerance", type=float, help="float campaigns only")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    family, command = COMMANDS[args.command]
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        config = load_config(family, args.config, args.tolerance, args.jobs)
        rows = command(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    text = to_json(rows) if args.format == "json" else to_csv(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    counts = {s: sum(r.status == s for r in rows) for s in ("pass", "fail", "skipped")}
    print(f"{args.command}: {len(rows)} rows, {counts['pass']} pass, {counts['fail']} fail, "
          f"{counts['skipped']} skipped", file=sys.stderr)
    return 0 if rows and counts["pass"] == len(rows) else 1
