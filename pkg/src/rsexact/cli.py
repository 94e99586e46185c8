"""Command-line interface for the exact Rankin-Selberg toolkit.

Subcommands
-----------
bessel-table
    Tabulate the kernel of one cuspidal type over its finite quotient
    (depth-zero: the full finite general linear group; ramified: units
    times the pro-p coset grid), together with a properties summary
    (identity, duality, convolution).
verify
    Run the exact local integral for a pair of types, check the closed
    form and every structural diagnostic, and emit a report.
reduce
    Rerun the integral over a residue field of banal characteristic ell
    and compare with the coefficient-wise reduction of the closed form.
oracle-check
    Compare Laurent coefficients of the engine against the
    window-truncated brute-force lattice sum.

Exit codes
----------
0   all requested checks passed
1   the run completed but a verification check failed
2   configuration error (bad flags, non-regular character data, ...)
3   refusal: ell is not banal for the requested type

Scalar literals
---------------
``--A``, ``--A2`` and ``--twist`` accept a small expression grammar::

    literal :=  term (("+" | "-") term)*
    term    :=  factor ("*" factor)*
    factor  :=  "zeta(" N ")" ["^" [-] k]  |  a  |  a "/" b

so for example ``1``, ``-1``, ``2/3``, ``zeta(4)``, ``zeta(8)^3`` and
``zeta(4) * 1/2`` are all valid.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from sympy import isprime

from .cuspchar import bessel_convolution_check, finite_bessel
from .cyclo import CycNumber, parse_cyc
from .errors import NonBanal, NotIntegralAtEll, RSExactError
from .finitefield import AddChar, gf
from .integral import (
    RSPair,
    _j1_coset_reps,
    c_k_bruteforce,
    rankin_selberg_I,
    verify_main_theorem,
)
from .lmodular import verify_corollary
from .matgroups import FiniteMatrix, enumerate_group
from .padic import PadicMatrix
from .ratfun import series_coefficients
from .simpletypes import DEPTH_ZERO, RAMIFIED, SimpleTypeData, make_type

ORACLE_KMAX = 6
DEFAULT_WINDOW = 4
SHELLS = 4

_GRAMMAR_EPILOG = """\
scalar literals (--A, --A2, --twist):
    literal :=  term (("+" | "-") term)*
    term    :=  factor ("*" factor)*
    factor  :=  "zeta(" N ")" ["^" [-] k]  |  a  |  a "/" b
  examples: "1", "-1", "2/3", "zeta(4)", "zeta(8)^3", "zeta(4) * 1/2"
  (literals starting with "-" need the "=" form, e.g. --A2=-1)

exit codes:
  0 checks passed   1 verification failure   2 configuration error
  3 refused: ell is not banal for the requested type
"""


# -- run configuration ----------------------------------------------------


@dataclass
class RunConfig:
    """Plain-data record of one CLI invocation.

    Every field is JSON-serializable, so a config can be emitted, stored,
    and parsed back losslessly; identical configs produce byte-identical
    reports.
    """

    command: str
    family: str = DEPTH_ZERO
    p: int = 2
    n: int = 2
    theta: int | None = None
    sigma: int | None = None
    orientation: int = 1
    A: str | None = None
    theta2: int | None = None
    sigma2: int | None = None
    orientation2: int | None = None
    A2: str | None = None
    twist: str | None = None
    ell: int | None = None
    ideal: int = 0
    window: int | None = None
    jobs: int = 1
    gl3: bool = False
    out: str | None = None
    format: str = "json"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def emit(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))


def _normalize_scalar(text: str | None) -> str | None:
    """Canonicalize a scalar literal so equal values compare equal."""
    if text is None:
        return None
    return str(parse_cyc(text))


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        family=ns.family,
        p=ns.p,
        n=ns.n,
        theta=ns.theta,
        sigma=ns.sigma,
        orientation=ns.orientation,
        A=_normalize_scalar(ns.A),
        theta2=ns.theta2,
        sigma2=ns.sigma2,
        orientation2=ns.orientation2,
        A2=_normalize_scalar(ns.A2),
        twist=_normalize_scalar(ns.twist),
        ell=ns.ell,
        ideal=ns.ideal,
        window=ns.window,
        jobs=ns.jobs,
        gl3=ns.gl3,
        out=ns.out,
        format=ns.format,
    )


def _validate(cfg: RunConfig) -> None:
    if cfg.family not in (DEPTH_ZERO, RAMIFIED):
        raise ValueError(f"unknown family {cfg.family!r}")
    if not isprime(cfg.p):
        raise ValueError(f"residue characteristic {cfg.p} is not prime")
    if cfg.n not in (2, 3):
        raise ValueError("only n in {2, 3} is supported")
    if cfg.n == 3 and not cfg.gl3:
        raise ValueError("n = 3 requires the --gl3 flag")
    if cfg.n == 3 and cfg.family == RAMIFIED:
        raise ValueError("the ramified family supports n = 2 only")
    if cfg.window is not None and cfg.window < 0:
        raise ValueError("--window must be nonnegative")
    if cfg.jobs < 1:
        raise ValueError("--jobs must be at least 1")
    if cfg.command == "reduce" and cfg.ell is None:
        raise ValueError("reduce needs --ell")
    if cfg.command == "oracle-check" and cfg.n != 2:
        raise ValueError("oracle-check supports n = 2 only")


# -- type construction ----------------------------------------------------


def _make_type1(cfg: RunConfig) -> SimpleTypeData:
    A = parse_cyc(cfg.A) if cfg.A is not None else None
    return make_type(
        cfg.family,
        cfg.p,
        n=cfg.n,
        theta=cfg.theta,
        A=A,
        sigma=cfg.sigma,
        orientation=cfg.orientation,
    )


def _make_types(cfg: RunConfig):
    """Build (type1, type2, twist); type2 defaults field-wise to the
    canonical dual of type1."""
    t1 = _make_type1(cfg)
    dual = t1.dual_params()
    params = dict(dual)
    if cfg.theta2 is not None:
        params["theta"] = cfg.theta2
    if cfg.sigma2 is not None:
        params["sigma"] = cfg.sigma2
    if cfg.orientation2 is not None:
        params["orientation"] = cfg.orientation2
    if cfg.A2 is not None:
        params["A"] = parse_cyc(cfg.A2)
    family = params.pop("family")
    p = params.pop("p")
    t2 = make_type(family, p, **params)
    twist = parse_cyc(cfg.twist) if cfg.twist is not None else None
    return t1, t2, twist


# -- output helpers -------------------------------------------------------


def _render_json(obj: dict) -> str:
    return json.dumps(obj, indent=2)


def _render_csv(rows) -> str:
    return "\n".join(",".join(str(c) for c in row) for row in rows)


def _emit(cfg: RunConfig, text: str) -> None:
    payload = text if text.endswith("\n") else text + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)


def _fail_note(names) -> None:
    print("verification failed: " + ", ".join(names), file=sys.stderr)


# -- bessel-table ---------------------------------------------------------


def _matrix_ints(g: FiniteMatrix) -> list:
    return [[e.c[0] for e in row] for row in g.rows]


def _depth_zero_table(cfg: RunConfig, t1: SimpleTypeData):
    field = gf(cfg.p)
    psi = AddChar(field, 1)
    J = finite_bessel(t1.chi, psi)
    Jdual = finite_bessel(t1.chi.dual(), psi.inverse())
    G = enumerate_group(field, cfg.n)
    rows = [{"g": _matrix_ints(g), "value": str(J.value(g))} for g in G]

    identity_ok = J.value(FiniteMatrix.identity(field, cfg.n)) == 1
    duality_ok = all(Jdual.value(g) == J.value(g.inverse()) for g in G)
    if len(G) ** 2 <= 2500:
        pairs = [(g1, g2) for g1 in G for g2 in G]
    else:
        import random

        rng = random.Random(1009 * cfg.p + 17 * cfg.n)
        pairs = [(rng.choice(G), rng.choice(G)) for _ in range(200)]
    convolution_ok = all(bessel_convolution_check(J, J, g1, g2) for g1, g2 in pairs)
    checks = {
        "identity": identity_ok,
        "duality": duality_ok,
        "convolution": convolution_ok,
        "pairs_checked": len(pairs),
    }
    return rows, checks


def _ramified_table(cfg: RunConfig, t1: SimpleTypeData):
    p = cfg.p
    reps = []
    for r in range(1, p):
        for y in _j1_coset_reps(p):
            j = PadicMatrix(
                [
                    [r * (1 + y.entry(0, 0)), r * y.entry(0, 1)],
                    [r * y.entry(1, 0), r * (1 + y.entry(1, 1))],
                ]
            )
            reps.append(j)
    rows = [
        {"g": [[int(j.entry(i, k)) for k in range(2)] for i in range(2)],
         "value": str(t1.lam(j))}
        for j in reps
    ]

    t2 = make_type(**t1.dual_params())
    identity_ok = t1.lam(PadicMatrix.identity(2)) == 1
    duality_ok = all(t2.lam(j) == t1.lam(j.inverse()) for j in reps)
    import random

    rng = random.Random(1009 * p + 3)
    pairs = [(rng.choice(reps), rng.choice(reps)) for _ in range(100)]
    conv_ok = all(t1.lam(j1 * j2) == t1.lam(j1) * t1.lam(j2) for j1, j2 in pairs)
    checks = {
        "identity": identity_ok,
        "duality": duality_ok,
        "convolution": conv_ok,
        "pairs_checked": len(pairs),
    }
    return rows, checks


def cmd_bessel_table(cfg: RunConfig):
    t1 = _make_type1(cfg)
    if cfg.family == DEPTH_ZERO:
        rows, checks = _depth_zero_table(cfg, t1)
    else:
        rows, checks = _ramified_table(cfg, t1)
    ok = all(bool(v) for k, v in checks.items() if k != "pairs_checked")
    if cfg.format == "csv":
        n = len(rows[0]["g"])
        header = [f"g{i + 1}{j + 1}" for i in range(n) for j in range(n)] + ["value"]
        table = [header] + [
            [str(e) for grow in r["g"] for e in grow] + [r["value"]] for r in rows
        ]
        comments = "\n".join(
            f"# {k}: {v if k == 'pairs_checked' else ('pass' if v else 'FAIL')}"
            for k, v in checks.items()
        )
        text = comments + "\n" + _render_csv(table)
    else:
        text = _render_json(
            {"config": cfg.to_dict(), "rows": rows, "checks": checks}
        )
    if not ok:
        _fail_note([k for k, v in checks.items() if k != "pairs_checked" and not v])
    return (0 if ok else 1), text


# -- verify ---------------------------------------------------------------


def _oracle_worker(payload) -> str:
    """Compute one window-truncated oracle coefficient in a subprocess."""
    cfg = RunConfig.parse(payload[0])
    k = payload[1]
    t1, t2, twist = _make_types(cfg)
    pair = RSPair(t1, t2, twist=twist)
    window = cfg.window if cfg.window is not None else DEFAULT_WINDOW
    return str(c_k_bruteforce(pair, k, window))


def _parallel_oracle_rows(cfg: RunConfig, pair: RSPair):
    series = series_coefficients(rankin_selberg_I(pair), ORACLE_KMAX)
    payloads = [(cfg.emit(), k) for k in range(ORACLE_KMAX + 1)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            oracle_strs = list(pool.map(_oracle_worker, payloads))
    else:
        oracle_strs = [_oracle_worker(payload) for payload in payloads]
    rows = []
    for k, text in enumerate(oracle_strs):
        rows.append(
            {
                "k": k,
                "engine": str(series[k]),
                "oracle": text,
                "match": parse_cyc(text) == series[k],
            }
        )
    return rows


def _oracle_requested(cfg: RunConfig) -> bool:
    if cfg.n != 2:
        return False
    if cfg.window is not None:
        return True
    return cfg.p <= 3


def cmd_verify(cfg: RunConfig):
    t1, t2, twist = _make_types(cfg)
    with_oracle = _oracle_requested(cfg)
    if with_oracle and cfg.jobs > 1:
        report = verify_main_theorem(t1, t2, twist=twist, with_oracle=False)
        report.oracle = _parallel_oracle_rows(cfg, report.pair)
    else:
        window = cfg.window if cfg.window is not None else DEFAULT_WINDOW
        report = verify_main_theorem(
            t1,
            t2,
            twist=twist,
            with_oracle=with_oracle,
            oracle_kmax=ORACLE_KMAX,
            oracle_window=window,
        )
    if cfg.format == "csv":
        text = _render_csv(report.csv_rows(SHELLS))
    else:
        text = _render_json({"config": cfg.to_dict(), **report.to_json()})
    if not report.passed:
        failed = [k for k, v in report.checks.items() if not bool(v)]
        if report.oracle is not None and not all(r["match"] for r in report.oracle):
            failed.append("oracle")
        _fail_note(failed)
    return (0 if report.passed else 1), text


# -- reduce ---------------------------------------------------------------


def cmd_reduce(cfg: RunConfig):
    t1, t2, twist = _make_types(cfg)
    report = verify_corollary(t1, t2, cfg.ell, twist=twist, factor_index=cfg.ideal)
    data = report.to_json()
    if cfg.format == "csv":
        rows = [("key", "value")] + [
            (k, json.dumps(v) if isinstance(v, (dict, list)) else str(v))
            for k, v in data.items()
        ]
        text = _render_csv(rows)
    else:
        text = _render_json({"config": cfg.to_dict(), **data})
    if not report.match:
        _fail_note(["corollary"])
    return (0 if report.match else 1), text


# -- oracle-check ---------------------------------------------------------


def cmd_oracle_check(cfg: RunConfig):
    t1, t2, twist = _make_types(cfg)
    pair = RSPair(t1, t2, twist=twist)
    rows = _parallel_oracle_rows(cfg, pair)
    all_match = all(r["match"] for r in rows)
    if cfg.format == "csv":
        table = [("k", "engine", "oracle", "match")] + [
            (r["k"], r["engine"], r["oracle"], r["match"]) for r in rows
        ]
        text = _render_csv(table)
    else:
        text = _render_json(
            {"config": cfg.to_dict(), "rows": rows, "all_match": all_match}
        )
    if not all_match:
        _fail_note(["oracle"])
    return (0 if all_match else 1), text


# -- entry point ----------------------------------------------------------


DISPATCH = {
    "bessel-table": cmd_bessel_table,
    "verify": cmd_verify,
    "reduce": cmd_reduce,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("type data")
    g.add_argument("--family", choices=[DEPTH_ZERO, RAMIFIED], default=DEPTH_ZERO)
    g.add_argument("--p", "--q", dest="p", type=int, default=2,
                   help="residue characteristic (alias --q)")
    g.add_argument("--n", type=int, default=2, help="group size n (2, or 3 with --gl3)")
    g.add_argument("--gl3", action="store_true",
                   help="enable the GL_3 depth-zero route (n = 3)")
    g.add_argument("--theta", type=int, default=None,
                   help="depth-zero character index for type 1")
    g.add_argument("--sigma", type=int, default=None,
                   help="ramified character index for type 1")
    g.add_argument("--orientation", type=int, choices=(1, -1), default=1,
                   help="ramified orientation for type 1")
    g.add_argument("--A", default=None,
                   help="uniformizer scalar of type 1 (scalar literal)")
    g2 = common.add_argument_group("second type (defaults to the canonical dual)")
    g2.add_argument("--theta2", type=int, default=None)
    g2.add_argument("--sigma2", type=int, default=None)
    g2.add_argument("--orientation2", type=int, choices=(1, -1), default=None)
    g2.add_argument("--A2", default=None)
    g2.add_argument("--twist", default=None,
                    help="unramified twist scalar applied to type 2")
    g3 = common.add_argument_group("run options")
    g3.add_argument("--ell", type=int, default=None,
                    help="residue characteristic for reduce")
    g3.add_argument("--ideal", type=int, default=0,
                    help="index of the prime factor above ell")
    g3.add_argument("--window", type=int, default=None,
                    help="oracle truncation window (forces the oracle on)")
    g3.add_argument("--jobs", type=int, default=1,
                    help="parallel worker processes for oracle coefficients")
    g3.add_argument("--out", default=None, help="write the report to this file")
    g3.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(
        prog="rsexact",
        description=(
            "Exact Rankin-Selberg integrals and mod-ell reduction for explicit "
            "cuspidal types."
        ),
        epilog=_GRAMMAR_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bessel-table", parents=[common],
                   help="tabulate the kernel over the finite quotient",
                   epilog=_GRAMMAR_EPILOG,
                   formatter_class=argparse.RawDescriptionHelpFormatter)
    sub.add_parser("verify", parents=[common],
                   help="run and check the exact local integral",
                   epilog=_GRAMMAR_EPILOG,
                   formatter_class=argparse.RawDescriptionHelpFormatter)
    sub.add_parser("reduce", parents=[common],
                   help="compare the mod-ell rerun with the reduced closed form",
                   epilog=_GRAMMAR_EPILOG,
                   formatter_class=argparse.RawDescriptionHelpFormatter)
    sub.add_parser("oracle-check", parents=[common],
                   help="compare engine coefficients with the brute-force oracle",
                   epilog=_GRAMMAR_EPILOG,
                   formatter_class=argparse.RawDescriptionHelpFormatter)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        _validate(cfg)
        code, text = DISPATCH[cfg.command](cfg)
    except NonBanal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except NotIntegralAtEll as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (RSExactError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    _emit(cfg, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
