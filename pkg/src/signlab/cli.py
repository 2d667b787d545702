"""``signlab`` command line: every experiment as a subcommand writing CSV/JSON.

Exit codes: 0 ok, 2 bad parameters, 3 data problems (unknown label, corrupt
or missing data), 4 best-effort search that missed its target, 5 a table
bound overrun.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import math
import os
import platform
import sys
from pathlib import Path

import mpmath
import numpy as np

from . import __version__
from .errors import BudgetExhausted, ConfigError, DataError, SignlabError

log = logging.getLogger("signlab")


# -- helpers ---------------------------------------------------------------


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{s} is not a positive integer")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"{s} is not a positive number")
    return v


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


class Run:
    """Collects the artifacts of one subcommand and writes the manifest last."""

    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.files: list[str] = []
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {self.out}: {exc}") from exc
        if not os.access(self.out, os.W_OK):
            raise ConfigError(f"output directory {self.out} is not writable")

    def write(self, name: str, text: str) -> None:
        from .coeffs.cache import atomic_write

        atomic_write(self.out / name, text)
        self.files.append(name)

    def json(self, name: str, obj) -> None:
        self.write(name, _dumps(obj))

    def manifest(self, status: int) -> None:
        params = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func",)}
        body = {
            "subcommand": self.args.command,
            "argv": self.argv,
            "parameters": params,
            "seed": self.args.seed,
            "offline": self.args.offline,
            "outputs": sorted(self.files),
            "exit_status": status,
            "versions": {
                "signlab": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "mpmath": mpmath.__version__,
            },
            "started_at": self.started,
            "finished_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
        from .coeffs.cache import atomic_write

        atomic_write(self.out / "manifest.json", json.dumps(body, sort_keys=True, indent=2, default=str) + "\n")

    started = ""
    argv: list[str] = []
    skip_manifest = False


def _table(args, label: str, B: int):
    from .forms import build_table, get_form

    form = get_form(label)
    return build_table(form.label, B, workers=args.threads)


# -- subcommands -------------------------------------------------------


def cmd_coeffs(args, run: Run) -> int:
    from .coeffs.cache import format_coefficients

    t = _table(args, args.f, args.bound)
    header = {"label": t.label, "level": t.level, "weight": t.weight, "bound": t.bound}
    run.write(f"{t.label}.csv", format_coefficients(header, t.a[1:]))
    run.json("coeffs.json", {"label": t.label, "level": t.level, "weight": t.weight, "bound": t.bound, "first": list(t.a[1:21])})
    return 0


def cmd_angles(args, run: Run) -> int:
    from .satake import angle_table

    t = _table(args, args.f, args.x)
    at = angle_table(t, args.x)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "a_p", "theta"])
    for p, a, th in zip(at.primes.tolist(), at.ap, at.theta.tolist()):
        w.writerow([p, a, repr(th)])
    run.write("angles.csv", buf.getvalue())
    run.json("angles.json", {"label": t.label, "x": args.x, "n_primes": len(at.primes)})
    return 0


def cmd_sato_tate(args, run: Run) -> int:
    from .satake import angle_table, equidistribution_report, ks_distance, marginal_cdf

    f = _table(args, args.f, args.x)
    af = angle_table(f, args.x)
    if args.g:
        g = _table(args, args.g, args.x)
        rep = equidistribution_report(af, angle_table(g, args.x), args.x, args.grid)
        run.write("cells.csv", rep.to_csv())
        run.json("sato_tate.json", {"f": f.label, "g": g.label, "x": args.x, "grid": args.grid, **rep.summary()})
        return 0
    g_n = args.grid
    idx = np.minimum((af.theta * 2 * g_n).astype(np.int64), g_n - 1)
    counts = np.bincount(idx, minlength=g_n)
    edges = np.linspace(0.0, 0.5, g_n + 1)
    theo = np.diff(marginal_cdf(edges))
    n = len(af.theta)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cell_u", "empirical", "theoretical"])
    for i in range(g_n):
        w.writerow([repr(float(edges[i])), repr(float(counts[i] / n)), repr(float(theo[i]))])
    run.write("cells.csv", buf.getvalue())
    run.json(
        "sato_tate.json",
        {
            "f": f.label,
            "x": args.x,
            "grid": g_n,
            "n_primes": n,
            "frequencies": [float(c / n) for c in counts],
            "ks_distance": ks_distance(af.theta),
        },
    )
    return 0


def cmd_relations(args, run: Run) -> int:
    from .relations import angle_pairs, relation_scan, sample_admissible_primes, scan_report

    f = _table(args, args.f, args.x)
    g = _table(args, args.g, args.x)
    primes = args.primes or sample_admissible_primes(f, g, args.x, args.n_primes, args.seed)
    found = relation_scan(angle_pairs(f, g, primes), H=args.H, Q=args.Q, tol=args.tol)
    reports = [json.loads(scan_report(p, f.label, g.label, found)) for p in primes]
    run.json(
        "relations.json",
        {
            "H": args.H,
            "Q": args.Q,
            "tol": args.tol,
            "primes": primes,
            "n_flagged": len({c.prime for c in found}),
            "reports": reports,
        },
    )
    return 0


def cmd_dense_search(args, run: Run) -> int:
    from .dense import DirectionTarget, direction_search, lambda_prime_power, search_primes
    from .satake import angle

    basis = [_table(args, lab, args.table_bound) for lab in args.basis]
    primes = args.primes or search_primes(basis)
    if len(primes) != len(basis):
        raise ConfigError("need one prime per basis form")
    if args.planted:
        if len(args.planted) != len(basis):
            raise ConfigError("--planted needs one exponent per prime")
        w = np.ones(len(basis))
        for p, k in zip(primes, args.planted):
            w *= [lambda_prime_power(angle(t[p], p, t.weight), k) for t in basis]
        target = DirectionTarget(tuple(w.tolist()))
    elif args.target:
        target = DirectionTarget(tuple(args.target))
    else:
        raise ConfigError("give --target or --planted")
    res = direction_search(basis, primes, target, args.eps, args.K)
    run.json("dense_search.json", {**res.to_dict(), "primes": list(res.primes), "success": res.success})
    if not res.success:
        raise BudgetExhausted(f"best angular distance {res.angular_distance:.3g} > eps={args.eps} within K={args.K}")
    return 0


def cmd_signs(args, run: Run) -> int:
    from .signs import sign_scan

    f = _table(args, args.f, args.bound)
    g = _table(args, args.g, args.bound)
    rep = sign_scan(f, g, args.lo, args.bound, args.q)
    run.json("signs.json", rep.to_dict())
    run.write("witnesses.csv", rep.witnesses_csv())
    return 0


def cmd_remark1(args, run: Run) -> int:
    from .signs import remark1_check

    rep = remark1_check(_table(args, args.f, args.bound), args.disc, args.bound)
    run.json("remark1.json", rep.to_dict())
    return 0 if rep.ok else 3


def cmd_remark2(args, run: Run) -> int:
    from .forms import get_form
    from .signs import remark2_check, supersingular_primes

    form = get_form(args.f)
    p = args.p
    if p is None:
        if form.curve is None:
            raise ConfigError(f"{form.label} has no curve; pass --p")
        ss = supersingular_primes(form.curve, args.search_bound)
        if not ss:
            raise DataError(f"no supersingular prime below {args.search_bound}")
        p = ss[0]
    rep = remark2_check(_table(args, form.label, args.bound), p, args.bound)
    run.json("remark2.json", rep.to_dict())
    return 0 if rep.ok else 3


def cmd_remark4(args, run: Run) -> int:
    from .signs import default_eps, remark4_experiment

    eps = args.eps or default_eps(args.n_eps)
    res = remark4_experiment(_table(args, args.phi, args.bound), _table(args, args.psi, args.bound), eps, args.bound)
    run.json("remark4.json", res.to_dict())
    return 0


def cmd_rs_sums(args, run: Run) -> int:
    from .signs import rankin_selberg_sums

    X = max(args.checkpoints)
    s = rankin_selberg_sums(_table(args, args.f, X), _table(args, args.g, X), args.checkpoints, args.d, args.d_prime)
    run.json("rs_sums.json", s.to_dict())
    run.write("rs_sums.csv", s.to_csv())
    return 0


def cmd_rerun(args, run: Run) -> int:
    try:
        body = json.loads(Path(args.manifest).read_text())
        argv = list(body["argv"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"unreadable manifest {args.manifest}: {exc}") from exc
    if not argv or argv[0] == "rerun":
        raise ConfigError("manifest does not record a rerunnable command")
    run.skip_manifest = True
    return main(argv + ["--out", str(args.out)])


def cmd_validate(args, run: Run) -> int:
    from .data import fetch_remote, load_fixture, shipped_fixture, validate
    from .forms import get_form

    form = get_form(args.f)
    if args.fixture:
        rec = load_fixture(args.fixture)
    elif not args.offline:
        rec = fetch_remote(form.label, offline=False)
    else:
        rec = shipped_fixture(form.label)
    B = args.bound or rec.bound
    rep = validate(_table(args, form.label, B), rec)
    run.json("validate.json", {**rep.to_dict(), "source": rec.source})
    return 0 if rep.ok else 3


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="signlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory (default ./out)")
    net = common.add_mutually_exclusive_group()
    net.add_argument("--offline", dest="offline", action="store_true", default=True, help="no network access (default)")
    net.add_argument("--online", dest="offline", action="store_false", help="allow fetching fixtures over HTTPS")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker cap for point counting")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    p = add("coeffs", cmd_coeffs, "build a coefficient table")
    p.add_argument("--f", required=True)
    p.add_argument("--bound", type=_positive_int, required=True)

    p = add("angles", cmd_angles, "Satake angles at good primes")
    p.add_argument("--f", required=True)
    p.add_argument("--x", type=_positive_int, required=True)

    p = add("sato-tate", cmd_sato_tate, "angle frequencies against the Sato-Tate law")
    p.add_argument("--f", required=True)
    p.add_argument("--g")
    p.add_argument("--x", type=_positive_int, required=True)
    p.add_argument("--grid", type=_positive_int, default=10)

    p = add("relations", cmd_relations, "scan angle pairs for rational relations")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--x", type=_positive_int, default=10**4)
    p.add_argument("--n-primes", type=_positive_int, default=50)
    p.add_argument("--primes", type=_positive_int, nargs="+")
    p.add_argument("--H", type=_positive_int, default=50)
    p.add_argument("--Q", type=_positive_int, default=12)
    p.add_argument("--tol", type=_positive_float, default=1e-9)

    p = add("dense-search", cmd_dense_search, "steer coefficient vectors to a projective direction")
    p.add_argument("--basis", nargs="+", required=True)
    p.add_argument("--primes", type=_positive_int, nargs="+")
    p.add_argument("--target", type=float, nargs="+")
    p.add_argument("--planted", type=int, nargs="+", help="exponents whose own direction is the target")
    p.add_argument("--eps", type=_positive_float, default=0.05)
    p.add_argument("--K", type=_positive_int, default=10**5)
    p.add_argument("--table-bound", type=_positive_int, default=2000)

    p = add("signs", cmd_signs, "sign classes of a_f(n) a_g(n)")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--bound", type=_positive_int, required=True)
    p.add_argument("--lo", type=_positive_int, default=1)
    p.add_argument("--q", type=_positive_int, default=1)

    p = add("remark1", cmd_remark1, "2f plus a quadratic twist")
    p.add_argument("--f", required=True)
    p.add_argument("--disc", type=int, default=5)
    p.add_argument("--bound", type=_positive_int, default=10**5)

    p = add("remark2", cmd_remark2, "f(z) + f(pz) at a supersingular prime")
    p.add_argument("--f", required=True)
    p.add_argument("--p", type=_positive_int)
    p.add_argument("--bound", type=_positive_int, default=10**5)
    p.add_argument("--search-bound", type=_positive_int, default=1000)

    p = add("remark4", cmd_remark4, "first sign change as eps shrinks")
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--bound", type=_positive_int, default=10**6)
    p.add_argument("--eps", type=_positive_float, nargs="+")
    p.add_argument("--n-eps", type=_positive_int, default=11)

    p = add("rs-sums", cmd_rs_sums, "Rankin-Selberg partial sums over primes")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--checkpoints", type=_positive_int, nargs="+", default=[10**3, 10**4, 10**5])
    p.add_argument("--d", type=_positive_int, default=1)
    p.add_argument("--d-prime", type=_positive_int, default=1)

    p = add("rerun", cmd_rerun, "repeat the command recorded in a manifest")
    p.add_argument("--manifest", type=Path, required=True)

    p = add("validate", cmd_validate, "compare a computed table with a fixture")
    p.add_argument("--f", required=True)
    p.add_argument("--bound", type=_positive_int)
    p.add_argument("--fixture", type=Path)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    run = None
    try:
        run = Run(args)
        run.started = started
        run.argv = argv
        status = args.func(args, run)
    except SignlabError as exc:
        print(f"signlab: {exc}", file=sys.stderr)
        status = exc.exit_code
    if run is not None and not run.skip_manifest:
        run.manifest(status)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
