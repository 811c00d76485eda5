"""
Command-line front end.

Every command writes one CSV table.  Lines starting with ``#`` carry
metadata (command, input hashes, tolerances, version); each numeric
column is followed by its tolerance column.  Exit status: 0 on success,
2 when a criterion is inconclusive, 1 on errors.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import re
import subprocess
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .boundary_set import AdmissibleWeight, ClosedSet
from .capacity import arc_capacity_estimate, capacity_qp_oracle, polar_test
from .errors import DmuError, Inconclusive, InvariantViolation, ParseError
from .kernel import _oracle_for, kernel_diag_ray
from .measure import Measure
from .sobolev import SobolevWeight, galerkin_kernel, k_diag_estimate

PRECISION_RANGE = (1e-12, 1e-3)
DEFAULT_PRECISION = 1e-6
SUITES = ("fmu", "harmonic", "outer", "energy")

_PSI = re.compile(r"^(?:(?P<c>[0-9.eE+-]+)\*)?t(?:\^(?P<p>[0-9.eE+-]+))?(?:/(?P<d>pi|[0-9.eE+-]+))?$")


# -------------------------------------------------------------- parsing --

def _load_json(arg, what):
    text = arg if arg.lstrip().startswith("{") else None
    if text is None:
        path = Path(arg)
        if not path.is_file():
            raise ParseError(f"{what}: file not found: {arg}")
        text = path.read_text()
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def parse_measure(arg):
    """Measure from a JSON file path or an inline JSON object."""
    spec, text = _load_json(arg, "measure")
    return Measure.from_dict(spec), text


def parse_set(arg):
    spec, text = _load_json(arg, "set")
    return ClosedSet.from_dict(spec), text


def parse_psi(text):
    """``c*t^p/d`` with optional parts, e.g. ``t/pi``, ``2*t^0.5``; None for ``auto``."""
    if text is None or text == "auto":
        return None
    m = _PSI.match(text.replace(" ", ""))
    if m is None:
        raise ParseError(f"cannot parse psi {text!r}; expected c*t^p/d")
    c = float(m.group("c") or 1.0)
    p = float(m.group("p") or 1.0)
    d = m.group("d")
    if d is not None:
        c /= np.pi if d == "pi" else float(d)
    w = AdmissibleWeight.power(p, c)
    w.label = text
    return w


def parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ParseError(f"cannot parse complex number {text!r}") from None


def parse_arc(text):
    try:
        center, length = (float(v) for v in text.split(","))
    except ValueError:
        raise ParseError(f"--arc expects CENTER,LENGTH, got {text!r}") from None
    return center, length


def precision():
    raw = os.environ.get("DMU_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        val = float(raw)
    except ValueError:
        raise InvariantViolation(f"DMU_PRECISION={raw!r} is not a number") from None
    lo, hi = PRECISION_RANGE
    if not lo <= val <= hi:
        raise InvariantViolation(f"DMU_PRECISION must lie in [{lo:g}, {hi:g}]")
    return val


def _digest(text):
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _version():
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True,
                             text=True, cwd=Path(__file__).parent, timeout=5)
        desc = out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        desc = ""
    return f"dmu {__version__}" + (f" ({desc})" if desc else "")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    if isinstance(x, complex):
        return f"{x.real:.12g}{x.imag:+.12g}j"
    return str(x)


def _pmap(func, items, jobs):
    """Ordered map, in worker processes when ``jobs > 1``."""
    if jobs <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


# ------------------------------------------------------------- commands --

def _kernel_row(args):
    spec, z, method, order, rtol = args
    mu = Measure.from_dict(spec)
    row = {"z": z}
    if method in ("estimate", "both"):
        if z == 0:
            est, err = 1.0, 0.0
        else:
            v, e = kernel_diag_ray(mu, float(np.angle(z)), [abs(z)], rtol=rtol)
            est, err = float(v[0]), float(e[0])
        row.update(estimate=est, estimate_tol=err)
    if method in ("oracle", "both"):
        orc = _oracle_for(mu, order)
        val = orc.kernel(z)
        row.update(oracle=val, oracle_tol=orc.condition * np.finfo(float).eps * val)
    if method == "both":
        ratio = row["oracle"] / row["estimate"]
        rel = row["estimate_tol"] / row["estimate"] + row["oracle_tol"] / row["oracle"]
        row.update(ratio=ratio, ratio_tol=ratio * rel)
    return row


def cmd_kernel(ns, meta):
    if ns.method == "qp":
        raise ParseError("kernel: --method must be estimate, oracle or both")
    mu, text = parse_measure(ns.measure)
    meta["measure_sha256"] = _digest(text)
    zs = [parse_complex(z) for z in (ns.z or ["0.5"])]
    rtol = precision()
    meta["tolerances"] = f"estimate rtol={rtol:g}; oracle order={ns.order}"
    items = [(mu.to_dict(), z, ns.method, ns.order, rtol) for z in zs]
    rows = _pmap(_kernel_row, items, ns.jobs)
    cols = ["z"]
    if ns.method in ("estimate", "both"):
        cols += ["estimate", "estimate_tol"]
    if ns.method in ("oracle", "both"):
        cols += ["oracle", "oracle_tol"]
    if ns.method == "both":
        cols += ["ratio", "ratio_tol"]
    return cols, rows, 0


def cmd_capacity(ns, meta):
    mu, text = parse_measure(ns.measure)
    meta["measure_sha256"] = _digest(text)
    tol = precision()
    meta["tolerances"] = f"qp step tol={tol:g}; qp grid n={ns.order}"
    targets = []
    for a in ns.arc or []:
        c, L = parse_arc(a)
        targets.append((f"arc({c:g},{L:g})", (c, L)))
    if ns.set:
        E, stext = parse_set(ns.set)
        meta["set_sha256"] = _digest(stext)
        targets.append(("set", E))
    if not targets:
        raise ParseError("capacity: give --arc CENTER,LENGTH or --set PATH")
    # the QP minimizer is the capacity oracle
    method = "qp" if ns.method == "oracle" else ns.method
    rows = []
    for label, tgt in targets:
        row = {"target": label}
        is_arc = isinstance(tgt, tuple)
        if method in ("estimate", "both"):
            if not is_arc:
                raise ParseError("capacity: the estimate applies to arcs; use --method qp for sets")
            row.update(estimate=arc_capacity_estimate(mu, *tgt), estimate_tol=tol)
        if method in ("qp", "both"):
            if is_arc:
                c, L = tgt
                geom = [(c - np.pi * L, c + np.pi * L)]
            else:
                geom = tgt
            res = capacity_qp_oracle(mu, geom, n=ns.order, tol=tol * 1e-2, full_output=True)
            row.update(qp=res.value, qp_tol=res.stationarity)
        if "estimate" in row and "qp" in row:
            row.update(ratio=row["qp"] / row["estimate"])
        rows.append(row)
    cols = ["target"]
    if method in ("estimate", "both"):
        cols += ["estimate", "estimate_tol"]
    if method in ("qp", "both"):
        cols += ["qp", "qp_tol"]
    if method == "both" and all("ratio" in r for r in rows):
        cols += ["ratio"]
    return cols, rows, 0


def cmd_polar(ns, meta):
    mu, text = parse_measure(ns.measure)
    if not ns.set:
        raise ParseError("polar: --set is required")
    E, stext = parse_set(ns.set)
    meta["measure_sha256"] = _digest(text)
    meta["set_sha256"] = _digest(stext)
    meta["tolerances"] = "detector delta=1e-3 window=8 ratio<=0.7 tail<1e-3"
    psi = parse_psi(ns.psi)
    rep = polar_test(mu, E, psi)
    d = rep.divergence
    row = {
        "criterion": rep.criterion_used,
        "psi": rep.details.get("psi"),
        "polar": rep.polar if rep.polar is not None else "inconclusive",
        "divergence": d.label if d is not None else "inconclusive",
        "trace_last": float(rep.trace[-1]),
        "trace_last_tol": float(rep.trace[-1]) * 1e-10,
        "growth": d.growth if d is not None else None,
    }
    code = 0 if rep.polar else 2
    return list(row), [row], code


def cmd_sobolev(ns, meta):
    mu = parse_measure(ns.measure)[0] if ns.measure else None
    phi = SobolevWeight.parse(ns.phi, mu)
    meta["phi"] = ns.phi
    meta["tolerances"] = "galerkin nodes=16384"
    method = ns.method
    if method == "qp":
        raise ParseError("sobolev: --method must be estimate, oracle or both")
    rows = []
    for a in ns.a or ["0.25"]:
        a = float(a)
        row = {"a": a}
        if method in ("estimate", "both"):
            row.update(estimate=k_diag_estimate(phi, a), estimate_tol=1e-10)
        if method in ("oracle", "both"):
            row.update(galerkin=galerkin_kernel(phi, a), galerkin_tol=1e-6)
        if method == "both":
            row.update(ratio=row["galerkin"] / row["estimate"])
        rows.append(row)
    return list(rows[0]), rows, 0


def _suite_fmu(seed):
    from .testfn import fmu_report, random_measure

    rng = np.random.default_rng(seed)
    mu = random_measure(rng)
    rep = fmu_report(mu)
    return {
        "seed": seed,
        "monotone": rep.monotone,
        "over_x2_decreasing": rep.over_x2_decreasing,
        "poisson_ratio_min": float(np.min(rep.poisson_ratio)),
        "poisson_ratio_max": float(np.max(rep.poisson_ratio)),
        "mass_ratio_max": float(np.max(rep.mass_ratio)),
        "doubling_slack_min": float(np.nanmin(rep.doubling_slack)) if np.any(np.isfinite(rep.doubling_slack)) else None,
    }


def _suite_harmonic(j):
    from .testfn import dyadic_harmonic_sum

    return {"j": j, "sum": dyadic_harmonic_sum(1.0 - 2.0 ** -j), "sum_tol": 1e-13}


def _suite_outer(k):
    from .testfn import outer_lower_bound_constant, outer_lower_bound_ratios, regular_weight_family

    w = regular_weight_family()[k]
    ratios = outer_lower_bound_ratios(w)
    bound = min(outer_lower_bound_constant(1.0 - 2.0 ** -j) for j in range(1, 17))
    return {"weight": w.label, "ratio_max": float(np.max(ratios)), "ratio_tol": 1e-8,
            "derived_bound": bound}


def _suite_energy(k):
    from .testfn import OuterFunction, dirichlet_energy_douglas, dirichlet_energy_rs

    mus = [Measure.lebesgue(), Measure.dirac(0.0), Measure.dirac(1.0) + Measure.lebesgue(0.5)]
    f = OuterFunction(lambda t: 2 + np.cos(t), "2+cos(t)", singular_at_zero=False)
    mu = mus[k]
    a, b = dirichlet_energy_rs(mu, f), dirichlet_energy_douglas(mu, f)
    return {"measure": repr(mu), "boundary_route": a, "area_route": b,
            "rel_diff": abs(a - b) / max(abs(a), 1e-300), "rel_tol": 1e-3}


def cmd_verify(ns, meta):
    suite = ns.suite
    meta["suite"] = suite
    if suite == "fmu":
        items, func = list(range(50)), _suite_fmu
    elif suite == "harmonic":
        items, func = list(range(2, 17)), _suite_harmonic
    elif suite == "outer":
        items, func = list(range(5)), _suite_outer
    else:
        items, func = list(range(3)), _suite_energy
    rows = _pmap(func, items, ns.jobs)
    return list(rows[0]), rows, 0


COMMANDS = {
    "kernel": cmd_kernel,
    "capacity": cmd_capacity,
    "polar": cmd_polar,
    "sobolev": cmd_sobolev,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="dmu", description="Kernels and capacities of D(mu).")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output CSV path (default: stdout)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
        return sp

    k = common(sub.add_parser("kernel", help="diagonal kernel estimate and Gram oracle"))
    k.add_argument("--measure", required=True, help="measure JSON path or inline JSON")
    k.add_argument("--z", action="append", help="evaluation point (repeatable)")
    k.add_argument("--method", choices=["estimate", "oracle", "qp", "both"], default="both")
    k.add_argument("--order", type=int, default=2048, help="polynomial degree of the oracle")

    c = common(sub.add_parser("capacity", help="arc or set capacity"))
    c.add_argument("--measure", required=True)
    c.add_argument("--arc", action="append", help="CENTER,LENGTH (normalized length)")
    c.add_argument("--set", help="closed set JSON")
    c.add_argument("--method", choices=["estimate", "oracle", "qp", "both"], default="both")
    c.add_argument("--order", type=int, default=4096, help="QP grid size")

    pl = common(sub.add_parser("polar", help="sufficient test for zero capacity"))
    pl.add_argument("--measure", required=True)
    pl.add_argument("--set", required=True)
    pl.add_argument("--psi", default="auto", help="majorant c*t^p/d, or auto")

    s = common(sub.add_parser("sobolev", help="kernel of the weighted Sobolev space"))
    s.add_argument("--phi", required=True, help="weight mini-language, e.g. x^2+x")
    s.add_argument("--a", action="append", help="evaluation point in (0, 2pi)")
    s.add_argument("--measure", help="measure for F_mu_plus_x2")
    s.add_argument("--method", choices=["estimate", "oracle", "qp", "both"], default="both")

    v = common(sub.add_parser("verify", help="run a numerical property suite"))
    v.add_argument("--suite", choices=SUITES, required=True)
    return p


def run(argv=None, stdout=None, stderr=None):
    """Run one command; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    meta = {"command": ns.command}
    try:
        if ns.jobs < 1:
            raise InvariantViolation("--jobs must be >= 1")
        cols, rows, code = COMMANDS[ns.command](ns, meta)
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=stderr)
        return 2
    except (DmuError, ValueError, NotImplementedError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    except Exception as exc:  # user input must never produce a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    meta["version"] = _version()
    buf = io.StringIO()
    for key in sorted(meta):
        buf.write(f"# {key}: {meta[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in cols])
    if ns.out:
        Path(ns.out).write_text(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
