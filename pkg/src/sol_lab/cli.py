"""Command-line front end.

    sol-lab lattice info --matrix 2,1,1,1
    sol-lab lattice verify --matrix 3,1,2,1
    sol-lab lattice normalize --presentation pres.json --matrix 2,1,1,1
    sol-lab curves log-set --matrix 2,1,1,1 --point 0,1,0.3 --window 1,1,2 --out csv
    sol-lab curves block --matrix 2,1,1,1 --point 0,1,0.3 --window 1,1,5 --blocker-midpoints 3
    sol-lab witness --matrix 2,1,1,1 --point 0,1,0.3 --imax 12
    sol-lab density --matrix 2,1,1,1 --box 0,1,0,1,0,1 --eps 0.05 --window 20,5,5
    sol-lab export-plot --matrix 2,1,1,1 --point 0,1,0.3 --window 1,1,2 --out-dir plots/

Exit status: 0 on success with a definitive verdict, 1 on an inconclusive
verdict or failed verification, 2 on usage or validation errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import _kernels
from .connections import CosetPoint, SearchWindow, blocking_check, log_set, midpoint_set, sample_curve
from .errors import SolLabError
from .lattice import (
    LatticePresentation,
    SL2ZMatrix,
    build_lattice,
    generators,
    normalize_lattice,
    verify_presentation,
)
from .serialize import dumps, point_from_json, point_to_json, write_csv
from .solcore import SolPoint, one_param
from .witness import NON_BLOCKED, WitnessConfig, certify_nonblockable, density_probe, resolve_precision


class ValidationFailure(click.ClickException):
    exit_code = 2


def _fail(msg: str):
    raise ValidationFailure(msg)


def _lattice(text: str):
    try:
        return build_lattice(SL2ZMatrix.parse(text))
    except (SolLabError, ValueError) as exc:
        _fail(str(exc))


def _point(text: str) -> SolPoint:
    try:
        return SolPoint.from_seq([float(t) for t in text.split(",")])
    except (SolLabError, ValueError) as exc:
        _fail(f"bad point {text!r}: {exc}")


def _window(text: str, tgrid: int = 63) -> SearchWindow:
    try:
        return SearchWindow.parse(text, tgrid=tgrid)
    except (SolLabError, ValueError) as exc:
        _fail(f"bad window {text!r}: {exc}")


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        _fail(f"cannot read {path}: {exc}")


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        click.echo(text, nl=False)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        _fail(f"cannot write {path}: {exc}")


def _lattice_info(L) -> dict:
    tr = L.A.trace
    return {
        "matrix": [L.A.a, L.A.b, L.A.c, L.A.d],
        "sign_flipped": L.sign_flipped,
        "trace": tr,
        "charpoly": f"x^2-{tr}x+1",
        "D": L.D,
        "lambda": L.lam,
        "lambda_float": float(L.lam),
        "s": L.s,
        "P": [[L.P[0][0], L.P[0][1]], [L.P[1][0], L.P[1][1]]],
        "P_float": L.P_float.tolist(),
        "conjugation_exact": True,
    }


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--json-args", type=click.Path(exists=True, dir_okay=False), help="JSON file of default option values, nested by subcommand.")
@click.option("--threads", type=int, default=None, help="Thread count for the compiled kernels.")
@click.pass_context
def main(ctx: click.Context, json_args, threads) -> None:
    """Sol lattices, connecting curves and non-blockability certificates."""
    if json_args:
        ctx.default_map = _read_json(json_args)
    _kernels.set_threads(threads)


@main.group()
def lattice() -> None:
    """Semidirect-product lattices Gamma(A) for hyperbolic A in SL(2, Z)."""


@lattice.command("info")
@click.option("--matrix", required=True, help="Entries a,b,c,d of A.")
def lattice_info(matrix: str) -> None:
    """Eigen-data and the eigenvector matrix P of Gamma(A).

    P has unit diagonal and satisfies P A P^-1 = diag(lam, 1/lam) exactly in
    Q(sqrt(D)); lam = e^s is the expanding eigenvalue.
    """
    click.echo(dumps(_lattice_info(_lattice(matrix))), nl=False)


@lattice.command("verify")
@click.option("--matrix", required=True, help="Entries a,b,c,d of A.")
@click.option("--presentation", type=click.Path(), default=None, help="JSON with tau1, tau2, tau3; defaults to the generators of Gamma(A).")
@click.option("--tol", type=float, default=1e-12, show_default=True)
def lattice_verify(matrix: str, presentation, tol: float) -> None:
    """Check [tau1, tau2] = 1, the eigen relation for z3 and tau3-conjugation."""
    L = _lattice(matrix)
    pres = _presentation(presentation) if presentation else generators(L)
    report = verify_presentation(pres, L.A, tol)
    click.echo(dumps(report), nl=False)
    if not report["pass"]:
        sys.exit(1)


def _presentation(path: str) -> LatticePresentation:
    try:
        return LatticePresentation.from_json(_read_json(path))
    except (SolLabError, KeyError, ValueError) as exc:
        _fail(f"bad presentation: {exc}")


@lattice.command("normalize")
@click.option("--presentation", type=click.Path(), required=True, help="JSON with tau1, tau2, tau3.")
@click.option("--matrix", default=None, help="If given, the normalized generators are verified against A.")
@click.option("--tol", type=float, default=1e-12, show_default=True)
def lattice_normalize(presentation: str, matrix, tol: float) -> None:
    """Conjugate a lattice so that tau3 = (0, 0, z3) (semidirect form)."""
    pres = _presentation(presentation)
    try:
        g, norm = normalize_lattice(pres)
    except SolLabError as exc:
        _fail(str(exc))
    out = {"conjugator": point_to_json(g), "normalized": norm.to_json()}
    ok = abs(norm.tau3.x) < tol and abs(norm.tau3.y) < tol
    if matrix:
        report = verify_presentation(norm, _lattice(matrix).A, tol)
        out["verify"] = report
        ok = ok and report["pass"]
    out["pass"] = ok
    click.echo(dumps(out), nl=False)
    if not ok:
        sys.exit(1)


def _curve_opts(f):
    f = click.option("--output", type=click.Path(), default=None, help="Output path (default stdout).")(f)
    f = click.option("--out", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)(f)
    f = click.option("--eps", type=float, default=1e-6, show_default=True)(f)
    f = click.option("--tgrid", type=int, default=63, show_default=True)(f)
    f = click.option("--window", default="1,1,1", show_default=True, help="Bounds P,Q,R on |p|, |q|, |r|.")(f)
    f = click.option("--point", required=True, help="Coset representative x,y,z of m.")(f)
    f = click.option("--matrix", required=True, help="Entries a,b,c,d of A.")(f)
    return f


@main.group()
def curves() -> None:
    """Connecting curves t -> exp(t X) from the identity coset to m."""


@curves.command("log-set")
@_curve_opts
def curves_log_set(matrix, point, window, tgrid, eps, fmt, output) -> None:
    """Directions X with exp(X) in m Gamma, truncated to the window."""
    L = _lattice(matrix)
    m = CosetPoint(_point(point), L)
    cs = log_set(m, _window(window, tgrid))
    if fmt == "csv":
        rows = [(*c.index, 1.0, *_target(c)) for c in cs]
        _emit(write_csv(["p", "q", "r", "t", "x", "y", "z"], rows), output)
        return
    data = [{"p": c.index[0], "q": c.index[1], "r": c.index[2], "direction": list(c.direction), "target": list(_target(c))} for c in cs]
    _emit(dumps({"curves": data}), output)


def _target(c):
    t = c.target
    return tuple(t.to_float() if hasattr(t, "to_float") else t)


@curves.command("midpoints")
@_curve_opts
def curves_midpoints(matrix, point, window, tgrid, eps, fmt, output) -> None:
    """Distinct midpoints c(1/2) over the window's curves."""
    L = _lattice(matrix)
    pts = midpoint_set(CosetPoint(_point(point), L), _window(window, tgrid))
    if fmt == "csv":
        _emit(write_csv(["x", "y", "z"], [tuple(p) for p in pts]), output)
        return
    _emit(dumps({"count": len(pts), "midpoints": [list(p) for p in pts]}), output)


@curves.command("block")
@_curve_opts
@click.option("--blockers", type=click.Path(), default=None, help="JSON list of blocking points [x,y,z].")
@click.option("--blocker-midpoints", type=int, default=0, help="Use midpoints of the curves to g(0,0,s r), r = 1..N.")
def curves_block(matrix, point, window, tgrid, eps, fmt, output, blockers, blocker_midpoints) -> None:
    """Test a finite blocking set against every curve of the window.

    Evading verdicts hold at grid resolution (tgrid, eps); exit 0 when some
    curve evades, 1 when every curve is blocked.
    """
    L = _lattice(matrix)
    g = _point(point)
    m = CosetPoint(g, L)
    B = []
    if blockers:
        B += [point_from_json(p) for p in _read_json(blockers)]
    for r in range(1, blocker_midpoints + 1):
        B.append(one_param(m.translate(0, 0, r), 0.5))
    try:
        rep = blocking_check(m, B, eps, _window(window, tgrid))
    except SolLabError as exc:
        _fail(str(exc))
    if fmt == "csv":
        rows = [(*i, d, i in rep.blocked_curves) for i, d in rep.min_distance.items()]
        _emit(write_csv(["p", "q", "r", "distance", "blocked"], rows), output)
    else:
        _emit(dumps(rep.to_json()), output)
    if not rep.evades:
        sys.exit(1)


@main.command("witness")
@click.option("--matrix", required=True, help="Entries a,b,c,d of A.")
@click.option("--point", required=True, help="g = 0,y,z (or x,0,z for the mirrored plane).")
@click.option("--imax", type=int, default=12, show_default=True)
@click.option("--t1", type=float, default=0.5, show_default=True, help="Seed time on the first curve.")
@click.option("--precision", type=click.Choice(["double", "big50"]), default="double", show_default=True)
@click.option("--cosets", type=click.Path(), default=None, help="JSON list of coset representatives.")
@click.option("--out", "output", type=click.Path(), default=None, help="Report path (default stdout).")
def witness_cmd(matrix, point, imax, t1, precision, cosets, output) -> None:
    """Certify that m = g Gamma cannot be blocked from the identity.

    For g on x = 0 (y != 0) or y = 0 (x != 0) the curves to g(0, 0, +-s r_i)
    meet any coset in at most finitely many indices; the report lists the
    times t_i, coset residuals rtilde and the ratio bound past which each
    coset captures at most one curve.  Exit 0 on NON_BLOCKED_AT_SCALE.
    """
    L = _lattice(matrix)
    try:
        cfg = WitnessConfig(L, _point(point), imax=imax, t1=t1, precision=resolve_precision(precision))
        cs = None
        if cosets:
            raw = _read_json(cosets)
            raw = raw["cosets"] if isinstance(raw, dict) else raw
            cs = [CosetPoint(point_from_json(p, L.lam), L) for p in raw]
        report = certify_nonblockable(cfg, cs)
    except SolLabError as exc:
        _fail(str(exc))
    _emit(dumps(report.to_json()), output)
    if report.verdict != NON_BLOCKED:
        sys.exit(1)


@main.command("density")
@click.option("--matrix", required=True, help="Entries a,b,c,d of A.")
@click.option("--box", default="0,1,0,1,0,1", show_default=True, help="x0,x1,y0,y1,z0,z1.")
@click.option("--eps", type=float, default=0.05, show_default=True)
@click.option("--window", default="20,5,5", show_default=True, help="Bounds P,Q,R.")
@click.option("--per-target", is_flag=True, help="Include every grid target in the report.")
@click.option("--out", "output", type=click.Path(), default=None)
def density_cmd(matrix, box, eps, window, per_target, output) -> None:
    """Coverage of a box by X Gamma, X = {(0, y, z) : y != 0}.

    Every point of an eps/2 grid is approximated within eps (sup-norm) by an
    element (0, y, z) embed(p, q, r) with (p, q, r) in the window.  Exit 0 at
    full coverage.
    """
    L = _lattice(matrix)
    try:
        b = [float(v) for v in box.split(",")]
        if len(b) != 6:
            raise ValueError("box needs six numbers")
        rep = density_probe(L, b, eps, _window(window))
    except (SolLabError, ValueError) as exc:
        _fail(str(exc))
    _emit(dumps(rep.to_json(per_target=per_target)), output)
    if rep.coverage < 1.0:
        sys.exit(1)


@main.command("export-plot")
@click.option("--matrix", required=True, help="Entries a,b,c,d of A.")
@click.option("--point", required=True, help="Coset representative x,y,z of m.")
@click.option("--window", default="1,1,1", show_default=True)
@click.option("--tgrid", type=int, default=63, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
def export_plot(matrix, point, window, tgrid, out_dir) -> None:
    """Write one t,x,y,z CSV per connecting curve for external plotting."""
    L = _lattice(matrix)
    w = _window(window, tgrid)
    cs = log_set(CosetPoint(_point(point), L), w)
    d = Path(out_dir)
    try:
        d.mkdir(parents=True, exist_ok=True)
        ts = np.concatenate([[0.0], w.t_samples(), [1.0]])
        for c in cs:
            pts = sample_curve(c, ts)
            p, q, r = c.index
            (d / f"curve_p{p}_q{q}_r{r}.csv").write_text(
                write_csv(["t", "x", "y", "z"], [(float(t), *map(float, xyz)) for t, xyz in zip(ts, pts)])
            )
    except OSError as exc:
        _fail(f"cannot write plots: {exc}")
    click.echo(dumps({"curves": len(cs), "directory": str(d)}), nl=False)


if __name__ == "__main__":  # pragma: no cover
    main()
