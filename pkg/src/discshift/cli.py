"""Command line: gen, solve, optimize, bench, render.

Exit codes: 0 success, 2 no valid translation or itinerary, 3 bad input.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
import time

import click
import numpy as np

from . import geometry
from .blocking import CycleError, Matching, build_tbg, topo_itinerary, validate_itinerary
from .instances import KINDS, Instance, align, generate, load, save, to_dict
from .labeled import minimize_aabr, minimize_sed, minimize_translation
from .unlabeled import (CRITERIA, delta_matching, feasibility_translation, generic_direction,
                        multi_direction_optimize)

EXIT_INFEASIBLE = 2
EXIT_INPUT = 3


class Infeasible(click.ClickException):
    exit_code = EXIT_INFEASIBLE


class BadInput(click.ClickException):
    exit_code = EXIT_INPUT


def _vector(text: str | None):
    if text is None:
        return None
    try:
        x, y = (float(p) for p in text.split(","))
    except ValueError:
        raise BadInput(f"--v expects X,Y, got {text!r}") from None
    return np.array([x, y])


def _load(path) -> Instance:
    try:
        return load(path)
    except (OSError, ValueError) as exc:
        raise BadInput(f"{path}: {exc}") from None


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _radii(inst: Instance) -> tuple[float, float]:
    rs = geometry.smallest_enclosing_disc(inst.start).radius
    rt = geometry.smallest_enclosing_disc(inst.target).radius
    return rs, rt


def _order_json(order):
    return [[int(a), int(b)] for a, b in order]


@click.group()
@click.option("--eps", type=float, default=None, help="Tangency tolerance (default 1e-9).")
def cli(eps):
    """Shift-and-reconfigure unit discs with one move each."""
    if eps is not None:
        geometry.set_eps(eps)


@cli.command()
@click.option("--kind", type=click.Choice(KINDS), required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--labeled/--unlabeled", default=False, show_default=True)
@click.option("--align", "align_mode", type=click.Choice(["sed", "mass", "none"]), default="sed",
              show_default=True, help="How to superimpose start and target.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def gen(kind, n, seed, labeled, align_mode, out):
    """Generate an instance as JSON."""
    try:
        inst = generate(kind, n, seed, labeled=labeled)
    except (ValueError, RuntimeError) as exc:
        raise BadInput(str(exc)) from None
    if align_mode != "none":
        inst = align(inst, align_mode)
    if out:
        save(out, inst)
    else:
        click.echo(json.dumps(to_dict(inst), indent=1))


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--v", "vtext", default=None, help="Translation X,Y; default: a feasible one.")
@click.option("--labeled/--unlabeled", default=None, help="Override the instance's flag.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def solve(instance, vtext, labeled, seed, out):
    """Itinerary for a given translation, or for a feasible one."""
    inst = _load(instance)
    labeled = inst.labeled if labeled is None else labeled
    v = _vector(vtext)
    S, T = inst.start, inst.target
    if labeled:
        if v is None:
            raise BadInput("labeled solve needs --v")
        M = inst.matching or Matching.identity(inst.n)
    else:
        if v is not None and math.hypot(*v) > 0:
            delta = v / math.hypot(*v)
        else:
            delta = generic_direction(S, T, seed)
        try:
            ctx = delta_matching(S, T, delta)
        except ValueError as exc:
            raise BadInput(str(exc)) from None
        M = ctx.matching
        if v is None:
            v = feasibility_translation(ctx)
    try:
        it = topo_itinerary(build_tbg(S, T, M, v))
    except CycleError as exc:
        raise Infeasible(f"no valid itinerary at v={tuple(float(c) for c in v)}; blocking cycle {exc.cycle}") from None
    if not validate_itinerary(S, T, M, v, it):
        raise click.ClickException("internal error: itinerary failed replay")
    doc = {"v": [float(c) for c in v], "order": _order_json(it.order), "n": inst.n, "valid": True}
    _emit(json.dumps(doc, indent=1), out)


def run_optimize(inst: Instance, labeled: bool, criterion: str, directions: int, seed: int) -> dict:
    """Solve one instance and return the report as a plain dict."""
    S, T = inst.start, inst.target
    t0 = time.perf_counter()
    if labeled:
        M = inst.matching or Matching.identity(inst.n)
        fn = {"shortest": minimize_translation, "aabr": minimize_aabr, "sed": minimize_sed}[criterion]
        res = fn(S, T, M)
    else:
        res = multi_direction_optimize(S, T, directions, criterion, seed)
        M = Matching(res.itinerary.order)
    wall = time.perf_counter() - t0
    rs, rt = _radii(inst)
    report = {
        "command": "optimize",
        "mode": "labeled" if labeled else "unlabeled",
        "criterion": criterion,
        "instance": dict(inst.metadata),
        "n": inst.n,
        "seed": seed,
        "directions": None if labeled else directions,
        "eps": geometry.get_eps(),
        "status": res.status,
        "r_sum": rs + rt + 2.0,
        "r_sum_centers": rs + rt,
        "wall_time": wall,
    }
    if res.status != "optimal":
        return report
    # every reported itinerary is replayed before it is written
    if not validate_itinerary(S, T, M, res.v, res.itinerary):
        raise click.ClickException("internal error: itinerary failed replay")
    report.update(v=list(res.v), v_norm=math.hypot(*res.v), value=res.value,
                  order=_order_json(res.itinerary.order))
    if "per_direction" in res.details:
        report["per_direction"] = res.details["per_direction"]
        report["direction"] = list(res.details["direction"])
    return report


REPORT_COLUMNS = ("generator", "n", "seed", "mode", "criterion", "directions", "status",
                  "r_sum", "v_norm", "value", "wall_time")


def _csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        row = dict(r, generator=r["instance"].get("generator", ""))
        w.writerow([row.get(c, "") for c in REPORT_COLUMNS])
    return buf.getvalue()


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["labeled", "unlabeled"]), default=None,
              help="Default follows the instance's labeled flag.")
@click.option("--labeled/--unlabeled", "labeled_flag", default=None)
@click.option("--criterion", type=click.Choice(CRITERIA), default="shortest", show_default=True)
@click.option("--directions", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def optimize(instance, mode, labeled_flag, criterion, directions, seed, fmt, out):
    """Best translation under a criterion, as a run report."""
    inst = _load(instance)
    if mode is not None and labeled_flag is not None and (mode == "labeled") != labeled_flag:
        raise BadInput("--mode and --labeled/--unlabeled disagree")
    labeled = (mode == "labeled") if mode else labeled_flag if labeled_flag is not None else inst.labeled
    if directions < 1:
        raise BadInput("--directions must be at least 1")
    report = run_optimize(inst, labeled, criterion, directions, seed)
    _emit(json.dumps(report, indent=1) if fmt == "json" else _csv([report]), out)
    if report["status"] != "optimal":
        raise Infeasible("no valid translation exists")


@cli.command()
@click.option("--kind", "kinds", default="circle,packing,cross,random", show_default=True)
@click.option("--n", "sizes", default="10,20", show_default=True, help="Comma-separated sizes.")
@click.option("--seed", "seeds", default="0", show_default=True, help="Comma-separated seeds.")
@click.option("--criterion", type=click.Choice(CRITERIA), default="shortest", show_default=True)
@click.option("--directions", type=int, default=10, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def bench(kinds, sizes, seeds, criterion, directions, fmt, out):
    """Unlabeled runs over generators, sizes and seeds."""
    try:
        kinds = [k for k in kinds.split(",") if k]
        sizes = [int(s) for s in sizes.split(",")]
        seeds = [int(s) for s in seeds.split(",")]
    except ValueError:
        raise BadInput("--n and --seed take comma-separated integers") from None
    bad = [k for k in kinds if k not in KINDS]
    if bad:
        raise BadInput(f"unknown generator(s): {', '.join(bad)}")
    reports = []
    for kind in kinds:
        for n in sizes:
            for seed in seeds:
                inst = align(generate(kind, n, seed))
                reports.append(run_optimize(inst, False, criterion, directions, seed))
    _emit(_csv(reports) if fmt == "csv" else json.dumps(reports, indent=1), out)


def render_svg(inst: Instance, v, order=None, scale: float = 20.0) -> str:
    """Start discs outlined, shifted targets shaded, the shift drawn as an arrow."""
    v = np.zeros(2) if v is None else np.asarray(v, dtype=float)
    S, T = inst.start, inst.target + v
    pts = np.vstack([S, T, np.zeros((1, 2)), v[None]])
    x0, y0 = pts.min(axis=0) - 3.0
    x1, y1 = pts.max(axis=0) + 3.0
    w, h = x1 - x0, y1 - y0
    # y grows downwards in SVG; flip so the picture matches the plane
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * scale:.1f}" height="{h * scale:.1f}" '
           f'viewBox="{x0:.6g} {-y1:.6g} {w:.6g} {h:.6g}">',
           '<defs><marker id="head" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" '
           'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="crimson"/></marker></defs>',
           '<g stroke-width="0.06">']
    for x, y in S:
        out.append(f'<circle class="start" cx="{x:.6g}" cy="{-y:.6g}" r="1" fill="none" stroke="black"/>')
    for x, y in T:
        out.append(f'<circle class="target" cx="{x:.6g}" cy="{-y:.6g}" r="1" fill="steelblue" '
                   f'fill-opacity="0.4" stroke="steelblue"/>')
    if order is not None:
        for a, b in order:
            (sx, sy), (tx, ty) = S[a], T[b]
            out.append(f'<line class="move" x1="{sx:.6g}" y1="{-sy:.6g}" x2="{tx:.6g}" y2="{-ty:.6g}" '
                       f'stroke="gray" stroke-dasharray="0.2,0.2"/>')
    if math.hypot(*v) > 0:
        out.append(f'<line class="shift" x1="0" y1="0" x2="{v[0]:.6g}" y2="{-v[1]:.6g}" stroke="crimson" '
                   f'stroke-width="0.12" marker-end="url(#head)"/>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--result", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Report or solve output supplying v and the move order.")
@click.option("--v", "vtext", default=None)
@click.option("--moves/--no-moves", default=False, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["svg"]), default="svg")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def render(instance, result, vtext, moves, fmt, out):
    """Draw an instance and a chosen translation as SVG."""
    inst = _load(instance)
    v, order = _vector(vtext), None
    if result:
        try:
            doc = json.loads(open(result).read())
        except (OSError, json.JSONDecodeError) as exc:
            raise BadInput(f"{result}: {exc}") from None
        if v is None and doc.get("v") is not None:
            v = np.asarray(doc["v"], dtype=float)
        order = doc.get("order")
    _emit(render_svg(inst, v, order if moves else None), out)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="discshift", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_INPUT
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
