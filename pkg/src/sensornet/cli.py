"""Command-line front end.

Exit codes: 0/1/2 carry verdicts (see each subcommand), 64 flags a usage
error and 66 an unreadable, malformed or non-generic scene file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import scenes
from .cech import NonGenericSceneError, build_timeline, cech_at
from .complex import betti
from .coverage import is_covered_grid, is_covered_homology
from .distinguish import full_report
from .evasion import evasion_exists, uncovered_slice
from .geom import Disk, Scene, SceneError

EX_USAGE, EX_NOINPUT = 64, 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _time(text: str) -> float:
    t = float(text)
    if not 0.0 <= t <= 1.0:
        raise argparse.ArgumentTypeError(f"time {text} is outside [0, 1]")
    return t


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return v


def _parser() -> _Parser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--grid", type=_positive, default=argparse.SUPPRESS, help="grid step h (default r/8)")
    g.add_argument("--dt", type=_positive, default=argparse.SUPPRESS, help="time step (default 1/256)")
    g.add_argument("--tol", type=_positive, default=argparse.SUPPRESS, help="event tolerance (default 1e-6)")

    p = _Parser(prog="sensornet", description="Coverage and evasion in mobile sensor networks.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("coverage", parents=[common], help="static coverage at one time")
    c.add_argument("scene")
    c.add_argument("--time", type=_time, required=True)

    e = sub.add_parser("evasion", parents=[common], help="decide whether an evasion path exists")
    e.add_argument("scene")
    e.add_argument("--witness", metavar="OUT", help="write the witness path, one 't x y' per line")

    k = sub.add_parser("cech", parents=[common], help="nerve at one time, or the interval table")
    k.add_argument("scene")
    k.add_argument("--time", type=_time, help="print the complex at this time instead of the table")

    m = sub.add_parser("compare", parents=[common], help="compare two networks")
    m.add_argument("scene_a")
    m.add_argument("scene_b")
    m.add_argument("--pair", nargs=2, type=_time, metavar=("T", "T2"))
    m.add_argument("--json", metavar="OUT")

    s = sub.add_parser("scene", help="built-in scenes")
    ssub = s.add_subparsers(dest="scene_command", required=True, parser_class=_Parser)
    gen = ssub.add_parser("gen", help="write network A or B")
    gen.add_argument("which", choices=["A", "B"])
    gen.add_argument("--out", required=True)

    n = sub.add_parser("snapshot", parents=[common], help="render one time as SVG")
    n.add_argument("scene")
    n.add_argument("--time", type=_time, required=True)
    n.add_argument("--out", required=True)
    return p


def _load(path: str) -> Scene:
    try:
        return scenes.load(path)
    except OSError as e:
        raise SceneError(f"{path}: {e.strerror or e}") from None
    except SceneError as e:
        raise SceneError(f"{path}: {e}") from None


def _h(args, scene: Scene) -> float:
    return getattr(args, "grid", None) or scene.radius / 8


def _dt(args) -> float:
    return getattr(args, "dt", None) or 1 / 256


def _tol(args) -> float:
    return getattr(args, "tol", None) or 1e-6


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise SceneError(f"{path}: {e.strerror or e}") from None


# -- subcommands ----------------------------------------------------------------


def _coverage(args, out) -> int:
    scene = _load(args.scene)
    hv = is_covered_homology(scene, args.time)
    gv = is_covered_grid(scene, args.time, _h(args, scene))
    print(f"homology: {'covered' if hv.covered else 'hole'} beta1={hv.beta1} fence={'ok' if hv.fence_ok else 'failed'}", file=out)
    line = f"grid: {gv.status}"
    if gv.witness is not None:
        line += f" witness={gv.witness.x:.6f},{gv.witness.y:.6f}"
    print(line, file=out)
    if not hv.fence_ok:
        return 2
    return 0 if hv.covered else 1


def _evasion(args, out) -> int:
    scene = _load(args.scene)
    res = evasion_exists(scene, _h(args, scene), _dt(args))
    print(f"evasion: {res.status}", file=out)
    if args.witness:
        lines = [f"{t:.6f} {p.x:.6f} {p.y:.6f}" for t, p in (res.witness or ())]
        _write(args.witness, "".join(ln + "\n" for ln in lines))
    return {"exists": 0, "none": 1, "indeterminate": 2}[res.status]


def _cech(args, out) -> int:
    scene = _load(args.scene)
    if args.time is not None:
        out.write(cech_at(scene, args.time).serialize())
        return 0
    tl = build_timeline(scene, _dt(args), _tol(args))
    print("# start end vertices edges triangles beta0 beta1", file=out)
    for a, b, K in tl.intervals():
        print(
            f"{a:.9f} {b:.9f} {len(K.vertices)} {len(K.edges)} {len(K.triangles)} {betti(K, 0)} {betti(K, 1)}",
            file=out,
        )
    return 0


def _compare(args, out) -> int:
    a, b = _load(args.scene_a), _load(args.scene_b)
    h = getattr(args, "grid", None)
    rep = full_report(a, b, dt=_dt(args), h=h, pair=args.pair)
    n_iso = sum(ok for _, ok in rep.timeline)
    print(f"timeline: {n_iso}/{len(rep.timeline)} sampled times isomorphic", file=out)
    print(f"evasion: a={rep.evasion['a']} b={rep.evasion['b']}", file=out)
    for key, prof, _ in rep.pairs:
        print(
            f"pair {key}: t={prof.t:g} t2={prof.t2:g} beta1={prof.beta1_t}->{prof.beta1_t2} "
            f"rank={prof.rank_incl} monotone={str(prof.monotone).lower()}",
            file=out,
        )
    for c in rep.conclusions:
        print(c, file=out)
    if args.json:
        _write(args.json, json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n")
    return 0


def _scene(args, out) -> int:
    scene = scenes.build_example_A() if args.which == "A" else scenes.build_example_B()
    _write(args.out, scenes.dumps(scene))
    print(f"wrote scene {args.which} to {args.out}", file=out)
    return 0


def _snapshot(args, out) -> int:
    scene = _load(args.scene)
    _write(args.out, render_svg(scene, args.time, _h(args, scene)))
    print(f"wrote {args.out}", file=out)
    return 0


# -- SVG --------------------------------------------------------------------------

_PALETTE = ("#e07a5f", "#3d85c6", "#81b29a", "#f2cc8f", "#9b5de5", "#f15bb5", "#00bbf9", "#a0a0a0")


def render_svg(scene: Scene, t: float, h: float, scale: float = 40.0) -> str:
    """Byte-stable SVG: domain, uncovered components, disks and nerve at ``t``."""
    x0, y0, x1, y1 = scene.domain.bbox()
    pad = scene.radius
    W, H = (x1 - x0 + 2 * pad) * scale, (y1 - y0 + 2 * pad) * scale

    def X(x):
        return f"{(x - x0 + pad) * scale:.2f}"

    def Y(y):
        return f"{(y1 - y + pad) * scale:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.2f}" height="{H:.2f}" viewBox="0 0 {W:.2f} {H:.2f}">',
        f"<title>{scene.label or 'scene'} t={t:.6f}</title>",
    ]
    d = scene.domain
    if isinstance(d, Disk):
        out.append(
            f'<circle cx="{X(d.center.x)}" cy="{Y(d.center.y)}" r="{d.radius * scale:.2f}" fill="none" stroke="#000" stroke-width="2"/>'
        )
    else:
        out.append(
            f'<rect x="{X(x0)}" y="{Y(y1)}" width="{(x1 - x0) * scale:.2f}" height="{(y1 - y0) * scale:.2f}" fill="none" stroke="#000" stroke-width="2"/>'
        )

    xy = scene.positions(t)
    if len(xy):
        sl = uncovered_slice(scene, t, h)
        g = sl.grid
        out.append('<g id="uncovered" stroke="none" fill-opacity="0.5">')
        for i in range(g.nx):
            col = sl.labels[i]
            j = 0
            while j < g.ny:
                lab = int(col[j])
                if lab == 0:
                    j += 1
                    continue
                k = j
                while k < g.ny and col[k] == lab:
                    k += 1
                cx = g.x0 + i * g.h
                out.append(
                    f'<rect x="{X(cx)}" y="{Y(g.y0 + k * g.h)}" width="{g.h * scale:.2f}" '
                    f'height="{(k - j) * g.h * scale:.2f}" fill="{_PALETTE[(lab - 1) % len(_PALETTE)]}"/>'
                )
                j = k
        out.append("</g>")

        K = cech_at(scene, t)
        out.append('<g id="disks" fill="#6baed6" fill-opacity="0.15" stroke="#6baed6">')
        for p in xy:
            out.append(f'<circle cx="{X(p[0])}" cy="{Y(p[1])}" r="{scene.radius * scale:.2f}"/>')
        out.append("</g>")
        out.append('<g id="triangles" fill="#fdae6b" fill-opacity="0.35" stroke="none">')
        for a, b, c in K.simplices(2):
            pts = " ".join(f"{X(xy[v][0])},{Y(xy[v][1])}" for v in (a, b, c))
            out.append(f'<polygon points="{pts}"/>')
        out.append("</g>")
        out.append('<g id="edges" stroke="#333" stroke-width="1">')
        for a, b in K.simplices(1):
            out.append(f'<line x1="{X(xy[a][0])}" y1="{Y(xy[a][1])}" x2="{X(xy[b][0])}" y2="{Y(xy[b][1])}"/>')
        out.append("</g>")
        nf = len(scene.fence)
        out.append('<g id="sensors">')
        for i, p in enumerate(xy):
            fill = "#000" if i < nf else "#d62728"
            out.append(f'<circle cx="{X(p[0])}" cy="{Y(p[1])}" r="3.00" fill="{fill}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


_COMMANDS = {
    "coverage": _coverage,
    "evasion": _evasion,
    "cech": _cech,
    "compare": _compare,
    "scene": _scene,
    "snapshot": _snapshot,
}


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = _parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EX_USAGE
    try:
        return _COMMANDS[args.command](args, out)
    except (SceneError, NonGenericSceneError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_NOINPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_USAGE


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)
