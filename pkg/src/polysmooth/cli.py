"""Command line front end.

Runs the same operations as the HTTP service, in process.  Exit status is
0 when the input is smooth (or the operation succeeded), 1 when violations
were found and 2 on errors.
"""

import argparse
import json
import sys
from typing import Any, Dict, List, Optional, Sequence

from . import __version__, service
from .errors import PolysmoothError
from .mesh import guess_format

EXIT_SMOOTH, EXIT_VIOLATIONS, EXIT_ERROR = 0, 1, 2


def _read_mesh(path: str):
    if path == "-":
        data = sys.stdin.buffer.read()
    else:
        with open(path, "rb") as fh:
            data = fh.read()
    return service.parse_mesh(data, guess_format(path, data))


def _write(path: Optional[str], data, stdout) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if path is None or path == "-":
        stdout.write(data.decode("utf-8"))
        return
    with open(path, "wb") as fh:
        fh.write(data)


def _vec3(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected x,y,z")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("expected three numbers") from None


def _param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value: Any = json.loads(raw)
    except ValueError:
        value = raw
    return key, value


def cmd_analyze(args, out) -> int:
    mesh = _read_mesh(args.mesh)
    res = service.analyze(mesh, colored_obj=args.colored_obj is not None)
    if args.json:
        _write(args.json, json.dumps(res.report, indent=1, sort_keys=True), out)
    if args.colored_obj:
        _write(args.colored_obj, res.colored_obj, out)
    if args.json != "-":
        verdict = "smooth" if res.smooth else "not smooth"
        out.write(f"{verdict}: {res.n_violations} violation(s)\n")
        for v in res.report["violations"][: args.max_listed]:
            out.write(f"  {v['kind']} {v['id']}: condition {v['condition']} {v['code']}\n")
    return EXIT_SMOOTH if res.smooth else EXIT_VIOLATIONS


def cmd_classify(args, out) -> int:
    res = service.classify(_read_mesh(args.mesh), args.vertex, args.face)
    out.write(json.dumps(res.model_dump(), indent=1, sort_keys=True) + "\n")
    return EXIT_SMOOTH if res.ok else EXIT_VIOLATIONS


def cmd_gaussimage(args, out) -> int:
    res = service.gauss_images(_read_mesh(args.mesh), args.vertex, args.per_arc)
    _write(args.svg, res.svg, out)
    if args.svg not in (None, "-"):
        for img in res.images:
            out.write(f"vertex {img.vertex}: K={img.K:.17g} simple={img.simple}\n")
    return EXIT_SMOOTH if all(img.simple for img in res.images) else EXIT_VIOLATIONS


def cmd_dual(args, out) -> int:
    res = service.dual(_read_mesh(args.mesh), args.center, check=not args.no_check)
    _write(args.output, res.obj, out)
    if args.output not in (None, "-"):
        out.write("center %.17g %.17g %.17g\n" % res.center)
        if res.duality is not None:
            d = res.duality
            out.write(f"duality ok={d.ok} signs={d.signs_all_match} "
                      f"inflections={d.inflection_all_match} "
                      f"double_dual={d.double_dual_deviation:.3g}\n")
    if res.duality is not None and not res.duality.ok:
        return EXIT_VIOLATIONS
    return EXIT_SMOOTH


def cmd_transform(args, out) -> int:
    with open(args.matrix, "rb") as fh:
        matrix = fh.read()
    res = service.transform(_read_mesh(args.mesh), matrix)
    _write(args.output, res.obj, out)
    return EXIT_SMOOTH


def cmd_generate(args, out) -> int:
    params: Dict[str, Any] = dict(args.params)
    res = service.generate(args.fixture, params)
    _write(args.output, res.obj, out)
    return EXIT_SMOOTH


def cmd_serve(args, out) -> int:
    import uvicorn
    uvicorn.run("polysmooth.api:app", host=args.host, port=args.port)
    return EXIT_SMOOTH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polysmooth", description="Smoothness analysis of polyhedral surfaces.")
    p.add_argument("--version", action="version", version=f"polysmooth {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="check all smoothness conditions")
    a.add_argument("mesh")
    a.add_argument("--json", metavar="OUT", help="write the full report ('-' for stdout)")
    a.add_argument("--colored-obj", metavar="OUT", help="write an OBJ with per-face colour comments")
    a.add_argument("--max-listed", type=int, default=20, help="violations listed in the summary")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("classify", help="analyse one vertex or one face")
    c.add_argument("mesh")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--vertex", type=int)
    g.add_argument("--face", type=int)
    c.set_defaults(func=cmd_classify)

    gi = sub.add_parser("gaussimage", help="draw Gauss images of vertex stars")
    gi.add_argument("mesh")
    gi.add_argument("--vertex", type=int, action="append", required=True)
    gi.add_argument("--svg", metavar="OUT")
    gi.add_argument("--per-arc", type=int, default=32)
    gi.set_defaults(func=cmd_gaussimage)

    d = sub.add_parser("dual", help="polar dual about a centre")
    d.add_argument("mesh")
    d.add_argument("--center", type=_vec3, help="x,y,z; searched for when omitted")
    d.add_argument("-o", "--output")
    d.add_argument("--no-check", action="store_true", help="skip the duality checks")
    d.set_defaults(func=cmd_dual)

    t = sub.add_parser("transform", help="apply a projective map")
    t.add_argument("mesh")
    t.add_argument("--matrix", required=True, help="JSON file with 16 numbers")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_transform)

    gen = sub.add_parser("generate", help="build a test surface")
    gen.add_argument("fixture")
    gen.add_argument("params", nargs="*", type=_param, help="key=value (values parsed as JSON)")
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_generate)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.set_defaults(func=cmd_serve)
    return p


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, stdout)
    except (PolysmoothError, OSError, ValueError) as e:
        stderr.write(f"polysmooth: error: {type(e).__name__}: {e}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
