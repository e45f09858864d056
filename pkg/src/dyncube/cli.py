"""Command line entry point: ``dyncube <command> [options]``.

Every command prints (or writes with --out) one JSON report carrying its
provenance.  Exit status: 0 success, 2 a computed negative answer with a
witness, 1 usage or contract errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from . import automorphism, cubes, heisenberg, product, robinson, substitution
from .errors import DyncubeError
from .grid import Pattern, Rect, ShiftVector, load_pattern, square, to_pgm, to_ppm

OK, USAGE, NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE)


def _ints(text: str, count: int | None = None) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} comma-separated integers, got {text!r}")
    return vals


def _window(text: str) -> Rect:
    """Either k (the centred square of side 2^k) or x0,y0,w,h."""
    if "," in text:
        return Rect(*_ints(text, 4))
    return cubes.centered_window(_ints(text, 1)[0])


def _bounds(text: str) -> tuple[int, int]:
    vals = _ints(text)
    if len(vals) == 1:
        return vals[0], vals[0]
    if len(vals) == 2:
        return vals[0], vals[1]
    raise UsageError("bounds take one or two integers")


def _load_product(path: str) -> Pattern:
    try:
        obj = json.loads(Path(path).read_text())
        phi = {(int(a), int(b)): int(s) for a, b, s in obj["phi"]}
        spec = product.ProductSpec(tuple(obj["rowWord"]), tuple(obj["colWord"]), phi)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read product file {path}: {exc}") from exc
    return product.build_product(spec)


def make_patch(args) -> Pattern:
    if getattr(args, "input", None):
        try:
            return load_pattern(args.input)
        except OSError as exc:
            raise UsageError(f"cannot read pattern file {args.input}: {exc}") from exc
    system = args.system
    if system == "morse":
        return substitution.central_patch(substitution.morse_rule(), args.level)
    if system == "robinson":
        return robinson.supertile(args.level, args.orientation)
    if system.startswith("product:"):
        return _load_product(system.split(":", 1)[1])
    if system.startswith("custom:"):
        return substitution.central_patch(substitution.load_rule(system.split(":", 1)[1]), args.level)
    raise UsageError(f"unknown system {system!r}; use morse, robinson, product:<file> or custom:<rule-file>")


def provenance(args, **extra) -> dict:
    out = {"tool": "dyncube", "version": __version__, "command": args.command,
           "system": getattr(args, "system", None), "level": getattr(args, "level", None),
           "seed": args.seed, "threads": args.threads}
    for name in ("window", "bounds", "radius"):
        if getattr(args, name, None) is not None:
            out[name] = getattr(args, name)
    out.update(extra)
    return out


def _text(report: dict) -> str:
    """One line per top-level field; nested values are summarized by size."""
    lines = []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (list, dict)):
            value = f"<{len(value)} entries>"
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _emit(args, report: dict) -> None:
    if getattr(args, "format", "json") == "text":
        text = _text(report)
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_image(args, patch: Pattern) -> None:
    if not getattr(args, "image", None):
        return
    if patch.alphabet.size == 28 and args.image.endswith(".ppm"):
        Path(args.image).write_text(to_ppm(patch, robinson.palette()))
    else:
        Path(args.image).write_text(to_pgm(patch))


def cmd_generate(args) -> int:
    patch = make_patch(args)
    _write_image(args, patch)
    if args.out:
        Path(args.out).write_text(json.dumps(patch.to_json(), sort_keys=True) + "\n")
        report = {"provenance": provenance(args), "width": patch.width, "height": patch.height,
                  "out": args.out}
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        _emit(args, {"provenance": provenance(args), "pattern": patch.to_json()})
    return OK


def _spec(args) -> cubes.WindowSpec:
    n, m = _bounds(args.bounds)
    return cubes.WindowSpec(_window(args.window), n, m)


def cmd_cubes(args) -> int:
    patch, spec = make_patch(args), _spec(args)
    quads = cubes.cube_set(patch, spec)
    report = cubes.quadruples_to_json(quads, spec, args.summary)
    if args.symmetry:
        bad = [q for q in quads if not cubes.symmetry_closure_check(q, patch, spec)]
        report["symmetry"] = {"checked": len(quads), "failed": len(bad)}
    report["provenance"] = provenance(args)
    _emit(args, report)
    return OK


def cmd_relate(args) -> int:
    patch, spec = make_patch(args), _spec(args)
    pairs = cubes.relation_pairs(patch, spec, args.kind)
    report = cubes.pairs_to_json(pairs, spec, args.summary)
    report["kind"] = args.kind
    report["provenance"] = provenance(args, patch=[patch.width, patch.height])
    _emit(args, report)
    return NEGATIVE if report["off_diagonal"] else OK


def _anchor_candidates(patch: Pattern, span: int, radius: int):
    """Anchors near the patch centre whose radius block fits, in (m, n) order."""
    s = patch.support
    cx, cy = s.x0 + s.width // 2, s.y0 + s.height // 2
    for dy in range(-span, span + 1):
        for dx in range(-span, span + 1):
            if s.contains(square(radius, (cx + dx, cy + dy))):
                yield ShiftVector(cx + dx, cy + dy)


def cmd_detect_product(args) -> int:
    patch = make_patch(args)
    if args.anchor:
        anchors = [ShiftVector(*_ints(args.anchor, 2))]
    else:
        anchors = list(_anchor_candidates(patch, args.span, args.radius))
        if not anchors:
            raise UsageError(f"radius {args.radius} too large for a {patch.width}x{patch.height} patch")
    first_conflict = None
    for a in anchors:
        got = product.detect_product(patch, args.radius, a)
        if isinstance(got, product.ProductDecomposition):
            _emit(args, {"provenance": provenance(args), "result": "product-consistent",
                         "decomposition": got.to_json()})
            return OK
        if first_conflict is None:
            first_conflict = got
    _emit(args, {"provenance": provenance(args), "result": "conflict",
                 "anchors_tried": len(anchors), "conflict": first_conflict.to_json()})
    return NEGATIVE


def cmd_automorphisms(args) -> int:
    patch = make_patch(args)
    codes = automorphism.enumerate_codes(patch, args.radius, args.check_size, args.budget)
    reps = automorphism.modulo_shifts(codes)
    report = {"provenance": provenance(args, check_size=args.check_size),
              "accepted": len(codes), "modulo_shifts": [c.to_json() for c in reps],
              "identity_only": all(automorphism.is_identity(c) for c in reps),
              "label": f"candidate automorphisms up to (r={args.radius}, check_size={args.check_size})"}
    _emit(args, report)
    return OK


def cmd_robinson(args) -> int:
    if args.robinson_command == "supertile":
        patch = robinson.supertile(args.level, args.orientation)
        _write_image(args, patch)
        verdict = robinson.is_valid(patch)
        _emit(args, {"provenance": provenance(args, orientation=args.orientation),
                     "valid": verdict.ok, "pattern": patch.to_json()})
        return OK
    if args.robinson_command == "faults":
        if args.input:
            patch = load_pattern(args.input)
        elif args.assembly == "two":
            patch = robinson.two_fault_completions(args.level)[0]
        elif args.assembly == "one":
            patch = robinson.one_fault_completions(args.level)[0]
        else:
            patch = robinson.supertile(args.level, args.orientation)
        report = robinson.fault_lines(patch)
        _emit(args, {"provenance": provenance(args, assembly=args.assembly), "faults": report.to_json()})
        return OK
    two = robinson.two_fault_completions(args.level)
    one = robinson.one_fault_completions(args.level)
    _emit(args, {"provenance": provenance(args),
                 "two_fault": {"count": len(two), "classes": automorphism.classify_fibers(two), "expected": 28},
                 "one_fault": {"count": len(one), "classes": automorphism.classify_fibers(one), "expected": 6},
                 "no_fault": {"classes": automorphism.classify_fibers([robinson.supertile(args.level)])}})
    return OK if len(two) == 28 else NEGATIVE


def cmd_heisenberg(args) -> int:
    alpha = heisenberg.parse_alpha(args.alpha)
    rep = heisenberg.witness_search(args.c, alpha, args.eps)
    report = rep.to_json()
    report["provenance"] = provenance(args, c=args.c, alpha=alpha, eps=args.eps)
    if args.strong is not None:
        report["strong"] = {"bound": args.strong,
                            "found": heisenberg.strong_witness_scan(args.c, alpha, args.eps, args.strong)}
    _emit(args, report)
    return OK if rep.passed else NEGATIVE


def cmd_complexity(args) -> int:
    patch = make_patch(args)
    values = [cubes.complexity_proxy(patch, n) for n in range(args.max_n + 1)]
    _emit(args, {"provenance": provenance(args), "proxy": values,
                 "label": "row-orbit column-word count (proxy)"})
    return OK


def cmd_return_times(args) -> int:
    patch = make_patch(args)
    n, m = _bounds(args.bounds)
    anchor = ShiftVector(*_ints(args.anchor, 2))
    times = cubes.return_times(patch, anchor, _window(args.window), n, m)
    _emit(args, {"provenance": provenance(args), "anchor": [anchor.n, anchor.m],
                 "count": len(times), "times": [[v.n, v.m] for v in times]})
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyncube", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1,
                        help="parallelism cap (computations currently run on one thread)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "text"], default="json")
    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--system", default="morse", help="morse, robinson, product:<file>, custom:<rule-file>")
    source.add_argument("--level", type=int, default=4)
    source.add_argument("--orientation", type=int, default=0, choices=range(4))
    source.add_argument("--input", help="read the patch from a pattern JSON file")
    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--window", default="1", help="k for the centred 2^k square, or x0,y0,w,h")
    window.add_argument("--bounds", default="4", help="nmax[,mmax]")
    window.add_argument("--summary", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("generate", parents=[common, source])
    p.add_argument("--image", help="also write a PGM (or PPM for Robinson) image")
    p.set_defaults(func=cmd_generate)
    p = sub.add_parser("cubes", parents=[common, source, window])
    p.add_argument("--symmetry", action="store_true", help="run the symmetry closure check on every quadruple")
    p.set_defaults(func=cmd_cubes)
    p = sub.add_parser("relate", parents=[common, source, window])
    p.add_argument("--kind", choices=["R_S", "R_T"], default="R_S")
    p.set_defaults(func=cmd_relate)
    p = sub.add_parser("detect-product", parents=[common, source])
    p.add_argument("--radius", type=int, default=0)
    p.add_argument("--anchor", help="x,y; default tries a centred grid of anchors")
    p.add_argument("--span", type=int, default=2, help="half-width of the anchor grid")
    p.set_defaults(func=cmd_detect_product)
    p = sub.add_parser("automorphisms", parents=[common, source])
    p.add_argument("--radius", type=int, default=0)
    p.add_argument("--check-size", type=int, default=2)
    p.add_argument("--budget", type=int, default=automorphism.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_automorphisms)
    p = sub.add_parser("robinson")
    rsub = p.add_subparsers(dest="robinson_command", required=True, parser_class=_Parser)
    for name in ("supertile", "faults", "fibers"):
        q = rsub.add_parser(name, parents=[common])
        q.add_argument("--level", type=int, default=3)
        q.add_argument("--orientation", type=int, default=0, choices=range(4))
        if name == "supertile":
            q.add_argument("--image")
        if name == "faults":
            q.add_argument("--assembly", choices=["none", "one", "two"], default="none")
            q.add_argument("--input")
    p.set_defaults(func=cmd_robinson, system="robinson")
    p = sub.add_parser("heisenberg")
    hsub = p.add_subparsers(dest="heisenberg_command", required=True, parser_class=_Parser)
    q = hsub.add_parser("witness", parents=[common])
    q.add_argument("--c", type=float, default=0.5)
    q.add_argument("--alpha", default="cbrt2")
    q.add_argument("--eps", type=float, default=0.01)
    q.add_argument("--strong", type=int, help="also scan anchored quadruples with |n|,|m| <= this bound")
    p.set_defaults(func=cmd_heisenberg)
    p = sub.add_parser("complexity", parents=[common, source])
    p.add_argument("--max-n", type=int, default=16)
    p.set_defaults(func=cmd_complexity)
    p = sub.add_parser("return-times", parents=[common, source, window])
    p.add_argument("--anchor", default="0,0")
    p.set_defaults(func=cmd_return_times)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DyncubeError) as exc:
        print(f"dyncube: error: {exc}", file=sys.stderr)
        return USAGE
