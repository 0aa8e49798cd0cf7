"""Command-line front end.

Every subcommand prints one JSON report (or a table derived from it)::

    {"schema_version", "command", "config", "result" | "error", "runtime"}

``runtime`` holds the wall time and thread count; everything else is
identical for identical inputs whatever the number of threads.

Exit status: 0 success, 2 invalid input, 3 resource limit, 4 failed
internal postcondition.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import groups, lengths, sphere3
from .currents import (
    DEFAULT_RADIUS,
    DiscreteCurrent,
    LiouvilleCurrent,
    axis_geodesic,
    enumerate_classes,
    intersection_number,
    is_simple,
    liouville_length,
    pairing,
    self_intersection,
    somewhat_short,
    systole_scan,
)
from .decomposition import check_decomposition, decompose, is_basic, zero_detector
from .errors import (
    CurrentKitError,
    ResourceLimit,
    StepLimit,
    ValidationError,
    ValidationFailed,
)
from .groups import ConjClass
from .hypcore import BoundaryPoint, Geodesic
from .parallel import parallel_map
from .surgery import simplify_to_simple, surgery_report

SCHEMA_VERSION = "1.0"
COMMANDS = (
    "intersect",
    "pairing",
    "selfint",
    "somewhat-short",
    "liouville-check",
    "systole",
    "decompose",
    "surgery",
    "simplify",
    "sphere3-verify",
    "lengths",
    "trichotomy",
    "enumerate",
)
EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_POSTCONDITION = 0, 2, 3, 4


# ----------------------------------------------------------- helpers


def _num(x):
    """JSON-safe float: infinities and NaN become null."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


class _Job:
    def __init__(self, args):
        self.args = args
        if args.presentation_file:
            self.S = groups.load_presentation(args.presentation_file)
        else:
            self.S = groups.get_surface(args.surface)

    def fmt(self, c) -> str:
        w = c.word if isinstance(c, ConjClass) else c
        return self.S.format(w) or "e"

    def cls(self, text=None) -> ConjClass:
        text = text if text is not None else self.args.cls
        if text is None:
            raise ValidationError("--class is required")
        return self.S.canonical(self.S.parse(text))

    def current(self, text=None, required=True):
        text = text if text is not None else self.args.current
        if text is None:
            if required:
                raise ValidationError("--current is required")
            return None
        if text.strip().lower() == "liouville":
            return LiouvilleCurrent(self.S)
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"--current is not valid JSON: {exc}") from exc
        if not isinstance(spec, list) or not spec:
            raise ValidationError("--current must be a non-empty list of [word, weight] pairs")
        return DiscreteCurrent.build(self.S, [tuple(a) if isinstance(a, list) else a for a in spec])

    def discrete(self, text=None) -> DiscreteCurrent:
        mu = self.current(text)
        if not isinstance(mu, DiscreteCurrent):
            raise ValidationError("this command needs a discrete current")
        return mu

    def current_json(self, mu):
        return mu.to_json()

    @property
    def radius(self) -> int:
        r = self.args.radius
        return DEFAULT_RADIUS if r is None else r

    def word_len(self, default: int) -> int:
        a = self.args
        if a.max_len is not None:
            return a.max_len
        if a.radius is not None:
            return a.radius
        return default

    @property
    def count_radius(self) -> int:
        r = self.args.count_radius
        return DEFAULT_RADIUS if r is None else r


def _config(job: _Job) -> dict:
    a = job.args
    surface = a.surface if not a.presentation_file else job.S.to_json()
    return {
        "surface": surface,
        "current": a.current,
        "current2": a.current2,
        "class": a.cls,
        "radius": a.radius,
        "count_radius": a.count_radius,
        "max_len": a.max_len,
        "tolerance": a.tolerance,
        "simple_only": a.simple_only,
        "format": a.format,
        "sym_power": a.sym_power,
        "rep_file": a.rep_file,
        "endpoints": a.endpoints,
        "max_steps": a.max_steps,
    }


# ----------------------------------------------------------- commands


def cmd_intersect(job: _Job) -> dict:
    mu = job.current()
    c = job.cls()
    res = intersection_number(mu, c, job.S, job.radius, want_witness=True)
    out = {
        "class": job.fmt(c),
        "value": _num(res.value),
        "radius": res.radius,
        "stabilized": res.stabilized,
        "enumeration": res.enumeration,
    }
    if isinstance(mu, DiscreteCurrent):
        out["per_atom"] = [{"atom": job.fmt(a), "count": int(n)} for a, n in res.per_atom]
        out["witnesses"] = {job.fmt(a): job.fmt(w) for a, w in res.witnesses.items()}
    return out


def cmd_pairing(job: _Job) -> dict:
    mu = job.discrete()
    nu = job.discrete(job.args.current2) if job.args.current2 else mu
    return {"value": _num(pairing(mu, nu, job.S, job.radius)), "radius": job.radius}


def cmd_selfint(job: _Job) -> dict:
    c = job.cls()
    si = self_intersection(c, job.S, job.radius)
    return {"class": job.fmt(c), "self_intersection": si, "simple": si == 0, "radius": job.radius}


def cmd_somewhat_short(job: _Job) -> dict:
    mu = job.discrete()
    if job.args.endpoints:
        try:
            p, q = (float(t) for t in job.args.endpoints.split(","))
        except ValueError as exc:
            raise ValidationError("--endpoints takes two angles 'phi1,phi2'") from exc
        g = Geodesic(BoundaryPoint(p), BoundaryPoint(q))
        target = f"({p}, {q})"
    else:
        c = job.cls()
        g = axis_geodesic(job.S, c)
        target = f"axis({job.fmt(c)})"
    cert = somewhat_short(mu, g, job.S, job.radius)
    witness = None
    if cert.witness is not None:
        witness = {"atom": job.fmt(cert.witness[0]), "coset": job.fmt(cert.witness[1])}
    return {"geodesic": target, "verdict": cert.verdict, "witness": witness, "radius": cert.radius}


def cmd_liouville_check(job: _Job) -> dict:
    S = job.S
    R = job.word_len(6)
    tol = job.args.tolerance if job.args.tolerance is not None else 1e-9
    classes = enumerate_classes(S, R)

    def err(c):
        ell = 2.0 * math.acosh(abs(S.trace(c.word)) / 2.0)
        return abs(liouville_length(c, S) - ell)

    errs = parallel_map(err, classes, job.args.threads)
    worst = int(np.argmax(errs)) if errs else None
    out = {
        "classes": len(classes),
        "max_len": R,
        "max_error": _num(max(errs) if errs else 0.0),
        "worst_class": job.fmt(classes[worst]) if worst is not None else None,
        "tolerance": tol,
    }
    if errs and max(errs) >= tol:
        raise ValidationFailed("Liouville calibration exceeds tolerance", out)
    return out


def _scan_rows(job, scan):
    return [
        {
            "class": job.fmt(r.cls),
            "intersection": _num(r.intersection),
            "length": _num(r.length),
            "ratio": _num(r.ratio),
            "stabilized": r.stabilized,
        }
        for r in scan.rows
    ]


def cmd_systole(job: _Job) -> dict:
    mu = job.current()
    scan = systole_scan(
        mu, job.S, job.word_len(4), job.count_radius, job.args.simple_only, job.args.threads
    )
    return {
        "systole": _num(scan.systole),
        "systole_class": job.fmt(scan.systole_class) if scan.systole_class else None,
        "ratio_min": _num(scan.c1),
        "ratio_max": _num(scan.c2),
        "word_radius": scan.word_radius,
        "radius": scan.radius,
        "stabilized": all(r.stabilized for r in scan.rows),
        "rows": _scan_rows(job, scan),
    }


def decomposition_json(job: _Job, rep) -> dict:
    return {
        "special_curves": [job.fmt(e) for e in rep.special_curves],
        "atoms_on_special": [[job.fmt(c), w] for c, w in rep.atoms_on_special],
        "pieces": [
            {
                "label": p.label,
                "atoms": [[job.fmt(c), w] for c, w in p.atoms],
                "generators": [job.fmt(g) for g in p.generators],
                "systole_lower_bound": _num(p.systole_lower_bound),
                "boundary": [job.fmt(e) for e in p.boundary],
                "interior_zero": [job.fmt(z) for z in p.interior_zero],
            }
            for p in rep.pieces
        ],
        "candidate_radius": rep.candidate_radius,
        "radius": rep.count_radius,
        "stabilized": rep.stabilized,
        "caveats": list(rep.caveats),
    }


def cmd_decompose(job: _Job) -> dict:
    mu = job.discrete()
    R = job.word_len(4)
    rep = decompose(mu, job.S, R, job.count_radius, threads=job.args.threads)
    out = decomposition_json(job, rep)
    chk = check_decomposition(mu, rep, job.S, job.args.threads)
    out["checks"] = {
        "total_weight": chk.total_weight,
        "piece_weight": chk.piece_weight,
        "mass_conserved": chk.mass_conserved,
        "reconstruction_checked": chk.checked,
        "reconstruction_failures": [[job.fmt(c), _num(a), _num(b)] for c, a, b in chk.reconstruction_failures],
    }
    if not chk.holds:
        raise ValidationFailed("decomposition checks failed", out)
    out["is_basic"] = is_basic(mu, job.S, R, job.count_radius)
    zv = zero_detector(mu, job.S, R, job.count_radius, job.args.threads)
    out["zero_detector"] = {"verdict": zv.verdict, "witness": [job.fmt(c) for c in zv.witness], "note": zv.note}
    return out


def cmd_surgery(job: _Job) -> dict:
    mu = job.discrete()
    c = job.cls()
    rep = surgery_report(mu, c, job.S, job.radius)
    res = rep.resolution
    return {
        "class": job.fmt(c),
        "self_intersection": res.original_self_intersection,
        "h": job.fmt(res.h),
        "branches": [
            {
                "word": job.fmt(res.words[k]),
                "class": job.fmt(res.classes[k]),
                "kind": res.kinds[k],
                "self_intersection": res.self_intersections[k],
                "intersection": _num(rep.intersections[k]),
                "inequality_holds": rep.inequality_holds[k],
            }
            for k in range(3)
        ],
        "intersection_c": _num(rep.intersection_c),
        "some_hyperbolic": rep.some_hyperbolic,
        "radius": rep.radius,
        "notes": rep.notes,
    }


def cmd_simplify(job: _Job) -> dict:
    mu = job.discrete()
    c = job.cls()
    tr = simplify_to_simple(mu, c, job.S, job.radius, job.args.max_steps)
    return {
        "class": job.fmt(c),
        "result": job.fmt(tr.result),
        "steps": [{"from": job.fmt(a), "to": job.fmt(b), "intersection": _num(v)} for a, b, v in tr.steps],
        "initial_intersection": _num(tr.initial_intersection),
        "final_intersection": _num(tr.final_intersection),
        "radius": job.radius,
    }


def cmd_sphere3_verify(job: _Job) -> dict:
    S = sphere3.surface()
    R = job.word_len(6)
    threads = job.args.threads
    grid = sphere3.lemma_a_grid(S=S)
    table = sphere3.classify_single_selfint(S, R, job.count_radius, threads)
    currents = (
        [job.discrete()]
        if job.args.current
        else [DiscreteCurrent.build(S, spec) for spec in ([("aB", 1)], [("aB", 1), ("bab", 1)])]
    )
    pos = []
    for mu in currents:
        p = sphere3.positivity_harness(mu, R, S, job.count_radius, threads)
        pos.append(
            {
                "current": mu.to_json(),
                "minimum": _num(p.minimum),
                "attained_by": job.fmt(p.attained_by) if p.attained_by else None,
                "curve": [[n, _num(v)] for n, v in p.curve],
                "stable_from": p.stable_from,
                "stabilized": p.stabilized,
            }
        )
    out = {
        "lemma_grid": {
            "checked": grid.checked,
            "hypothesis_met": grid.hypothesis_met,
            "counterexamples": [[job.fmt(a), job.fmt(b)] for a, b in grid.counterexamples],
        },
        "single_selfint": {
            "max_len": R,
            "classes": len(table.rows),
            "single": [job.fmt(c) for c in table.single],
            "unexpected": [job.fmt(c) for c in table.unexpected],
            "holds": table.holds,
        },
        "positivity": pos,
        "radius": job.count_radius,
    }
    if grid.counterexamples or not table.holds or any((p["minimum"] or 0) < 1 for p in pos):
        raise ValidationFailed("a sphere3 check failed", out)
    return out


def _rep(job: _Job):
    if job.args.rep_file:
        return lengths.MatrixRep.from_json(job.args.rep_file, job.S)
    return lengths.sym_power_rep(job.S, job.args.sym_power or 3)


def cmd_lengths(job: _Job) -> dict:
    rep = _rep(job)
    classes = enumerate_classes(job.S, job.word_len(4))
    vals = parallel_map(rep.length, classes, job.args.threads)
    table = lengths.length_table(lambda c: vals[classes.index(c)] if c in classes else rep.length(c), classes, S=job.S)
    return {
        "group_type": rep.group_type,
        "dimension": rep.dimension,
        "family": [job.fmt(c) for c in table.family],
        "normalization": _num(table.normalization),
        "entries": [{"class": job.fmt(c), "raw": _num(v * table.normalization), "normalized": _num(v)} for c, v in table.entries],
    }


def cmd_trichotomy(job: _Job) -> dict:
    S = job.S
    R = job.word_len(4)
    if job.args.current:
        mu = job.discrete()
        fn = lambda c: intersection_number(mu, c, S, job.count_radius).value  # noqa: E731
        source = "intersection"
    else:
        fn = _rep(job).length
        source = "representation"
    table = lengths.length_table(fn, [], S=S)
    dec = lengths.trichotomy_classify(table, S, R, job.count_radius)
    return {
        "source": source,
        "special_curves": [job.fmt(e) for e in dec.special_curves],
        "pieces": [
            {"label": p.label, "classes": [job.fmt(c) for c in p.classes], "minimum": _num(p.minimum)}
            for p in dec.pieces
        ],
        "candidate_radius": R,
        "radius": job.count_radius,
    }


def cmd_enumerate(job: _Job) -> dict:
    classes = enumerate_classes(
        job.S, job.word_len(4), primitive=job.args.primitive, simple=job.args.simple_only, radius=job.count_radius
    )
    return {"count": len(classes), "classes": [job.fmt(c) for c in classes]}


HANDLERS = {
    "intersect": cmd_intersect,
    "pairing": cmd_pairing,
    "selfint": cmd_selfint,
    "somewhat-short": cmd_somewhat_short,
    "liouville-check": cmd_liouville_check,
    "systole": cmd_systole,
    "decompose": cmd_decompose,
    "surgery": cmd_surgery,
    "simplify": cmd_simplify,
    "sphere3-verify": cmd_sphere3_verify,
    "lengths": cmd_lengths,
    "trichotomy": cmd_trichotomy,
    "enumerate": cmd_enumerate,
}


# -------------------------------------------------------------- output


def _table(report: dict) -> str:
    lines = [f"# {report['command']}"]
    body = report.get("result") or report.get("error") or {}
    for key, val in body.items():
        if isinstance(val, list) and val and all(isinstance(v, dict) for v in val):
            cols = list(val[0].keys())
            lines.append(f"{key}:")
            lines.append("  " + "\t".join(cols))
            for v in val:
                lines.append("  " + "\t".join(json.dumps(v.get(k), ensure_ascii=False) for k in cols))
        else:
            lines.append(f"{key}: {json.dumps(val, ensure_ascii=False)}")
    lines.append(f"wall_time: {report['runtime']['wall_time']:.3f}s")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--surface", default="punctured_torus", help="built-in surface name")
    common.add_argument("--presentation-file", help="JSON file with a custom presentation")
    common.add_argument("--current", help='JSON list like [["a",1],["b",2]], or "liouville"')
    common.add_argument("--current2", help="second current for pairing")
    common.add_argument("--class", dest="cls", help="conjugacy class as a word, e.g. aB or a1 b1 A1 B1")
    common.add_argument("--radius", type=int, help="lift radius (single-class commands) or word length (scans)")
    common.add_argument("--count-radius", type=int, help="lift radius used inside scans")
    common.add_argument("--max-len", type=int, help="word length of enumerated classes")
    common.add_argument("--tolerance", type=float)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--simple-only", action="store_true")
    common.add_argument("--primitive", action="store_true", help="enumerate: primitive classes only")
    common.add_argument("--endpoints", help="somewhat-short: boundary angles 'phi1,phi2'")
    common.add_argument("--sym-power", type=int, help="lengths/trichotomy: dimension n of Sym^(n-1)")
    common.add_argument("--rep-file", help="lengths/trichotomy: JSON matrix representation")
    common.add_argument("--max-steps", type=int, default=50)
    parser = argparse.ArgumentParser(prog="currentkit", description="Geodesic currents on hyperbolic surfaces")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(argv=None) -> tuple[int, dict]:
    """Parse ``argv``, run the command, return ``(exit status, report)``."""
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION, "command": args.command}
    status = EXIT_OK
    try:
        if args.threads < 1:
            raise ValidationError("--threads must be at least 1")
        for flag in ("radius", "count_radius", "max_len"):
            v = getattr(args, flag)
            if v is not None and v < 0:
                raise ValidationError(f"--{flag.replace('_', '-')} must be non-negative")
        job = _Job(args)
        report["config"] = _config(job)
        report["result"] = HANDLERS[args.command](job)
    except ValidationFailed as exc:
        status = EXIT_POSTCONDITION
        report["error"] = {"type": type(exc).__name__, "message": str(exc), "diagnostics": _jsonable(exc.diagnostics)}
    except (ResourceLimit, StepLimit) as exc:
        status = EXIT_RESOURCE
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except CurrentKitError as exc:
        status = EXIT_VALIDATION
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    report.setdefault("config", None)
    threads = args.threads if args.threads >= 1 else None
    report["runtime"] = {"wall_time": time.perf_counter() - start, "threads": threads}
    return status, report


def _jsonable(obj):
    try:
        json.dumps(obj)
        return obj
    except TypeError:
        return json.loads(json.dumps(obj, default=str))


def main(argv=None) -> int:
    status, report = run(argv)
    if report["config"] is not None and report["config"]["format"] == "table":
        print(_table(report))
    else:
        print(json.dumps(report, ensure_ascii=False))
    if "error" in report:
        print(f"error: {report['error']['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
