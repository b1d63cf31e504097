"""Command-line interface.

Subcommands map one-to-one onto the library: ``graph info`` and ``aut`` are
informational; ``cutset check``/``cutset search``, ``certify ...``,
``gluing ...``, ``complex ...`` and ``f090a`` emit certificates.  Exit
status is 0 when every emitted check passes, 1 when a certificate fails,
and 2 on usage or input errors.  ``--out`` writes the full report as JSON:
``{"target": ..., "pass": ..., "checks": [{"name", "pass", "witness?",
"millis?"}]}`` per certificate.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .aut import automorphism_group, cycle_notation
from .certify import (
    SeparatedFamily,
    certify_edge_separated,
    certify_triangle_link,
    certify_vertex_separated,
)
from .complexes import (
    check_gromov,
    edge_midpoint_id,
    hypergraph_checks,
    link,
    parse_complex,
    trace_hypergraph,
    wall_cut,
)
from .cutset import (
    is_cutset,
    is_sigma_separated,
    is_star_cutset,
    parse_family,
    format_family,
)
from .datasets import named_graph
from .errors import SepcertError
from .gluing import (
    EdgeGerm,
    GluingInfeasible,
    GluingStructure,
    LinkInstance,
    WeightAssignment,
    orbits_of_pairs,
    pair_key,
    solve_gluing,
    verify_gluing,
)
from .graph import Graph, Metric, edge_key, parse_graph, parse_rational, structural_report
from .pipeline import run_f090a
from .report import Certificate, RunReport, jsonable


class _UsageError(SepcertError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from None


def _load_graph(args) -> tuple[Graph, Metric]:
    if getattr(args, "builtin", None):
        if getattr(args, "graph", None):
            raise _UsageError("give either a graph file or --builtin, not both")
        return named_graph(args.builtin), Metric.combinatorial()
    if not getattr(args, "graph", None):
        raise _UsageError("a graph file or --builtin name is required")
    return parse_graph(_read(args.graph))


def _cert_doc(cert: Certificate) -> dict:
    checks = []
    for c in cert.checks:
        doc = {"name": c.name, "pass": c.ok}
        if c.witness is not None:
            doc["witness"] = jsonable(c.witness)
        if c.millis is not None:
            doc["millis"] = c.millis
        checks.append(doc)
    return {"target": cert.target, "pass": cert.ok, "checks": checks}


def _report_doc(rep: RunReport) -> dict:
    return {
        "command": rep.command,
        "version": rep.version,
        "pass": rep.ok,
        "inputs": jsonable(rep.inputs),
        "stats": jsonable(rep.stats),
        "certificates": [_cert_doc(c) for c in rep.certificates],
    }


def _write_out(args, doc: dict) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _print_cert(cert: Certificate, verbose_pass: bool = True) -> None:
    for c in cert.checks:
        if c.ok and not verbose_pass:
            continue
        line = f"  {'PASS' if c.ok else 'FAIL'} {c.name}"
        if not c.ok and c.witness:
            line += f"  {json.dumps(jsonable(c.witness), sort_keys=True)[:200]}"
        print(line)
    print(f"{'PASS' if cert.ok else 'FAIL'} {cert.target}")


def _finish(args, cert: Certificate, extra_inputs: dict | None = None) -> int:
    rep = RunReport(command=args.command, inputs=extra_inputs or {}, certificates=[cert])
    _write_out(args, _report_doc(rep))
    return 0 if cert.ok else 1


# ---------------------------------------------------------------- graph --


def _cmd_graph_info(args) -> int:
    g, metric = _load_graph(args)
    info = structural_report(g, metric)
    for key, value in info.items():
        print(f"{key}: {json.dumps(jsonable(value))}")
    _write_out(args, {"command": "graph info", "report": jsonable(info)})
    return 0


# ------------------------------------------------------------------ aut --


def _cmd_aut(args) -> int:
    g, _ = _load_graph(args)
    grp = automorphism_group(g, enumerate_budget=args.budget)
    if grp.enumerated:
        print(f"order: {grp.order}")
    else:
        print("order: unknown (enumeration budget exceeded)")
    print(f"generators: {len(grp.generators)}")
    print(f"vertex-orbits: {len(grp.vertex_orbits())}")
    if args.elements:
        for p in grp.require_enumerated("--elements"):
            print(cycle_notation(p))
    doc = {
        "command": "aut",
        "order": grp.order,
        "enumerated": grp.enumerated,
        "generators": [cycle_notation(p) for p in grp.generators],
        "vertex_orbits": jsonable(grp.vertex_orbits()),
    }
    _write_out(args, doc)
    return 0


# --------------------------------------------------------------- cutset --


def _cmd_cutset_check(args) -> int:
    g, metric = _load_graph(args)
    family = parse_family(_read(args.family))
    if not family:
        raise _UsageError(f"no cutsets in {args.family}")
    sigma = parse_rational(args.sigma) if args.sigma else None
    cert = Certificate("cutset-check")
    for i, c in enumerate(family, start=1):
        c.validate_for(g)
        cert.add(f"cutset-{i}", is_cutset(g, c), {"elements": c.sorted_elements()})
        if sigma is not None:
            cert.add(f"cutset-{i}-separated", is_sigma_separated(g, metric, c, sigma))
        if args.star:
            cert.add(f"cutset-{i}-star", is_star_cutset(g, c))
    _print_cert(cert)
    return _finish(args, cert, {"family": args.family})


def _cmd_cutset_search(args) -> int:
    from .search import CoverAllGoal, NeighborSplitGoal, SearchTask, search_star_cutsets

    g, _ = _load_graph(args)
    if (args.at is None) != (args.split is None):
        raise _UsageError("--at and --split go together")
    if args.at is not None:
        i, j = args.split
        goal = NeighborSplitGoal(args.at, i, j)
    else:
        goal = CoverAllGoal()
    task = SearchTask(
        g,
        goal,
        sigma=args.sigma,
        node_budget=10**18 if args.exhaust else args.budget,
        time_budget_s=None if args.exhaust else args.time_budget,
        workers=args.workers,
    )
    result = search_star_cutsets(task)
    stats = {
        "found": len(result.cutsets),
        "exhausted": result.exhausted,
        **jsonable(result.stats),
    }
    body = format_family(result.cutsets)
    if args.out:
        Path(args.out).write_text(body)
        Path(args.out + ".stats.json").write_text(
            json.dumps(stats, sort_keys=True, indent=2) + "\n"
        )
    else:
        sys.stdout.write(body)
    print(f"# found={stats['found']} exhausted={stats['exhausted']}", file=sys.stderr)
    return 0


# -------------------------------------------------------------- certify --


def _cmd_certify_link(args) -> int:
    g, _ = _load_graph(args)
    fam = None
    if args.family:
        cutsets = parse_family(_read(args.family))
        fam = SeparatedFamily.from_cutsets(g, 3, cutsets)
    cert = certify_triangle_link(g, fam, node_budget=args.budget)
    _print_cert(cert)
    return _finish(args, cert, {"family": args.family or "searched"})


def _cmd_certify_vertex(args) -> int:
    g, _ = _load_graph(args)
    cutsets = parse_family(_read(args.family))
    fam = SeparatedFamily.from_cutsets(g, args.n, cutsets)
    cert = certify_vertex_separated(g, args.n, fam)
    _print_cert(cert)
    return _finish(args, cert, {"family": args.family, "n": str(args.n)})


def _cmd_certify_edge(args) -> int:
    g, metric = _load_graph(args)
    sigma = parse_rational(args.sigma)
    cutsets = parse_family(_read(args.family))
    fam = SeparatedFamily.from_cutsets(g, sigma, cutsets, kind="edge", metric=metric)
    cert = certify_edge_separated(g, metric, sigma, fam)
    _print_cert(cert)
    return _finish(args, cert, {"family": args.family, "sigma": str(sigma)})


# --------------------------------------------------------------- gluing --


def _load_structure(path: str) -> GluingStructure:
    """Structure file: JSON naming each link's graph file, sigma, and family
    file, plus either germs or a "homogeneous" self-gluing link name.

    {"links": [{"name": "L", "graph": "lk.txt", "sigma": "3",
                "family": "fam.txt", "group": true}],
     "homogeneous": "L"}
    or with explicit germs:
     "germs": [{"start": "L", "element": 1, "end": "L", "element_end": 2,
                "bijection": [[d, d'], ...]}]
    Elements are vertex ids, or [u, v] for edge-kind links; relative paths
    resolve against the structure file's directory.
    """
    base = Path(path).parent
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise _UsageError(f"bad structure file: {exc}") from None
    if not isinstance(doc, dict) or "links" not in doc:
        raise _UsageError('structure file needs a "links" list')

    def resolve(p: str) -> str:
        q = Path(p)
        return str(q if q.is_absolute() else base / q)

    instances: dict[str, LinkInstance] = {}
    groups = []
    want_groups = False
    for spec in doc["links"]:
        name = spec.get("name")
        if not name or "graph" not in spec or "family" not in spec:
            raise _UsageError('each link needs "name", "graph" and "family"')
        g, metric = parse_graph(_read(resolve(spec["graph"])))
        sigma = parse_rational(str(spec.get("sigma", "3")))
        cutsets = parse_family(_read(resolve(spec["family"])))
        kind = cutsets[0].kind if cutsets else "vertex"
        fam = SeparatedFamily.from_cutsets(g, sigma, cutsets, kind=kind, metric=metric)
        instances[name] = LinkInstance(name, g, metric, sigma, fam.members)
        if spec.get("group"):
            groups.append(automorphism_group(g))
            want_groups = True
        else:
            groups.append(None)

    if "homogeneous" in doc:
        if "germs" in doc:
            raise _UsageError('give either "homogeneous" or "germs", not both')
        name = doc["homogeneous"]
        if name not in instances:
            raise _UsageError(f"homogeneous link {name!r} is not declared")
        li = instances[name]
        grp = groups[list(instances).index(name)]
        return GluingStructure.homogeneous(li, grp)

    def element(raw):
        return edge_key(*raw) if isinstance(raw, list) else int(raw)

    germs = []
    for spec in doc.get("germs", ()):
        try:
            start = instances[spec["start"]]
            end = instances[spec["end"]]
        except KeyError as exc:
            raise _UsageError(f"germ references unknown link {exc}") from None
        ea = element(spec["element"])
        eb = element(spec.get("element_end", spec["element"]))
        if "bijection" in spec:
            germs.append(
                EdgeGerm(start, ea, end, eb, tuple((int(a), int(b)) for a, b in spec["bijection"]))
            )
        else:
            if ea != eb:
                raise _UsageError("a germ without a bijection needs equal elements")
            germs.append(EdgeGerm.identity(start, end, ea))
    if not germs:
        raise _UsageError('structure file needs "germs" or "homogeneous"')
    return GluingStructure(
        tuple(instances.values()), tuple(germs), tuple(groups) if want_groups else None
    )


def _orbit_ids(structure: GluingStructure):
    """Deterministic (orbit-id, pairs) listing: '<link>:<index>'."""
    out = []
    for li in structure.instances:
        for i, orbit in enumerate(orbits_of_pairs(li, structure.group_of(li))):
            out.append((f"{li.name}:{i}", li, orbit))
    return out


def _load_weights(structure: GluingStructure, path: str) -> WeightAssignment:
    by_id = {oid: (li, orbit) for oid, li, orbit in _orbit_ids(structure)}
    weights: dict[tuple[str, tuple], int] = {}
    for lineno, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise _UsageError(f"weights line {lineno}: expected 'orbit-id value'")
        oid, value = parts
        if oid not in by_id:
            raise _UsageError(f"weights line {lineno}: unknown orbit id {oid!r}")
        try:
            val = int(value)
        except ValueError:
            raise _UsageError(f"weights line {lineno}: bad integer {value!r}") from None
        li, orbit = by_id[oid]
        for cp in orbit:
            weights[(li.name, pair_key(cp))] = val
    missing = [
        oid
        for oid, li, orbit in _orbit_ids(structure)
        if (li.name, pair_key(orbit[0])) not in weights
    ]
    if missing:
        raise _UsageError(f"weights file misses orbits: {', '.join(missing)}")
    return WeightAssignment(weights)


def _cmd_gluing_verify(args) -> int:
    structure = _load_structure(args.structure)
    if args.weights:
        w = _load_weights(structure, args.weights)
    else:
        w = WeightAssignment.all_ones(structure)
    cert = verify_gluing(structure, w)
    _print_cert(cert)
    return _finish(args, cert, {"structure": args.structure, "weights": args.weights or "all-ones"})


def _cmd_gluing_solve(args) -> int:
    structure = _load_structure(args.structure)
    solution = solve_gluing(structure)
    if isinstance(solution, GluingInfeasible):
        print("INFEASIBLE: no strictly positive solution exists")
        print(solution.detail)
        for eq in solution.equations:
            print(f"  {eq}")
        _write_out(
            args,
            {
                "command": "gluing solve",
                "pass": False,
                "detail": solution.detail,
                "equations": list(solution.equations),
            },
        )
        return 1
    lines = []
    for oid, li, orbit in _orbit_ids(structure):
        lines.append(f"{oid} {solution.get(li, orbit[0])}")
    body = "\n".join(lines) + "\n"
    sys.stdout.write(body)
    if args.out:
        Path(args.out).write_text(body)
    return 0


# -------------------------------------------------------------- complex --


def _cmd_complex_check(args) -> int:
    x = parse_complex(_read(args.file))
    cert = check_gromov(x)
    shapes = cert.check("shapes").witness
    print(f"vertices: {x.n}  edges: {x.m}  faces: {len(x.faces)}")
    print(f"side-counts: {list(shapes['side_counts'])}  max-circumference: {shapes['max_circumference']}")
    failures = [c for c in cert.checks if not c.ok]
    print(f"links checked: {x.n}  failures: {len(failures)}")
    _print_cert(cert, verbose_pass=False)
    return _finish(args, cert, {"file": args.file})


def _parse_seed_vertex(x, raw: str, kind: str) -> int:
    if "-" in raw:
        if kind != "edge":
            raise _UsageError("an edge-midpoint seed needs --kind edge")
        try:
            u, v = (int(t) for t in raw.split("-"))
        except ValueError:
            raise _UsageError(f"bad seed {raw!r}: expected 'u-v' or a vertex id") from None
        return edge_midpoint_id(x, (u, v))
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"bad seed {raw!r}: expected 'u-v' or a vertex id") from None


def _seed_atoms(x, v0: int, kind: str, family_path: str | None):
    """Seed atoms for a trace.

    Vertex kind: the cutset file lists neighbor vertices of the seed (or
    ambient edges at it); atoms are the matching link vertices.  Edge kind:
    the file lists face indices; an edge-midpoint seed may omit the file,
    meaning all faces through the edge.
    """
    if family_path is None:
        if kind == "edge" and v0 > x.n:
            return x.edge_faces[x.edges[v0 - x.n - 1]]
        raise _UsageError("--cutset is required except for edge-midpoint seeds")
    family = parse_family(_read(family_path))
    if not family:
        raise _UsageError(f"no cutsets in {family_path}")
    seed = family[0]
    if kind == "edge":
        if seed.kind != "vertex":
            raise _UsageError("edge-kind seeds list face indices, not edges")
        return seed.sorted_elements()
    lk = link(x, v0)
    atoms = []
    for el in seed.sorted_elements():
        e = el if isinstance(el, tuple) else (v0, el)
        atoms.append(lk.vertex_id(edge_key(*e)))
    return tuple(atoms)


def _cmd_complex_trace(args) -> int:
    x = parse_complex(_read(args.file))
    v0 = _parse_seed_vertex(x, args.seed_vertex, args.kind)
    atoms = _seed_atoms(x, v0, args.kind, args.cutset)
    h = trace_hypergraph(x, v0, atoms, kind=args.kind)
    print(f"segments: {len(h.segments)}  vertices: {len(h.vertices())}  paired: {len(h.pairs)}")
    for v, reason in h.frontier:
        print(f"frontier: {v} ({reason})")
    cert = hypergraph_checks(x, h)
    cut = wall_cut(x, h)
    sizes = sorted((len(b) for b in cut.primary_blocks() if b), reverse=True)
    print(f"wall sides: {len(cut.blocks)}  primary-vertex sides: {sizes}")
    _print_cert(cert)
    doc = _report_doc(
        RunReport(
            command=args.command,
            inputs={"file": args.file, "seed": args.seed_vertex, "kind": args.kind},
            certificates=[cert],
            stats={
                "segments": jsonable([s.key() for s in h.segments]),
                "frontier": jsonable(h.frontier),
                "wall_primary_blocks": jsonable(cut.primary_blocks()),
            },
        )
    )
    _write_out(args, doc)
    return 0 if cert.ok else 1


# ---------------------------------------------------------------- f090a --


def _cmd_f090a(args) -> int:
    rep = run_f090a(skip_aut=args.skip_aut)
    for cert in rep.certificates:
        _print_cert(cert, verbose_pass=False)
    for stage in rep.stats.get("not_checked", ()):
        print(f"NOT CHECKED {stage}")
    if "aborted_at" in rep.stats:
        print(f"aborted at: {rep.stats['aborted_at']}")
    print(f"overall: {'PASS' if rep.ok else 'FAIL'}")
    _write_out(args, _report_doc(rep))
    return 0 if rep.ok else 1


# ----------------------------------------------------------------- main --


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("graph", nargs="?", help="graph file (edge-list format)")
    p.add_argument("--builtin", help="built-in graph name (e.g. f090a, q3, k33)")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="sepcert", description=__doc__)
    top.add_argument("--version", action="version", version=f"sepcert {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    graph = sub.add_parser("graph", help="graph inspection").add_subparsers(
        dest="graph_cmd", required=True
    )
    info = graph.add_parser("info", help="order, size, girth, diameter")
    _add_graph_source(info)
    info.add_argument("--out")
    info.set_defaults(fn=_cmd_graph_info, command="graph info")

    aut = sub.add_parser("aut", help="automorphism group")
    _add_graph_source(aut)
    aut.add_argument("--elements", action="store_true", help="dump all elements")
    aut.add_argument("--budget", type=int, default=10_000_000)
    aut.add_argument("--out")
    aut.set_defaults(fn=_cmd_aut, command="aut")

    cutset = sub.add_parser("cutset", help="cutset predicates and search").add_subparsers(
        dest="cutset_cmd", required=True
    )
    check = cutset.add_parser("check", help="validate a cutset family")
    _add_graph_source(check)
    check.add_argument("--family", required=True)
    check.add_argument("--sigma", help="also require sigma-separation (rational)")
    check.add_argument("--star", action="store_true", help="also require star cutsets")
    check.add_argument("--out")
    check.set_defaults(fn=_cmd_cutset_check, command="cutset check")

    search = cutset.add_parser("search", help="search star cutsets")
    _add_graph_source(search)
    search.add_argument("--star", action="store_true", required=True)
    search.add_argument("--at", type=int, help="neighbor-split goal: vertex")
    search.add_argument("--split", type=int, nargs=2, metavar=("I", "J"))
    search.add_argument("--exhaust", action="store_true")
    search.add_argument("--budget", type=int, default=10_000_000)
    search.add_argument("--time-budget", type=float, default=600.0)
    search.add_argument("--workers", type=int, default=1)
    search.add_argument("--sigma", type=int, default=3)
    search.add_argument("--out", help="family file; stats land in <out>.stats.json")
    search.set_defaults(fn=_cmd_cutset_search, command="cutset search")

    certify = sub.add_parser("certify", help="separation certificates").add_subparsers(
        dest="certify_cmd", required=True
    )
    cl = certify.add_parser("link", help="triangle-link certificate")
    _add_graph_source(cl)
    cl.add_argument("--family")
    cl.add_argument("--budget", type=int, default=5000)
    cl.add_argument("--out")
    cl.set_defaults(fn=_cmd_certify_link, command="certify link")

    cv = certify.add_parser("vertex-separated", help="vertex n-separation")
    _add_graph_source(cv)
    cv.add_argument("--n", type=int, required=True)
    cv.add_argument("--family", required=True)
    cv.add_argument("--out")
    cv.set_defaults(fn=_cmd_certify_vertex, command="certify vertex-separated")

    ce = certify.add_parser("edge-separated", help="edge sigma-separation")
    _add_graph_source(ce)
    ce.add_argument("--sigma", required=True)
    ce.add_argument("--family", required=True)
    ce.add_argument("--out")
    ce.set_defaults(fn=_cmd_certify_edge, command="certify edge-separated")

    gluing = sub.add_parser("gluing", help="gluing equations").add_subparsers(
        dest="gluing_cmd", required=True
    )
    gv = gluing.add_parser("verify", help="verify a weight assignment")
    gv.add_argument("structure")
    gv.add_argument("--weights", help="weight file (default: all ones)")
    gv.add_argument("--out")
    gv.set_defaults(fn=_cmd_gluing_verify, command="gluing verify")

    gs = gluing.add_parser("solve", help="find positive integer weights")
    gs.add_argument("structure")
    gs.add_argument("--out")
    gs.set_defaults(fn=_cmd_gluing_solve, command="gluing solve")

    cx = sub.add_parser("complex", help="polygonal complexes").add_subparsers(
        dest="complex_cmd", required=True
    )
    cc = cx.add_parser("check", help="curvature (link girth) certificate")
    cc.add_argument("file")
    cc.add_argument("--out")
    cc.set_defaults(fn=_cmd_complex_check, command="complex check")

    ct = cx.add_parser("trace", help="trace a separating hypergraph")
    ct.add_argument("file")
    ct.add_argument("--seed-vertex", required=True, help="vertex id, or u-v for an edge midpoint")
    ct.add_argument("--kind", choices=("vertex", "edge"), required=True)
    ct.add_argument("--cutset", help="family file with the seed cutset")
    ct.add_argument("--out")
    ct.set_defaults(fn=_cmd_complex_trace, command="complex trace")

    f0 = sub.add_parser("f090a", help="run the full built-in pipeline")
    f0.add_argument("--skip-aut", action="store_true")
    f0.add_argument("--out")
    f0.set_defaults(fn=_cmd_f090a, command="f090a")

    return top


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SepcertError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
