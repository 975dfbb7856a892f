"""Command-line interface.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .automaton import SubsetState, closure_mask, is_plague, orbit_rule, to_mask, zm_rule
from .coverings import (covering_from_json, covering_of, enumerate_coverings, lift_covering)
from .formats import dumps, read_json, validate, write_json
from .metrics import (check_conjecture, immunity, minimal_plague, weight_report)
from .orbits import (InvariantError, check_braided_sizes, centralizer, decompose_cube,
                     enumerate_orbit, space_from_json)
from .racks import InputError, builtin_rack, class_quandles, rack_from_json, validate_rack
from .robust import (BUILTIN_TEMPLATES, builtin_template, robust_chain, span_graph,
                     verify_section5)
from .schreier import (classify_fixed, export_dot, graph_from_json, quotient, signature,
                       xy_cycles)


class VerificationFailed(Exception):
    pass


def _emit(args, data, text: str) -> None:
    sys.stdout.write(dumps(data) if args.json else text.rstrip("\n") + "\n")


def _ints(raw: str) -> list:
    try:
        return [int(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {raw!r}") from None


# -- input resolution ----------------------------------------------------------


def _rack(args):
    if getattr(args, "builtin", None):
        return builtin_rack(args.builtin)
    if getattr(args, "rack", None):
        data = read_json(args.rack)
        validate("group" if "mult" in data else "rack", data)
        return rack_from_json(data)
    raise InputError("give --rack FILE or --builtin NAME")


def _space(args):
    """A B3-space from --orbit, --covering, or a rack plus --seed."""
    if getattr(args, "orbit", None):
        return space_from_json(read_json(args.orbit, "orbit"))
    if getattr(args, "covering", None):
        return lift_covering(_covering(args))
    if getattr(args, "seed", None):
        return enumerate_orbit(_rack(args), _ints(args.seed))
    raise InputError("give --orbit FILE, --covering FILE, or a rack with --seed r,s,t")


def _covering(args):
    if getattr(args, "covering", None):
        return covering_from_json(read_json(args.covering, "covering"))
    return covering_of(_space(args)).covering


def _graph(spec: str):
    if spec in BUILTIN_TEMPLATES:
        return builtin_template(spec).graph, builtin_template(spec)
    return graph_from_json(read_json(spec, "graph")), None


def _add_space_opts(p, rack=True):
    p.add_argument("--orbit", help="orbit dump JSON")
    p.add_argument("--covering", help="covering JSON (its lift is used)")
    if rack:
        p.add_argument("--rack", help="rack or group+class JSON")
        p.add_argument("--builtin", help="built-in rack, e.g. S3-transpositions")
        p.add_argument("--seed", help="r,s,t")


# -- verbs -------------------------------------------------------------------


def cmd_rack_validate(args):
    if args.builtin:
        table = [list(r) for r in builtin_rack(args.builtin).table]
    else:
        data = read_json(args.rack)
        if "mult" in data:
            validate("group", data)
            table = [list(r) for r in rack_from_json(data).table]
        else:
            validate("rack", data)
            table = data["table"]
    chk = validate_rack(table)
    data = {"is_rack": chk.is_rack, "is_quandle": chk.is_quandle, "is_braided": chk.is_braided,
            "violation": list(chk.violation) if chk.violation else None, "reason": chk.reason}
    lines = [f"rack: {chk.is_rack}", f"quandle: {chk.is_quandle}", f"braided: {chk.is_braided}"]
    if chk.violation:
        lines.append(f"witness {chk.violation}: {chk.reason}")
    _emit(args, data, "\n".join(lines))
    if not chk.is_rack:
        raise VerificationFailed("not a rack")


def cmd_orbit_enumerate(args):
    if not args.seed:
        raise InputError("--seed r,s,t is required")
    orb = enumerate_orbit(_rack(args), _ints(args.seed))
    data = orb.to_json()
    if args.out:
        write_json(args.out, data, "orbit")
    _emit(args, data, f"orbit of ({args.seed}): {orb.size} points")


def cmd_orbit_decompose(args):
    rack = _rack(args)
    orbits = decompose_cube(rack)
    rows = [{"seed": list(o.points[0]), "size": o.size} for o in orbits]
    data = {"rack": rack.name, "orbits": rows, "braided": rack.is_braided}
    text = [f"{rack.name or 'rack'}: {len(orbits)} orbits"]
    text += [f"  {','.join(map(str, r['seed']))}  size {r['size']}" for r in rows]
    if rack.is_braided:
        rep = check_braided_sizes(rack)
        data["sizes_ok"] = rep.passed
        text.append(f"braided sizes ok: {rep.passed}")
    _emit(args, data, "\n".join(text))


def cmd_quotient(args):
    space = _space(args)
    graph, qmap = quotient(space)
    fs = classify_fixed(graph)
    data = {"graph": graph.to_json(), "N": qmap.N, "signature": signature(graph),
            "V_x": fs.V_x, "V_y": fs.V_y, "V_xy": fs.V_xy, "xy_cycles": xy_cycles(graph)}
    if args.out:
        write_json(args.out, graph.to_json(), "graph")
    _emit(args, data, f"{signature(graph)}  N={qmap.N}  V_x={fs.V_x} V_y={fs.V_y} V_xy={fs.V_xy}")


def cmd_covering_derive(args):
    cov = covering_of(_space(args)).covering
    data = cov.to_json()
    if args.out:
        write_json(args.out, data, "covering")
    _emit(args, data, f"{cov.name()}  x={cov.x_label} y={cov.y_label}")


def cmd_covering_enumerate(args):
    graph, template = _graph(args.graph)
    covs = enumerate_coverings(graph, args.nmax, template=template, N_min=args.nmin,
                               require=args.require)
    lines = []
    for c in covs:
        if c.symbols:
            vals = ",".join(str(v) for v in c.symbols.values())
        else:
            vals = ",".join(map(str, c.free_labels()))
        lines.append(f"N={c.N} labels=({vals})")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, c in enumerate(covs):
            write_json(out / f"covering_{k:03d}.json", c.to_json(), "covering")
    _emit(args, [c.to_json() for c in covs], "\n".join(lines) or "no coverings")


def cmd_covering_lift(args):
    cov = _covering(args)
    space = lift_covering(cov)
    data = {"points": [list(p) for p in space.points], "sigma1": space.sigma1,
            "sigma2": space.sigma2, "base": 0}
    if args.out:
        write_json(args.out, data)
    _emit(args, data, f"lift of {cov.name()}: {space.size} points")


def cmd_automaton_closure(args):
    if args.zm:
        rule = zm_rule(args.zm, _ints(args.offsets or ""))
        names = [str(i) for i in range(rule.size)]
    else:
        space = _space(args)
        rule = orbit_rule(space)
        names = [space.point_name(p) for p in range(space.size)]
    subset = _ints(args.subset or "")
    if any(not 0 <= p < rule.size for p in subset):
        raise InputError(f"subset indices must lie in [0, {rule.size})")
    closed = closure_mask(rule, to_mask(subset))
    state = SubsetState(rule.size, closed)
    data = {"size": rule.size, "closure": state.indices(), "closure_hex": state.hex(),
            "plague": closed == rule.full}
    _emit(args, data, f"closure has {len(state)} of {rule.size} points; plague: {data['plague']}\n"
                      + " ".join(names[p] for p in state.indices()))


def _report(space_id, cov, result):
    space = lift_covering(cov)
    wrep = weight_report(cov)
    return {
        "space": space_id, "points": space.size,
        "min_plague": result.size if result.certified_minimal else {"bound": result.size},
        "witness": result.witness.indices(), "witness_hex": result.witness.hex(),
        "immunity": str(immunity(result, space.size)) if result.certified_minimal else None,
        "weight": str(wrep.weight), "special": wrep.special,
        "conjecture": ("holds" if Fraction(result.size, space.size) <= wrep.weight else
                       "fails" if result.certified_minimal else "inconclusive"),
        "search": result.search_stats,
    }


def cmd_metrics(args):
    cov = _covering(args)
    space = lift_covering(cov)
    if args.what == "weight":
        wrep = weight_report(cov)
        data = {"space": cov.name(), "weight": str(wrep.weight), "special": wrep.special,
                "note": wrep.note}
        _emit(args, data, str(wrep.weight))
        return
    if args.what == "conjecture":
        res = check_conjecture(cov)
        data = {"space": cov.name(), "points": space.size,
                "min_plague": len(res.witness) if res.certified else {"bound": len(res.witness)},
                "witness": res.witness, "immunity": None if res.imm is None else str(res.imm),
                "weight": str(res.omega), "conjecture": res.verdict, "special": res.special}
        validate("report", data)
        shown = res.imm if res.imm is not None else f"<= {res.bound}"
        _emit(args, data, f"imm {shown}  weight {res.omega}  {res.verdict}")
        if res.verdict == "fails":
            raise VerificationFailed("imm > weight")
        return
    result = minimal_plague(orbit_rule(space), symmetries=centralizer(space))
    data = _report(cov.name(), cov, result)
    validate("report", data)
    if args.what == "immunity":
        if not result.certified_minimal:
            raise InputError(f"{space.size} points exceed the certification cap; "
                             "raise HURWITZ_SEARCH_CAP")
        _emit(args, data, data["immunity"])
        return
    cert = "certified" if result.certified_minimal else "not certified"
    _emit(args, data, f"plague of size {result.size} ({cert}): "
                      + " ".join(space.point_name(p) for p in result.witness.indices()))


def cmd_graph_builtin(args):
    t = builtin_template(args.name)
    g = t.graph
    data = {"graph": g.to_json(), "signature": signature(g),
            "x_labels": [_expr(e) for e in t.x_expr], "y_labels": [_expr(e) for e in t.y_expr]}
    if args.dot:
        Path(args.dot).write_text(export_dot(g))
    _emit(args, data, f"{args.name}: {signature(g)}, {g.n} vertices, chain "
                      f"{robust_chain(g).profile()}")


def _expr(e: dict) -> str:
    if not e:
        return "0"
    parts = []
    for sym, coef in e.items():
        mag = abs(coef)
        body = sym if sym else str(mag)
        if sym and mag != 1:
            body = f"{mag}{sym}"
        parts.append(("-" if coef < 0 else "+") + body)
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def cmd_graph_span(args):
    frags = [f.strip() for f in args.fragments.split(",") if f.strip()]
    g = span_graph(args.k, frags)
    data = {"graph": g.to_json(), "signature": signature(g), "fixed": vars(classify_fixed(g))}
    if args.out:
        write_json(args.out, g.to_json(), "graph")
    if args.dot:
        Path(args.dot).write_text(export_dot(g))
    _emit(args, data, f"Span(H_{args.k}; {','.join(frags)}): {g.n} vertices, {signature(g)}")


def cmd_graph_dot(args):
    cov = None
    if args.covering:
        cov = covering_from_json(read_json(args.covering, "covering"))
        g = cov.graph
    else:
        g, _ = _graph(args.graph)
    text = export_dot(g, cov)
    if args.out:
        Path(args.out).write_text(text)
        text = f"wrote {args.out}"
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_verify_section5(args):
    cov = covering_from_json(read_json(args.covering, "covering"))
    rep = verify_section5(cov)
    lines = [f"{rep.graph} N={rep.N}: {rep.case}", f"chain {rep.chain}  K={rep.K}",
             f"weight {rep.weight}"]
    if rep.builtin:
        lines.append(f"built-in {rep.builtin} with {rep.symbols}")
    for c in rep.checks:
        mark = "ok" if c.verified else "NOT A PLAGUE"
        extra = f" bound {c.bound}: {c.bound_holds}" if c.bound is not None else ""
        lines.append(f"  {c.label}  {c.ratio}  {mark}{extra}  {c.note}".rstrip())
    lines += [f"note: {n}" for n in rep.notes]
    lines.append("PASS" if rep.passed else "FAIL")
    _emit(args, rep.to_json(), "\n".join(lines))
    if not rep.passed:
        raise VerificationFailed("section 5 check failed")


# -- scan --------------------------------------------------------------------


def scan_rack(rack) -> list:
    rows = []
    for k, orb in enumerate(decompose_cube(rack)):
        cov = covering_of(orb).covering
        res = check_conjecture(cov)
        imm = res.imm if res.imm is not None else None
        rows.append({"rack": rack.name, "orbit": k, "seed": list(orb.points[0]), "size": orb.size,
                     "signature": signature(cov.graph), "N": cov.N,
                     "immunity": None if imm is None else str(imm),
                     "bound": str(res.bound), "weight": str(res.omega),
                     "verdict": res.verdict, "special": res.special})
    return rows


def _scan_item(item):
    kind, payload = item
    try:
        if kind == "builtin":
            rack = builtin_rack(payload)
        elif kind == "file":
            rack = rack_from_json(read_json(payload))
        else:
            rack = payload
        return scan_rack(rack), None
    except (InputError, InvariantError) as exc:
        return [], f"{payload if isinstance(payload, str) else payload.name}: {exc}"


def cmd_scan(args):
    items = [("builtin", b) for b in args.builtin or []]
    items += [("file", f) for f in args.rack or []]
    if args.groups_max:
        items += [("rack", r) for r in class_quandles(args.groups_max)]
    if not items:
        items = [("rack", r) for r in class_quandles(8)]
    start = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_scan_item, items))
    else:
        results = [_scan_item(it) for it in items]
    rows = [r for rs, _ in results for r in rs]
    errors = [e for _, e in results if e]
    counts = {v: sum(r["verdict"] == v for r in rows) for v in ("holds", "fails", "inconclusive")}
    data = {"version": __version__, "inputs": len(items), "rows": rows, "errors": errors,
            "counts": counts}
    if args.timing:
        data["seconds"] = round(time.perf_counter() - start, 3)
    lines = [f"{'rack':28} {'orb':>3} {'size':>4} {'signature':14} {'N':>2} "
             f"{'imm':>7} {'weight':>7} verdict"]
    for r in rows:
        imm = r["immunity"] or "<=" + r["bound"]
        lines.append(f"{r['rack'][:28]:28} {r['orbit']:>3} {r['size']:>4} {r['signature'][:14]:14} "
                     f"{r['N']:>2} {imm:>7} {r['weight']:>7} {r['verdict']}")
    lines.append(f"{len(rows)} orbits: {counts}")
    lines += [f"error: {e}" for e in errors]
    _emit(args, data, "\n".join(lines))
    if counts["fails"]:
        raise VerificationFailed("conjecture fails on some orbit")


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hurwitz-plague", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="verb", required=True)

    def leaf(parent, name, func, **kw):
        q = parent.add_parser(name, **kw)
        q.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        q.set_defaults(func=func)
        return q

    rack = sub.add_parser("rack").add_subparsers(dest="action", required=True)
    q = leaf(rack, "validate", cmd_rack_validate)
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--rack")
    g.add_argument("--builtin")

    orbit = sub.add_parser("orbit").add_subparsers(dest="action", required=True)
    q = leaf(orbit, "enumerate", cmd_orbit_enumerate)
    q.add_argument("--rack")
    q.add_argument("--builtin")
    q.add_argument("--seed")
    q.add_argument("--out")
    q = leaf(orbit, "decompose", cmd_orbit_decompose)
    q.add_argument("--rack")
    q.add_argument("--builtin")

    q = leaf(sub, "quotient", cmd_quotient)
    _add_space_opts(q)
    q.add_argument("--out", help="write the graph JSON here")

    cov = sub.add_parser("covering").add_subparsers(dest="action", required=True)
    q = leaf(cov, "derive", cmd_covering_derive)
    _add_space_opts(q)
    q.add_argument("--out")
    q = leaf(cov, "enumerate", cmd_covering_enumerate)
    q.add_argument("--graph", required=True, help="built-in name or graph JSON")
    q.add_argument("--nmax", type=int, required=True)
    q.add_argument("--nmin", type=int, default=1)
    q.add_argument("--require", default="simply-intersecting",
                   choices=["simply-intersecting", "fixed-cycles", "labels"])
    q.add_argument("--out-dir")
    q = leaf(cov, "lift", cmd_covering_lift)
    q.add_argument("--covering", required=True)
    q.add_argument("--out")

    auto = sub.add_parser("automaton").add_subparsers(dest="action", required=True)
    q = leaf(auto, "closure", cmd_automaton_closure)
    _add_space_opts(q)
    q.add_argument("--zm", type=int, help="use the Z_m rule instead")
    q.add_argument("--offsets", help="Z_m offsets a1,...,ar")
    q.add_argument("--subset", help="comma-separated point indices")

    met = sub.add_parser("metrics").add_subparsers(dest="action", required=True)
    for what in ("plague", "immunity", "weight", "conjecture"):
        q = leaf(met, what, cmd_metrics)
        _add_space_opts(q)
        q.set_defaults(what=what)

    gr = sub.add_parser("graph").add_subparsers(dest="action", required=True)
    q = leaf(gr, "builtin", cmd_graph_builtin)
    q.add_argument("--name", required=True, choices=sorted(BUILTIN_TEMPLATES))
    q.add_argument("--dot")
    q = leaf(gr, "span", cmd_graph_span)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--fragments", required=True, help="e.g. F2,F2,F3")
    q.add_argument("--out")
    q.add_argument("--dot")
    q = leaf(gr, "dot", cmd_graph_dot)
    q.add_argument("--graph", help="built-in name or graph JSON")
    q.add_argument("--covering", help="covering JSON (adds labels)")
    q.add_argument("--out")

    ver = sub.add_parser("verify").add_subparsers(dest="action", required=True)
    q = leaf(ver, "section5", cmd_verify_section5)
    q.add_argument("--covering", required=True)

    q = leaf(sub, "scan", cmd_scan)
    q.add_argument("--builtin", action="append", help="built-in rack (repeatable)")
    q.add_argument("--rack", action="append", help="rack JSON (repeatable)")
    q.add_argument("--groups-max", type=int, help="add class quandles of groups up to this order")
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--timing", action="store_true", help="include wall time (not reproducible)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "graph" and args.action == "dot" and not (args.graph or args.covering):
        parser.error("graph dot needs --graph or --covering")
    try:
        args.func(args)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
