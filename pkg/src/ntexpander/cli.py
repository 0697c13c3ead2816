"""Command-line driver: parameter search, instance construction, audits, building balls.

Every command prints a JSON report (sorted keys, no timestamps) that embeds the
resolved run descriptor. Exit status is 0 when all audits pass, 1 when an
audit fails and 2 for usage or parameter errors.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import building, expansion, ffpoly, graph, morgenstern, spectral
from .projgroup import ClosureCapExceeded, order_statistics

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_MAX_ORDER = 200_000
AUDITS = ("vertex", "edge", "spectrum", "eigenfunction", "kahale", "moore")


class UsageError(ValueError):
    pass


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True)


def load_config(path):
    """Read a TOML or JSON run descriptor."""
    p = Path(path)
    text = p.read_bytes()
    if p.suffix.lower() == ".toml":
        return tomllib.loads(text.decode())
    return json.loads(text)


def _merge(args, config):
    """Fill unset flags from the config file; explicit flags win."""
    for key, val in config.items():
        key = key.replace("-", "_")
        if key == "htilde_coeffs":
            key = "htilde"
        if key == "audits":
            for name in val:
                if name not in AUDITS and name != "all":
                    raise UsageError(f"unknown audit {name!r} in config")
                setattr(args, name, True)
            continue
        if getattr(args, key, None) in (None, False):
            setattr(args, key, val)
    return args


def _parse_coeffs(text):
    if text is None or isinstance(text, list):
        return text
    try:
        return [int(c) for c in str(text).split(",") if c.strip()]
    except ValueError as exc:
        raise UsageError(f"bad coefficient list {text!r}; use e.g. 1,1 for s+1") from exc


def _params(args):
    if args.q is None:
        raise UsageError("--q is required")
    return morgenstern.make_params(int(args.q), htilde=_parse_coeffs(args.htilde),
                                   m=args.m, epsilon=args.epsilon)


def _descriptor(args, keys):
    return {k: getattr(args, k, None) for k in keys}


def _write(out, name, text):
    if out is None:
        return None
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text)
    return str(d / name)


# -- commands -------------------------------------------------------------------------


def cmd_search(args):
    if args.q is None or args.m is None:
        raise UsageError("search needs --q and --m")
    if args.q % 2 == 0:
        raise UsageError("q must be odd")
    F = ffpoly.base_field(args.q)
    found = ffpoly.search_parameters(F, args.m, args.type)
    rows = [{"htilde": str(h), "htilde_coeffs": h.to_json(),
             "type": ffpoly.classify_graph_type(h).value} for h in found]
    return {"descriptor": _descriptor(args, ("q", "m", "type")), "results": rows,
            "count": len(rows)}, True


def _instance(args):
    params = _params(args)
    return morgenstern.build_instance(params, max_order=args.max_order)


def construct_report(inst, with_girth=True):
    X = inst.X
    summ = inst.summary()
    bip = graph.is_bipartite(X)
    g = graph.girth(X) if with_girth else None
    summ.update({
        "n": X.n,
        "d": X.degree() if X.is_regular() else None,
        "regular": bool(X.is_regular()),
        "connected": len(graph.components(X)) == 1,
        "bipartite": bip.bipartite,
        "bipartition_sizes": list(bip.classes()) if bip.bipartite else None,
        "girth": None if g is None else (None if g == math.inf else int(g)),
        "girth_lower_bound": math.ceil(4 / 3 * math.log(X.n, inst.params.q) - 1e-12),
        "y_size": len(inst.Y_group),
        "y_element_orders": {str(k): v for k, v in order_statistics(inst.Y_group).items()},
    })
    return summ


def cmd_construct(args):
    inst = _instance(args)
    rep = construct_report(inst)
    rep["descriptor"] = _descriptor(args, ("q", "m", "htilde", "epsilon", "max_order"))
    if args.out:
        _write(args.out, "summary.json", _dump(rep))
        if args.dot:
            _write(args.out, "X.dot", graph.to_dot(inst.X, labels=False, name="X"))
        if args.csv:
            _write(args.out, "X_edges.csv", graph.to_edge_csv(inst.X))
            _write(args.out, "Y_vertices.csv",
                   "x_vertex\n" + "".join(f"{v}\n" for v in inst.Y_ids))
    ok = (rep["x_order"] == rep["expected_x_order"] and rep["y_order"] == rep["expected_y_order"]
          and rep["regular"] and rep["connected"])
    return rep, ok


def _audit_vertex(inst):
    X, Y = inst.X, inst.Y_ids
    prof = expansion.neighbor_profile(X, Y)
    avg, _ = expansion.induced_average_degree(X, Y)
    d = X.degree()
    target = (d * len(Y)) // 2
    rep = prof.to_json()
    rep.update({"y_independent": avg == 0, "expected_boundary": target})
    rep["pass"] = (set(prof.histogram) == {2} and len(prof.boundary) == target
                   and avg == 0)
    return rep


def _audit_edge(inst, certified):
    X, Y = inst.X, inst.Y_ids
    exact, avg = expansion.induced_average_degree(X, Y)
    d = X.degree()
    checks = []
    l = 1
    while len(Y) * (d - 1) ** (l / 2) <= X.n:
        checks.append(expansion.kahale_edge_audit(X, Y, l, certified=certified).to_json())
        l += 1
    return {"induced_average_degree": str(exact), "induced_average_degree_float": avg,
            "bounds": checks, "pass": all(c["pass"] for c in checks)}


def _audit_spectrum(inst, tol, dense_limit):
    out = {}
    ok = True
    for name, G in (("X", inst.X), ("Y_graph", inst.Y_graph)):
        passed, rep = spectral.ramanujan_audit(G, tol=tol, dense_limit=dense_limit)
        out[name] = rep.to_json() | {"pass": passed}
        ok = ok and passed and all(v for v in rep.checks.values() if isinstance(v, bool))
    out["pass"] = ok
    return out, ok


def _audit_eigenfunction(inst):
    f = spectral.zero_eigenfunction(inst.X, inst.Y_group, inst.Y_graph)
    ok, viol = spectral.verify_Af_zero(inst.X, f)
    stats = spectral.eigenfunction_stats(f)
    stats.update({"Af_zero": ok, "first_violation": viol,
                  "n_quarter_bound": inst.X.n ** -0.25 / 2})
    stats["pass"] = ok and stats["support"] == len(inst.Y_group) and stats["sum"] == 0
    return stats, f


def _audit_kahale(inst, certified):
    X, Y = inst.X, inst.Y_ids
    d = X.degree()
    walks = []
    l = 1
    while len(Y) * (d - 1) ** (l / 2) <= X.n:
        walks.append(expansion.kahale_walk_bound_audit(X, Y, l, certified=certified).to_json())
        l += 1
    rep = {"walk_bounds": walks}
    lv = max((l for l in range(1, 64) if len(Y) * (d - 1) ** l <= X.n), default=None)
    if lv is None:
        rep["vertex"] = None
    else:
        va = expansion.kahale_vertex_audit(X, Y, lv, certified=certified)
        rep["vertex"] = va.to_json()
        rep["vertex"]["extremal"] = 2 * va.boundary_size == d * va.s
    rep["pass"] = all(w["pass"] for w in walks) and (rep["vertex"] is None
                                                      or rep["vertex"]["pass"])
    return rep


def _audit_moore(inst, l_max):
    X = inst.X
    peeled, _ = expansion.peel_degree_one(X)
    moore = expansion.moore_audit(peeled, l_max)
    cheb = expansion.chebyshev_identity_audit(X, l_max=min(l_max, 7))
    d = X.degree()
    closed = [X.n * d * (d - 1) ** (l - 1) for l in range(1, l_max + 1)]
    rep = {"moore": moore.to_json(), "identities": [c.to_json() for c in cheb],
           "regular_closed_form": moore.observed == closed}
    rep["pass"] = moore.passed and all(c.passed for c in cheb) and rep["regular_closed_form"]
    return rep


def cmd_audit(args):
    which = [a for a in AUDITS if args.all or getattr(args, a)]
    if not which:
        raise UsageError("select at least one audit (or --all)")
    inst = _instance(args)
    report = {"descriptor": _descriptor(args, ("q", "m", "htilde", "epsilon", "tol",
                                               "dense_limit", "l_max")),
              "instance": construct_report(inst, with_girth=False), "audits": {}}
    certified = None
    if "spectrum" in which or "kahale" in which or "edge" in which:
        spectrum_rep, certified = _audit_spectrum(inst, args.tol, args.dense_limit)
        if "spectrum" in which:
            report["audits"]["spectrum"] = spectrum_rep
            rep = spectral.adjacency_spectrum(inst.X, dense_limit=args.dense_limit)
            _write(args.out, "spectrum_X.csv", spectral.spectrum_csv(rep))
    if "vertex" in which:
        report["audits"]["vertex"] = _audit_vertex(inst)
    if "edge" in which:
        report["audits"]["edge"] = _audit_edge(inst, certified)
    if "eigenfunction" in which:
        rep, f = _audit_eigenfunction(inst)
        report["audits"]["eigenfunction"] = rep
        _write(args.out, "eigenfunction.json", spectral.eigenfunction_json(f))
    if "kahale" in which:
        report["audits"]["kahale"] = _audit_kahale(inst, certified)
    if "moore" in which:
        report["audits"]["moore"] = _audit_moore(inst, args.l_max)
        wc = expansion.nb_counts(inst.X, args.l_max, {"Y": inst.Y_ids})
        _write(args.out, "walk_counts.csv", expansion.walk_counts_csv(wc))
    ok = all(a["pass"] for a in report["audits"].values())
    report["pass"] = ok
    _write(args.out, "audit.json", _dump(report))
    return report, ok


def cmd_tree(args):
    n, q, r = args.n, args.q, args.radius
    if n is None or q is None or r is None:
        raise UsageError("tree needs --n, --q and --radius")
    if n == 3 and r > 3 and not args.force:
        raise UsageError("n=3 balls grow like q^(2r); radius > 3 needs --force")
    embed = args.embed or "ramified"
    rep = {"descriptor": _descriptor(args, ("n", "q", "radius", "embed"))}
    ball = building.build_ball(n, q, r)
    rep["ball_size"] = len(ball)
    if n == 2:
        rep["tree_formula"] = building.tree_ball_size(q, r)
    rep["alphabet_size"] = len(building.neighbor_alphabet(n, q))
    checks = [n != 2 or rep["ball_size"] == rep["tree_formula"]]
    highlight, shown = (), ball
    if embed == "ramified":
        rr = building.ramified_audit(n, q, r)
        rep["ramified"] = rr.to_json()
        checks.append(rr.passed)
        shown, highlight = rr.ball_G, rr.Z
    elif embed == "unramified":
        if n != 2:
            raise UsageError("the unramified embedding is implemented for n=2")
        ur = building.unramified_audit(q, r)
        rep["unramified"] = ur.to_json()
        checks.append(ur.passed)
        shown, highlight = ur.ball_G, ur.Z
    elif embed != "none":
        raise UsageError(f"unknown embedding {embed!r}")
    dot = building.ball_to_dot(shown, highlight)
    if args.dot:
        Path(args.dot).write_text(dot)
    _write(args.out, "ball.dot", dot)
    _write(args.out, "ball.json", building.ball_to_json(shown, highlight))
    rep["pass"] = all(checks)
    return rep, rep["pass"]


# -- argument parsing --------------------------------------------------------------------


def _instance_flags(p):
    p.add_argument("--q", type=int, help="odd prime power")
    p.add_argument("--m", type=int, help="degree of htilde (auto-search when --htilde is absent)")
    p.add_argument("--htilde", help="coefficients of htilde, lowest first, e.g. 1,1 for s+1")
    p.add_argument("--epsilon", type=int, help="non-square of F_q (default: least)")
    p.add_argument("--max-order", type=int, default=None,
                   help=f"refuse instances with |X| above this (default {DEFAULT_MAX_ORDER})")


def build_parser():
    parser = argparse.ArgumentParser(prog="ntexpander", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="TOML or JSON file whose keys mirror the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="list admissible htilde")
    p.add_argument("--q", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--type", choices=["pgl", "psl"], default="pgl")

    p = sub.add_parser("construct", help="build X and Y and summarize")
    _instance_flags(p)
    p.add_argument("--out", help="directory for summary.json and optional exports")
    p.add_argument("--dot", action="store_true", help="also write X.dot")
    p.add_argument("--csv", action="store_true", help="also write edge and Y CSVs")

    p = sub.add_parser("audit", help="run expansion and spectral audits")
    _instance_flags(p)
    for name in AUDITS:
        p.add_argument(f"--{name}", action="store_true")
    p.add_argument("--all", action="store_true")
    p.add_argument("--tol", type=float, default=None, help="Ramanujan tolerance (1e-9)")
    p.add_argument("--dense-limit", type=int, default=None,
                   help="largest n for the dense eigensolver "
                        "(env NTEXPANDER_DENSE_LIMIT, default 4096)")
    p.add_argument("--l-max", type=int, default=None, help="longest walk for Moore (10)")
    p.add_argument("--out", help="directory for audit.json, spectrum and eigenfunction files")

    p = sub.add_parser("tree", help="building balls and embedding audits")
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--embed", choices=["ramified", "unramified", "none"], default=None)
    p.add_argument("--dot", help="write the labeled ball to this DOT file")
    p.add_argument("--out", help="directory for ball.dot and ball.json")
    p.add_argument("--force", action="store_true", help="allow large n=3 balls")
    return parser


COMMANDS = {"search": cmd_search, "construct": cmd_construct, "audit": cmd_audit,
            "tree": cmd_tree}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            _merge(args, load_config(args.config))
        if getattr(args, "max_order", "unset") is None:
            args.max_order = DEFAULT_MAX_ORDER
        if getattr(args, "tol", "unset") is None:
            args.tol = 1e-9
        if getattr(args, "l_max", "unset") is None:
            args.l_max = 10
        if getattr(args, "dense_limit", "unset") is None:
            args.dense_limit = int(os.environ.get("NTEXPANDER_DENSE_LIMIT", "4096"))
        report, ok = COMMANDS[args.command](args)
    except (UsageError, ValueError, ClosureCapExceeded, OSError) as exc:
        print(_dump({"command": args.command, "error": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report["command"] = args.command
    print(_dump(report))
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
