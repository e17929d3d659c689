"""Command-line interface: ``su3 <command> ...``.

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on bad
input (unknown names, unreadable files, malformed data).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import almostcy, cells, fusion, graphs, pathalg, specmeasure
from .arith import ToleranceContext
from .reports import VerificationReport


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    data_dir: Path
    tol: ToleranceContext
    seed: int
    fmt: str  # text | json | csv

    def __post_init__(self):
        if not (self.data_dir / "manifest.json").exists():
            raise InputError(f"data directory {self.data_dir} has no manifest.json")


def _emit(text):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _report_out(rep: VerificationReport, cfg: RunConfig) -> int:
    _emit(rep.json() if cfg.fmt == "json" else rep.text())
    return 0 if rep.passed else 1


def _catalog(cfg) -> graphs.Catalog:
    try:
        return graphs.Catalog(cfg.data_dir)
    except (graphs.GraphError, OSError) as exc:
        raise InputError(str(exc)) from exc


def _graph(cat, name) -> graphs.Graph:
    if name not in cat:
        raise InputError(f"unknown graph {name!r}")
    return cat[name]


def _resolve(path, cfg) -> Path:
    p = Path(path)
    if p.exists():
        return p
    alt = cfg.data_dir / p
    if alt.exists():
        return alt
    raise InputError(f"file not found: {path}")


def _load_cells(path, cfg, cat, graph_name=None) -> cells.CellSystem:
    p = _resolve(path, cfg)
    try:
        d = json.loads(p.read_text())
        name = graph_name or d["graph"]
        return cells.cells_from_dict(d, _graph(cat, name))
    except (json.JSONDecodeError, KeyError, graphs.GraphError) as exc:
        raise InputError(f"{p}: {exc}") from exc


def _cells_for(args, cfg, cat, g) -> cells.CellSystem:
    if getattr(args, "cells", None):
        return _load_cells(args.cells, cfg, cat, g.name)
    if g.name in cat.cell_files:
        return _load_cells(cat.cell_files[g.name], cfg, cat, g.name)
    return cells.solve_cells(g, seed=cfg.seed, tol=1e-10)


# ---------------------------------------------------------------- commands

def cmd_graphs(args, cfg) -> int:
    cat = _catalog(cfg)
    if args.action == "list":
        rows = []
        for name in cat.names():
            g = cat[name]
            norm = graphs.pf_data(g).norm
            rows.append({"name": name, "vertices": g.n, "edges": len(g.edges),
                         "coxeter": g.coxeter, "norm": round(norm, 12)})
        if cfg.fmt == "json":
            _emit(json.dumps(rows, indent=1))
        elif cfg.fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
            _emit(buf.getvalue())
        else:
            for r in rows:
                _emit(f"{r['name']:8s} m={r['coxeter']:<3d} vertices={r['vertices']:<4d} "
                      f"edges={r['edges']:<4d} norm={r['norm']:.9f}")
        return 0
    if not args.name:
        raise InputError("graphs show needs a graph name")
    _emit(_graph(cat, args.name).to_json())
    return 0


def cmd_invariants(args, cfg) -> int:
    md = fusion.build_modular_data(args.level)
    failed = []
    invs = fusion.invariant_catalog(args.level, md, failed)
    if cfg.fmt == "json":
        _emit(json.dumps([{"name": z.name, "level": z.level, "Z": z.to_rows()} for z in invs],
                         indent=1))
    else:
        for z in invs:
            rep = fusion.verify_invariant(z, md)
            ex = fusion.exponents(z)
            _emit(f"{z.name:10s} exponents={sum(ex.values()):<4d} "
                  f"residual={rep.max_residual:.2e} {'PASS' if rep.passed else 'FAIL'}")
        for rep in failed:
            _emit("excluded: " + rep.text())
    return 0


def cmd_nimrep(args, cfg) -> int:
    cat = _catalog(cfg)
    g = _graph(cat, args.graph)
    entry = cat.entry(args.graph)
    level = args.level or entry.level
    try:
        nim = graphs.nimrep_from_graph(g, level)
    except graphs.GraphError as exc:
        raise InputError(str(exc)) from exc
    if cfg.fmt == "json":
        al = fusion.build_alcove(level)
        _emit(json.dumps({"graph": g.name, "level": level,
                          "G": {f"{w[0]},{w[1]}": nim.G[w].tolist() for w in al.weights}},
                         indent=1))
        return 0
    rep = graphs.check_nimrep(nim, fusion.fusion_matrices(level))
    return _report_out(rep, cfg)


def _invariant(name, level) -> fusion.ModularInvariant:
    Z = graphs._invariant_by_name(name, level)
    if Z is None:
        raise InputError(f"unknown invariant {name!r} at level {level}")
    return Z


def cmd_verify(args, cfg) -> int:
    what = args.what
    if what == "invariant":
        md = fusion.build_modular_data(args.level)
        return _report_out(fusion.verify_invariant(_invariant(args.invariant, args.level), md,
                                                   cfg.tol.abs_tol), cfg)
    cat = _catalog(cfg)
    if what == "nimrep":
        g = _graph(cat, args.graph)
        level = args.level or cat.entry(args.graph).level
        inv = args.invariant or cat.entry(args.graph).invariant
        Z = _invariant(inv, level)
        md = fusion.build_modular_data(level)
        try:
            rep = graphs.verify_nimrep_spectrum(graphs.nimrep_from_graph(g, level), Z, md,
                                                cfg.tol.abs_tol)
        except graphs.SizeMismatch as exc:
            rep = VerificationReport(f"nimrep spectrum {g.name} vs {Z.name}")
            rep.flag(f"size: {exc}", False)
        except graphs.GraphError as exc:
            raise InputError(str(exc)) from exc
        return _report_out(rep, cfg)
    if what == "cells":
        cs = _load_cells(args.file, cfg, cat, args.graph)
        return _report_out(cells.verify_cells(cs, cfg.tol.abs_tol), cfg)
    g = _graph(cat, args.graph)
    cs = _cells_for(args, cfg, cat, g)
    if what == "hecke":
        return _report_out(pathalg.verify_hecke(cs, args.p_max, cfg.tol.abs_tol), cfg)
    if what == "hilbert":
        rep = VerificationReport(f"Hilbert series of A({g.name})")
        nu = almostcy.nakayama_permutation(g)
        P = graphs.permutation_matrix(nu)
        try:
            series = almostcy.closed_hilbert_series(g, P)
            rep.flag("closed form terminates at h-3", True)
            for sub in (almostcy.brute_vs_closed(cs, nu), almostcy.verify_top_degree(cs, nu),
                        almostcy.resolution_euler_check(g, P, g.coxeter, series)):
                rep.checks += sub.checks
        except almostcy.InconsistentSeries as exc:
            rep.flag(str(exc), False)
        return _report_out(rep, cfg)
    raise InputError(f"unknown verify target {what!r}")


def cmd_cells(args, cfg) -> int:
    cat = _catalog(cfg)
    if args.action == "verify":
        if not args.target:
            raise InputError("cells verify needs a cell file")
        cs = _load_cells(args.target, cfg, cat, args.graph)
        return _report_out(cells.verify_cells(cs, cfg.tol.abs_tol), cfg)
    g = _graph(cat, args.graph or args.target)
    try:
        cs = cells.solve_cells(g, seed=cfg.seed, restarts=args.restarts, tol=1e-10)
    except cells.NoConvergence as exc:
        _emit(f"FAIL  {g.name}: {exc}")
        return 1
    out = Path(args.out) if args.out else cfg.data_dir / "cells" / f"{g.name}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(cs.to_json() + "\n")
    _register_cells(cfg, g.name, out)
    rep = cells.verify_cells(cs, cfg.tol.abs_tol)
    rep.details["file"] = str(out)
    code = _report_out(rep, cfg)
    if cfg.fmt == "text":
        _emit(f"wrote {out}")
    return code


def _register_cells(cfg, name, path):
    """Pin a cell file written inside the data directory in its manifest."""
    try:
        rel = path.resolve().relative_to(cfg.data_dir.resolve())
    except ValueError:
        return
    man_path = cfg.data_dir / "manifest.json"
    man = json.loads(man_path.read_text())
    items = [c for c in man.get("cells", []) if c["graph"] != name]
    items.append({"graph": name, "file": rel.as_posix(), "sha256": graphs.file_hash(path)})
    man["cells"] = sorted(items, key=lambda c: c["graph"])
    man_path.write_text(json.dumps(man, indent=2) + "\n")


def cmd_hecke(args, cfg) -> int:
    cat = _catalog(cfg)
    g = _graph(cat, args.graph)
    cs = _cells_for(args, cfg, cat, g)
    return _report_out(pathalg.verify_hecke(cs, args.p_max, cfg.tol.abs_tol), cfg)


def cmd_hilbert(args, cfg) -> int:
    cat = _catalog(cfg)
    g = _graph(cat, args.graph)
    h = g.coxeter
    max_deg = args.max_degree if args.max_degree is not None else h - 3
    rows = []
    if args.mode in ("closed", "both"):
        nu = almostcy.nakayama_permutation(g)
        try:
            series = almostcy.closed_hilbert_series(g, graphs.permutation_matrix(nu))
        except almostcy.InconsistentSeries as exc:
            _emit(f"FAIL  {exc}")
            return 1
        rows += [(p, series[p], "closed") for p in range(max_deg + 1)]
    if args.mode in ("brute", "both"):
        cs = _cells_for(args, cfg, cat, g)
        rows += [(p, pathalg.graded_dimension(cs, p, cfg.tol.rank_tol), "brute")
                 for p in range(max_deg + 1)]
    rows.sort(key=lambda r: (r[0], r[2]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if cfg.fmt == "csv":
        w.writerow(["degree", "src", "dst", "dim", "mode"])
        for p, H, mode in rows:
            for i, j in zip(*np.nonzero(H)):
                w.writerow([p, g.vertices[i], g.vertices[j], int(H[i, j]), mode])
        _emit(buf.getvalue())
    elif cfg.fmt == "json":
        _emit(json.dumps([{"degree": p, "mode": m, "H": H.tolist()} for p, H, m in rows], indent=1))
    else:
        for p, H, mode in rows:
            _emit(f"degree {p} ({mode}): total {int(H.sum())}")
            _emit("\n".join("  " + " ".join(str(int(x)) for x in row) for row in H))
    if args.mode == "both":
        by = {(p, m): H for p, H, m in rows}
        same = all(np.array_equal(by[(p, "closed")], by[(p, "brute")]) for p in range(max_deg + 1))
        if cfg.fmt == "text":
            _emit("brute = closed" if same else "brute != closed")
        return 0 if same else 1
    return 0


def _moment_out(table: specmeasure.MomentTable, cfg) -> int:
    if cfg.fmt == "csv":
        _emit(table.to_csv().rstrip("\n"))
    elif cfg.fmt == "json":
        _emit(json.dumps({"re": table.grid.real.round(12).tolist(),
                          "im": table.grid.imag.round(12).tolist()}, indent=1))
    else:
        for m in range(table.shape[0]):
            _emit("  ".join(f"{v.real:+.6f}{v.imag:+.6f}i" for v in table.grid[m]))
    return 0


def cmd_measure(args, cfg) -> int:
    M, N = args.moments
    if args.source == "graph":
        cat = _catalog(cfg)
        g = _graph(cat, args.graph)
        try:
            mu = specmeasure.vacuum_measure_discoid(g)
        except specmeasure.NonNormalAdjacency as exc:
            raise InputError(str(exc)) from exc
        return _moment_out(specmeasure.moments(mu, M, N), cfg)
    if not args.classes:
        raise InputError("measure subgroup needs --classes FILE")
    try:
        cd = specmeasure.ClassData.load(_resolve(args.classes, cfg))
    except (ValueError, OSError) as exc:
        raise InputError(str(exc)) from exc
    return _moment_out(specmeasure.subgroup_moments(cd, M, N), cfg)


def cmd_supertransitivity(args, cfg) -> int:
    cat = _catalog(cfg)
    g = _graph(cat, args.graph)
    val = graphs.supertransitivity(g, args.max_k, cat[f"A{g.coxeter}"] if g.coxeter else None)
    _emit(json.dumps({"graph": g.name, "supertransitivity": val}) if cfg.fmt == "json"
          else f"{g.name}: {val}")
    return 0


# ---------------------------------------------------------------- parser

def _global_flags(p, top):
    kw = {} if top else {"default": argparse.SUPPRESS}
    p.add_argument("--data-dir", help="graph/cell data directory (or SU3_DATA_DIR)",
                   **({"default": None} if top else kw))
    p.add_argument("--tol", type=float, help="residual tolerance (default 1e-8)",
                   **({"default": 1e-8} if top else kw))
    p.add_argument("--seed", type=int, help="solver seed", **({"default": 0} if top else kw))
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", **({} if top else kw))
    fmt.add_argument("--csv", action="store_true", **({} if top else kw))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="su3", description="SU(3) modular invariants, nimrep "
                                 "graphs, cells, Hecke algebras and spectral measures.")
    _global_flags(ap, True)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        _global_flags(p, False)
        p.set_defaults(fn=fn)
        return p

    p = add("graphs", cmd_graphs, help="list or show catalog graphs")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")

    p = add("invariants", cmd_invariants, help="modular invariants at a level")
    p.add_argument("--level", type=int, required=True)

    p = add("nimrep", cmd_nimrep, help="nimrep of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--level", type=int)

    p = add("verify", cmd_verify, help="run a verification")
    p.add_argument("what", choices=["nimrep", "invariant", "cells", "hecke", "hilbert"])
    p.add_argument("file", nargs="?", help="cell file for 'verify cells'")
    p.add_argument("--graph")
    p.add_argument("--invariant")
    p.add_argument("--level", type=int)
    p.add_argument("--cells")
    p.add_argument("--p-max", type=int, default=4)

    p = add("cells", cmd_cells, help="solve or verify cell systems")
    p.add_argument("action", choices=["solve", "verify"])
    p.add_argument("target", nargs="?", help="cell file (verify)")
    p.add_argument("--graph")
    p.add_argument("--out")
    p.add_argument("--restarts", type=int, default=50)

    p = add("hecke", cmd_hecke, help="Hecke relations for a cell system")
    p.add_argument("--graph", required=True)
    p.add_argument("--cells")
    p.add_argument("--p-max", type=int, default=4)

    p = add("hilbert", cmd_hilbert, help="Hilbert series of the almost Calabi-Yau algebra")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=["closed", "brute", "both"], default="closed")
    p.add_argument("--max-degree", type=int)
    p.add_argument("--cells")

    p = add("measure", cmd_measure, help="moments of spectral measures")
    p.add_argument("source", choices=["graph", "subgroup"])
    p.add_argument("--graph")
    p.add_argument("--classes")
    p.add_argument("--moments", type=int, nargs=2, metavar=("M", "N"), default=(3, 3))

    p = add("supertransitivity", cmd_supertransitivity, help="SU(3)-supertransitivity")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-k", type=int, default=10)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        data_dir = Path(args.data_dir) if args.data_dir else graphs.default_data_dir()
        cfg = RunConfig(data_dir, ToleranceContext(abs_tol=args.tol, rank_tol=args.tol), args.seed,
                        "json" if args.json else "csv" if args.csv else "text")
        return args.fn(args, cfg)
    except (InputError, ValueError, LookupError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
