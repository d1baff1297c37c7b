"""Command-line interface: ``fragmenta <command> ...``.

Every command writes machine-readable output (canonical JSON or CSV).  Some
commands can also render a figure with ``--figure PATH``; the delimited
output remains the reference result.  Randomness derives from ``--seed``
through :func:`fragmenta.io.derive_rng`.  Exit status is 1 on any invariant
violation or table mismatch and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import platform
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .io import canonical_json, csv_text, derive_rng, sha256_file, write_matrix, write_text

TOLERANCES = {
    "kernel_rtol": 1e-10,
    "cluster_rtol": 1e-9,
    "block_tol": 1e-8,
    "dedup_rtol": 1e-10,
}


class UsageError(ValueError):
    pass


# ------------------------------------------------------------- helpers

def _parse_params(items: list[str] | None) -> dict:
    out: dict = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        if "," in val:
            out[key] = tuple(float(v) for v in val.split(","))
        else:
            try:
                out[key] = int(val) if key == "N" else float(val)
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {val!r}") from exc
    return out


def _parse_coupling(text: str | None):
    from .models import Coupling

    if text is None:
        return None
    kind, *vals = text.split(":")
    try:
        if kind == "fixed":
            return Coupling("fixed", value=float(vals[0]) if vals else 1.0)
        if kind == "uniform":
            lo, hi = (float(v) for v in vals) if vals else (0.5, 1.5)
            return Coupling("uniform", lo=lo, hi=hi)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad coupling {text!r}") from exc
    raise UsageError("coupling must be fixed[:v] or uniform[:lo:hi]")


def _model(args):
    from .models import MODEL_NAMES, model_from_name

    if args.model not in MODEL_NAMES:
        raise UsageError(f"unknown model {args.model!r}; choose from {', '.join(MODEL_NAMES)}")
    kw = _parse_params(getattr(args, "param", None))
    coupling = _parse_coupling(getattr(args, "coupling", None))
    if coupling is not None:
        kw["coupling"] = coupling
    return model_from_name(args.model, **kw)


def _range(text: str) -> range:
    """``"4:10"`` -> 4..10 inclusive, ``"4:10:2"`` with a step, ``"7"`` a single value."""
    parts = [int(p) for p in text.split(":")]
    if len(parts) == 1:
        return range(parts[0], parts[0] + 1)
    step = parts[2] if len(parts) > 2 else 1
    return range(parts[0], parts[1] + 1, step)


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        write_text(out, text)


def _sector_id(cat, spec: str | None) -> int:
    if spec in (None, "largest"):
        return cat.largest()
    if spec.startswith("rep="):
        spec = spec[4:]
    return cat.sector_of(spec)


# ------------------------------------------------------------ commands

def cmd_sectors(args) -> int:
    from .classical import enumerate_sectors

    model = _model(args)
    cat = enumerate_sectors(model, args.L)
    _emit(canonical_json(cat.to_dict(include_sectors=not args.histogram_only)), args.out)
    if args.figure:
        from .plotting import plot_histogram

        plot_histogram(cat.histogram(), args.figure, f"{model.name} L={args.L}")
    return 0


def cmd_counts(args) -> int:
    from . import combinatorics as cb

    rows = []
    which = args.which
    for n in _range(args.range):
        if which == "fib":
            rows.append((n, cb.fib(n)))
        elif which == "dk":
            rows.append((n, args.k, args.q, cb.dk_closed(args.q, args.k, n)))
        elif which == "all_mobile":
            rows.append((n, args.q, cb.all_mobile_count(args.q, n)))
        elif which == "frozen":
            rows.append((n, args.family, args.q, cb.frozen_closed(args.family, n, args.q)))
        elif which == "frozen_totals":
            t = cb.frozen_totals(n)
            rows.append((n, t["product"], t["entangled"], t["total"]))
        elif which == "tl_dim":
            for j in range(n % 2, n + 1, 2):
                rows.append((n, j, cb.tl_standard_dim(n, j)))
        elif which == "ghz_charge":
            plus, minus = cb.ghz_charge_dims(n)
            rows.append((n, plus, minus))
        else:  # pragma: no cover - argparse restricts choices
            raise UsageError(which)
    header = {
        "fib": ["n", "F"], "dk": ["L", "k", "q", "D"], "all_mobile": ["k", "q", "count"],
        "frozen": ["L", "family", "q", "frozen"], "frozen_totals": ["L", "product", "entangled", "total"],
        "tl_dim": ["L", "j", "dim"], "ghz_charge": ["L", "dim_plus", "dim_minus"],
    }[which]
    _emit(csv_text(header, rows), args.out)
    return 0


def cmd_hamiltonian(args) -> int:
    from .classical import enumerate_sectors
    from .models import build_sector_hamiltonian
    from .words import decode_index

    model = _model(args)
    cat = enumerate_sectors(model, args.L)
    sid = _sector_id(cat, args.sector_rep)
    sh = build_sector_hamiltonian(model, cat, sid, rng=derive_rng(args.seed, "hamiltonian", sid))
    meta = {"model": model.to_dict(), "L": args.L, "seed": args.seed, "sector": sid,
            "basis": [str(decode_index(int(m), args.L, model.q)) for m in sh.members],
            "couplings": [float(c) for c in sh.couplings], "dim": int(sh.matrix.shape[0])}
    if args.out in (None, "-"):
        raise UsageError("hamiltonian needs --out PATH for the binary matrix")
    write_matrix(args.out, sh.matrix, meta)
    return 0


def cmd_decompose(args) -> int:
    from .classical import enumerate_sectors
    from .quantum import breakdown_decomposition, decompose_sector

    model = _model(args)
    if model.variant == "breakdown":
        word = args.sector.removeprefix("rep=") if args.sector.startswith("rep=") else "3" + "0" * (args.L - 1)
        d = breakdown_decomposition(args.L, model.param("N"), model.param("flavor_couplings"), sector_word=word,
                                    rng=derive_rng(args.seed, "decompose", 0))
        _emit(canonical_json({"model": model.to_dict(), "L": args.L, "sectors": [d.to_dict()]}), args.out)
        return 0
    cat = enumerate_sectors(model, args.L)
    if args.sector == "all":
        ids = [int(s) for s in cat.mobile()]
    else:
        ids = [_sector_id(cat, args.sector)]
    out = []
    bad = []
    for s in ids:
        d = decompose_sector(model, cat, s, derive_rng(args.seed, "decompose", s))
        rec = d.to_dict()
        rec["rep"] = cat.record(s).to_dict(cat.L, cat.q)["rep"]
        out.append(rec)
        if d.invariance_residual > TOLERANCES["block_tol"]:
            bad.append(s)
    _emit(canonical_json({"model": model.to_dict(), "L": args.L, "seed": args.seed, "sectors": out}), args.out)
    if bad:
        print(f"invariance residual above tolerance in sectors {bad}", file=sys.stderr)
        return 1
    return 0


def _entropy_rows(L, cut, sector, gamma, base):
    from .entanglement import efs_entropy, entropy_profile

    if cut == "all":
        return entropy_profile(L, sector, gamma, base)
    return [(int(cut), efs_entropy(L, int(cut), sector, gamma, base))]


def cmd_entropy(args) -> int:
    rows = _entropy_rows(args.L, args.cut, args.sector, args.gamma, args.base)
    _emit(csv_text(["L", "cut", "sector", "gamma", "base", "entropy"],
                   [(args.L, c, args.sector, args.gamma, args.base, s) for c, s in rows]), args.out)
    if args.figure:
        from .plotting import plot_entropy_profile

        plot_entropy_profile([c for c, _ in rows], [s for _, s in rows], args.figure,
                             f"L={args.L} sector={args.sector} gamma={args.gamma}")
    return 0


def cmd_bridge(args) -> int:
    from .entanglement import sample_bridge_walks

    b = sample_bridge_walks(args.L, args.sector, args.samples, derive_rng(args.seed, "bridge"))
    t = np.arange(args.L + 1)
    _emit(csv_text(["t", "mean_depth", "sigma"], zip(t.tolist(), b.mean, b.std)), args.out)
    summary = {"L": args.L, "sector": args.sector, "samples": args.samples, "seed": args.seed,
               "sector_size": b.n_words, "fitted_sigma": b.sigma,
               "midpoint_mean_over_sqrtL": float(b.mean[args.L // 2] / np.sqrt(args.L))}
    if args.out not in (None, "-"):
        write_text(Path(args.out).with_suffix(".json"), canonical_json(summary))
    else:
        sys.stderr.write(canonical_json(summary))
    if args.figure:
        from .plotting import plot_bridge

        plot_bridge(t, b.mean, b.std, b.sigma, args.L, args.figure)
    return 0


def _spectra(model, L, sector, n_real, seed, bins, route):
    from .spectral import build_problem, collect_ratios, reference_set

    if L >= 18:
        warnings.warn("L >= 18 spectra take hours on a desktop machine", RuntimeWarning)
    prob = build_problem(model, L, sector, route=route)
    sample = collect_ratios(prob, n_real, seed)
    refs = reference_set()
    centers, dens = sample.histogram(bins)
    rows = [(c, d, *(float(refs[k].at(c)) for k in ("goe", "2goe", "3goe", "poisson")))
            for c, d in zip(centers, dens)]
    summary = sample.summary(refs)
    summary.update({"seed": seed, "bins": bins, "route": route, "blocks": prob.dims, "note": prob.note})
    csv = csv_text(["bin_center", "density", "goe", "2goe", "3goe", "poisson"], rows)
    return csv, summary, (centers, dens, refs)


def cmd_spectra(args) -> int:
    model = _model(args)
    sector = None if args.sector in (None, "largest") else args.sector.removeprefix("rep=")
    csv, summary, (c, d, refs) = _spectra(model, args.L, sector, args.realizations, args.seed,
                                          args.bins, args.route)
    _emit(csv, args.out)
    if args.out not in (None, "-"):
        write_text(Path(args.out).with_suffix(".json"), canonical_json(summary))
    else:
        sys.stderr.write(canonical_json(summary))
    if args.figure:
        from .plotting import plot_gap_ratios

        plot_gap_ratios(c, d, refs, args.figure, f"{model.name} L={args.L} best={summary['best']}")
    return 0


def cmd_reproduce(args) -> int:
    from .tables import known_tables, reproduce_table

    ids = known_tables() if args.table == "all" else [args.table]
    reports = [reproduce_table(t, args.seed) for t in ids]
    _emit(canonical_json({"tables": [r.to_dict() for r in reports]}), args.out)
    failed = False
    for r in reports:
        print(f"{r.table_id}: {'PASS' if r.ok else 'FAIL'}", file=sys.stderr)
        for c in r.failures():
            failed = True
            print(f"  {c.row} / {c.column}: expected {c.expected}, got {c.got}", file=sys.stderr)
    return 1 if failed else 0


def _versions() -> dict:
    import matplotlib
    import numba
    import scipy

    return {"fragmenta": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "numba": numba.__version__, "matplotlib": matplotlib.__version__,
            "python": platform.python_version()}


def cmd_run_all(args) -> int:
    """Catalog, decomposition of the largest sector, entropy profile and spectra with a manifest."""
    from .classical import enumerate_sectors
    from .quantum import decompose_sector

    model = _model(args)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    artifacts: list[Path] = []
    cat = enumerate_sectors(model, args.L)
    artifacts.append(write_text(outdir / "catalog.json", canonical_json(cat.to_dict())))
    sid = cat.largest()
    d = decompose_sector(model, cat, sid, derive_rng(args.seed, "decompose", sid))
    rec = d.to_dict()
    rec["rep"] = cat.record(sid).to_dict(cat.L, cat.q)["rep"]
    artifacts.append(write_text(outdir / "decomposition.json", canonical_json(rec)))
    if model.q == 2 and model.variant in ("asymmetric", "ghz") and args.L >= 3:
        gamma = model.gamma
        rows = _entropy_rows(args.L, "all", "e" if args.L % 3 == 0 else _n3c_label(cat, sid), gamma, 2)
        artifacts.append(write_text(outdir / "entropy.csv", csv_text(
            ["cut", "entropy"], rows)))
    csv, summary, _ = _spectra(model, args.L, None, args.realizations, args.seed, 50, "auto")
    artifacts.append(write_text(outdir / "spectra.csv", csv))
    artifacts.append(write_text(outdir / "spectra.json", canonical_json(summary)))
    manifest = {
        "config": {"model": model.to_dict(), "L": args.L, "seed": args.seed, "realizations": args.realizations},
        "versions": _versions(),
        "tolerances": TOLERANCES,
        "seed_scheme": "SeedSequence(seed, spawn_key=(crc32(command), sector, realization))",
        "artifacts": [{"path": p.name, "sha256": sha256_file(p)} for p in artifacts],
        "checks": {"invariance_residual": d.invariance_residual,
                   "residual_ok": d.invariance_residual <= TOLERANCES["block_tol"]},
    }
    write_text(outdir / "manifest.json", canonical_json(manifest))
    return 0 if manifest["checks"]["residual_ok"] else 1


def _n3c_label(cat, sid) -> str:
    nf = cat.normal_form(sid)
    return nf.remainder_string() or "e"


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fragmenta", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def model_args(sp, L=True):
        sp.add_argument("--model", required=True)
        if L:
            sp.add_argument("--L", type=int, required=True)
        sp.add_argument("--param", action="append", metavar="KEY=VALUE")
        sp.add_argument("--coupling", metavar="fixed[:v]|uniform[:lo:hi]")
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("sectors", help="classical Krylov sector catalog (JSON)")
    model_args(sp)
    sp.add_argument("--histogram-only", action="store_true")
    sp.add_argument("--figure")
    sp.set_defaults(func=cmd_sectors)

    sp = sub.add_parser("counts", help="closed-form counting functions (CSV)")
    sp.add_argument("--which", required=True,
                    choices=["fib", "dk", "all_mobile", "frozen", "frozen_totals", "tl_dim", "ghz_charge"])
    sp.add_argument("--range", required=True, help="a:b[:step] inclusive")
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--family", default="triplet", choices=["triplet", "cyclic"])
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_counts)

    sp = sub.add_parser("hamiltonian", help="dense sector Hamiltonian (binary + JSON sidecar)")
    model_args(sp)
    sp.add_argument("--sector-rep", default="largest")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_hamiltonian)

    sp = sub.add_parser("decompose", help="EFS and irreducible blocks (JSON)")
    model_args(sp)
    sp.add_argument("--sector", default="largest", help="all | largest | rep=<word>")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("entropy", help="EFS entanglement entropy (CSV)")
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--cut", default="all")
    sp.add_argument("--sector", default="e")
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--base", default="2", choices=["2", "e"])
    sp.add_argument("--out", default=None)
    sp.add_argument("--figure")
    sp.set_defaults(func=cmd_entropy)

    sp = sub.add_parser("bridge", help="bridge-walk depth profiles (CSV)")
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--samples", type=int, default=5000)
    sp.add_argument("--sector", default="e")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.add_argument("--figure")
    sp.set_defaults(func=cmd_bridge)

    sp = sub.add_parser("spectra", help="disorder-averaged gap ratios (CSV + JSON summary)")
    model_args(sp)
    sp.add_argument("--sector", default="largest")
    sp.add_argument("--realizations", type=int, default=500)
    sp.add_argument("--bins", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--route", default="auto", choices=["auto", "dense", "charge-blocks", "tl-modules"])
    sp.add_argument("--figure")
    sp.set_defaults(func=cmd_spectra)

    sp = sub.add_parser("reproduce", help="recompute a published table and diff it")
    sp.add_argument("--table", required=True, help="table id or 'all'")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("run-all", help="end-to-end bundle with manifest")
    sp.add_argument("--model", required=True)
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--realizations", type=int, default=100)
    sp.add_argument("--param", action="append", metavar="KEY=VALUE")
    sp.add_argument("--coupling")
    sp.add_argument("--outdir", required=True)
    sp.set_defaults(func=cmd_run_all)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "base", None) == "2":
        args.base = 2
    try:
        return int(args.func(args) or 0)
    except UsageError as exc:
        print(f"fragmenta: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"fragmenta: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # invariant violations and bad inputs surface as exit 1
        print(f"fragmenta: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
