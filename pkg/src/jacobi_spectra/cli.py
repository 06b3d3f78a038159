"""Command-line entry point.

Subcommands: list-curves, spectrum, verify, converge, dump-geometry.
Artifacts (JSON/CSV/SVG) are written through the canonical serializers in
the manifest module so that identical (config, seed) reruns are
byte-identical; every run directory also receives a manifest.json with
config snapshot, per-phase timings, and a hashed file inventory.

Exit codes: 0 all-pass, 1 check failure, 2 usage/geometry error, 3 solver
error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import theorems
from .curves import catalog_names, resolve_curve_name
from .errors import JacobiSpectraError, UsageError
from .geometry import build_geometry
from .manifest import write_json, write_manifest, write_text
from .spectral import OperatorKind, assemble, build_basis, convergence_study, eigensolve
from .svg import render_convergence_svg, render_spectrum_svg

EXIT_FOR_CATEGORY = {"usage": 2, "geometry": 2, "solver": 3, "check": 1}
EMIT_KINDS = frozenset({"json", "csv", "svg"})

SPECTRAL_TOL_KEYS = frozenset({"kernel_tol", "cluster_gap"})
ALL_TOL_KEYS = frozenset(theorems.DEFAULT_TOLERANCES)


@dataclass(frozen=True)
class RunConfig:
    """One command invocation's knobs (file config < flags)."""

    curve: str = "Line_CP2"
    cutoff: int = 10
    cutoffs: tuple[int, ...] | None = None
    checks: tuple[str, ...] = theorems.DEFAULT_CHECK_KEYS
    output_dir: Path = Path("runs")
    emit: frozenset = EMIT_KINDS
    seed: int = 2026
    tolerances: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.cutoff < 2:
            raise UsageError(f"cutoff must be >= 2, got {self.cutoff}")
        bad = set(self.emit) - EMIT_KINDS
        if bad:
            raise UsageError(f"unknown emit kinds {sorted(bad)}; valid: json, csv, svg")
        for key in self.checks:
            if key not in theorems.DEFAULT_CHECK_KEYS:
                raise UsageError(
                    f"unknown check {key!r}; valid: {', '.join(theorems.DEFAULT_CHECK_KEYS)}"
                )
        badtol = set(self.tolerances) - ALL_TOL_KEYS
        if badtol:
            raise UsageError(
                f"unknown tolerance keys {sorted(badtol)}; valid: {', '.join(sorted(ALL_TOL_KEYS))}"
            )
        return self

    def to_json_dict(self) -> dict:
        return {
            "curve": self.curve,
            "cutoff": self.cutoff,
            "cutoffs": list(self.cutoffs) if self.cutoffs else None,
            "checks": list(self.checks),
            "output_dir": str(self.output_dir),
            "emit": sorted(self.emit),
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
        }


# ---------------------------------------------------------------------------
# config assembly
# ---------------------------------------------------------------------------

def _load_config_file(path: Path) -> dict:
    raw = Path(path).read_bytes()
    if str(path).endswith(".json"):
        return json.loads(raw.decode("utf-8"))
    try:
        import tomllib  # py311+
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        return tomllib.loads(raw.decode("utf-8"))
    except Exception:
        try:
            return json.loads(raw.decode("utf-8"))
        except Exception as exc:
            raise UsageError(f"config file {path} is neither TOML nor JSON: {exc}")


def _parse_tol_item(item: str) -> tuple[str, float]:
    if "=" not in item:
        raise UsageError(f"--tol expects KEY=VAL, got {item!r}")
    key, _, val = item.partition("=")
    try:
        return key.strip(), float(val)
    except ValueError:
        raise UsageError(f"--tol {key}: value {val!r} is not a number")


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in str(text).replace(" ", "").split(",") if tok)
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        data = _load_config_file(Path(args.config))
        if not isinstance(data, dict):
            raise UsageError("config file must hold a table/object at top level")

    known = {
        "curve", "cutoff", "cutoffs", "checks", "seed",
        "output_dir", "emit", "tolerances",
    }
    unknown = sorted(set(data) - known)
    if unknown:
        raise UsageError(
            f"unknown config key(s) {', '.join(unknown)}; "
            f"expected a subset of {sorted(known)}"
        )

    cfg = RunConfig()
    tolerances = dict(cfg.tolerances)

    # file layer
    if "tolerances" in data and isinstance(data["tolerances"], dict):
        tolerances.update({k: float(v) for k, v in data["tolerances"].items()})
    mapped = {}
    for key in ("curve", "cutoff", "seed"):
        if key in data:
            mapped[key] = data[key]
    if "cutoffs" in data and data["cutoffs"]:
        raw = data["cutoffs"]
        mapped["cutoffs"] = (
            _parse_int_list(raw) if isinstance(raw, str) else tuple(int(c) for c in raw)
        )
    if "checks" in data and data["checks"]:
        raw = data["checks"]
        mapped["checks"] = (
            tuple(str(raw).replace(" ", "").split(",")) if isinstance(raw, str) else tuple(raw)
        )
    if "output_dir" in data:
        mapped["output_dir"] = Path(data["output_dir"])
    if "emit" in data and data["emit"]:
        raw = data["emit"]
        mapped["emit"] = frozenset(
            str(raw).replace(" ", "").split(",") if isinstance(raw, str) else raw
        )
    cfg = replace(cfg, **mapped)

    # flag layer
    updates: dict = {}
    if getattr(args, "curve", None):
        updates["curve"] = args.curve
    if getattr(args, "cutoff", None) is not None:
        updates["cutoff"] = int(args.cutoff)
    if getattr(args, "cutoffs", None):
        updates["cutoffs"] = _parse_int_list(args.cutoffs)
    if getattr(args, "checks", None):
        updates["checks"] = tuple(args.checks.replace(" ", "").split(","))
    if getattr(args, "out", None):
        updates["output_dir"] = Path(args.out)
    if getattr(args, "seed", None) is not None:
        updates["seed"] = int(args.seed)
    if getattr(args, "emit", None):
        updates["emit"] = frozenset(args.emit.replace(" ", "").split(","))
    for item in getattr(args, "tol", None) or []:
        key, val = _parse_tol_item(item)
        tolerances[key] = val
    cfg = replace(cfg, **updates, tolerances=tolerances)
    return cfg.validate()


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--curve", help="catalog curve name (see list-curves)")
    sub.add_argument("--cutoff", type=int, help="basis cutoff (default 10)")
    sub.add_argument("--cutoffs", help="comma-separated cutoffs, e.g. 6,8,10")
    sub.add_argument("--checks", help="comma-separated subset of "
                     + ",".join(theorems.DEFAULT_CHECK_KEYS))
    sub.add_argument("--out", help="output directory (default ./runs)")
    sub.add_argument("--seed", type=int, help="seed for randomized identity checks")
    sub.add_argument("--emit", help="comma-separated artifact kinds: json,csv,svg")
    sub.add_argument("--tol", action="append", metavar="KEY=VAL",
                     help="tolerance override (repeatable)")
    sub.add_argument("--config", help="TOML or JSON config file; flags override it")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _canonical_curve(name: str) -> str:
    resolved, _ = resolve_curve_name(name)
    return resolved.value


def cmd_list_curves() -> int:
    rows = []
    for name in catalog_names():
        geometry = build_geometry(name, max_level=8)
        c = geometry.ambient.einstein_constant
        const = f"c={c:g}" if c is not None else f"r={geometry.ambient.ricci_infimum:g}"
        pred = "-"
        ker = "-"
        try:
            ledger = theorems.build_ledger(geometry)
            ker = str(ledger.h0_N)
            if c and c > 0:
                pred = f"lam1={2 * c:g} x{ledger.predicted_first_eigenspace_dim}"
            else:
                cls = geometry.engine().mode_class(0, 1)
                vals = 4.0 * np.abs(cls.kappa_) ** 2
                nz = vals[vals > 1e-12]
                lam1 = float(nz.min())
                mult = int(np.sum(np.abs(nz - lam1) <= 1e-9 * max(lam1, 1.0)))
                pred = f"lam1={lam1:.6g} x{mult}"
        except JacobiSpectraError:
            pass
        rows.append(
            (name, geometry.ambient.describe(), const, f"g={geometry.genus}", pred, f"ker {ker}")
        )
    widths = [max(len(r[i]) for r in rows) for i in range(6)]
    for r in rows:
        print(" | ".join(s.ljust(w) for s, w in zip(r, widths)))
    return 0


def _emit_spectrum_files(cfg: RunConfig, geometry, report, out: Path) -> list[Path]:
    files: list[Path] = []
    if "json" in cfg.emit:
        files.append(write_json(out / "spectrum.json", report.to_json_dict()))
    if "csv" in cfg.emit:
        buf = io.StringIO()
        buf.write("index,eigenvalue\n")
        for i, v in enumerate(report.eigenvalues):
            buf.write(f"{i},{v:.17g}\n")
        files.append(write_text(out / "ladder.csv", buf.getvalue()))
    if "svg" in cfg.emit:
        c = geometry.ambient.einstein_constant
        marker = 2.0 * c if c is not None and c > 0 else None
        svg = render_spectrum_svg(
            report.eigenvalues,
            report.kernel_dim,
            marker_value=marker,
            title=f"{geometry.name} cutoff {cfg.cutoff}",
        )
        files.append(write_text(out / "ladder.svg", svg))
    return files


def cmd_spectrum(cfg: RunConfig) -> int:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    geometry = build_geometry(cfg.curve)
    timings["geometry"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    basis = build_basis(geometry, (0, 1), cfg.cutoff)
    A = assemble(geometry, basis, OperatorKind.Jacobi)
    timings["assemble"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    spectral_tols = {k: v for k, v in cfg.tolerances.items() if k in SPECTRAL_TOL_KEYS}
    report = eigensolve(A, **spectral_tols)
    timings["solve"] = time.perf_counter() - t0

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    files = _emit_spectrum_files(cfg, geometry, report, out)
    timings["emit"] = time.perf_counter() - t0
    write_manifest(out, cfg.to_json_dict(), timings, files)

    lam = "none" if report.lambda1 is None else f"{report.lambda1:.9g}"
    print(
        f"{geometry.name}: cutoff {cfg.cutoff}, basis {basis.size}, "
        f"kernel_dim {report.kernel_dim}, lambda1 {lam} -> {out}"
    )
    return 0


def _verify_one(cfg: RunConfig, out: Path) -> tuple[int, str]:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    geometry = build_geometry(cfg.curve)
    timings["geometry"] = time.perf_counter() - t0

    cutoffs = cfg.cutoffs or theorems.default_verify_cutoffs(geometry)
    t0 = time.perf_counter()
    report = theorems.run_curve_verification(
        geometry,
        checks=cfg.checks,
        cutoffs=cutoffs,
        seed=cfg.seed,
        tol_overrides=cfg.tolerances or None,
    )
    timings["checks"] = time.perf_counter() - t0

    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "curve": geometry.name,
        "cutoffs": list(cutoffs),
        "seed": cfg.seed,
        **report.to_json_dict(),
    }
    files = [write_json(out / "verify.json", doc)] if "json" in cfg.emit else []
    write_manifest(out, cfg.to_json_dict(), timings, files)

    lines = []
    for chk in report.checks:
        flag = "SKIP" if chk.skipped else ("PASS" if chk.passed else "FAIL")
        lines.append(
            f"  {flag} {chk.name}: predicted={chk.predicted} measured={chk.measured}"
        )
    status = "PASS" if report.overall else "FAIL"
    summary = f"{geometry.name}: {status}\n" + "\n".join(lines)
    return (0 if report.overall else 1), summary


def cmd_verify(cfg: RunConfig, all_curves: bool) -> int:
    if not all_curves:
        code, summary = _verify_one(cfg, Path(cfg.output_dir))
        print(summary)
        return code

    names = catalog_names()
    threads = os.environ.get("JACOBI_SPECTRA_THREADS")
    workers = max(1, int(threads) if threads else min(len(names), os.cpu_count() or 1))
    results: dict[str, tuple[int, str]] = {}

    def _run(name: str) -> None:
        sub = replace(cfg, curve=name)
        try:
            results[name] = _verify_one(sub, Path(cfg.output_dir) / name)
        except JacobiSpectraError as exc:
            results[name] = (
                EXIT_FOR_CATEGORY.get(exc.category, 2),
                f"{name}: ERROR {type(exc).__name__}: {exc}",
            )

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(_run, names))

    code = 0
    for name in names:
        c, summary = results[name]
        print(summary)
        code = max(code, c)
    return code


def cmd_converge(cfg: RunConfig) -> int:
    if not cfg.cutoffs:
        raise UsageError("converge requires --cutoffs a,b,c (at least three)")
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    geometry = build_geometry(cfg.curve)
    timings["geometry"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    study = convergence_study(geometry, OperatorKind.Jacobi, list(cfg.cutoffs))
    timings["study"] = time.perf_counter() - t0

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []
    if "csv" in cfg.emit:
        buf = io.StringIO()
        buf.write("cutoff,lambda1,kernel_dim,observed_order\n")
        for row in study.rows:
            order = "" if row["observed_order"] is None else f"{row['observed_order']:.6g}"
            buf.write(f"{row['cutoff']},{row['lambda1']:.17g},{row['kernel_dim']},{order}\n")
        buf.write(f"# lambda1_extrapolated,{study.lambda1_extrapolated:.17g}\n")
        files.append(write_text(out / "convergence.csv", buf.getvalue()))
    if "svg" in cfg.emit:
        svg = render_convergence_svg(
            [r["cutoff"] for r in study.rows],
            [r["lambda1"] for r in study.rows],
            title=f"{geometry.name} lambda1 convergence",
        )
        files.append(write_text(out / "convergence.svg", svg))
    write_manifest(out, cfg.to_json_dict(), timings, files)

    print(
        f"{geometry.name}: cutoffs {list(cfg.cutoffs)}, "
        f"lambda1 extrapolated {study.lambda1_extrapolated:.9g} -> {out}"
    )
    return 0


def cmd_dump_geometry(cfg: RunConfig) -> int:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    geometry = build_geometry(cfg.curve)
    timings["geometry"] = time.perf_counter() - t0

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [write_json(out / "geometry.json", geometry.to_json_dict())]
    write_manifest(out, cfg.to_json_dict(), timings, files)
    print(f"{geometry.name}: wrote geometry dump -> {out}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jacobi-spectra",
        description="Spectra of the area Jacobi operator on model holomorphic curves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-curves", help="print the curve catalog with predictions")

    p_spec = sub.add_parser("spectrum", help="assemble and solve one eigenproblem")
    _add_common_flags(p_spec)

    p_verify = sub.add_parser("verify", help="run predicted-vs-measured checks")
    _add_common_flags(p_verify)
    p_verify.add_argument("--all", action="store_true",
                          help="verify every catalog curve (subdirectories per curve)")

    p_conv = sub.add_parser("converge", help="lambda1 vs cutoff study")
    _add_common_flags(p_conv)

    p_dump = sub.add_parser("dump-geometry", help="dump grid, fields, and residuals as JSON")
    _add_common_flags(p_dump)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-curves":
            return cmd_list_curves()
        cfg = _config_from_args(args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, getattr(args, "all", False))
        if args.command == "converge":
            return cmd_converge(cfg)
        if args.command == "dump-geometry":
            return cmd_dump_geometry(cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except JacobiSpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FOR_CATEGORY.get(exc.category, 2)


if __name__ == "__main__":
    sys.exit(main())
