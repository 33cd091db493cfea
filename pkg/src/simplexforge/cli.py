"""Command-line front end: dispatch, persistence, and run manifests.

All file I/O lives here; the compute modules never touch the filesystem.
Results are JSON with 17-significant-digit decimals so that payloads
round-trip bit for bit; scans additionally stream a CSV summary row per
target.  Exit codes: 0 success, 1 verification failure, 2 usage or file
errors, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import platform
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__, blochalg, certify, knasteropt, simplexgeo, whsic
from .knasteropt import OptimizerConfig, PovmFamilyResult, RotationState

_KNASTER_FUNCTIONS = {
    "sin3": lambda p: 3.0 * p[0] ** 2 * p[1] - p[1] ** 3,
    "height": lambda p: float(p[1]),
    "const": lambda p: 1.0,
}


# ---------------------------------------------------------------------------
# serialization


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value)!r}")


def dumps17(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps17(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in seq)
        if flat:
            return "[" + ", ".join(_format_value(x) for x in seq) + "]"
        items = [f"{inner}{dumps17(x, indent + 1)}" for x in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _format_value(obj)


def persist(obj: dict, path: str) -> None:
    """Write a payload as deterministic JSON; errors carry the path."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(dumps17(obj) + "\n")
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc}") from exc


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise RuntimeError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuntimeError(f"cannot parse {path}: {exc}") from exc


def encode_complex(mat: np.ndarray) -> list:
    """Row-major (re, im) pairs for one complex matrix."""
    flat = np.asarray(mat, dtype=np.complex128).reshape(-1)
    return [[float(x.real), float(x.imag)] for x in flat]


def decode_complex(pairs, n: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.shape != (n * n, 2):
        raise ValueError(f"expected {n * n} (re, im) pairs, got shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n)


def environment_digest() -> str:
    blob = "|".join(
        [platform.python_version(), np.__version__, platform.machine(), platform.system()]
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def build_manifest(command: list[str], config: dict, seed: int, tolerances: dict) -> dict:
    return {
        "tool": "simplexforge",
        "version": __version__,
        "command": [str(c) for c in command],
        "config": config,
        "seed": int(seed),
        "generator": "philox",
        "tolerances": tolerances,
        "environment_digest": environment_digest(),
        "wall_time_s": 0.0,
    }


def result_payload(result: PovmFamilyResult, manifest: dict) -> dict:
    return {
        "manifest": manifest,
        "dim": result.dim,
        "power": result.power,
        "f0": result.f0,
        "residual_sum": result.residual_sum,
        "iterations": result.iterations,
        "per_vertex_residuals": [float(x) for x in result.per_vertex_residuals],
        "vertices": [[float(x) for x in row] for row in result.vertices],
        "matrices": [encode_complex(m) for m in result.matrices],
        "spectra": [[float(x) for x in row] for row in result.spectra],
        "flags": {
            "converged": bool(result.converged),
            "psd_all": bool(all(result.psd_flags)),
            "psd": [bool(x) for x in result.psd_flags],
        },
    }


def candidate_payload(candidate: whsic.SicCandidate, manifest: dict) -> dict:
    return {
        "manifest": manifest,
        "dim": candidate.dim,
        "source": candidate.source,
        "projectors": [encode_complex(p) for p in candidate.projectors],
        "bloch_vertices": [[float(x) for x in row] for row in candidate.bloch_vertices],
    }


def load_family(path: str) -> PovmFamilyResult:
    """Read an optimizer result or a seed-SIC candidate as one family type."""
    payload = load_json(path)
    try:
        n = int(payload["dim"])
        key = "matrices" if "matrices" in payload else "projectors"
        mats = np.array([decode_complex(p, n) for p in payload[key]])
    except (KeyError, ValueError, TypeError) as exc:
        raise RuntimeError(f"malformed family file {path}: {exc}") from exc
    basis = blochalg.build_basis(n)
    if "vertices" in payload:
        vertices = np.asarray(payload["vertices"], dtype=np.float64)
    elif "bloch_vertices" in payload:
        vertices = np.asarray(payload["bloch_vertices"], dtype=np.float64)
    else:
        vertices = np.array([blochalg.to_bloch(m, basis) for m in mats])
    power = int(payload.get("power", 3))
    f0 = float(payload.get("f0", (n - 1.0) * (n - 2.0) / (n * n)))
    spectra = np.array([np.sort(np.linalg.eigvalsh(m))[::-1] for m in mats])
    flags = payload.get("flags", {})
    return PovmFamilyResult(
        dim=n,
        f0=f0,
        power=power,
        vertices=vertices,
        matrices=mats,
        residual_sum=float(payload.get("residual_sum", 0.0)),
        per_vertex_residuals=np.asarray(
            payload.get("per_vertex_residuals", np.zeros(len(mats)))
        ),
        spectra=spectra,
        psd_flags=[bool(s[-1] >= -1e-10) for s in spectra],
        iterations=int(payload.get("iterations", 0)),
        wall_time=0.0,
        converged=bool(flags.get("converged", True)),
        rotation=RotationState.identity(n * n - 1),
    )


def _emit(payload: dict, path: str | None) -> None:
    text = dumps17(payload)
    if path:
        persist(payload, path)
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_basis(args, argv) -> int:
    basis = blochalg.build_basis(args.dim)
    payload = {
        "manifest": build_manifest(argv, {"dim": args.dim}, 0, {}),
        "dim": basis.dim,
        "matrices": [encode_complex(m) for m in basis.matrices],
    }
    _emit(payload, args.output)
    return 0


def _cmd_simplex(args, argv) -> int:
    simplex = simplexgeo.regular_simplex(args.dim)
    payload = {
        "manifest": build_manifest(argv, {"dim": args.dim}, 0, {}),
        "ambient_dim": simplex.ambient_dim,
        "vertices": [[float(x) for x in row] for row in simplex.vertices],
    }
    _emit(payload, args.output)
    return 0


def _cmd_seed_sic(args, argv) -> int:
    fiducial = None
    if args.fiducial:
        payload = load_json(args.fiducial)
        if int(payload.get("dim", args.dim)) != args.dim:
            raise RuntimeError(
                f"fiducial file dimension {payload.get('dim')} != --dim {args.dim}"
            )
        pairs = np.asarray(payload["fiducial"], dtype=np.float64)
        fiducial = pairs[:, 0] + 1j * pairs[:, 1]
    candidate = whsic.seed_sic(args.dim, fiducial=fiducial)
    manifest = build_manifest(argv, {"dim": args.dim}, 0, {"verify": 1e-10})
    _emit(candidate_payload(candidate, manifest), args.output)
    return 0


def _default_start(dim: int, ref: np.ndarray, path: str | None) -> RotationState:
    if path:
        stored = load_family(path)
        return knasteropt.align_to_vertices(ref, stored.vertices)
    if dim in (2, 3):
        seed = whsic.seed_sic(dim)
        return knasteropt.align_to_vertices(ref, seed.bloch_vertices)
    return RotationState.identity(dim * dim - 1)


def _cmd_optimize(args, argv) -> int:
    t0 = time.perf_counter()
    cfg = OptimizerConfig(
        power=args.power,
        f0=args.f0,
        tol_residual=args.tol,
        max_iters=args.max_iter,
        seed=args.seed,
    )
    ref = knasteropt.bloch_reference_simplex(args.dim)
    start = _default_start(args.dim, ref, args.start)
    result = knasteropt.optimize(start, ref, cfg)
    manifest = build_manifest(
        argv,
        {
            "dim": args.dim,
            "power": args.power,
            "f0": args.f0,
            "max_iter": args.max_iter,
        },
        args.seed,
        {"tol_residual": args.tol},
    )
    manifest["wall_time_s"] = time.perf_counter() - t0
    _emit(result_payload(result, manifest), args.output)
    return 0 if result.converged else 3


def _cmd_scan(args, argv) -> int:
    t0 = time.perf_counter()
    cfg = OptimizerConfig(
        power=args.power,
        tol_residual=args.tol,
        max_iters=args.max_iter,
        seed=args.seed,
    )
    ref = knasteropt.bloch_reference_simplex(args.dim)
    start = _default_start(args.dim, ref, args.start)
    workers = os.environ.get("SIMPLEXFORGE_THREADS")
    max_workers = int(workers) if workers else None
    if args.output_dir:
        os.makedirs(args.output_dir, exist_ok=True)

    manifest = build_manifest(
        argv,
        {
            "dim": args.dim,
            "power": args.power,
            "f0_min": args.f0_min,
            "f0_max": args.f0_max,
            "steps": args.steps,
            "parallel": bool(args.parallel),
            "deterministic": not args.parallel,
        },
        args.seed,
        {"tol_residual": args.tol},
    )

    try:
        csv_handle = open(args.csv, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise RuntimeError(f"cannot write {args.csv}: {exc}") from exc
    writer = csv.writer(csv_handle)
    writer.writerow(
        ["f0", "residual_sum", "iterations", "converged", "spectra_spread", "psd_all"]
    )
    counter = {"index": 0}

    def on_result(result: PovmFamilyResult) -> None:
        spread = float(np.max(np.abs(result.spectra - result.spectra[0])))
        writer.writerow(
            [
                format(result.f0, ".17g"),
                format(result.residual_sum, ".17g"),
                result.iterations,
                result.converged,
                format(spread, ".17g"),
                all(result.psd_flags),
            ]
        )
        csv_handle.flush()
        if args.output_dir:
            index = counter["index"]
            step_manifest = dict(manifest)
            step_manifest["wall_time_s"] = result.wall_time
            persist(
                result_payload(result, step_manifest),
                os.path.join(args.output_dir, f"result_{index:04d}.json"),
            )
        counter["index"] += 1

    try:
        results = knasteropt.scan_f0(
            args.f0_min,
            args.f0_max,
            args.steps,
            cfg,
            dim=args.dim,
            start=start,
            parallel=args.parallel,
            max_workers=max_workers,
            on_result=on_result,
        )
    finally:
        csv_handle.close()
    converged = sum(r.converged for r in results)
    print(
        f"scan: {converged}/{len(results)} targets converged "
        f"in {time.perf_counter() - t0:.2f}s -> {args.csv}"
    )
    return 0 if converged == len(results) else 3


def _cmd_circle(args, argv) -> int:
    family = load_family(args.input)
    try:
        a, b, c = (int(x) for x in args.indices.split(","))
    except ValueError as exc:
        raise RuntimeError(f"--indices must be three comma-separated ints: {exc}") from exc
    profile = knasteropt.circle_profile(
        family.matrices[a], family.matrices[b], family.matrices[c], samples=args.samples
    )
    payload = {
        "manifest": build_manifest(
            argv, {"input": args.input, "indices": [a, b, c]}, 0, {}
        ),
        "dim": profile.dim,
        "alpha": profile.alpha,
        "fitted_constant": profile.fitted_constant,
        "fitted_cos3_coefficient": profile.fitted_cos3_coefficient,
        "predicted_cos3_coefficient": knasteropt.circle_cos3_coefficient(
            profile.dim, profile.alpha
        ),
        "fit_residual": profile.fit_residual,
        "theta_samples": [float(x) for x in profile.theta_samples],
        "trace_values": [float(x) for x in profile.trace_values],
    }
    _emit(payload, args.output)
    return 0


def _report_payload(report: certify.VerificationReport, manifest: dict) -> dict:
    payload = asdict(report)
    payload["f_values"] = [float(x) for x in report.f_values]
    payload["spectra"] = [[float(x) for x in row] for row in report.spectra]
    payload["checks"] = {k: bool(v) for k, v in report.checks.items()}
    return {"manifest": manifest, **payload}


def _cmd_verify(args, argv) -> int:
    family = load_family(args.input)
    report = certify.verify_family(family, tol=args.tol)
    rows = [
        ("dim", report.dim),
        ("power", report.power),
        ("gram_max_dev", f"{report.gram_max_dev:.3e}"),
        ("radius_max_dev", f"{report.radius_max_dev:.3e}"),
        ("f_spread", f"{report.f_spread:.3e}"),
        ("spectra_spread", f"{report.spectra_spread:.3e}"),
        ("trace_spectra_max_dev", f"{report.trace_spectra_max_dev:.3e}"),
        ("all_pure", report.all_pure),
        ("triple_sum", f"{report.triple_sum:.12g}"),
        (
            "triple_sum_dev",
            "skipped (impure)" if report.triple_sum_dev is None else f"{report.triple_sum_dev:.3e}",
        ),
        ("last_vertex_defect", f"{report.last_vertex_defect:.3e}"),
        ("psd_all", all(report.psd_flags)),
        ("verdict", report.verdict),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")
    manifest = build_manifest(argv, {"input": args.input}, 0, {"tol": args.tol})
    payload = _report_payload(report, manifest)
    if args.output:
        persist(payload, args.output)
    else:
        print(dumps17(payload))
    return 0 if report.verdict else 1


def _cmd_knaster_s1(args, argv) -> int:
    fn = _KNASTER_FUNCTIONS[args.function]
    result = knasteropt.knaster_s1(
        fn, points=args.points, tol=args.tol, separation=args.separation
    )
    payload = {
        "manifest": build_manifest(
            argv,
            {"function": args.function, "points": args.points},
            0,
            {"tol": args.tol},
        ),
        "angles": [float(x) for x in result.angles],
        "values": [float(x) for x in result.values],
        "common_value": result.common_value,
        "spread": result.spread,
        "iterations": result.iterations,
    }
    _emit(payload, args.output)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexforge",
        description="SIC-POVM geometry and simplex-orientation search on the Bloch sphere",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="emit a Gell-Mann basis as JSON")
    p.add_argument("--dim", type=int, required=True, help="Hilbert dimension n")
    p.add_argument("--output", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("simplex", help="emit regular simplex vertices as JSON")
    p.add_argument("--dim", type=int, required=True, help="ambient dimension N")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_simplex)

    p = sub.add_parser("seed-sic", help="emit a verified seed SIC as JSON")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--fiducial", help="fiducial JSON file for dimensions beyond 2, 3")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_seed_sic)

    p = sub.add_parser("optimize", help="orient the simplex for one target value")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--f0", type=float, required=True)
    p.add_argument("--power", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-18)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", help="warm-start from a stored result file")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("scan", help="continuation scan over a band of targets")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--f0-min", type=float, required=True)
    p.add_argument("--f0-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--power", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-18)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--start")
    p.add_argument("--csv", default="scan.csv", help="summary CSV path")
    p.add_argument("--output-dir", help="directory for per-step result JSON")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("circle", help="trace profile of the circle through three elements")
    p.add_argument("--input", required=True)
    p.add_argument("--indices", required=True, help="three element indices a,b,c")
    p.add_argument("--samples", type=int, default=360)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_circle)

    p = sub.add_parser("verify", help="verification report for a stored family")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--output", help="write the report JSON here")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("knaster-s1", help="equal-value configurations on the circle")
    p.add_argument("--function", choices=sorted(_KNASTER_FUNCTIONS), required=True)
    p.add_argument("--points", type=int, choices=(2, 3), required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--separation", type=float, default=2.0 * np.pi / 3.0)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_knaster_s1)
    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args, list(argv))
    except (RuntimeError, ValueError, KeyError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if "did not reach tolerance" in str(exc):
            return 3
        return 2


if __name__ == "__main__":
    sys.exit(main())
