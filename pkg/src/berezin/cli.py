"""Command-line front end: experiment orchestration, caching, reports.

Subcommands: spectrum | local-measure | global-measure | fit |
verify-szego | verify-lemma | report.  Exit codes: 0 success, 2 malformed
input, 3 numerical-contract violation.  All numeric output is written
with 17 significant digits so identical runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import assembly, asymptotics, cache, observables, phase, spectra
from .errors import BerezinError, ContractViolation, ValidationError
from .sphere import ModelPoint, standard_grid

CACHE_ENV = "BEREZIN_CACHE_DIR"

CONFIG_KEYS = {
    "observable",
    "chi",
    "point",
    "points",
    "k",
    "k-grid",
    "fit-order",
    "cache-dir",
    "out",
    "tolerance",
    "omega0",
    "q",
    "c2",
    "shift",
}


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# spec-string parsing
# ---------------------------------------------------------------------------


def parse_observable(spec: str) -> observables.Observable:
    spec = spec.strip()
    try:
        if spec == "u1":
            return observables.u1()
        if spec == "u2":
            return observables.u2()
        if spec == "u3":
            return observables.u3()
        if spec == "u3sq":
            return observables.poly_u3([0.0, 0.0, 1.0])
        kind, _, rest = spec.partition(":")
        vals = [float(v) for v in rest.split(",")] if rest else []
        if kind == "const" and len(vals) == 1:
            return observables.constant(vals[0])
        if kind == "linear" and len(vals) == 4:
            return observables.linear_u(*vals)
        if kind == "poly" and vals:
            return observables.poly_u3(vals)
    except ValueError as exc:
        raise ValidationError(f"bad observable spec {spec!r}: {exc}") from exc
    raise ValidationError(f"unknown observable spec {spec!r}")


def parse_chi(spec: str) -> observables.TestFunction:
    spec = spec.strip()
    try:
        kind, _, rest = spec.partition(":")
        if kind == "gaussian":
            head, _, polypart = rest.partition(":")
            center, sigma = (float(v) for v in head.split(","))
            if polypart:
                poly = [float(v) for v in polypart.split(",")]
                return observables.gaussian_hermite(center, sigma, poly)
            return observables.gaussian(center, sigma)
        if kind == "bump":
            lo, hi = (float(v) for v in rest.split(","))
            return observables.bump(lo, hi)
    except (ValueError, BerezinError) as exc:
        raise ValidationError(f"bad test-function spec {spec!r}: {exc}") from exc
    raise ValidationError(f"unknown test-function spec {spec!r}")


def parse_point(spec: str) -> ModelPoint:
    spec = spec.strip()
    chart, _, value = spec.partition("=")
    try:
        w = complex(value.replace(" ", ""))
    except ValueError as exc:
        raise ValidationError(f"bad point spec {spec!r}: {exc}") from exc
    if chart == "z":
        return ModelPoint.south(w)
    if chart == "w":
        return ModelPoint.north(w)
    raise ValidationError(f"point spec must start with 'z=' or 'w=': {spec!r}")


def parse_points(spec: Optional[str]) -> list[ModelPoint]:
    if spec is None or spec.strip() in ("", "default"):
        return standard_grid()
    return [parse_point(s) for s in spec.split(";") if s.strip()]


def parse_k_grid(spec: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(v) for v in spec.split(",") if v.strip())
    except ValueError as exc:
        raise ValidationError(f"bad k-grid {spec!r}: {exc}") from exc
    if not ks:
        raise ValidationError("k-grid is empty")
    return ks


def load_config(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path!r}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value.strip()
    return cfg


def merged(args: argparse.Namespace, key: str, default=None):
    """CLI value if given, else config-file value, else default."""
    cli_val = getattr(args, key.replace("-", "_"), None)
    if cli_val is not None:
        return cli_val
    if args.config_values and key in args.config_values:
        return args.config_values[key]
    return default


# ---------------------------------------------------------------------------
# pipeline with caching
# ---------------------------------------------------------------------------


def resolve_cache_dir(args: argparse.Namespace) -> Optional[Path]:
    explicit = merged(args, "cache-dir")
    if explicit:
        return Path(explicit)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


def spectrum_for(
    f: observables.Observable, k: int, cache_dir: Optional[Path]
) -> tuple[spectra.SpectralData, assembly.Provenance, bool]:
    """Eigendecomposition of the level-k quantization, via cache when possible."""
    if assembly.has_closed_form(f):
        path, radial, angular = assembly.CLOSED_FORM, 0, 0
    else:
        scheme = assembly.QuadratureScheme.default(k, f.bandwidth)
        path, radial, angular = assembly.QUADRATURE, scheme.radial_order, scheme.angular_order
    key = cache.content_key(f.label, k, path, radial, angular)
    if cache_dir is not None:
        hit = cache.load(cache_dir, key)
        if hit is not None:
            prov = assembly.Provenance(path, radial, angular)
            return hit, prov, True
    T = assembly.assemble(k, f)
    S = spectra.eigh(T)
    if cache_dir is not None:
        cache.store(cache_dir, key, S)
    return S, T.provenance, False


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------


def write_csv(path: str, comments: Sequence[str], header: Sequence[str],
              rows: Sequence[Sequence]) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            for c in comments:
                fh.write(f"# {c}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(
                    ",".join(fmt(v) if isinstance(v, float) else str(v) for v in row)
                    + "\n"
                )
    except OSError as exc:
        raise ValidationError(f"cannot write {path!r}: {exc}") from exc


def write_json(path: str, payload: dict) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise ValidationError(f"cannot write {path!r}: {exc}") from exc


def emit(args: argparse.Namespace, text: str) -> None:
    print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    f = parse_observable(require(args, "observable"))
    k = int(require(args, "k"))
    cache_dir = resolve_cache_dir(args)
    S, prov, hit = spectrum_for(f, k, cache_dir)
    rows = [(j, float(S.eigenvalues[j])) for j in range(S.n)]
    out = merged(args, "out")
    comments = [
        f"observable={f.label} k={k} provenance={prov.tag()} cache_hit={hit}",
        "columns: j (index, dimensionless), eigenvalue (symbol units)",
    ]
    if out:
        write_csv(out, comments, ["j", "eigenvalue"], rows)
    else:
        for j, lam in rows:
            emit(args, f"{j},{fmt(lam)}")
    return 0


def _measure_rows(mu: spectra.PointMeasure):
    return [(float(a), float(w)) for a, w in zip(mu.atoms, mu.weights)]


def cmd_local_measure(args) -> int:
    f = parse_observable(require(args, "observable"))
    k = int(require(args, "k"))
    m = parse_point(require(args, "point"))
    S, prov, _ = spectrum_for(f, k, resolve_cache_dir(args))
    mu = spectra.local_measure(S, m)
    comments = [
        f"local spectral measure observable={f.label} k={k} provenance={prov.tag()}",
        f"total_mass={fmt(mu.total_mass)} expected=(k+1)/pi={fmt((k + 1) / math.pi)}",
        "columns: atom (symbol units), weight (Bergman-density units)",
    ]
    out = merged(args, "out")
    if out:
        write_csv(out, comments, ["atom", "weight"], _measure_rows(mu))
    else:
        for a, w in _measure_rows(mu):
            emit(args, f"{fmt(a)},{fmt(w)}")
    return 0


def cmd_global_measure(args) -> int:
    f = parse_observable(require(args, "observable"))
    k = int(require(args, "k"))
    S, prov, _ = spectrum_for(f, k, resolve_cache_dir(args))
    mu = spectra.global_measure(S)
    comments = [
        f"global spectral measure observable={f.label} k={k} provenance={prov.tag()}",
        f"total_mass={fmt(mu.total_mass)} expected=k+1={k + 1}",
        "columns: atom (symbol units), weight (count)",
    ]
    out = merged(args, "out")
    if out:
        write_csv(out, comments, ["atom", "weight"], _measure_rows(mu))
    else:
        for a, w in _measure_rows(mu):
            emit(args, f"{fmt(a)},{fmt(w)}")
    return 0


def _pairing_sequence(f, chi, m, grid, cache_dir):
    vals = np.empty(len(grid))
    for i, k in enumerate(grid):
        S, _, _ = spectrum_for(f, k, cache_dir)
        vals[i] = (math.pi / k) * spectra.pair(spectra.local_measure(S, m), chi)
    return vals


def cmd_fit(args) -> int:
    f = parse_observable(require(args, "observable"))
    chi = parse_chi(require(args, "chi"))
    m = parse_point(require(args, "point"))
    grid = parse_k_grid(merged(args, "k-grid", "32,48,64,96,128,192,256"))
    order = int(merged(args, "fit-order", asymptotics.DEFAULT_FIT_ORDER))
    cache_dir = resolve_cache_dir(args)
    a = _pairing_sequence(f, chi, m, grid, cache_dir)
    fit = asymptotics.fit_expansion(a, grid, order)
    payload = {
        "observable": f.label,
        "chi": chi.label,
        "point": point_label(m),
        "k_grid": list(fit.grid),
        "normalization": "(pi/k)^d with d=1",
        "coefficients": [float(c) for c in fit.coefficients],
        "residual": float(fit.residual),
        "condition": float(fit.condition),
        "symbol_value": observables.reduced_symbol(f, m),
        "chi_at_symbol": chi(observables.reduced_symbol(f, m)),
    }
    out = merged(args, "out")
    if out:
        write_json(out, payload)
    else:
        emit(args, json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    f = parse_observable(require(args, "observable"))
    chi = parse_chi(require(args, "chi"))
    m = parse_point(require(args, "point"))
    grid = parse_k_grid(merged(args, "k-grid", "32,48,64,96,128,192,256"))
    order = int(merged(args, "fit-order", asymptotics.DEFAULT_FIT_ORDER))
    out = merged(args, "out")
    if not out:
        raise ValidationError("report requires --out (basename for the emitted files)")
    cache_dir = resolve_cache_dir(args)
    a = _pairing_sequence(f, chi, m, grid, cache_dir)
    fit = asymptotics.fit_expansion(a, grid, order)

    # oracle column: exact binomial fast path when the symbol is u3-like
    u = m.u
    p = 0.5 * (1.0 + u[2])
    oracle_ok = f.label == "linear:0,0,1,0"
    rows = []
    for k, ak in zip(grid, a):
        oracle = asymptotics.binomial_oracle(k, p, chi) if oracle_ok else float("nan")
        rows.append((k, float(ak), float(oracle), float(ak - oracle)))
    comments = [
        f"observable={f.label} chi={chi.label} point={point_label(m)}",
        "normalization (pi/k)^d, d=1; a_k dimensionless",
        "columns: k, a_k, binomial_oracle (nan when not applicable), difference",
    ]
    write_csv(f"{out}_perk.csv", comments, ["k", "a_k", "oracle", "diff"], rows)
    write_json(
        f"{out}_fit.json",
        {
            "observable": f.label,
            "chi": chi.label,
            "point": point_label(m),
            "k_grid": list(fit.grid),
            "coefficients": [float(c) for c in fit.coefficients],
            "residual": float(fit.residual),
            "condition": float(fit.condition),
        },
    )
    write_csv(
        f"{out}_plot.csv",
        [f"plot-ready sequence observable={f.label} chi={chi.label}"],
        ["inv_k", "a_k"],
        [(float(1.0 / k), float(ak)) for k, ak in zip(grid, a)],
    )
    return 0


def cmd_verify_szego(args) -> int:
    f = parse_observable(require(args, "observable"))
    chi = parse_chi(require(args, "chi"))
    grid = parse_k_grid(merged(args, "k-grid", "64,128,256,512"))
    tol = float(merged(args, "tolerance", 5e-3))
    cache_dir = resolve_cache_dir(args)
    values = np.empty(len(grid))
    for i, k in enumerate(grid):
        S, _, _ = spectrum_for(f, k, cache_dir)
        values[i] = (math.pi / k) * spectra.pair(spectra.global_measure(S), chi)
    target = asymptotics.sphere_integral_of_chi(f, chi)
    errors = np.abs(values - target)
    rows = [
        (k, float(v), float(e)) for k, v, e in zip(grid, values, errors)
    ]
    out = merged(args, "out")
    comments = [
        f"observable={f.label} chi={chi.label} target={fmt(target)}",
        "columns: k, (pi/k)<counting measure, chi>, absolute error",
    ]
    if out:
        write_csv(out, comments, ["k", "value", "abs_error"], rows)
    violations = []
    for (ka, ea), (kb, eb) in zip(zip(grid, errors), list(zip(grid, errors))[1:]):
        if kb == 2 * ka and ea > 0:
            ratio = eb / ea
            if not 0.35 <= ratio <= 0.65:
                violations.append(
                    {"check": "halving-ratio", "k": ka, "ratio": float(ratio)}
                )
    rel = float(errors[-1] / max(abs(target), 1e-300))
    if rel > tol:
        violations.append(
            {"check": "limit", "k": int(grid[-1]), "relative_error": rel, "tol": tol}
        )
    emit(args, f"szego target={fmt(target)} final value={fmt(float(values[-1]))} "
               f"relative error={fmt(rel)}")
    if violations:
        emit(args, json.dumps({"violations": violations}, sort_keys=True))
        raise ContractViolation("verify-szego failed")
    return 0


def cmd_verify_lemma(args) -> int:
    omega0 = float(merged(args, "omega0", 1.0))
    qval = float(merged(args, "q", 1.0))
    c2 = float(merged(args, "c2", 0.0))
    try:
        params = phase.PhaseParams(omega0, qval, c2)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    cp = phase.critical_point(params)
    gnorm = float(phase.gradient_norm(params, cp))
    det = phase.hessian_det(params)
    det_err = abs(det + omega0**2)
    hits = phase.scan_stationary(params)
    payload = {
        "omega0": omega0,
        "q": qval,
        "c2": c2,
        "critical_point": list(cp.as_array()),
        "gradient_norm": gnorm,
        "hessian_det": [det.real, det.imag],
        "expected_det": -(omega0**2),
        "det_error": det_err,
        "stationary_candidates": len(hits),
    }
    out = merged(args, "out")
    if out:
        write_json(out, payload)
    emit(args, f"verify-lemma det={fmt(det.real)}{det.imag:+.3e}i "
               f"expected={fmt(-(omega0 ** 2))} grad_norm={gnorm:.3e} "
               f"candidates={len(hits)}")
    if gnorm > 1e-12 or det_err > 1e-8 or len(hits) != 1:
        raise ContractViolation("verify-lemma failed")
    return 0


def point_label(m: ModelPoint) -> str:
    tag = "z" if m.chart.value == "south" else "w"
    return f"{tag}={m.w.real:g}{m.w.imag:+g}j"


def require(args, key: str) -> str:
    val = merged(args, key)
    if val is None:
        raise ValidationError(f"missing required option --{key}")
    return val


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="berezin",
        description="Spectral-measure experiments for quantized observables on the sphere",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *, point=False, chi=False, kgrid=False, klevel=False):
        p.add_argument("--config", default=None,
                       help="flat key=value config file; CLI flags override")
        p.add_argument("--observable", default=None,
                       help="u1|u2|u3|u3sq|const:c|linear:a1,a2,a3,b|poly:c0,c1,...")
        p.add_argument("--cache-dir", default=None,
                       help=f"spectral cache directory (default ${CACHE_ENV})")
        p.add_argument("--out", default=None, help="output file (or basename)")
        if chi:
            p.add_argument("--chi", default=None,
                           help="gaussian:center,sigma[:p0,p1,...]|bump:lo,hi")
        if point:
            p.add_argument("--point", default=None, help="z=<complex> or w=<complex>")
        if klevel:
            p.add_argument("--k", default=None, help="level (tensor power)")
        if kgrid:
            p.add_argument("--k-grid", default=None, help="comma-separated levels")
        return p

    common(sub.add_parser("spectrum", help="eigenvalues of one level"), klevel=True)
    common(sub.add_parser("local-measure", help="local spectral measure at a point"),
           klevel=True, point=True)
    common(sub.add_parser("global-measure", help="eigenvalue counting measure"),
           klevel=True)
    p = common(sub.add_parser("fit", help="fit the 1/k expansion of a_k"),
               point=True, chi=True, kgrid=True)
    p.add_argument("--fit-order", default=None, help="expansion order J")
    p = common(sub.add_parser("report", help="per-k CSV + fit JSON + plot CSV"),
               point=True, chi=True, kgrid=True)
    p.add_argument("--fit-order", default=None)
    p = common(sub.add_parser("verify-szego", help="global limit check"),
               chi=True, kgrid=True)
    p.add_argument("--tolerance", default=None, help="relative tolerance at largest k")
    p = sub.add_parser("verify-lemma", help="stationary point and Hessian check")
    p.add_argument("--config", default=None)
    p.add_argument("--omega0", default=None)
    p.add_argument("--q", default=None)
    p.add_argument("--c2", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--cache-dir", default=None)
    return ap


COMMANDS = {
    "spectrum": cmd_spectrum,
    "local-measure": cmd_local_measure,
    "global-measure": cmd_global_measure,
    "fit": cmd_fit,
    "report": cmd_report,
    "verify-szego": cmd_verify_szego,
    "verify-lemma": cmd_verify_lemma,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.config_values = load_config(args.config) if args.config else {}
        code = COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 3
    except BerezinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return code


if __name__ == "__main__":
    sys.exit(main())
