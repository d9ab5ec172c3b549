"""Command-line front end.

Every subcommand reads one JSON config, writes its results into ``--out``
and returns an exit code: 0 on success, 2 for an invalid config, 3 for
non-regular boundary conditions and 4 when a solver does not converge.
Floats in CSV files use ``%.12e`` and JSON keys are sorted, so identical
configs give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import (
    BoundaryPair,
    DiracProblem,
    PotentialGrid,
    ReducedBC,
    Strip,
    Weights,
    boundary_preset,
    check_regularity,
    reduce_bc,
)
from .determinant import DeterminantHandle, delta0_strip_bound
from .errors import (
    DiracSpectraError,
    InvalidProblemError,
    KernelDivergenceError,
    LocalizationError,
    NonRegularError,
    NotReducibleError,
    PairingError,
    StripTooTallError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NON_REGULAR = 3
EXIT_SOLVER = 4

CSV_COLUMNS = ("n", "re", "im", "multiplicity", "re0", "im0", "gap")
FLOAT_FORMAT = "%.12e"


class ConfigError(ValueError):
    """The run configuration cannot be turned into a problem."""


# ----- config parsing ---------------------------------------------------------


def parse_complex(value) -> complex:
    """Accept a number, a ``[re, im]`` pair or a Python complex literal string."""
    if isinstance(value, bool):
        raise ConfigError("booleans are not numbers")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"cannot read {value!r} as a complex number") from exc
    raise ConfigError(f"cannot read {value!r} as a complex number")


def _builtin_potentials(m: int) -> dict:
    x = np.linspace(0.0, 1.0, m + 1)
    one = np.ones_like(x)
    return {
        "zero": lambda: PotentialGrid.zero(m),
        "codiag-one": lambda: PotentialGrid.from_entries(one, one, m=m),
        "codiag-ramp": lambda: PotentialGrid.from_entries(2 * x, 2 * x, m=m),
        "codiag-linear": lambda: PotentialGrid.from_entries(x, x * (1 - x), m=m),
        "codiag-cosine": lambda: PotentialGrid.from_entries(np.cos(2 * np.pi * x), 1 + x, m=m),
        "diagonal-ramp": lambda: PotentialGrid.from_entries(0 * x, 0 * x, q11=one, q22=x, m=m),
    }


POTENTIAL_PRESETS = tuple(_builtin_potentials(4))


def parse_weights(spec) -> Weights:
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        spec = {"b1": spec[0], "b2": spec[1]}
    if not isinstance(spec, dict) or "b1" not in spec or "b2" not in spec:
        raise ConfigError("weights need b1 and b2")
    ratio = spec.get("ratio")
    try:
        ratio = Fraction(str(ratio)) if ratio is not None else None
        return Weights(float(spec["b1"]), float(spec["b2"]), ratio)
    except (InvalidProblemError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid weights: {exc}") from exc


def parse_potential(spec, m: int) -> PotentialGrid:
    """Potential from a preset name, constant entries or sampled entries."""
    presets = _builtin_potentials(m)
    if spec is None:
        spec = "zero"
    if isinstance(spec, str):
        spec = {"preset": spec}
    if not isinstance(spec, dict):
        raise ConfigError("potential must be a preset name or an object")
    if "preset" in spec:
        name = spec["preset"]
        if name not in presets:
            raise ConfigError(f"unknown potential preset {name!r}; known: {', '.join(presets)}")
        return presets[name]()
    entries = spec.get("constant") or spec.get("samples")
    if not isinstance(entries, dict):
        raise ConfigError("potential needs 'preset', 'constant' or 'samples'")
    keys = ("q11", "q12", "q21", "q22")
    unknown = set(entries) - set(keys)
    if unknown:
        raise ConfigError(f"unknown potential entries {sorted(unknown)}")
    if "constant" in spec:
        matrix = np.zeros((2, 2), dtype=complex)
        for key in keys:
            if key in entries:
                matrix[int(key[1]) - 1, int(key[2]) - 1] = parse_complex(entries[key])
        return PotentialGrid.constant(matrix, m=m)
    cols = {}
    length = None
    for key in keys:
        if key in entries:
            arr = np.array([parse_complex(v) for v in entries[key]], dtype=complex)
            if length is not None and arr.size != length:
                raise ConfigError("sampled potential entries differ in length")
            length = arr.size
            cols[key] = arr
    if length is None or length < 2:
        raise ConfigError("sampled potential needs at least two samples")
    zero = np.zeros(length, dtype=complex)
    try:
        return PotentialGrid.from_entries(
            cols.get("q12", zero), cols.get("q21", zero), cols.get("q11"), cols.get("q22"), m=length - 1
        )
    except InvalidProblemError as exc:
        raise ConfigError(str(exc)) from exc


def parse_boundary(spec) -> BoundaryPair:
    """Boundary pair from a preset, reduced coefficients or full matrices."""
    try:
        if isinstance(spec, str):
            return boundary_preset(spec)
        if not isinstance(spec, dict):
            raise ConfigError("bc must be a preset name or an object")
        if "preset" in spec:
            extra = {k: parse_complex(spec[k]) for k in ("b", "c") if k in spec}
            return boundary_preset(spec["preset"], **extra)
        if "reduced" in spec:
            red = spec["reduced"]
            return ReducedBC(*(parse_complex(red.get(k, 0.0)) for k in ("a", "b", "c", "d"))).boundary_pair()
        if "C" in spec and "D" in spec:
            C = np.array([[parse_complex(v) for v in row] for row in spec["C"]], dtype=complex)
            D = np.array([[parse_complex(v) for v in row] for row in spec["D"]], dtype=complex)
            return BoundaryPair(C, D)
    except InvalidProblemError as exc:
        raise ConfigError(str(exc)) from exc
    except (TypeError, AttributeError) as exc:
        raise ConfigError(f"malformed bc: {exc}") from exc
    raise ConfigError("bc needs 'preset', 'reduced' or 'C' and 'D'")


def parse_window(text: str) -> tuple[float, float]:
    """``"A:B"`` to ``(A, B)``."""
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"window must look like RE_MIN:RE_MAX, got {text!r}") from exc
    if not lo < hi:
        raise ConfigError("window needs RE_MIN < RE_MAX")
    return lo, hi


@dataclass
class RunConfig:
    """Validated run configuration."""

    weights: Weights | None
    potential: PotentialGrid | None
    boundary: BoundaryPair | None
    window: tuple[float, float] = (-20.0, 20.0)
    strip: float | None = None
    grid_m: int = 256
    grid_n: int = 128
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def problem(self) -> DiracProblem:
        return DiracProblem.from_weights(self.weights, self.potential, self.boundary)


def load_config(path, overrides: argparse.Namespace | None = None, needs_problem: bool = True) -> RunConfig:
    """Read and validate a JSON config, applying command-line overrides."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    grid = raw.get("grid", {})
    grid_m = int(grid.get("m", 256))
    grid_n = int(grid.get("n", 128))
    window = tuple(float(v) for v in raw.get("window", (-20.0, 20.0)))
    strip = raw.get("strip")
    if overrides is not None:
        grid_m = overrides.grid_m if overrides.grid_m is not None else grid_m
        grid_n = overrides.grid_n if overrides.grid_n is not None else grid_n
        window = parse_window(overrides.window) if overrides.window is not None else window
        strip = overrides.strip if overrides.strip is not None else strip
    if grid_m < 1 or grid_n < 4:
        raise ConfigError("grid sizes must satisfy m >= 1 and n >= 4")
    if len(window) != 2 or not window[0] < window[1]:
        raise ConfigError("window needs two values with RE_MIN < RE_MAX")
    if strip is not None and not float(strip) > 0:
        raise ConfigError("strip half-height must be positive")
    cfg = RunConfig(None, None, None, window, None if strip is None else float(strip), grid_m, grid_n, raw)
    if needs_problem:
        if "weights" not in raw or "bc" not in raw:
            raise ConfigError("config needs 'weights' and 'bc'")
        cfg.weights = parse_weights(raw["weights"])
        cfg.potential = parse_potential(raw.get("potential"), grid_m)
        cfg.boundary = parse_boundary(raw["bc"])
        if cfg.boundary.C.shape != (2, 2):
            raise ConfigError("only 2x2 boundary matrices are accepted here")
    return cfg


# ----- output helpers -----------------------------------------------------------


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    return FLOAT_FORMAT % value


def eigenvalue_rows(records, extra: list | None = None) -> list[list[str]]:
    rows = []
    for k, r in enumerate(records):
        lam0 = r.lam0
        row = [
            "%d" % r.index,
            _fmt(r.lam.real),
            _fmt(r.lam.imag),
            "%d" % r.multiplicity,
            _fmt(None if lam0 is None else lam0.real),
            _fmt(None if lam0 is None else lam0.imag),
            _fmt(r.gap),
        ]
        if extra is not None:
            row.append(str(extra[k]))
        rows.append(row)
    return rows


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def read_eigenvalue_csv(text: str) -> list[dict]:
    """Parse an eigenvalue CSV back into typed rows (blank cells become None)."""
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        parsed = {}
        for key, value in row.items():
            if value == "":
                parsed[key] = None
            elif key in ("n", "multiplicity"):
                parsed[key] = int(value)
            elif key == "subsystem":
                parsed[key] = value
            else:
                parsed[key] = float(value)
        out.append(parsed)
    return out


def write_eigenvalue_rows(rows: list[dict], columns=CSV_COLUMNS) -> str:
    """Inverse of :func:`read_eigenvalue_csv`."""
    body = []
    for row in rows:
        cells = []
        for key in columns:
            value = row.get(key)
            if value is None:
                cells.append("")
            elif key in ("n", "multiplicity"):
                cells.append("%d" % value)
            elif key == "subsystem":
                cells.append(str(value))
            else:
                cells.append(_fmt(value))
        body.append(cells)
    return format_csv(columns, body)


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return [_json_safe(float(value.real)), _json_safe(float(value.imag))]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    return value


def dump_json(data) -> str:
    return json.dumps(_json_safe(data), sort_keys=True, indent=2) + "\n"


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


# ----- pipelines ----------------------------------------------------------------


def default_strip(problem: DiracProblem) -> float:
    """Unperturbed zero height plus ``1 + max|b_j|·‖Q‖_{L1}``."""
    red = reduce_bc(problem.boundary)
    base = delta0_strip_bound(red, problem.weights)
    return base + 1.0 + max(abs(b) for b in problem.b) * problem.potential.l1_norm()


def _require_regular(boundary: BoundaryPair) -> None:
    if not check_regularity(boundary).regular:
        raise NonRegularError("boundary conditions are not regular (J14·J32 = 0)")


def _search(problem: DiracProblem, strip: Strip):
    from .spectra import find_zeros_strip

    handle = DeterminantHandle.propagator(problem)
    return find_zeros_strip(handle, strip, coarse=handle.coarse())


def cmd_spectrum(cfg: RunConfig) -> dict:
    """Eigenvalues over the window, paired with the unperturbed zeros.

    Returns a dict with the CSV text under ``"csv"`` and the summary.
    """
    from .spectra import find_zeros_strip, pair_with_unperturbed

    _require_regular(cfg.boundary)
    problem = cfg.problem
    h = cfg.strip if cfg.strip is not None else default_strip(problem)
    strip = Strip(h, *cfg.window)
    records = _search(problem, strip)
    unperturbed = find_zeros_strip(DeterminantHandle.closed_form(problem), strip)
    width = cfg.window[1] - cfg.window[0]
    pairing = None
    try:
        summary = pair_with_unperturbed(records, unperturbed, window=cfg.window, edge_allowance=problem.weights.spacing)
        records = summary.records
        pairing = {
            "outer_max_gap": summary.outer_max_gap,
            "inner_max_gap": summary.inner_max_gap,
            "unmatched": summary.unmatched,
        }
    except PairingError as exc:
        pairing = {"error": str(exc)}
    count = sum(r.multiplicity for r in records)
    expected = width / problem.weights.spacing
    report = {
        "count": count,
        "distinct": len(records),
        "strip_h": h,
        "window": list(cfg.window),
        "expected_count": expected,
        "density_ok": abs(count - expected) <= 3,
        "pairing": pairing,
        "unperturbed_count": sum(r.multiplicity for r in unperturbed),
    }
    return {"csv": format_csv(CSV_COLUMNS, eigenvalue_rows(records)), "summary": report, "records": records}


def cmd_classify(cfg: RunConfig) -> dict:
    """Strict-regularity verdict; undetermined cases get a numerical hint."""
    from .regularity import classify_strict, numerical_separation

    minors = check_regularity(cfg.boundary)
    if not minors.regular:
        from .regularity import RegularityVerdict

        verdict = RegularityVerdict(False, "no", "not-regular", {"J14": minors.J14, "J32": minors.J32})
        return verdict.to_dict()
    red = reduce_bc(cfg.boundary)
    verdict = classify_strict(red, cfg.weights)
    if verdict.strict == "undetermined":
        rep = numerical_separation(red, cfg.weights, levels=int(cfg.raw.get("separation_levels", 3)))
        verdict = verdict.with_hint(rep.hint)
    return verdict.to_dict()


def _interp_rows(x_new, x, values):
    return np.stack(
        [np.interp(x_new, x, values[:, k].real) + 1j * np.interp(x_new, x, values[:, k].imag) for k in range(values.shape[1])],
        axis=1,
    )


def cmd_kernel(cfg: RunConfig, out_dir: Path | None = None) -> dict:
    """Kernel residuals, norms and the kernel-versus-propagator error table."""
    from .kernels import (
        TriangleGrid,
        apply_transform,
        dump_kernel,
        goursat_residuals,
        kernel_norms,
        kernel_pair,
        p_system_residual,
        side_condition_residuals,
    )
    from .propagator import solve_cauchy_pm

    pot, w = cfg.potential, cfg.weights
    if not pot.off_diagonal:
        raise ConfigError("the kernel pipeline needs an off-diagonal potential (apply the gauge first)")
    kcfg = cfg.raw.get("kernel", {})
    lams = [parse_complex(v) for v in kcfg.get("lambdas", [0, 3, [5, 0.5]])]
    n_list = [int(v) for v in kcfg.get("n_list", [cfg.grid_n, 2 * cfg.grid_n])]
    problem = DiracProblem.from_weights(w, pot, boundary_preset("periodic"))
    fine = problem.potential.nodes
    cauchy = {(lam, s): solve_cauchy_pm(problem, lam, s) for lam in lams for s in (1, -1)}
    table = []
    main = None
    for N in n_list:
        grid = TriangleGrid(N)
        pair = kernel_pair(pot, w, grid)
        if N == cfg.grid_n:
            main = pair
        for lam in lams:
            row = {"N": N, "lam": lam}
            for s, K in ((1, pair.K_plus), (-1, pair.K_minus)):
                e = apply_transform(K, w, lam, s)
                ref = _interp_rows(grid.nodes, fine, cauchy[(lam, s)])
                row["err_plus" if s > 0 else "err_minus"] = float(np.max(np.abs(e - ref)) / np.max(np.abs(ref)))
            table.append(row)
    if main is None:
        main = kernel_pair(pot, w, TriangleGrid(cfg.grid_n))
    report = {
        "N": cfg.grid_n,
        "goursat": goursat_residuals(main.R, pot, w),
        "p_system": {
            "plus": p_system_residual(main.R, w, main.P_plus, 1),
            "minus": p_system_residual(main.R, w, main.P_minus, -1),
        },
        "side_conditions": {
            "plus": side_condition_residuals(main.K_plus, pot, w, 1),
            "minus": side_condition_residuals(main.K_minus, pot, w, -1),
        },
        "norms": {
            "R": kernel_norms(main.R),
            "K+": kernel_norms(main.K_plus),
            "K-": kernel_norms(main.K_minus),
        },
        "errors": table,
    }
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        dump_kernel(main.K_plus, w, out_dir / "kernel_plus.bin")
        dump_kernel(main.K_minus, w, out_dir / "kernel_minus.bin")
    return report


def cmd_basis(cfg: RunConfig) -> dict:
    """Root-function pairs over the window and their Gram diagnostics."""
    from .basis import (
        boundary_residual,
        eigenpair_functions,
        equation_residual,
        gram_diagnostics,
        normalize_biorthogonal,
    )

    _require_regular(cfg.boundary)
    problem = cfg.problem
    bcfg = cfg.raw.get("basis", {})
    h = cfg.strip if cfg.strip is not None else default_strip(problem)
    records = _search(problem, Strip(h, *cfg.window))
    pairs = []
    for rec in records:
        pairs.extend(eigenpair_functions(problem, rec))
    pairs = normalize_biorthogonal(pairs)
    eps = bcfg.get("eps")
    report = gram_diagnostics(pairs, window=bcfg.get("window"), eps=None if eps is None else float(eps))
    rows = [
        [
            "%d" % p.index,
            _fmt(p.lam.real),
            _fmt(p.lam.imag),
            _fmt(boundary_residual(problem, p)),
            _fmt(equation_residual(problem, p)),
            _fmt(abs(p.pairing)),
            "%d" % int(p.degenerate),
        ]
        for p in pairs
    ]
    header = ("n", "re", "im", "boundary_residual", "equation_residual", "pairing", "degenerate")
    return {"gram": report.to_dict(), "csv": format_csv(header, rows)}


def _beam_from(raw: dict):
    from .timoshenko import BeamCoefficients

    spec = raw.get("beam")
    if not isinstance(spec, dict):
        raise ConfigError("timoshenko config needs a 'beam' object")
    length = float(spec.get("length", 1.0))
    profiles = {k: spec.get(k, 1.0) for k in ("rho", "I_rho", "K", "EI")}
    damping = {k: spec.get(k, 0.0) for k in ("p1", "p2")}
    sizes = {len(v) for v in list(profiles.values()) + list(damping.values()) if isinstance(v, list)}
    if len(sizes) > 1:
        raise ConfigError("sampled beam profiles differ in length")
    count = sizes.pop() if sizes else int(spec.get("m", 64)) + 1
    x = np.linspace(0.0, length, count)
    conv = {k: (np.asarray(v, dtype=float) if isinstance(v, list) else float(v)) for k, v in profiles.items()}
    damp = {
        k: (np.array([parse_complex(u) for u in v]) if isinstance(v, list) else parse_complex(v))
        for k, v in damping.items()
    }
    bnd = {k: parse_complex(spec.get(k, 0.0)) for k in ("alpha1", "alpha2", "beta1", "beta2")}
    try:
        return BeamCoefficients(x, **conv, **damp, **bnd), float(spec.get("coupling_scale", 1.0))
    except InvalidProblemError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_timoshenko(cfg: RunConfig) -> dict:
    """Reduction matrices and the coupled and decoupled beam spectra."""
    from .spectra import pair_with_unperturbed
    from .timoshenko import beam_spectrum, build_reduction, decouple

    coeffs, scale = _beam_from(cfg.raw)
    reduction = build_reduction(coeffs, m=cfg.raw.get("beam", {}).get("t_grid"))
    decoupled = coeffs.beta1 == 0 and coeffs.beta2 == 0
    if not decoupled and cfg.strip is None:
        raise ConfigError("β1 or β2 is nonzero: give the strip half-height explicitly")
    coupling_sup = decouple(reduction).coupling_sup if decoupled else None
    spec = beam_spectrum(reduction, cfg.window, strip_h=cfg.strip, coupling_scale=scale)
    coupled = spec.coupled
    if spec.subsystems:
        union = sorted((r for s in spec.subsystems for r in s), key=lambda r: (r.lam.real, r.lam.imag))
        try:
            coupled = pair_with_unperturbed(coupled, union, window=cfg.window, edge_allowance=math.inf).records
        except PairingError:
            pass
    rows = eigenvalue_rows(coupled, ["coupled"] * len(coupled))
    for j, recs in enumerate(spec.subsystems, start=1):
        rows.extend(eigenvalue_rows(recs, [str(j)] * len(recs)))
    info = reduction.to_dict()
    info.update(
        {
            "coupling_sup": coupling_sup,
            "coupling_scale": scale,
            "strip_h": spec.strip.h,
            "window": list(cfg.window),
            "drift": spec.drift,
            "Q_hat": {"re": reduction.q_hat[0].real.tolist(), "im": reduction.q_hat[0].imag.tolist()},
        }
    )
    return {"reduction": info, "csv": format_csv(CSV_COLUMNS + ("subsystem",), rows)}


# ----- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirac-spectra", description="Spectra of 2x2 Dirac-type boundary value problems.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("spectrum", "locate eigenvalues and pair them with the unperturbed ones"),
        ("classify", "decide strict regularity of the boundary conditions"),
        ("kernel", "transformation-operator kernels and their residuals"),
        ("basis", "root-function pairs and Gram diagnostics"),
        ("timoshenko", "beam reduction and modal spectra"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--grid-m", type=int, default=None, help="potential grid intervals")
        p.add_argument("--grid-n", type=int, default=None, help="triangle grid size for kernels")
        p.add_argument("--window", default=None, help="real-part window RE_MIN:RE_MAX")
        p.add_argument("--strip", type=float, default=None, help="strip half-height")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out)
    try:
        cfg = load_config(args.config, args, needs_problem=args.command != "timoshenko")
        if args.command == "spectrum":
            res = cmd_spectrum(cfg)
            _write(out_dir, "eigenvalues.csv", res["csv"])
            _write(out_dir, "summary.json", dump_json(res["summary"]))
        elif args.command == "classify":
            _write(out_dir, "verdict.json", dump_json(cmd_classify(cfg)))
        elif args.command == "kernel":
            _write(out_dir, "kernel.json", dump_json(cmd_kernel(cfg, out_dir)))
        elif args.command == "basis":
            res = cmd_basis(cfg)
            _write(out_dir, "gram.json", dump_json(res["gram"]))
            _write(out_dir, "pairs.csv", res["csv"])
        else:
            res = cmd_timoshenko(cfg)
            _write(out_dir, "reduction.json", dump_json(res["reduction"]))
            _write(out_dir, "modes.csv", res["csv"])
    except (ConfigError, InvalidProblemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonRegularError, NotReducibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NON_REGULAR
    except (KernelDivergenceError, LocalizationError, StripTooTallError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DiracSpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def main() -> None:
    sys.exit(run())
