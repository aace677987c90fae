"""Command-line front end.

    dualwave <command> --config <path> [--out <dir>] [--seed <u64>]

Exit codes: 0 success, 2 config missing or unreadable, 3 validation failure,
4 numerical contract violation.  ``DUALWAVE_THREADS`` caps the worker count.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import dark_energy as de
from . import horizon as hz
from ._backend import BACKEND
from .grid import Field, PhysParams, Sector, ValidationError, make_grid, norm2
from .io import dump_field
from .sector_ke import KeParams, ke_trajectory
from .sector_xt import XtParams, energy_expectation, xt_trajectory
from .selfcheck import run_selfcheck
from .states import coherent_state, gaussian, harmonic_potential, plane_wave

COMMANDS = ("evolve-xt", "evolve-ke", "dark-energy", "horizon", "selfcheck")
EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_CONTRACT = 0, 2, 3, 4


class ConfigError(Exception):
    pass


class ContractError(Exception):
    pass


def _block_name(command: str) -> str:
    return command.replace("-", "_")


class _Block:
    """Typed access to one config mapping; unknown keys are rejected on close."""

    def __init__(self, data: Any, path: str):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ValidationError(path, "expected a mapping")
        self.data, self.path, self.used = data, path, set()
        self.resolved: dict[str, Any] = {}

    def _key(self, key):
        return f"{self.path}.{key}" if self.path else key

    def get(self, key, kind, default=None, required=False):
        self.used.add(key)
        if key not in self.data or self.data[key] is None:
            if required:
                raise ValidationError(self._key(key), "missing")
            self.resolved[key] = default
            return default
        v = self.data[key]
        try:
            if kind is float:
                if isinstance(v, bool):
                    raise TypeError
                v = float(v)
            elif kind is int:
                if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
                    raise TypeError
                v = int(v)
            elif kind is bool:
                if not isinstance(v, bool):
                    raise TypeError
            elif kind is str:
                if not isinstance(v, str):
                    raise TypeError
            elif kind is list:
                v = list(v) if isinstance(v, (list, tuple)) else [v]
        except (TypeError, ValueError):
            raise ValidationError(self._key(key), f"expected {kind.__name__}, got {v!r}") from None
        self.resolved[key] = v
        return v

    def sub(self, key, required=True) -> "_Block":
        self.used.add(key)
        if key not in self.data and required:
            raise ValidationError(self._key(key), "missing")
        b = _Block(self.data.get(key), self._key(key))
        self.resolved[key] = b.resolved
        return b

    def close(self):
        extra = sorted(set(self.data) - self.used)
        if extra:
            raise ValidationError(self._key(extra[0]), "unknown key")


def _grid(b: _Block, ndim: int):
    n = b.get("n_points", list, required=True)
    o = b.get("origin", list, required=True)
    s = b.get("spacing", list, required=True)
    b.close()
    if not (len(n) == len(o) == len(s) == ndim):
        raise ValidationError(b.path, f"expected {ndim} axis entries")
    try:
        n = [int(v) for v in n]
        o = [float(v) for v in o]
        s = [float(v) for v in s]
    except (TypeError, ValueError) as exc:
        raise ValidationError(b.path, str(exc)) from None
    try:
        return make_grid(tuple(n), tuple(o), tuple(s))
    except ValidationError as exc:
        raise ValidationError(f"{b.path}.{exc.field}", str(exc)) from None


def _f(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_f(v) if isinstance(v, (float, np.floating)) else v for v in r])


# --- commands ---------------------------------------------------------------

def _evolve_xt(b: _Block, ctx) -> str:
    grid = _grid(b.sub("grid"), 1)
    mass = b.get("mass", float, 1.0)
    dt = b.get("dt", float, required=True)
    n_steps = b.get("n_steps", int, required=True)
    every = b.get("record_every", int, max(n_steps, 1))
    tol = b.get("norm_tolerance", float, 1e-10)
    pb = b.sub("potential", required=False)
    kind = pb.get("kind", str, "zero")
    if kind == "zero":
        v = np.zeros(grid.size)
    elif kind == "harmonic":
        v = harmonic_potential(grid, pb.get("omega", float, 1.0), mass)
    elif kind == "samples":
        v = np.asarray(pb.get("values", list, required=True), dtype=float)
    else:
        raise ValidationError(f"{pb.path}.kind", f"unknown potential {kind!r}")
    pb.close()
    ib = b.sub("initial")
    ikind = ib.get("kind", str, "gaussian")
    if ikind == "gaussian":
        psi0 = gaussian(grid, Sector.XT, ib.get("center", float, 0.0), ib.get("sigma", float, 1.0),
                        ib.get("wavenumber", float, 0.0))
    elif ikind == "coherent":
        psi0 = coherent_state(grid, ib.get("displacement", float, 0.0),
                              ib.get("omega", float, 1.0), mass, ctx["hbar"])
    else:
        raise ValidationError(f"{ib.path}.kind", f"unknown initial state {ikind!r}")
    ib.close()
    b.close()
    params = XtParams(mass, v, dt, ctx["hbar"])
    rows, last = [], psi0
    n0 = norm2(psi0)
    for s, f in xt_trajectory(psi0, params, n_steps, every):
        rows.append((s, s * dt, norm2(f), energy_expectation(f, params)))
        last = f
    _write_csv(ctx["out"] / "evolve_xt.csv", ("step", "time", "norm", "energy"), rows)
    if ctx["emit"]:
        dump_field(ctx["out"] / "initial.dmf", psi0)
        dump_field(ctx["out"] / "final.dmf", last)
    drift = abs(norm2(last) - n0) / n0
    if drift > tol:
        raise ContractError(f"norm drift {drift:.3e} exceeds {tol:g}")
    return f"evolve-xt: {abs(n_steps)} steps, norm drift {drift:.2e}, <H> {rows[-1][3]:.10g}"


def _sigma(f: Field) -> float:
    q = f.grid.coords(0)
    d = np.abs(f.samples) ** 2
    m = (q * d).sum() / d.sum()
    return float(np.sqrt(((q - m) ** 2 * d).sum() / d.sum()))


def _evolve_ke(b: _Block, ctx) -> str:
    grid = _grid(b.sub("grid"), 1)
    params = KeParams(b.get("alpha", float, required=True), b.get("v0", float, 0.0),
                      b.get("beta", float, 0.0), b.get("dE", float, required=True), ctx["hbar"])
    n_steps = b.get("n_steps", int, required=True)
    every = b.get("record_every", int, max(n_steps, 1))
    tol = b.get("norm_tolerance", float, 1e-12)
    ib = b.sub("initial")
    ikind = ib.get("kind", str, "gaussian")
    if ikind == "gaussian":
        phi0 = gaussian(grid, Sector.KE, ib.get("center", float, 0.0), ib.get("sigma", float, 1.0),
                        ib.get("position", float, 0.0))
    elif ikind == "plane_wave":
        phi0 = plane_wave(grid, ib.get("position", float, required=True), Sector.KE)
    else:
        raise ValidationError(f"{ib.path}.kind", f"unknown initial state {ikind!r}")
    ib.close()
    b.close()
    rows, last = [], phi0
    n0 = norm2(phi0)
    for s, f in ke_trajectory(phi0, params, n_steps, every):
        rows.append((s, s * params.dE, norm2(f), _sigma(f)))
        last = f
    _write_csv(ctx["out"] / "evolve_ke.csv", ("step", "energy_param", "norm", "sigma_k"), rows)
    if ctx["emit"]:
        dump_field(ctx["out"] / "initial.dmf", phi0)
        dump_field(ctx["out"] / "final.dmf", last)
    drift = abs(norm2(last) - n0) / n0
    if drift > tol:
        raise ContractError(f"norm drift {drift:.3e} exceeds {tol:g}")
    return f"evolve-ke: {abs(n_steps)} steps, norm drift {drift:.2e}, sigma_k {rows[-1][3]:.10g}"


def _dark_energy(b: _Block, ctx) -> str:
    grid = _grid(b.sub("grid"), 2)
    wb = b.sub("weight")
    kind = wb.get("kind", str, "gaussian")
    if kind == "gaussian":
        weight = de.gaussian_weight(grid, wb.get("sigma_k", float, 1.0), wb.get("sigma_e", float, 1.0),
                                    wb.get("rho", float, 1.0), wb.get("k_center", float, 0.0),
                                    wb.get("e_center", float, 0.0))
    elif kind == "single_mode":
        weight = de.single_mode_weight(grid, wb.get("k_index", int, required=True),
                                       wb.get("e_index", int, required=True),
                                       wb.get("amplitude", float, 1.0))
    else:
        raise ValidationError(f"{wb.path}.kind", f"unknown weight {kind!r}")
    wb.close()
    n = b.get("n_samples", int, required=True)
    axes = b.get("coherence_axes", list, ["x", "t"])
    b.close()
    for a in axes:
        if a not in ("x", "t"):
            raise ValidationError(f"{b.path}.coherence_axes", f"unknown axis {a!r}")
    spec = de.EnsembleSpec(weight, n, ctx["seed"])
    p = PhysParams(ctx["hbar"])
    rep = de.ensemble_density(spec, p)
    _write_csv(ctx["out"] / "density.csv",
               ("rho_estimate", "rho_exact_sum", "spatial_cv", "cv_x", "cv_t", "mean_field_max", "n_samples"),
               [(rep.rho_estimate, rep.rho_exact_sum, rep.spatial_cv, rep.cv_x, rep.cv_t,
                 rep.mean_field_max, rep.n_samples)])
    for a in axes:
        tab = de.coherence_function(spec, a, p)
        _write_csv(ctx["out"] / f"coherence_{a}.csv", ("lag", "re", "im", "ref_re", "ref_im"),
                   zip(tab.lags, tab.values.real, tab.values.imag, tab.reference.real, tab.reference.imag))
    if ctx["emit"]:
        dump_field(ctx["out"] / "realization_0.dmf", de.sample_realization(spec, 0, p))
    bound = 5.0 / np.sqrt(n)
    rho = rep.rho_exact_sum
    if rho > 0 and (abs(rep.rho_estimate - rho) > bound * rho or rep.spatial_cv > bound):
        raise ContractError(f"ensemble statistics outside 5/sqrt(N) = {bound:.3g}")
    return (f"dark-energy: N={n} rho_estimate={rep.rho_estimate:.6g} "
            f"rho_exact={rho:.6g} cv={rep.spatial_cv:.3g}")


def _horizon(b: _Block, ctx) -> str:
    kappas = b.get("kappa", list, [1.0])
    try:
        kappas = [float(k) for k in kappas]
    except (TypeError, ValueError):
        raise ValidationError(f"{b.path}.kappa", "expected numbers") from None
    k0 = b.get("k0", float, 10.0)
    n_points = b.get("n_points", int, 2**16)
    edge = b.get("edge_ratio", float, 400.0)
    span = b.get("span", float, 403.0)
    eps_ratio = b.get("regulator_ratio", float, 0.05)
    window = b.get("window", str, "raised_cosine")
    fit = b.get("fit_window_ratio", list, [0.5, 3.0])
    tol = b.get("kappa_tolerance", float, 0.05)
    stride = b.get("wavenumber_stride", int, 64)
    b.close()
    if len(fit) != 2:
        raise ValidationError(f"{b.path}.fit_window_ratio", "expected two numbers")
    if stride < 1:
        raise ValidationError(f"{b.path}.wavenumber_stride", "must be >= 1")
    rows = []
    for i, kappa in enumerate(kappas):
        def make(ratio):
            return hz.horizon_params(kappa, k0, n_points, edge, span, regulator=ratio * kappa,
                                     window=window, fit_window=(fit[0] * kappa, fit[1] * kappa))
        p = make(eps_ratio)
        psi = hz.chirped_wave(p)
        try:
            rep = hz.thermal_spectrum(psi, p)
            half = make(eps_ratio / 2)
            rep_half = hz.thermal_spectrum(hz.chirped_wave(half), half)
        except hz.DegenerateFitError as exc:
            raise ContractError(f"kappa={kappa}: {exc}") from exc
        suffix = "" if len(kappas) == 1 else f"_{i}"
        _write_csv(ctx["out"] / f"spectrum{suffix}.csv", ("omega", "power_pos", "power_neg", "log_ratio"),
                   zip(rep.omega, rep.power_pos, rep.power_neg, rep.log_ratio))
        x, k_ode = hz.solve_boundary_ode(p)
        k_num = hz.local_wavenumber(psi)
        _write_csv(ctx["out"] / f"wavenumber{suffix}.csv", ("x", "k_numeric", "k_ode"),
                   zip(x[::stride], k_num[::stride], k_ode[::stride]))
        if ctx["emit"]:
            dump_field(ctx["out"] / f"chirp{suffix}.dmf", psi)
        drift = abs(rep_half.kappa_fit - rep.kappa_fit) / rep.kappa_fit
        rows.append((kappa, rep.kappa_fit, abs(rep.kappa_fit - kappa) / kappa, rep.fit_residual,
                     p.regulator, rep_half.kappa_fit, drift))
    _write_csv(ctx["out"] / "kappa_fit.csv",
               ("kappa", "kappa_fit", "rel_err", "fit_residual", "regulator",
                "kappa_fit_half_regulator", "regulator_drift"), rows)
    worst = max(r[2] for r in rows)
    if worst > tol:
        raise ContractError(f"kappa_fit relative error {worst:.3g} exceeds {tol:g}")
    return "horizon: " + ", ".join(f"kappa={r[0]:g} fit={r[1]:.6g}" for r in rows)


def _selfcheck(ctx) -> str:
    corrupt = os.environ.get("DUALWAVE_SELFCHECK_CORRUPT", "") == "sign"
    results = run_selfcheck(corrupt_sign=corrupt)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    if ctx["out"] is not None:
        _write_csv(ctx["out"] / "selfcheck.csv", ("check", "passed", "detail"),
                   [(r.name, int(r.passed), r.detail) for r in results])
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise ContractError("failed checks: " + ", ".join(failed))
    return f"selfcheck: {len(results)} checks passed (backend {BACKEND})"


_RUNNERS = {"evolve-xt": _evolve_xt, "evolve-ke": _evolve_ke,
            "dark-energy": _dark_energy, "horizon": _horizon}


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} is not a mapping")
    return data


def run(command: str, config_path: str | None, out: str | None = None,
        seed: int | None = None) -> int:
    """Execute ``command``; returns the process exit code."""
    try:
        data = _load_config(config_path) if config_path is not None else {}
        if command != "selfcheck" and config_path is None:
            raise ConfigError("--config is required")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        top = _Block(data, "")
        cfg_cmd = top.get("command", str, command)
        if cfg_cmd != command:
            raise ValidationError("command", f"config is for {cfg_cmd!r}, not {command!r}")
        out_dir = out if out is not None else top.get("output_dir", str, None)
        if out is not None:
            top.get("output_dir", str, None)
        cfg_seed = top.get("seed", int, 0)
        if seed is not None:
            cfg_seed = seed
            top.resolved["seed"] = seed
        if not 0 <= cfg_seed < 2**64:
            raise ValidationError("seed", "must fit in 64 unsigned bits")
        emit = top.get("emit_fields", bool, False)
        hbar = top.get("hbar", float, 1.0)
        PhysParams(hbar)
        others = [c for c in _RUNNERS if c != command and _block_name(c) in data]
        if others:
            raise ValidationError(_block_name(others[0]), f"block does not belong to command {command!r}")
        if command == "selfcheck":
            top.close()
            ctx = {"out": None, "seed": cfg_seed, "emit": emit, "hbar": hbar}
            if out_dir is not None:
                ctx["out"] = _prepare_out(out_dir)
            summary = _selfcheck(ctx)
        else:
            block = top.sub(_block_name(command))
            top.close()
            if out_dir is None:
                raise ValidationError("output_dir", "missing (set it in the config or pass --out)")
            ctx = {"out": _prepare_out(out_dir), "seed": cfg_seed, "emit": emit, "hbar": hbar}
            summary = _RUNNERS[command](block, ctx)
        if ctx["out"] is not None:
            # the echo lives in output_dir, so leaving the path out keeps runs relocatable
            echo = {k: v for k, v in top.resolved.items() if k != "output_dir"}
            with open(ctx["out"] / "resolved_config.yaml", "w") as fh:
                yaml.safe_dump(dict(echo, command=command), fh, sort_keys=True)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    print(summary)
    return EXIT_OK


def _prepare_out(path: str) -> Path:
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
        probe = p / ".write-probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise ValidationError("output_dir", f"not writable: {exc}") from None
    return p


def _u64(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="dualwave", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="YAML run configuration")
    ap.add_argument("--out", help="output directory (overrides output_dir)")
    ap.add_argument("--seed", type=_u64, help="64-bit master seed (overrides seed)")
    args = ap.parse_args(argv)
    return run(args.command, args.config, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
