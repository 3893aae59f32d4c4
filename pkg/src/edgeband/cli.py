"""Command-line harness: config ingestion, dispatch, CSV/JSON/SVG emission.

Usage:  edgeband <command> --config <path> [--out <dir>] [--plots]

Commands: bands, dirac-point, zero-mode, e2, edge-state, bifurcation, verify.
Reruns with an identical config produce byte-identical outputs; the resolved
configuration (all defaults made explicit) is written next to the artifacts
and reproduces the run when fed back in.

Exit codes: 0 success, 1 bad configuration, 2 no spectral gap, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .bloch import band_sweep, write_band_csv
from .dirac import certificate_json_dict, certify_dirac_point
from .dirac1d import DiracSpec, write_zero_mode_csv, zero_mode
from .edge import (
    bifurcation_sweep,
    find_edge_states,
    write_bifurcation_csv,
    write_eigenvector_csv,
)
from .errors import ConvergenceError, EdgebandError, NoGapError
from .multiscale import compute_E2, solve_corrector
from .potentials import ModulatedPotential
from .svg import Figure

__all__ = ["main", "run", "RunConfig", "ConfigError"]

COMMANDS = ("bands", "dirac-point", "zero-mode", "e2", "edge-state", "bifurcation", "verify")

DEFAULTS = {
    "potential": {
        "even": [],
        "odd": [[1, 2.0], [3, 2.0], [5, 2.0]],
        "constant": 0.0,
        "wall": {"kind": "tanh", "kappa_inf": 1.0, "scale": 1.0},
        "delta": 1.0,
    },
    "n": 0,
    "points": [0],
    "M": 16,
    "k_samples": 65,
    "n_bands": 6,
    "tol": 1e-8,
    "delta_list": [0.5, 1.0, 2.0, 5.0],
    "h": 1.0 / 64.0,
    "L": None,
    "X_max": None,
    "N": 4096,
    "out_dir": "edgeband-out",
    "plots": False,
}


class ConfigError(Exception):
    """Configuration does not match the expected schema."""


class RunConfig:
    """Validated run configuration with every default made explicit."""

    def __init__(self, data: dict):
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged = {**DEFAULTS, **data}
        pot = {**DEFAULTS["potential"], **merged["potential"]}
        unknown_p = set(pot) - set(DEFAULTS["potential"])
        if unknown_p:
            raise ConfigError(f"unknown potential keys: {sorted(unknown_p)}")
        merged["potential"] = pot
        for key, kind in (
            ("n", int), ("M", int), ("k_samples", int), ("n_bands", int), ("N", int),
        ):
            if not isinstance(merged[key], int):
                raise ConfigError(f"config key {key!r} must be an integer")
        try:
            self.potential = ModulatedPotential.from_json_dict(pot)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"bad potential fragment: {exc}") from exc
        self.data = merged

    def __getitem__(self, key):
        return self.data[key]

    def resolved_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"


def _json_dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _cmd_bands(cfg: RunConfig, out: Path, plots: bool) -> None:
    pot = cfg.potential
    Q = pot.V
    if pot.delta > 0.0 and pot.W.harmonics:
        Q = pot.V + pot.W.scaled(pot.delta * pot.wall.kappa_plus)
    M = max(cfg["M"], Q.max_harmonic + 2)
    bs = band_sweep(Q, cfg["k_samples"], M, cfg["n_bands"])
    write_band_csv(bs, str(out / "bands.csv"))
    if plots:
        fig = Figure(title="Floquet-Bloch bands", xlabel="k", ylabel="E")
        for b in range(bs.n_bands):
            fig.line(bs.k_grid, bs.bands[:, b])
        fig.save(str(out / "bands.svg"))


def _certificate(cfg: RunConfig, n: int | None = None):
    pot = cfg.potential
    W = pot.W if pot.W.harmonics else None
    return certify_dirac_point(
        pot.V, cfg["n"] if n is None else n, cfg["M"], tol=cfg["tol"], W=W
    )


def _cmd_dirac_point(cfg: RunConfig, out: Path, plots: bool) -> None:
    cert = _certificate(cfg)
    _json_dump(certificate_json_dict(cert), out / "certificate.json")


def _zero_mode(cfg: RunConfig):
    cert = _certificate(cfg)
    if cert.theta_sharp is None:
        raise ConfigError("zero-mode and e2 need an odd-index W in the potential")
    spec = DiracSpec(cert.lambda_sharp, cert.theta_sharp, cfg.potential.wall)
    zm = zero_mode(spec, X_max=cfg["X_max"], N=cfg["N"])
    return cert, zm


def _cmd_zero_mode(cfg: RunConfig, out: Path, plots: bool) -> None:
    _, zm = _zero_mode(cfg)
    write_zero_mode_csv(zm, str(out / "zero_mode.csv"))
    if plots:
        fig = Figure(title="Dirac zero mode", xlabel="X", ylabel="amplitude")
        fig.line(zm.X, np.abs(zm.comp1))
        fig.line(zm.X, np.real(zm.comp1))
        fig.save(str(out / "zero_mode.svg"))


def _cmd_e2(cfg: RunConfig, out: Path, plots: bool) -> None:
    cert, zm = _zero_mode(cfg)
    corr = solve_corrector(cert, cfg.potential.W, zm)
    e2 = compute_E2(cert, corr, zm)
    _json_dump(
        {"E2": e2.value, "imag_residual": e2.imag_residual, "terms": e2.n_terms},
        out / "e2.json",
    )


def _cmd_edge_state(cfg: RunConfig, out: Path, plots: bool) -> None:
    pot = cfg.potential
    if pot.delta <= 0:
        raise ConfigError("edge-state needs delta > 0 in the potential")
    cert = _certificate(cfg)
    states = find_edge_states(
        pot.V, pot.W, pot.wall, pot.delta, cert, h=cfg["h"], L=cfg["L"]
    )
    summary = {
        "delta": pot.delta,
        "gap": list(states[0].gap) if states else None,
        "energies": [s.energy for s in states],
    }
    _json_dump(summary, out / "edge_states.json")
    for i, s in enumerate(states):
        write_eigenvector_csv(s, str(out / f"edge_state_{i}.csv"))
    if plots and states:
        fig = Figure(title="Mid-gap edge state", xlabel="x", ylabel="psi")
        fig.line(states[0].grid.x, states[0].psi)
        fig.save(str(out / "edge_state.svg"))


def _cmd_bifurcation(cfg: RunConfig, out: Path, plots: bool) -> None:
    pot = cfg.potential
    certs = [_certificate(cfg, n) for n in cfg["points"]]
    diag = bifurcation_sweep(
        pot.V, pot.W, pot.wall, cfg["delta_list"], certs, h=cfg["h"], L=cfg["L"]
    )
    write_bifurcation_csv(diag, str(out / "bifurcation.csv"))
    if plots:
        fig = Figure(title="Bifurcation diagram", xlabel="E", ylabel="delta")
        for rec in diag.records:
            if rec.gap is not None:
                fig.markers([rec.gap[0], rec.gap[1]], [rec.delta, rec.delta],
                            color="#bbbbbb", radius=2.0)
            fig.markers(list(rec.energies), [rec.delta] * len(rec.energies),
                        color="#d62728", radius=3.0)
        fig.save(str(out / "bifurcation.svg"))


def _cmd_verify(cfg: RunConfig, out: Path, plots: bool) -> int:
    results = acceptance.run_all()
    report = acceptance.format_report(results)
    (out / "verify_report.txt").write_text(report + "\n")
    print(report)
    return 0 if all(r.passed for r in results) else 1


def run(command: str, cfg: RunConfig, out_dir: str | None = None, plots: bool | None = None) -> int:
    """Dispatch one command; returns the process exit status."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    out = Path(out_dir if out_dir is not None else cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    use_plots = cfg["plots"] if plots is None else plots
    (out / "resolved_config.json").write_text(cfg.resolved_json())
    if command == "verify":
        return _cmd_verify(cfg, out, use_plots)
    handler = {
        "bands": _cmd_bands,
        "dirac-point": _cmd_dirac_point,
        "zero-mode": _cmd_zero_mode,
        "e2": _cmd_e2,
        "edge-state": _cmd_edge_state,
        "bifurcation": _cmd_bifurcation,
    }[command]
    handler(cfg, out, use_plots)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="edgeband",
        description="Band structures, Dirac points, and edge states of modulated Hill operators",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON config file (defaults used when omitted)")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--plots", action="store_true", help="also emit SVG plots")
    args = parser.parse_args(argv)
    try:
        data = {}
        if args.config:
            data = json.loads(Path(args.config).read_text())
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = RunConfig(data)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return run(args.command, cfg, out_dir=args.out, plots=args.plots or None)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NoGapError as exc:
        print(f"no gap: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, EdgebandError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
