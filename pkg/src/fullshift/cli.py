"""Experiment runner: JSON config in, CSV tables and SVG plots out.

Subcommands::

    fullshift run CONFIG.json [--out-dir DIR] [--seed N]
                              [--q-min X] [--q-max X] [--grid-points N]
    fullshift preset NAME [same flags]
    fullshift list-presets

Config schema (all keys optional except "pair" for ``run``; unknown keys are
rejected)::

    {
      "pair": {
        "phi": {"family": "power_log", "a": 1.2, "b": 2.0, "c": 2.0,
                "normalize": true},
        "psi": {"family": "gauss_metric"}
      },
      "q_min": -6.0, "q_max": 8.0,
      "grid_points": 257,
      "outputs": ["temperature_curve", "spectrum_curve",
                   "transition_report", "dimension_check"],
      "dimension_check": {"q": 0.0, "samples": 10000, "digits": 10000},
      "seed": 0
    }

phi families: "shifted_power" (a [, scale]), "power_log" (a, b, c [, scale]),
"geometric" (r), "spiked_power_log" (a, b, c, k, spike_scale),
"piecewise_partition" (classes: [{power, l, M, coeff}, ...]).
psi families: "gauss_metric", "power_log" (with scale < 1).
Omitting "scale" (or setting "normalize": true) normalizes the weights.

CSV outputs use UNIX newlines and 17 significant digits; re-running a config
reproduces them byte for byte.  SVG plots are cosmetic and excluded from the
determinism guarantee.  Exit codes: 0 success, 2 config error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .gauss import HeavyTailError, sample_dimension
from .potentials import (
    GaussMetric,
    Geometric,
    PartitionClass,
    PiecewisePartition,
    PotentialPair,
    PowerLog,
    ShiftedPower,
    Sign,
    SpikedPowerLog,
    SymbolPotential,
    alpha_lim,
    normalize,
)
from .presets import PRESETS, preset_pair
from .pressure import t_tilde
from .spectrum import GridSpec, phase_transitions, spectrum_curve
from .temperature import Regime, temperature_grid
from .series import SeriesBudgetExceeded

__all__ = ["ConfigError", "ExperimentConfig", "run", "list_presets", "main"]

ALL_OUTPUTS = ("temperature_curve", "spectrum_curve", "transition_report", "dimension_check")
DEFAULT_OUTPUTS = ("temperature_curve", "spectrum_curve", "transition_report")


class ConfigError(ValueError):
    """Invalid experiment configuration (reported with exit code 2)."""


@dataclass
class DimensionCheck:
    q: float = 0.0
    samples: int = 10_000
    digits: int = 10_000


@dataclass
class ExperimentConfig:
    """Validated experiment description."""

    pair: PotentialPair
    q_min: float = -6.0
    q_max: float = 8.0
    grid_points: int = 257
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS
    dimension: DimensionCheck = field(default_factory=DimensionCheck)
    seed: int = 0


def _need(mapping: dict, key: str, ctx: str):
    if key not in mapping:
        raise ConfigError(f"{ctx}: missing required field {key!r}")
    return mapping[key]


def _reject_unknown(mapping: dict, allowed: set[str], ctx: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{ctx}: unknown field(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _build_family(spec: dict, ctx: str):
    name = _need(spec, "family", ctx)
    want_norm = bool(spec.get("normalize", "scale" not in spec))
    if name == "gauss_metric":
        _reject_unknown(spec, {"family"}, ctx)
        return GaussMetric(), False
    if name == "shifted_power":
        _reject_unknown(spec, {"family", "a", "scale", "normalize"}, ctx)
        return ShiftedPower(a=float(_need(spec, "a", ctx)), scale=float(spec.get("scale", 1.0))), want_norm
    if name == "power_log":
        _reject_unknown(spec, {"family", "a", "b", "c", "scale", "normalize"}, ctx)
        return (
            PowerLog(
                a=float(_need(spec, "a", ctx)),
                b=float(spec.get("b", 0.0)),
                c=float(spec.get("c", 2.0)),
                scale=float(spec.get("scale", 1.0)),
            ),
            want_norm,
        )
    if name == "geometric":
        _reject_unknown(spec, {"family", "r", "scale", "normalize"}, ctx)
        return Geometric(r=float(_need(spec, "r", ctx)), scale=float(spec.get("scale", 1.0))), want_norm
    if name == "spiked_power_log":
        _reject_unknown(spec, {"family", "a", "b", "c", "k", "spike_scale", "scale", "normalize"}, ctx)
        base = PowerLog(
            a=float(_need(spec, "a", ctx)),
            b=float(spec.get("b", 0.0)),
            c=float(spec.get("c", 2.0)),
            scale=float(spec.get("scale", 1.0)),
        )
        fam = SpikedPowerLog(base=base, k=int(spec.get("k", 2)), spike_scale=float(_need(spec, "spike_scale", ctx)))
        return fam, want_norm
    if name == "piecewise_partition":
        _reject_unknown(spec, {"family", "classes", "scale", "normalize"}, ctx)
        classes = []
        for i, cspec in enumerate(_need(spec, "classes", ctx)):
            _reject_unknown(cspec, {"power", "l", "M", "coeff"}, f"{ctx}.classes[{i}]")
            classes.append(
                PartitionClass(
                    power=int(_need(cspec, "power", f"{ctx}.classes[{i}]")),
                    l=float(_need(cspec, "l", f"{ctx}.classes[{i}]")),
                    M=float(_need(cspec, "M", f"{ctx}.classes[{i}]")),
                    coeff=float(cspec.get("coeff", 1.0)),
                )
            )
        return PiecewisePartition(classes=tuple(classes), scale=float(spec.get("scale", 1.0))), want_norm
    raise ConfigError(f"{ctx}: unknown family {name!r}")


def parse_config(raw: dict) -> ExperimentConfig:
    _reject_unknown(
        raw,
        {"pair", "q_min", "q_max", "grid_points", "outputs", "dimension_check", "seed"},
        "config",
    )
    pair_spec = _need(raw, "pair", "config")
    _reject_unknown(pair_spec, {"phi", "psi"}, "config.pair")
    phi_fam, phi_norm = _build_family(_need(pair_spec, "phi", "config.pair"), "config.pair.phi")
    psi_fam, _ = _build_family(_need(pair_spec, "psi", "config.pair"), "config.pair.psi")
    try:
        phi = SymbolPotential(phi_fam, Sign.NEGATIVE_POTENTIAL)
        if phi_norm:
            phi = normalize(phi)
        pair = PotentialPair(phi=phi, psi=SymbolPotential(psi_fam, Sign.POSITIVE_METRIC))
    except ValueError as exc:
        raise ConfigError(f"config.pair: {exc}") from exc

    outputs = tuple(raw.get("outputs", DEFAULT_OUTPUTS))
    for out in outputs:
        if out not in ALL_OUTPUTS:
            raise ConfigError(f"config.outputs: unknown output {out!r}; allowed: {list(ALL_OUTPUTS)}")

    dim_raw = raw.get("dimension_check", {})
    _reject_unknown(dim_raw, {"q", "samples", "digits"}, "config.dimension_check")
    dim = DimensionCheck(
        q=float(dim_raw.get("q", 0.0)),
        samples=int(dim_raw.get("samples", 10_000)),
        digits=int(dim_raw.get("digits", 10_000)),
    )

    cfg = ExperimentConfig(
        pair=pair,
        q_min=float(raw.get("q_min", -6.0)),
        q_max=float(raw.get("q_max", 8.0)),
        grid_points=int(raw.get("grid_points", 257)),
        outputs=outputs,
        dimension=dim,
        seed=int(raw.get("seed", 0)),
    )
    if not cfg.q_min < cfg.q_max:
        raise ConfigError("config: q_min must be below q_max")
    if cfg.grid_points < 64:
        raise ConfigError("config: grid_points must be at least 64")
    return cfg


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "n/a"
    if isinstance(x, float) and math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _plot(path: Path, xs, ys, xlabel: str, ylabel: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    finite = [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    if finite:
        ax.plot([p[0] for p in finite], [p[1] for p in finite], lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _atan_grid(q_min: float, q_max: float, n: int) -> np.ndarray:
    th = np.linspace(math.atan(q_min), math.atan(q_max), n)
    qs = np.tan(th)
    if q_min < 0.0 < q_max:
        qs = np.unique(np.append(qs, 0.0))
    return qs


def run(cfg: ExperimentConfig, out_dir: Path) -> int:
    """Execute the configured outputs; returns the process exit code."""
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = GridSpec(points=cfg.grid_points, q_min=cfg.q_min, q_max=cfg.q_max)

    if "temperature_curve" in cfg.outputs:
        qs = _atan_grid(cfg.q_min, cfg.q_max, cfg.grid_points)
        rows = []
        results = temperature_grid(cfg.pair, qs)
        for r in results:
            try:
                tt = t_tilde(cfg.pair, r.q)
            except Exception:
                tt = math.nan
            rows.append([r.q, r.T, tt, r.regime.value, r.alpha])
        _write_csv(out_dir / "temperature_curve.csv", ["q", "T", "t_tilde", "regime", "alpha"], rows)
        _plot(out_dir / "temperature_curve.svg", [r[0] for r in rows], [r[1] for r in rows], "q", "T(q)")

    curve = None
    if "spectrum_curve" in cfg.outputs or "transition_report" in cfg.outputs:
        curve = spectrum_curve(cfg.pair, grid)
    if "spectrum_curve" in cfg.outputs:
        rows = [[p.alpha, p.f, p.q_star, p.branch.value] for p in curve]
        _write_csv(out_dir / "spectrum_curve.csv", ["alpha", "f", "q_star", "branch"], rows)
        _plot(out_dir / "spectrum_curve.svg", [p.alpha for p in curve], [p.f for p in curve], "alpha", "f(alpha)")

    if "transition_report" in cfg.outputs:
        rep = phase_transitions(cfg.pair, curve, grid)
        rows = [[tr.alpha, f"order-{tr.order}", tr.label] for tr in rep.transitions]
        _write_csv(out_dir / "transitions.csv", ["alpha_location", "kind", "label"], rows)
        plural = "" if rep.count == 1 else "s"
        print(f"{rep.count} phase transition{plural}: {rep.case_label}")
        for tr in rep.transitions:
            print(f"  alpha = {tr.alpha:.9g} (order {tr.order}): {tr.label}")
        if not rep.concave_ok:
            print("invariant violation: sampled spectrum is not concave", file=sys.stderr)
            return 3

    if "dimension_check" in cfg.outputs:
        try:
            est = sample_dimension(
                cfg.pair, cfg.dimension.q, cfg.dimension.samples, cfg.dimension.digits, seed=cfg.seed
            )
            from .temperature import alpha_of_q

            alpha_exact = alpha_of_q(cfg.pair, cfg.dimension.q)
            rows = [[cfg.dimension.q, est.mean, est.std_error, alpha_exact, est.samples, est.digits_per_sample, cfg.seed]]
            print(
                f"dimension check at q={cfg.dimension.q:g}: sampled {est.mean:.6f} "
                f"(se {est.std_error:.2e}) vs alpha(q) {alpha_exact:.6f}"
            )
        except (HeavyTailError, SeriesBudgetExceeded) as exc:
            rows = [[cfg.dimension.q, "n/a", "n/a", "n/a", cfg.dimension.samples, cfg.dimension.digits, cfg.seed]]
            print(f"dimension check skipped: {exc}")
        _write_csv(
            out_dir / "dimension_check.csv",
            ["q", "mean", "std_error", "alpha_exact", "samples", "digits_per_sample", "seed"],
            rows,
        )
    return 0


def list_presets() -> str:
    lines = [f"{name}: {p.summary}" for name, p in PRESETS.items()]
    return "\n".join(lines)


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.q_min is not None:
        cfg.q_min = args.q_min
    if args.q_max is not None:
        cfg.q_max = args.q_max
    if args.grid_points is not None:
        cfg.grid_points = args.grid_points
    if not cfg.q_min < cfg.q_max:
        raise ConfigError("q_min must be below q_max")
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="fullshift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out-dir", type=Path, default=Path("fullshift-out"))
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--q-min", type=float, default=None)
        p.add_argument("--q-max", type=float, default=None)
        p.add_argument("--grid-points", type=int, default=None)

    p_run = sub.add_parser("run", help="run a JSON experiment config")
    p_run.add_argument("config", type=Path)
    add_common(p_run)

    p_preset = sub.add_parser("preset", help="run a built-in preset")
    p_preset.add_argument("name", choices=list(PRESETS))
    p_preset.add_argument("--with-dimension-check", action="store_true")
    add_common(p_preset)

    sub.add_parser("list-presets", help="list the built-in presets")

    args = parser.parse_args(argv)
    try:
        if args.command == "list-presets":
            print(list_presets())
            return 0
        if args.command == "run":
            try:
                raw = json.loads(args.config.read_text())
            except FileNotFoundError:
                raise ConfigError(f"config file not found: {args.config}")
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
            cfg = _apply_overrides(parse_config(raw), args)
            return run(cfg, args.out_dir)
        # preset
        preset = PRESETS[args.name]
        outputs = DEFAULT_OUTPUTS + (("dimension_check",) if args.with_dimension_check else ())
        cfg = ExperimentConfig(
            pair=preset_pair(args.name),
            q_min=preset.q_min,
            q_max=preset.q_max,
            outputs=outputs,
            dimension=DimensionCheck(q=preset.dimension_q),
        )
        cfg = _apply_overrides(cfg, args)
        return run(cfg, args.out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
