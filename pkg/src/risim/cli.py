"""Batch command-line front end.

Four workflows: `pattern` (radiation cut CSV + lobe metrics), `localize`
(codebook sweep traces + estimates), `linkbudget` (received-power report),
and `export-frame` (shift-chain bitstream). Every command is deterministic
for fixed config, flags, and seed. Exit codes: 0 success, 2 configuration
error, 3 domain error.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from .config import load_config, with_seed
from .errors import ConfigError, DomainError
from .geometry import Direction
from .hardware import serialize_mask, write_frame
from .localization import estimate_angle, rmse, simulate_sweep, write_sweep_csv
from .masks import farfield_steering_mask, nearfield_steering_mask
from .patterns import (
    array_factor_far,
    default_theta_grid,
    pattern_metrics,
    pattern_nearfield,
    write_pattern_csv,
)
from .linkbudget import received_power


def _workflow(func):
    """Map domain/config failures to the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except DomainError as exc:
            click.echo(f"domain error: {exc}", err=True)
            sys.exit(3)

    return wrapper


def _csv_and_json_paths(out: str) -> tuple[str, str]:
    base = out[:-4] if out.endswith(".csv") else out
    return base + ".csv", base + ".metrics.json"


def _steering_mask(cfg, mode: str, steer: Direction):
    geom = cfg.array_geometry()
    if mode == "near":
        return nearfield_steering_mask(geom, cfg.feed_spec().position, steer, cfg.wavelength)
    return farfield_steering_mask(geom, steer, cfg.wavelength)


@click.group()
def main() -> None:
    """Simulator for a 1-bit coding reconfigurable intelligent surface."""


@main.command("pattern")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Scenario YAML.")
@click.option("--mode", type=click.Choice(["far", "near"]), default="far", show_default=True)
@click.option("--steer", type=float, default=0.0, show_default=True, help="Steer angle, degrees.")
@click.option("--out", default="pattern.csv", show_default=True, help="Output CSV path.")
@_workflow
def cmd_pattern(config_path, mode, steer, out) -> None:
    """Compute a radiation cut for a 1-bit steering mask."""
    cfg = load_config(config_path)
    steer_dir = Direction.from_signed_theta(steer)
    mask = _steering_mask(cfg, mode, steer_dir)
    geom = cfg.array_geometry()
    grid = default_theta_grid()
    if mode == "near":
        cut = pattern_nearfield(
            geom, mask, cfg.unit_cell(), cfg.feed_spec(), cfg.cell.q_e, 0.0, grid, cfg.wavelength
        )
    else:
        cut = array_factor_far(
            geom, mask, cfg.unit_cell(), Direction(0.0), 0.0, grid, cfg.wavelength
        )
    metrics = pattern_metrics(cut)
    csv_path, json_path = _csv_and_json_paths(out)
    write_pattern_csv(
        cut,
        csv_path,
        {
            "mode": mode,
            "steer_deg": steer,
            "phi_plane_deg": 0.0,
            "frequency_hz": cfg.frequency_hz,
        },
    )
    with open(json_path, "w") as fh:
        json.dump(
            {
                "mode": mode,
                "steer_deg": steer,
                "main_lobe_deg": metrics.main_lobe_deg,
                "peak_db_raw": metrics.peak_db_raw,
                "mirror_lobe_db": metrics.mirror_lobe_db,
                "sidelobe_level_db": metrics.sidelobe_level_db,
                "degenerate": metrics.degenerate,
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    click.echo(
        f"{mode} cut steered to {steer:g} deg: main lobe {metrics.main_lobe_deg:g} deg, "
        f"mirror {metrics.mirror_lobe_db:.2f} dB, SLL {metrics.sidelobe_level_db:.2f} dB "
        f"-> {csv_path}"
    )


@main.command("localize")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Scenario YAML.")
@click.option("--truths", default="30,45", show_default=True, help="Comma-separated true angles.")
@click.option("--seed", type=int, default=None, help="Override the sweep seed.")
@click.option("--out", default="localize", show_default=True, help="Output base path.")
@_workflow
def cmd_localize(config_path, truths, seed, out) -> None:
    """Sweep the codebook against each true user angle and estimate it."""
    cfg = load_config(config_path)
    if seed is not None:
        cfg = with_seed(cfg, seed)
    try:
        truth_values = [float(t) for t in truths.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse --truths {truths!r}: {exc}") from exc
    if not truth_values:
        raise ConfigError("--truths must name at least one angle")
    sweep = cfg.sweep
    for t in truth_values:
        if not (sweep.start_deg <= t <= sweep.stop_deg):
            raise DomainError(
                f"truth {t:g} outside the codebook field of view "
                f"[{sweep.start_deg:g}, {sweep.stop_deg:g}]"
            )
    codebook = cfg.steering_codebook()
    scenario = cfg.link_scenario()
    noise = cfg.noise_model()
    estimates = []
    for i, truth in enumerate(truth_values):
        # distinct deterministic substream per truth
        truth_seed = sweep.seed + i
        trace = simulate_sweep(codebook, Direction(truth), scenario, noise, seed=truth_seed)
        est = estimate_angle(trace)
        estimates.append(est)
        write_sweep_csv(
            trace,
            f"{out}.truth{truth:g}.csv",
            {
                "truth_deg": truth,
                "seed": truth_seed,
                "noise": f"{noise.kind} (sigma_db={noise.sigma_db:g})",
            },
        )
    errors = [e - t for e, t in zip(estimates, truth_values)]
    summary = {
        "truths_deg": truth_values,
        "estimates_deg": estimates,
        "errors_deg": errors,
        "rmse_deg": rmse(estimates, truth_values),
        "codebook": {
            "start_deg": sweep.start_deg,
            "stop_deg": sweep.stop_deg,
            "step_deg": sweep.step_deg,
            "entries": len(codebook),
        },
        "noise": {"kind": noise.kind, "sigma_db": noise.sigma_db},
        "seed": sweep.seed,
    }
    with open(f"{out}.summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    for truth, est, err in zip(truth_values, estimates, errors):
        click.echo(f"truth {truth:6.2f} deg -> estimate {est:6.2f} deg (error {err:+.2f})")
    click.echo(f"rmse {summary['rmse_deg']:.3f} deg -> {out}.summary.json")


@main.command("linkbudget")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Scenario YAML.")
@click.option("--out", default="linkbudget.json", show_default=True, help="Output JSON path.")
@_workflow
def cmd_linkbudget(config_path, out) -> None:
    """Received-power accounting for the configured scenario."""
    cfg = load_config(config_path)
    report = received_power(cfg.link_scenario())
    with open(out, "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    click.echo(report.table())
    click.echo(f"-> {out}")


@main.command("export-frame")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Scenario YAML.")
@click.option("--mode", type=click.Choice(["far", "near"]), default="far", show_default=True)
@click.option("--steer", type=float, default=0.0, show_default=True, help="Steer angle, degrees.")
@click.option("--out", default="frame.hex", show_default=True, help="Output frame path.")
@_workflow
def cmd_export_frame(config_path, mode, steer, out) -> None:
    """Serialize a steering mask into the 20-octet shift-chain frame."""
    cfg = load_config(config_path)
    steer_dir = Direction.from_signed_theta(steer)
    frame = serialize_mask(_steering_mask(cfg, mode, steer_dir))
    write_frame(
        frame,
        out,
        {"mode": mode, "steer_deg": steer, "frequency_hz": cfg.frequency_hz},
    )
    click.echo(f"{frame.to_hex()} -> {out}")


if __name__ == "__main__":
    main()
