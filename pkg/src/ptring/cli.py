"""Command-line interface: solve, sweep, classify and reproduce figure datasets.

Every command writes deterministic CSV/JSON datasets into --out; the
reproduce-figure command renders matplotlib figures next to its datasets.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.  Partial
outputs are removed when a command fails.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import ConfigError, NumericalError, RingConfig, tolerances_from_env
from .oracle import solve_spectrum
from .report import (
    FIGURE_IDS,
    OutputSession,
    asymptotics_json,
    directionality_json,
    events_json,
    flux_classes_json,
    flux_rows,
    reproduce_figure,
    singular_json,
    spectrum_rows,
    sweep_rows,
    write_csv,
    write_json,
)
from .singular import accidental_singular, structural_singular
from .sweep import detect_events, pt_threshold, sweep_spectrum

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _config_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(path_type=Path),
                      default=None, help="JSON file with the ring configuration.")(fn)
    fn = click.option("--n", "n_sites", type=int, default=None, help="Ring size N.")(fn)
    fn = click.option("--k", type=int, default=1, show_default=True, help="Gain site.")(fn)
    fn = click.option("--kp", type=int, default=None, help="Loss site k' (> k).")(fn)
    fn = click.option("--a", type=float, default=0.0, show_default=True,
                      help="Onsite energy at the leads (PT mode).")(fn)
    fn = click.option("--eta", type=float, default=0.0, show_default=True,
                      help="Gain/loss strength (PT mode).")(fn)
    fn = click.option("--general", is_flag=True,
                      help="Use independent complex defects instead of PT mode.")(fn)
    fn = click.option("--alpha-re", type=float, default=0.0)(fn)
    fn = click.option("--alpha-im", type=float, default=0.0)(fn)
    fn = click.option("--beta-re", type=float, default=0.0)(fn)
    fn = click.option("--beta-im", type=float, default=0.0)(fn)
    return fn


def _build_config(config_path, n_sites, k, kp, a, eta, general,
                  alpha_re, alpha_im, beta_re, beta_im) -> RingConfig:
    if config_path is not None:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration {config_path}: {exc}") from exc
        return RingConfig.from_json_dict(data)
    if n_sites is None or kp is None:
        raise ConfigError("either --config or both --n and --kp are required")
    if general:
        return RingConfig(n_sites, k, kp, complex(alpha_re, alpha_im), complex(beta_re, beta_im))
    return RingConfig.pt(n_sites, k, kp, a, eta)


def _run_guarded(body):
    """Run a command body, mapping failures to exit codes and removing any
    partial output the body registered on its session."""
    holder: dict[str, OutputSession | None] = {"session": None}
    try:
        body(holder)
    except (ConfigError, OSError) as exc:
        code, msg = EXIT_CONFIG, str(exc)
    except NumericalError as exc:
        code, msg = EXIT_NUMERICAL, str(exc)
    except Exception:
        if holder["session"] is not None:
            holder["session"].cleanup()
        raise
    else:
        return
    if holder["session"] is not None:
        holder["session"].cleanup()
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


@click.group()
def main() -> None:
    """Spectra, singularities and transport of the gain/loss ring."""


@main.command()
@_config_options
@click.option("--out", "outdir", type=click.Path(path_type=Path), default=Path("."),
              show_default=True, help="Output directory.")
@click.option("--formats", default="csv,json", show_default=True,
              help="Comma-separated subset of {csv,json}.")
def spectrum(outdir, formats, **cfg_kwargs) -> None:
    """Solve one configuration and write the eigenpair table."""
    tols = tolerances_from_env()

    def body(holder):
        cfg = _build_config(**cfg_kwargs)
        fmts = _parse_formats(formats)
        session = holder["session"] = OutputSession(outdir)
        pairs = solve_spectrum(cfg, tols)
        if "csv" in fmts:
            write_csv(session.path("spectrum.csv"), *spectrum_rows(pairs, tols))
        if "json" in fmts:
            write_json(session.path("spectrum.json"), {
                "config": cfg.to_json_dict(),
                "energies": [[p.energy.real, p.energy.imag] for p in pairs],
            })
        click.echo(f"wrote spectrum for N={cfg.n_sites} to {session.outdir}")

    _run_guarded(body)


def _parse_formats(formats: str) -> set[str]:
    fmts = {f.strip() for f in formats.split(",") if f.strip()}
    bad = fmts - {"csv", "json"}
    if bad or not fmts:
        raise ConfigError(f"formats must be a subset of csv,json; got {formats!r}")
    return fmts


@main.command()
@_config_options
@click.option("--eta-min", type=float, default=0.0, show_default=True)
@click.option("--eta-max", type=float, required=True)
@click.option("--points", type=int, default=161, show_default=True)
@click.option("--out", "outdir", type=click.Path(path_type=Path), default=Path("."),
              show_default=True)
@click.option("--formats", default="csv,json", show_default=True)
@click.option("--threshold/--no-threshold", default=True, show_default=True,
              help="Also locate the symmetry-breaking threshold.")
def sweep(eta_min, eta_max, points, outdir, formats, threshold, **cfg_kwargs) -> None:
    """Track the spectrum over a gain/loss range; write branches and events."""
    tols = tolerances_from_env()

    def body(holder):
        cfg = _build_config(**cfg_kwargs)
        fmts = _parse_formats(formats)
        session = holder["session"] = OutputSession(outdir)
        result = sweep_spectrum(cfg, eta_min, eta_max, points, tols)
        events = detect_events(result, tols)
        if "csv" in fmts:
            write_csv(session.path("sweep.csv"), *sweep_rows(result))
        if "json" in fmts:
            payload = {"config": cfg.to_json_dict(), "events": events_json(events)}
            if threshold:
                payload["eta_pt"] = pt_threshold(cfg, tols)
            write_json(session.path("events.json"), payload)
        click.echo(f"tracked {len(result)} branches over "
                   f"[{eta_min:g}, {eta_max:g}]; {len(events)} events")

    _run_guarded(body)


@main.command()
@_config_options
@click.option("--out", "outdir", type=click.Path(path_type=Path), default=Path("."),
              show_default=True)
@click.option("--formats", default="csv,json", show_default=True)
def flux(outdir, formats, **cfg_kwargs) -> None:
    """Stationary bond currents and transport classes of one configuration."""
    tols = tolerances_from_env()

    def body(holder):
        cfg = _build_config(**cfg_kwargs)
        fmts = _parse_formats(formats)
        session = holder["session"] = OutputSession(outdir)
        pairs = solve_spectrum(cfg, tols)
        stationary = [p for p in pairs if p.is_real(tols)]
        if "csv" in fmts:
            write_csv(session.path("flux.csv"), *flux_rows(stationary, cfg, tols))
        if "json" in fmts:
            write_json(session.path("flux_classes.json"), {
                "config": cfg.to_json_dict(),
                "states": flux_classes_json(pairs, cfg, tols),
            })
        click.echo(f"{len(stationary)} stationary states of {cfg.n_sites}")

    _run_guarded(body)


@main.command()
@click.option("--n", "n_sites", type=int, required=True, help="Ring size N.")
@click.option("--d", type=int, required=True, help="Lead separation k' - k.")
@click.option("--out", "outdir", type=click.Path(path_type=Path), default=Path("."),
              show_default=True)
@click.option("--formats", default="json", show_default=True)
def singular(n_sites, d, outdir, formats) -> None:
    """Predict gain/loss-independent levels (structural and accidental)."""
    tols = tolerances_from_env()

    def body(holder):
        fmts = _parse_formats(formats)
        session = holder["session"] = OutputSession(outdir)
        preds = structural_singular(n_sites, d, tols) + accidental_singular(n_sites, d, tols)
        payload = singular_json(preds)
        if "json" in fmts:
            write_json(session.path("singular.json"),
                       {"n_sites": n_sites, "d": d, "predictions": payload})
        if "csv" in fmts:
            write_csv(session.path("singular.csv"),
                      ["theta_over_pi", "energy", "kind", "tuned_a"],
                      [[p["theta_over_pi"], p["energy"], p["kind"],
                        "" if p["tuned_a"] is None else p["tuned_a"]] for p in payload])
        click.echo(f"{len(payload)} singular predictions for N={n_sites}, d={d}")

    _run_guarded(body)


@main.command()
@_config_options
@click.option("--out", "outdir", type=click.Path(path_type=Path), default=Path("."),
              show_default=True)
@click.option("--formats", default="json", show_default=True)
def asymptotics(outdir, formats, **cfg_kwargs) -> None:
    """Perturbative shifts and strong-coupling classification for one ring."""
    tols = tolerances_from_env()

    def body(holder):
        cfg = _build_config(**cfg_kwargs)
        fmts = _parse_formats(formats)
        session = holder["session"] = OutputSession(outdir)
        payload = asymptotics_json(cfg)
        payload["config"] = cfg.to_json_dict()
        if "json" in fmts:
            write_json(session.path("asymptotics.json"), payload)
        if "csv" in fmts:
            write_csv(session.path("asymptotics_classes.csv"),
                      ["theta0", "kind", "first_correction_re", "first_correction_im"],
                      [[c["theta0"], c["kind"], c["first_correction_re"],
                        c["first_correction_im"]] for c in payload["classes"]])
        click.echo(f"{len(payload['classes'])} strong-coupling classes")

    _run_guarded(body)


@main.command()
@_config_options
@click.option("--out", "outdir", type=click.Path(path_type=Path), default=Path("."),
              show_default=True)
@click.option("--formats", default="json", show_default=True)
def classify(outdir, formats, **cfg_kwargs) -> None:
    """Branch-localization tags of the eigenstates at the given gain/loss."""
    tols = tolerances_from_env()

    def body(holder):
        cfg = _build_config(**cfg_kwargs)
        fmts = _parse_formats(formats)
        session = holder["session"] = OutputSession(outdir)
        pairs = solve_spectrum(cfg, tols)
        payload = {
            "config": cfg.to_json_dict(),
            "states": directionality_json(pairs, cfg, tols),
        }
        if "json" in fmts:
            write_json(session.path("classify.json"), payload)
        if "csv" in fmts:
            write_csv(session.path("classify.csv"),
                      ["state_id", "re_E", "im_E", "tag", "ratio"],
                      [[str(s["state_id"]), s["re_E"], s["im_E"], s["tag"], s["ratio"]]
                       for s in payload["states"]])
        click.echo(f"classified {len(pairs)} states")

    _run_guarded(body)


@main.command("reproduce-figure")
@click.option("--id", "fig_id", type=int, required=True,
              help=f"Figure id, one of {FIGURE_IDS}.")
@click.option("--out", "outdir", type=click.Path(path_type=Path), default=Path("."),
              show_default=True)
@click.option("--formats", default="csv,json", show_default=True)
@click.option("--render/--no-render", default=True, show_default=True,
              help="Also render PNG figures next to the datasets.")
def reproduce_figure_cmd(fig_id, outdir, formats, render) -> None:
    """Emit the dataset (and rendering) behind one published-figure layout."""
    tols = tolerances_from_env()

    def body(holder):
        if fig_id not in FIGURE_IDS:
            raise ConfigError(f"unknown figure id {fig_id}; valid ids are {FIGURE_IDS}")
        fmts = _parse_formats(formats)
        session = holder["session"] = OutputSession(outdir)
        written = reproduce_figure(fig_id, session, fmts, tols, render=render)
        for p in written:
            click.echo(str(p))

    _run_guarded(body)


if __name__ == "__main__":
    main()
