"""Dataset writers and figure rendering for the CLI.

All delimited output is byte-deterministic: floats are printed with 12
significant digits, JSON keys are sorted, and rows follow canonical
orderings.  Figures are rendered with the Agg backend next to the datasets
they visualize.
"""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .asymptotics import classify_large_eta, delta_theta_a, delta_theta_eta, localized_pair_energy
from .config import DEFAULT_TOLS, RingConfig, Tolerances
from .oracle import solve_spectrum
from .ring import EigenPair
from .singular import SingularPrediction, is_opaque
from .sweep import SingularityEvent, SweepResult, sweep_spectrum
from .transport import classify_directionality, local_flux


def fmt(x: float) -> str:
    """Canonical 12-significant-digit float rendering."""
    return f"{float(x):.12g}"


class OutputSession:
    """Tracks files written by one command so partial output can be removed."""

    def __init__(self, outdir: Path):
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.paths: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.outdir / name
        self.paths.append(p)
        return p

    def cleanup(self) -> None:
        for p in self.paths:
            try:
                p.unlink(missing_ok=True)
            except OSError:
                pass


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else fmt(cell) for cell in row])


def write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def savefig(fig, path: Path) -> None:
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)


# --------------------------------------------------------------------------
# tabular datasets

def spectrum_rows(pairs: list[EigenPair], tols: Tolerances = DEFAULT_TOLS):
    header = [
        "state_id", "re_theta", "im_theta", "re_E", "im_E",
        "char_residual", "matvec_residual", "real_flag",
    ]
    rows = [
        [
            str(i), p.theta.real, p.theta.imag, p.energy.real, p.energy.imag,
            p.char_residual, p.matvec_residual, str(int(p.is_real(tols))),
        ]
        for i, p in enumerate(pairs)
    ]
    return header, rows


def sweep_rows(sweep: SweepResult):
    header = ["eta", "branch_id", "re_E", "im_E", "real_flag", "n_real"]
    grid = sweep.eta_grid
    n_real = np.sum([b.real_mask for b in sweep.branches], axis=0)
    rows = []
    for t, eta in enumerate(grid):
        for b, branch in enumerate(sweep.branches):
            e = branch.energies[t]
            rows.append(
                [eta, str(b), e.real, e.imag, str(int(branch.real_mask[t])), str(int(n_real[t]))]
            )
    return header, rows


def events_json(events: list[SingularityEvent]) -> list[dict]:
    return [
        {
            "eta_c": ev.eta_c,
            "kind": ev.kind.value,
            "exponent": None if math.isnan(ev.exponent) else ev.exponent,
            "re_E_c": ev.energy_c.real,
            "im_E_c": ev.energy_c.imag,
            "branch_i": ev.branches[0],
            "branch_j": ev.branches[1],
        }
        for ev in events
    ]


def flux_rows(pairs: list[EigenPair], cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS):
    header = ["state_id", "re_E", "n", "j_n"]
    rows = []
    for i, p in enumerate(pairs):
        profile = local_flux(p, cfg, tols)
        for n in range(1, cfg.n_sites + 1):
            rows.append([str(i), p.energy.real, str(n), profile.j[n - 1]])
    return header, rows


def flux_classes_json(pairs: list[EigenPair], cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS):
    out = []
    for i, p in enumerate(pairs):
        profile = local_flux(p, cfg, tols)
        out.append(
            {
                "state_id": i,
                "re_E": p.energy.real,
                "im_E": p.energy.imag,
                "transport_class": profile.transport_class.value,
                "j_right": profile.j_right,
                "j_left": profile.j_left,
                "throughput": profile.throughput,
                "lead_amplitude_sq": abs(p.vector[cfg.k - 1]) ** 2,
                "opaque": is_opaque(p, cfg, tols),
            }
        )
    return out


def singular_json(preds: list[SingularPrediction]) -> list[dict]:
    def frac_str(frac: Fraction) -> str:
        return f"{frac.numerator}/{frac.denominator}"

    return [
        {
            "theta_over_pi": frac_str(p.theta_frac),
            "energy": p.energy,
            "kind": p.kind.value,
            "tuned_a": p.tuned_a,
        }
        for p in preds
    ]


def asymptotics_json(cfg: RingConfig) -> dict:
    n = cfg.n_sites
    out: dict = {"classes": [], "delta_eta": [], "delta_a": []}
    for cls in classify_large_eta(cfg):
        out["classes"].append(
            {
                "theta0": cls.theta0,
                "kind": cls.kind.value,
                "first_correction_re": cls.first_correction.real,
                "first_correction_im": cls.first_correction.imag,
            }
        )
    theta0s = [2.0 * math.pi * m / n for m in range(0, (n + 2) // 2) if 2 * m != n]
    for theta0 in theta0s:
        de = delta_theta_eta(theta0, cfg)
        da = delta_theta_a(theta0, cfg)
        out["delta_eta"].append({"theta0": theta0, "re": de.real, "im": de.imag})
        out["delta_a"].append({"theta0": theta0, "re": da.real, "im": da.imag})
    if abs(cfg.alpha) > 1.0:
        ep, em = localized_pair_energy(cfg.a, cfg.eta)
        out["localized_pair"] = {
            "E_gain": [ep.real, ep.imag],
            "E_loss": [em.real, em.imag],
        }
    return out


def directionality_json(pairs: list[EigenPair], cfg: RingConfig, tols: Tolerances = DEFAULT_TOLS):
    return [
        {
            "state_id": i,
            "re_E": tag.energy.real,
            "im_E": tag.energy.imag,
            "tag": tag.tag.value,
            "ratio": tag.ratio,
            "nearest_short_branch_E": tag.nearest_short,
            "nearest_long_branch_E": tag.nearest_long,
        }
        for i, tag in enumerate(classify_directionality(pairs, cfg, tols))
    ]


# --------------------------------------------------------------------------
# figure rendering

def render_sweeps(sweeps: list[tuple[str, SweepResult]], path: Path) -> None:
    """Re/Im spectrum panels, one row per labelled sweep."""
    nrows = len(sweeps)
    fig, axes = plt.subplots(nrows, 2, figsize=(9, 3.2 * nrows), squeeze=False)
    for r, (label, sweep) in enumerate(sweeps):
        ax_re, ax_im = axes[r]
        for branch in sweep.branches:
            ax_re.plot(branch.eta_grid, branch.energies.real, lw=0.9)
            ax_im.plot(branch.eta_grid, branch.energies.imag, lw=0.9)
        ax_re.set_ylabel(f"Re E  ({label})")
        ax_im.set_ylabel(f"Im E  ({label})")
        for ax in (ax_re, ax_im):
            ax.set_xlabel(r"$\eta$")
    fig.tight_layout()
    savefig(fig, path)


def render_flux_polar(datasets: list[tuple[float, list[EigenPair], RingConfig]], path: Path,
                      tols: Tolerances = DEFAULT_TOLS) -> None:
    """Stationary bond currents as radial curves around the ring."""
    ncols = len(datasets)
    fig, axes = plt.subplots(1, ncols, figsize=(4.2 * ncols, 4.2),
                             subplot_kw={"projection": "polar"}, squeeze=False)
    for c, (eta, pairs, cfg) in enumerate(datasets):
        ax = axes[0][c]
        n = cfg.n_sites
        angles = 2.0 * np.pi * np.arange(n + 1) / n
        for p in pairs:
            if not p.is_real(tols):
                continue
            profile = local_flux(p, cfg, tols)
            radial = np.append(profile.j, profile.j[0])
            ax.plot(angles, radial, marker="o", ms=3,
                    label=f"E={p.energy.real:.2f}")
        ax.set_title(rf"$\eta$={eta:g}")
        ax.legend(fontsize=6, loc="lower left")
    fig.tight_layout()
    savefig(fig, path)


def render_eigenvectors(datasets: list[tuple[float, list[EigenPair]]], path: Path,
                        tols: Tolerances = DEFAULT_TOLS) -> None:
    """|u_n|^2 site profiles of the real-energy states at each eta."""
    ncols = len(datasets)
    fig, axes = plt.subplots(1, ncols, figsize=(5 * ncols, 3.4), squeeze=False)
    for c, (eta, pairs) in enumerate(datasets):
        ax = axes[0][c]
        for p in pairs:
            if not p.is_real(tols):
                continue
            sites = np.arange(1, len(p.vector) + 1)
            ax.plot(sites, np.abs(p.vector) ** 2, marker="o", ms=3,
                    label=f"E={p.energy.real:.3f}")
        ax.set_xlabel("site n")
        ax.set_ylabel(r"$|u_n|^2$")
        ax.set_title(rf"$\eta$={eta:g}")
        ax.legend(fontsize=6)
    fig.tight_layout()
    savefig(fig, path)


# --------------------------------------------------------------------------
# figure reproduction targets

FIGURE_IDS = (1, 2, 3, 4, 5, 6, 7)


def reproduce_figure(fig_id: int, session: OutputSession, formats: set[str],
                     tols: Tolerances = DEFAULT_TOLS, render: bool = True) -> list[Path]:
    """Emit the dataset (and rendering) behind one published-figure layout."""
    from .sweep import detect_events  # local import to keep module load light

    written: list[Path] = []

    def emit_csv(name: str, header, rows) -> None:
        if "csv" in formats:
            p = session.path(name)
            write_csv(p, header, rows)
            written.append(p)

    def emit_json(name: str, obj) -> None:
        if "json" in formats:
            p = session.path(name)
            write_json(p, obj)
            written.append(p)

    if fig_id == 1:
        sweeps = []
        for a in (0.0, 1.5):
            cfg = RingConfig.pt(6, 1, 3, a, 0.0)
            sweep = sweep_spectrum(cfg, 0.0, 3.0, 161, tols)
            emit_csv(f"fig1_spectrum_a{a:g}.csv", *sweep_rows(sweep))
            sweeps.append((f"a={a:g}", sweep))
        if render:
            p = session.path("fig1.png")
            render_sweeps(sweeps, p)
            written.append(p)
    elif fig_id == 2:
        cfg0 = RingConfig.pt(6, 1, 3, 0.5, 0.0)
        datasets = []
        for eta in (0.05, 1.5, 3.0):
            cfg = cfg0.with_eta(eta)
            pairs = solve_spectrum(cfg, tols)
            stationary = [p for p in pairs if p.is_real(tols)]
            emit_csv(f"fig2_flux_eta{eta:g}.csv", *flux_rows(stationary, cfg, tols))
            emit_json(f"fig2_classes_eta{eta:g}.json", flux_classes_json(stationary, cfg, tols))
            datasets.append((eta, pairs, cfg))
        if render:
            p = session.path("fig2.png")
            render_flux_polar(datasets, p, tols)
            written.append(p)
    elif fig_id == 3:
        sweeps = []
        for a in (0.5, 0.0):
            cfg = RingConfig.pt(6, 1, 4, a, 0.0)
            sweep = sweep_spectrum(cfg, 0.0, 3.0, 161, tols)
            emit_csv(f"fig3_spectrum_a{a:g}.csv", *sweep_rows(sweep))
            sweeps.append((f"a={a:g}", sweep))
        if render:
            p = session.path("fig3.png")
            render_sweeps(sweeps, p)
            written.append(p)
    elif fig_id == 4:
        cfg = RingConfig.pt(5, 1, 3, 0.5, 0.0)
        sweep = sweep_spectrum(cfg, 0.0, 3.0, 161, tols)
        emit_csv("fig4_spectrum.csv", *sweep_rows(sweep))
        if render:
            p = session.path("fig4.png")
            render_sweeps([("a=0.5", sweep)], p)
            written.append(p)
    elif fig_id == 5:
        cfg = RingConfig.pt(10, 1, 5, 0.5, 0.0)
        sweep = sweep_spectrum(cfg, 0.0, 12.0, 201, tols)
        emit_csv("fig5_spectrum.csv", *sweep_rows(sweep))
        emit_json("fig5_events.json", events_json(detect_events(sweep, tols)))
        if render:
            p = session.path("fig5.png")
            render_sweeps([("a=0.5", sweep)], p)
            written.append(p)
    elif fig_id == 6:
        cfg0 = RingConfig.pt(10, 1, 5, 0.5, 0.0)
        datasets = []
        header = ["eta", "state_id", "re_E", "site", "abs_u_sq"]
        rows = []
        for eta in (2.0, 10.0):
            pairs = [p for p in solve_spectrum(cfg0.with_eta(eta), tols) if p.is_real(tols)]
            for i, p in enumerate(pairs):
                for site in range(1, cfg0.n_sites + 1):
                    rows.append([eta, str(i), p.energy.real, str(site),
                                 abs(p.vector[site - 1]) ** 2])
            datasets.append((eta, pairs))
        emit_csv("fig6_eigenvectors.csv", header, rows)
        if render:
            p = session.path("fig6.png")
            render_eigenvectors(datasets, p, tols)
            written.append(p)
    elif fig_id == 7:
        cfg0 = RingConfig.pt(12, 1, 5, 0.5, 0.0)
        sweep = sweep_spectrum(cfg0, 0.0, 12.0, 201, tols)
        emit_csv("fig7_spectrum.csv", *sweep_rows(sweep))
        header = ["eta", "state_id", "re_E", "site", "abs_u_sq"]
        rows = []
        eta = 10.0
        pairs = [p for p in solve_spectrum(cfg0.with_eta(eta), tols) if p.is_real(tols)]
        for i, p in enumerate(pairs):
            for site in range(1, cfg0.n_sites + 1):
                rows.append([eta, str(i), p.energy.real, str(site),
                             abs(p.vector[site - 1]) ** 2])
        emit_csv("fig7_eigenvectors.csv", header, rows)
        if render:
            p = session.path("fig7.png")
            render_sweeps([("a=0.5", sweep)], p)
            p2 = session.path("fig7_eigenvectors.png")
            render_eigenvectors([(eta, pairs)], p2, tols)
            written.append(p)
            written.append(p2)
    else:
        raise ValueError(f"unknown figure id {fig_id}; valid ids are {FIGURE_IDS}")
    return written
