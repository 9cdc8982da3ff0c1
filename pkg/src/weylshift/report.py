"""Artifact writers: delimited spectra, JSON sidecars, and figures.

Every run writes machine-first outputs (CSV + JSON) whose bytes depend only
on the run configuration: floats are serialized at fixed precision, keys
are sorted, and no timestamps or hostnames are embedded. Figures are
rendered with the Agg backend so runs work headless.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .spectrum import SpectralReport, Verdict

FLOAT_DIGITS = 12


@dataclass
class RunConfig:
    """Everything needed to reproduce a run byte-for-byte."""

    command: str
    seq: str = ""
    N: int = 0
    words: str = ""
    c: float = 4.0
    delta: float = 0.05
    tol: float = 1e-9
    cap: int = 3125
    seed: int = 0
    threads: int = 1
    K: int = 64
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        if not out["extra"]:
            del out["extra"]
        return out


def dump_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sidecar(config: RunConfig, body: dict) -> dict:
    return {"config": config.to_dict(), **body}


def write_spectrum_csv(path: str, report: SpectralReport) -> None:
    """lambda,amplitude rows over the full Fourier grid."""
    if report.grid_amp is None:
        raise ValueError("report was built without keep_grid")
    with open(path, "w") as fh:
        fh.write("lambda,amplitude\n")
        N = report.N
        for j, a in enumerate(report.grid_amp):
            fh.write(f"{j / N:.{FLOAT_DIGITS}f},{a:.{FLOAT_DIGITS}f}\n")


def render_spectrum_png(path: str, report: SpectralReport) -> None:
    """Amplitude versus frequency with the detection threshold and peaks."""
    if report.grid_amp is None:
        raise ValueError("report was built without keep_grid")
    lam = np.arange(report.N) / report.N
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(lam, report.grid_amp, lw=0.5, color="#30507a", label="$a_N(\\lambda)$")
    ax.axhline(report.threshold, color="#b03030", lw=1.0, ls="--",
               label=f"threshold {report.threshold:.4f}")
    if report.peaks:
        px, py = zip(*report.peaks)
        ax.plot(px, py, "o", color="#b03030", ms=6, label="peaks")
    ax.set_xlabel("frequency $\\lambda$")
    ax.set_ylabel("amplitude")
    ax.set_title(f"{report.word_label}   N={report.N}   d={report.d}")
    ax.set_xlim(0, 1)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_verdict_csv(path: str, reports: list[SpectralReport]) -> None:
    """One row per word: zero and off-zero peak summary plus the mean."""
    with open(path, "w") as fh:
        fh.write("word,n_peaks,max_offzero_amplitude,p0,abs_nu\n")
        for r in reports:
            off = max((a for _, a in r.offzero_peaks()), default=0.0)
            fh.write(f"{r.word_label},{len(r.peaks)},{off:.{FLOAT_DIGITS}f},"
                     f"{float(r.p[0]):.{FLOAT_DIGITS}f},{abs(r.nu):.{FLOAT_DIGITS}f}\n")


def render_verdict_png(path: str, reports: list[SpectralReport],
                       verdict: Verdict) -> None:
    """Per-word evidence: largest off-zero amplitude and trivial-root mass."""
    labels = [r.word_label for r in reports]
    off = [max((a for _, a in r.offzero_peaks()), default=0.0) for r in reports]
    p0 = [float(r.p[0]) for r in reports]
    y = np.arange(len(reports))
    fig, (ax1, ax2) = plt.subplots(
        1, 2, figsize=(10, max(3.0, 0.3 * len(reports) + 1.5)), sharey=True)
    ax1.barh(y, off, color="#30507a")
    ax1.axvline(reports[0].threshold, color="#b03030", ls="--", lw=1.0,
                label="peak threshold")
    ax1.set_xlabel("max off-zero amplitude")
    ax1.legend(fontsize=8)
    ax2.barh(y, p0, color="#4a7a50")
    ax2.axvline(1.0 - verdict.p0_margin, color="#b03030", ls="--", lw=1.0,
                label="$p_0$ bound")
    ax2.set_xlabel("trivial-root mass $\\hat p_0$")
    ax2.set_xlim(0, 1.05)
    ax2.legend(fontsize=8)
    ax1.set_yticks(y)
    ax1.set_yticklabels(labels, fontsize=7)
    ax1.invert_yaxis()
    fig.suptitle(f"{verdict.status} ({verdict.note})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_correlation_png(path: str, lags: np.ndarray, values: np.ndarray,
                           title: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.stem(lags, np.abs(values), basefmt=" ")
    ax.set_xlabel("lag $k$")
    ax.set_ylabel("$|S_N(k)|$")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
