"""Deterministic CSV/JSON/SVG artifacts for spectra and eigenfunctions."""
import csv
import json

import matplotlib
from matplotlib.figure import Figure
import numpy as np

PLOT_QUANTITIES = {
    "magnitude": np.abs,
    "real": np.real,
    "imag": np.imag,
}


def _columns(coeffs):
    c = np.asarray(coeffs)
    return c[:, None] if c.ndim == 1 else c


def write_spectrum_csv(path, coeffs, lambdas, channels):
    c = _columns(coeffs)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["channel", "mode_index", "lambda", "coeff_real", "coeff_imag", "magnitude"])
        for ch, name in enumerate(channels):
            col = c[:, ch]
            for k in range(c.shape[0]):
                z = complex(col[k])
                w.writerow([name, k, float(lambdas[k]), z.real, z.imag, abs(z)])


def read_spectrum_csv(path):
    """Inverse of :func:`write_spectrum_csv`: ``{channel: complex array}``."""
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["channel"], []).append(
                complex(float(row["coeff_real"]), float(row["coeff_imag"])))
    return {k: np.array(v) for k, v in out.items()}


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_spectrum_json(path, coeffs, lambdas, channels, metadata):
    c = _columns(coeffs)
    write_json(path, {
        "metadata": metadata,
        "lambda": [float(x) for x in lambdas],
        "channels": {
            name: {"real": c[:, k].real.tolist(), "imag": c[:, k].imag.tolist()}
            for k, name in enumerate(channels)
        },
    })


def stem_plot_svg(path, coeffs, channels, quantity="magnitude", title=""):
    """One stem panel per channel of ``quantity(coeff)`` against mode index."""
    c = _columns(coeffs)
    fn = PLOT_QUANTITIES[quantity]
    k = np.arange(c.shape[0])
    fig = Figure(figsize=(8, 2.2 * c.shape[1]))
    axes = fig.subplots(c.shape[1], 1, sharex=True, squeeze=False)[:, 0]
    for ax, ch, name in zip(axes, range(c.shape[1]), channels):
        v = fn(c[:, ch])
        ax.vlines(k, 0.0, v, linewidth=0.6, color="tab:blue")
        ax.plot(k, v, ".", markersize=2.5, color="tab:blue")
        ax.axhline(0.0, linewidth=0.5, color="0.3")
        ax.set_ylabel(f"{quantity} ({name})")
    axes[-1].set_xlabel("mode index")
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    with matplotlib.rc_context({"svg.hashsalt": "fracharm"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def colorize(values, cmap="bwr", flat_tol=1e-9):
    """Min-max normalize ``values`` through ``cmap`` into uchar RGB.

    A signal whose spread is below ``flat_tol`` times its magnitude is
    treated as constant and mapped to the colormap midpoint.
    """
    v = np.asarray(values, dtype=np.float64)
    lo, hi = v.min(), v.max()
    if hi - lo <= flat_tol * max(abs(lo), abs(hi), np.finfo(float).tiny):
        t = np.full_like(v, 0.5)
    else:
        t = (v - lo) / (hi - lo)
    rgba = matplotlib.colormaps[cmap](t)
    return np.round(rgba[:, :3] * 255.0).astype(np.uint8)
