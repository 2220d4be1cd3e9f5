"""Static report figures rendered alongside the delimited output.

All functions take an output path and save a single non-interactive
figure (SVG or PNG by extension); log-log axes for exclusion plots.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__


def _finish(fig, path):
    fig.tight_layout()
    meta = None
    if str(path).endswith(".svg"):
        meta = {"Creator": f"cslrot {__version__}",
                "Description": "two-sided angular-frequency DNS convention"}
    elif str(path).endswith(".png"):
        meta = {"Software": f"cslrot {__version__}"}
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path


def plot_bound_curve(curve, path, overlays=(), title=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    rc = curve.rc_values()
    lam = curve.lambda_values()
    ok = np.isfinite(lam)
    ax.loglog(rc[ok], lam[ok], "-", color="crimson", lw=1.8,
              label=curve.geometry_id)
    for ov in overlays:
        ax.loglog(ov.rc, ov.lam, "--", lw=1.2, label=ov.label)
    ax.set_xlabel(r"$r_C$ [m]")
    ax.set_ylabel(r"$\lambda_{\max}$ [s$^{-1}$]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_scan(scan, path, title=None, logx=False):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(scan.axis, scan.objective, "o-", ms=3, lw=1.2)
    if logx:
        ax.set_xscale("log")
    if np.all(scan.objective[np.isfinite(scan.objective)] >= 0) and \
            np.nanmax(scan.objective) > 0:
        ax.set_yscale("log")
        positive = scan.objective[scan.objective > 0]
        if positive.size:
            ax.set_ylim(bottom=positive.min() * 0.5)
    ax.set_xlabel(scan.axis_name)
    ax.set_ylabel(scan.fixed.get("objective", "objective"))
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_psd(estimate, path, model=None, band=None, title=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    f = estimate.frequencies
    live = f > 0
    ax.loglog(f[live], estimate.values[live], lw=0.8, label="estimate")
    ax.fill_between(f[live],
                    np.maximum(estimate.values[live] - 3 * estimate.stderr[live],
                               1e-300),
                    estimate.values[live] + 3 * estimate.stderr[live],
                    alpha=0.25, lw=0)
    if model is not None:
        ax.loglog(f[live], np.asarray(model)[live], "k--", lw=1.0,
                  label="analytic")
    if band is not None:
        ax.axvspan(band[0], band[1], color="green", alpha=0.08)
    ax.set_xlabel(r"$\omega$ [rad/s]")
    ax.set_ylabel(r"$S_\theta$ [rad$^2$ s]")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_dns(rc_values, s_csl_values, path, title=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(rc_values, s_csl_values, "o-", ms=3, lw=1.2)
    ax.set_xlabel(r"$r_C$ [m]")
    ax.set_ylabel(r"$S_{\tau}$ [N$^2$ m$^2$ s]")
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    return _finish(fig, path)
