"""Exclusion bounds on the collapse parameters from thermal noise floors.

The largest collapse rate compatible with attributing the entire thermal
floor to collapse noise is

    lambda_max(r_C) = 4 m0^2 r_C^4 S_th / (hbar^2 P(r_C) Y(r_C)),

evaluated per grid point.  Rotationally homogeneous geometries give no
constraint; such points carry the sentinel ``UNBOUNDED`` (serialized as
the literal token ``unbounded``, never an IEEE infinity).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .geometry import MassModel
from .spectrum import (NoiseBudget, axial_factor_y, colored_multiplier,
                       radial_factor_p, thermal_torque_dns)

__all__ = [
    "UNBOUNDED", "BoundPoint", "BoundCurve", "OverlayCurve",
    "lambda_upper_bound", "bound_curve", "rescale_thermal",
    "colored_bound_adjustment", "ingest_overlay", "default_rc_grid",
    "count_local_minima", "OverlayFormatError",
]

UNBOUNDED = math.inf

# analysis band of the reference experiment, metadata only: the white
# collapse spectrum is frequency independent
ANALYSIS_BAND_HZ = (2.0e-3, 1.0e-1)


@dataclass(frozen=True)
class BoundPoint:
    rc: float
    lambda_max: float           # UNBOUNDED when the geometry gives none
    p_factor: float
    y_factor: float
    flags: str = ""

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.lambda_max)


@dataclass
class BoundCurve:
    """lambda_max(r_C) over a grid, with provenance metadata."""

    points: list[BoundPoint]
    geometry_id: str
    s_th: float
    metadata: dict = field(default_factory=dict)

    def rc_values(self):
        return np.array([p.rc for p in self.points])

    def lambda_values(self):
        return np.array([p.lambda_max for p in self.points])

    def local_minima(self) -> list[int]:
        lam = self.lambda_values()
        idx = []
        for i in range(1, len(lam) - 1):
            if lam[i] < lam[i - 1] and lam[i] < lam[i + 1]:
                idx.append(i)
        return idx

    def write_csv(self, path, metadata_lines=()):
        with open(path, "w", newline="") as fh:
            for line in metadata_lines:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(["rc_m", "lambda_max_s^-1", "p_factor",
                             "y_factor", "flags"])
            for p in self.points:
                lam = "unbounded" if p.unbounded else f"{p.lambda_max:.16e}"
                writer.writerow([f"{p.rc:.16e}", lam, f"{p.p_factor:.16e}",
                                 f"{p.y_factor:.16e}", p.flags])


def count_local_minima(curve: BoundCurve) -> int:
    return len(curve.local_minima())


def lambda_upper_bound(model: MassModel, rc: float, floor: NoiseBudget,
                       constants: PhysicalConstants = DEFAULT_CONSTANTS,
                       tol: float | None = None,
                       method: str = "series") -> float:
    """Largest collapse rate compatible with the thermal floor at this r_C.

    Returns ``UNBOUNDED`` when the geometry carries no angular structure
    (P * Y = 0).
    """
    s_th = thermal_torque_dns(floor, constants)
    p = radial_factor_p(model, rc, method=method, tol=tol)
    y = axial_factor_y(model.height, rc)
    if p.value <= 0.0 or y <= 0.0:
        return UNBOUNDED
    return (4.0 * constants.m0 ** 2 * rc ** 4 * s_th
            / (constants.hbar ** 2 * p.value * y))


def bound_curve(model: MassModel, rc_grid, floor: NoiseBudget,
                constants: PhysicalConstants = DEFAULT_CONSTANTS,
                tol: float | None = None, geometry_id: str = "custom",
                method: str = "series",
                oracle_spot_checks: int = 0) -> BoundCurve:
    """Per-point exclusion bound over a sorted positive r_C grid.

    Failed points are flagged (never dropped); the curve records the
    floor, tolerances and spectral-convention metadata.  With
    ``oracle_spot_checks`` > 0 that many evenly spaced points are
    re-evaluated through the direct-quadrature route and disagreements
    beyond 100x the tolerance are flagged ``oracle-mismatch``.
    """
    rc_grid = np.asarray(rc_grid, dtype=float)
    if rc_grid.size == 0 or np.any(rc_grid <= 0):
        raise ValueError("rc grid must be positive")
    if np.any(np.diff(rc_grid) <= 0):
        raise ValueError("rc grid must be strictly increasing")
    s_th = thermal_torque_dns(floor, constants)
    check_at = set()
    if oracle_spot_checks > 0 and method == "series":
        idx = np.linspace(0, rc_grid.size - 1,
                          min(oracle_spot_checks, rc_grid.size))
        check_at = {int(round(i)) for i in idx}
    points = []
    for i, rc in enumerate(rc_grid):
        flags = ""
        try:
            p = radial_factor_p(model, rc, method=method, tol=tol)
            y = axial_factor_y(model.height, rc)
            if p.rel_error_estimate > (tol or 1e-6) * 10:
                flags = "loose-tolerance"
            if i in check_at:
                q = radial_factor_p(model, rc, method="quadrature",
                                    tol=max(tol or 1e-6, 1e-5))
                scale = max(abs(q.value), abs(p.value), 1e-300)
                if abs(p.value - q.value) / scale > 100.0 * (tol or 1e-6):
                    flags = (flags + ";" if flags else "") + "oracle-mismatch"
            if p.value <= 0.0 or y <= 0.0:
                lam = UNBOUNDED
                pv, yv = p.value, y
            else:
                lam = (4.0 * constants.m0 ** 2 * rc ** 4 * s_th
                       / (constants.hbar ** 2 * p.value * y))
                pv, yv = p.value, y
        except Exception as exc:        # noqa: BLE001 - per-point diagnosis
            flags = f"failed:{type(exc).__name__}"
            lam, pv, yv = math.nan, math.nan, math.nan
        points.append(BoundPoint(float(rc), lam, pv, yv, flags))
    meta = {
        "s_th_N2m2s": s_th,
        "convention": "two-sided angular-frequency DNS",
        "analysis_band_hz": list(ANALYSIS_BAND_HZ),
        "tolerance": tol if tol is not None else 1e-6,
        "method": method,
        "oracle_spot_checks": len(check_at),
    }
    return BoundCurve(points=points, geometry_id=geometry_id, s_th=s_th,
                      metadata=meta)


def rescale_thermal(s_th_exp: float, inertia_ratio: float,
                    temperature_ratio: float) -> float:
    """Scale a measured floor to a new setup: S_th * (I_new/I_old) * (T_new/T_old)."""
    if s_th_exp <= 0 or inertia_ratio <= 0 or temperature_ratio <= 0:
        raise ValueError("floor and ratios must be positive")
    return s_th_exp * inertia_ratio * temperature_ratio


def colored_bound_adjustment(curve: BoundCurve, omega_c: float,
                             omega_band) -> BoundCurve:
    """Worst-case bound weakening for colored collapse noise.

    The colored spectrum is the white one times a Lorentzian <= 1; the
    defensible bound divides lambda_max by the smallest multiplier over
    the analysis band (attained at the top edge).
    """
    lo, hi = float(omega_band[0]), float(omega_band[1])
    if omega_c <= 0 or lo <= 0 or hi < lo:
        raise ValueError("cutoff and band must be positive and ordered")
    mult = min(colored_multiplier(lo, omega_c), colored_multiplier(hi, omega_c))
    points = [
        BoundPoint(p.rc,
                   p.lambda_max if p.unbounded else p.lambda_max / mult,
                   p.p_factor, p.y_factor, p.flags)
        for p in curve.points
    ]
    meta = dict(curve.metadata)
    meta.update({"colored_cutoff_rad_s": omega_c,
                 "colored_band_rad_s": [lo, hi],
                 "colored_min_multiplier": mult})
    return BoundCurve(points=points, geometry_id=curve.geometry_id,
                      s_th=curve.s_th, metadata=meta)


def default_rc_grid(rc_min: float = 1e-9, rc_max: float = 1e-2,
                    points_per_decade: int = 25):
    """Log grid over the standard exclusion-plot span."""
    if rc_min <= 0 or rc_max <= rc_min:
        raise ValueError("need 0 < rc_min < rc_max")
    decades = math.log10(rc_max / rc_min)
    n = max(2, int(round(decades * points_per_decade)) + 1)
    return np.logspace(math.log10(rc_min), math.log10(rc_max), n)


# ----------------------------------------------------------------------
# published-bound overlays (data ingestion only, never computed here)
# ----------------------------------------------------------------------

class OverlayFormatError(ValueError):
    """Malformed overlay CSV; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class OverlayCurve:
    label: str
    rc: np.ndarray
    lam: np.ndarray


def ingest_overlay(path) -> list[OverlayCurve]:
    """Read labelled (rc, lambda) overlay curves from CSV.

    Format: header ``label,rc_m,lambda_s^-1``, one curve per label,
    scientific-notation floats.  Curves come back sorted in rc; rows with
    non-positive values are rejected with their line number.
    """
    curves: dict[str, list[tuple[float, float]]] = {}
    order: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        lineno = 0
        header_seen = False
        for row in reader:
            lineno += 1
            if not row or (row[0].startswith("#")):
                continue
            if not header_seen:
                got = [c.strip().lower() for c in row]
                if got != ["label", "rc_m", "lambda_s^-1"]:
                    raise OverlayFormatError(
                        "expected header 'label,rc_m,lambda_s^-1', got "
                        f"{','.join(got)!r}", lineno)
                header_seen = True
                continue
            if len(row) != 3:
                raise OverlayFormatError(f"expected 3 columns, got {len(row)}",
                                         lineno)
            label = row[0].strip()
            if not label:
                raise OverlayFormatError("empty label", lineno)
            try:
                rc = float(row[1])
                lam = float(row[2])
            except ValueError as exc:
                raise OverlayFormatError(f"bad float: {exc}", lineno) from None
            if rc <= 0 or lam <= 0 or not (math.isfinite(rc) and math.isfinite(lam)):
                raise OverlayFormatError(
                    "rc and lambda must be positive and finite", lineno)
            if label not in curves:
                curves[label] = []
                order.append(label)
            curves[label].append((rc, lam))
    out = []
    for label in order:
        pts = sorted(curves[label])
        out.append(OverlayCurve(label=label,
                                rc=np.array([p[0] for p in pts]),
                                lam=np.array([p[1] for p in pts])))
    return out
