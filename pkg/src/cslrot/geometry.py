"""Mass-distribution models of cylindrical test masses.

All models are planar densities extruded over a height ``h``: a light
base material of density ``rho`` plus, where present, heavier sectors of
additional density ``delta_rho`` arranged periodically in angle.  Sector
windows of a train with ``n`` sectors of angular width ``alpha`` start at
``theta = 2*pi*j/n`` (j = 0..n-1); all results are rotation invariant, the
origin is fixed only for reproducibility.

Units are SI throughout (kg/m^3, m, kg m^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "HomogeneousDisk", "PeriodicAnnulus", "SectorRing", "TwoAnnuli",
    "HalfCylinder", "MassModel", "InvalidGeometryError",
    "moment_of_inertia", "solve_inner_radius", "density_at",
    "angular_profile", "SectorTrain",
]


class InvalidGeometryError(ValueError):
    """A mass model violates its structural invariants."""


@dataclass(frozen=True)
class HomogeneousDisk:
    """Full disk of uniform density: no angular structure at all."""

    rho: float
    r_outer: float
    height: float

    def __post_init__(self):
        if self.rho < 0 or self.r_outer <= 0 or self.height <= 0:
            raise InvalidGeometryError("disk needs rho >= 0, R > 0, h > 0")


@dataclass(frozen=True)
class PeriodicAnnulus:
    """Light disk of radius ``r_outer`` with ``n_sectors`` heavy sectors.

    The base material fills the whole disk; the sectors (density
    ``rho + delta_rho``) occupy the annulus ``r_inner <= r < r_outer``
    with angular windows of width ``alpha``.
    """

    rho: float
    delta_rho: float
    r_inner: float
    r_outer: float
    n_sectors: int
    alpha: float
    height: float

    def __post_init__(self):
        if not (0 <= self.r_inner < self.r_outer):
            raise InvalidGeometryError("need 0 <= r_inner < r_outer")
        if self.height <= 0:
            raise InvalidGeometryError("height must be positive")
        if self.delta_rho < 0:
            raise InvalidGeometryError("delta_rho must be non-negative")
        if self.n_sectors < 1:
            raise InvalidGeometryError("n_sectors must be >= 1")
        if not (0.0 <= self.alpha <= 2.0 * math.pi / self.n_sectors):
            raise InvalidGeometryError("alpha must lie in [0, 2*pi/n]")


@dataclass(frozen=True)
class SectorRing:
    """One ring of a multi-ring disk; 50% duty cycle (alpha = pi/n)."""

    r_inner: float
    r_outer: float
    n_sectors: int

    def __post_init__(self):
        if not (0 <= self.r_inner < self.r_outer):
            raise InvalidGeometryError("ring needs 0 <= r_inner < r_outer")
        if self.n_sectors < 1:
            raise InvalidGeometryError("ring needs n_sectors >= 1")

    @property
    def alpha(self) -> float:
        return math.pi / self.n_sectors


@dataclass(frozen=True)
class TwoAnnuli:
    """Light annulus carrying two concentric rings of heavy sectors.

    The base material fills ``r_core <= r < r_outer_total`` (the centre is
    a hole); each ring adds ``delta_rho`` on its sector windows with an
    equal sector/gap duty cycle.
    """

    rho: float
    delta_rho: float
    r_core: float
    r_outer_total: float
    ring_inner: SectorRing
    ring_outer: SectorRing
    height: float

    def __post_init__(self):
        ok = (0 <= self.r_core <= self.ring_inner.r_inner
              and self.ring_inner.r_outer <= self.ring_outer.r_inner
              and self.ring_outer.r_outer <= self.r_outer_total)
        if not ok:
            raise InvalidGeometryError(
                "radii must be ordered core <= ring_inner <= ring_outer <= total")
        if self.height <= 0:
            raise InvalidGeometryError("height must be positive")
        if self.delta_rho < 0:
            raise InvalidGeometryError("delta_rho must be non-negative")


@dataclass(frozen=True)
class HalfCylinder:
    """Disk of base density ``rho`` with ``delta_rho`` added on one half.

    ``rho = 0`` gives the bare half cylinder (density ``delta_rho`` over
    angles [0, pi), vacuum elsewhere).
    """

    rho: float
    delta_rho: float
    radius: float
    height: float

    def __post_init__(self):
        if self.radius <= 0 or self.height <= 0:
            raise InvalidGeometryError("radius and height must be positive")
        if self.rho < 0 or self.delta_rho < 0:
            raise InvalidGeometryError("densities must be non-negative")


MassModel = Union[HomogeneousDisk, PeriodicAnnulus, TwoAnnuli, HalfCylinder]


def moment_of_inertia(model: MassModel) -> float:
    """Moment of inertia about the symmetry axis, kg m^2.

    Closed forms: a full disk contributes pi*rho*h*R^4/2, a sector train
    of total angular fill n*alpha adds n*alpha*drho*h*(R^4 - r^4)/4.
    """
    if isinstance(model, HomogeneousDisk):
        return 0.5 * math.pi * model.rho * model.height * model.r_outer ** 4
    if isinstance(model, PeriodicAnnulus):
        base = 0.5 * math.pi * model.rho * model.height * model.r_outer ** 4
        sect = (model.n_sectors * model.alpha * model.delta_rho * model.height
                * (model.r_outer ** 4 - model.r_inner ** 4) / 4.0)
        return base + sect
    if isinstance(model, TwoAnnuli):
        base = (0.5 * math.pi * model.rho * model.height
                * (model.r_outer_total ** 4 - model.r_core ** 4))
        rings = 0.0
        for ring in (model.ring_inner, model.ring_outer):
            rings += (ring.n_sectors * ring.alpha * model.delta_rho
                      * model.height * (ring.r_outer ** 4 - ring.r_inner ** 4) / 4.0)
        return base + rings
    if isinstance(model, HalfCylinder):
        base = 0.5 * math.pi * model.rho * model.height * model.radius ** 4
        half = 0.25 * math.pi * model.delta_rho * model.height * model.radius ** 4
        return base + half
    raise TypeError(f"unsupported mass model: {type(model)!r}")


def solve_inner_radius(i_target: float, rho: float, delta_rho: float,
                       n: int, alpha: float, epsilon: float, h: float) -> float:
    """Inner radius of a PeriodicAnnulus with R = epsilon*r and fixed inertia.

    Inverts I(r) = r^4 * (pi*rho*h*eps^4/2 + n*alpha*drho*h*(eps^4-1)/4);
    round-trips through :func:`moment_of_inertia` to relative 1e-12.
    """
    if i_target <= 0:
        raise InvalidGeometryError("target inertia must be positive")
    if epsilon <= 1.0:
        raise InvalidGeometryError("epsilon = R/r must exceed 1")
    den = (0.5 * math.pi * rho * h * epsilon ** 4
           + 0.25 * n * alpha * delta_rho * h * (epsilon ** 4 - 1.0))
    if den <= 0.0:
        raise InvalidGeometryError("non-positive inertia density; check inputs")
    return (i_target / den) ** 0.25


@dataclass(frozen=True)
class SectorTrain:
    """Angular window train: ``n`` windows of width ``alpha``, step 2*pi/n."""

    n: int
    alpha: float
    delta: float       # density carried on the windows


def angular_profile(model: MassModel, r_perp: float):
    """Density profile in angle at radius ``r_perp``.

    Returns ``(base, train)`` where ``base`` is the angle-independent
    density and ``train`` is a :class:`SectorTrain` or None.  This is the
    single source of truth for both :func:`density_at` and the direct
    angular-quadrature kernel.
    """
    if isinstance(model, HomogeneousDisk):
        base = model.rho if r_perp < model.r_outer else 0.0
        return base, None
    if isinstance(model, PeriodicAnnulus):
        if r_perp >= model.r_outer:
            return 0.0, None
        train = None
        if model.r_inner <= r_perp and model.delta_rho > 0 and model.alpha > 0:
            train = SectorTrain(model.n_sectors, model.alpha, model.delta_rho)
        return model.rho, train
    if isinstance(model, TwoAnnuli):
        if not (model.r_core <= r_perp < model.r_outer_total):
            return 0.0, None
        train = None
        for ring in (model.ring_inner, model.ring_outer):
            if ring.r_inner <= r_perp < ring.r_outer and model.delta_rho > 0:
                train = SectorTrain(ring.n_sectors, ring.alpha, model.delta_rho)
        return model.rho, train
    if isinstance(model, HalfCylinder):
        if r_perp >= model.radius:
            return 0.0, None
        train = None
        if model.delta_rho > 0:
            train = SectorTrain(1, math.pi, model.delta_rho)
        return model.rho, train
    raise TypeError(f"unsupported mass model: {type(model)!r}")


def density_at(model: MassModel, r_perp, theta):
    """Pointwise planar density at (r_perp, theta), kg/m^3.

    Vectorised over numpy arrays; scalars in give a float back.
    """
    scalar = np.isscalar(r_perp) and np.isscalar(theta)
    r = np.asarray(r_perp, dtype=float)
    th = np.mod(np.asarray(theta, dtype=float), 2.0 * math.pi)
    r, th = np.broadcast_arrays(r, th)
    if np.any(r < 0):
        raise ValueError("r_perp must be non-negative")
    out = np.zeros(r.shape, dtype=float)

    def in_train(n, alpha):
        return np.mod(th, 2.0 * math.pi / n) < alpha

    if isinstance(model, HomogeneousDisk):
        out[r < model.r_outer] = model.rho
    elif isinstance(model, PeriodicAnnulus):
        inside = r < model.r_outer
        out[inside] = model.rho
        heavy = (inside & (r >= model.r_inner)
                 & in_train(model.n_sectors, model.alpha))
        out[heavy] += model.delta_rho
    elif isinstance(model, TwoAnnuli):
        inside = (r >= model.r_core) & (r < model.r_outer_total)
        out[inside] = model.rho
        for ring in (model.ring_inner, model.ring_outer):
            heavy = (inside & (r >= ring.r_inner) & (r < ring.r_outer)
                     & in_train(ring.n_sectors, ring.alpha))
            out[heavy] += model.delta_rho
    elif isinstance(model, HalfCylinder):
        inside = r < model.radius
        out[inside] = model.rho
        out[inside & (th < math.pi)] += model.delta_rho
    else:
        raise TypeError(f"unsupported mass model: {type(model)!r}")
    if scalar:
        return float(out)
    return out
