"""Geometry optimisation of the collapse signal at fixed moment of inertia.

Scans follow the fair-comparison rule: the inner radius is re-solved at
every evaluated point so the moment of inertia (and with it the thermal
floor) never changes.  The sector-angle scan peaks where the arc length
under a heavy sector is comparable to the correlation length and drops
to zero at both homogeneous limits (alpha = 0 and alpha = 2 pi / n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import PeriodicAnnulus, solve_inner_radius
from .spectrum import axial_factor_y, radial_factor_p

__all__ = [
    "ScanResult", "OptimizationResult", "scan_alpha", "scan_height",
    "optimize_geometry", "half_cylinder_merit", "golden_section_max",
]


@dataclass
class ScanResult:
    """One-parameter scan of the collapse objective at fixed inertia."""

    axis_name: str
    axis: np.ndarray
    objective: np.ndarray
    r_solved: np.ndarray
    flags: list[str]
    fixed: dict = field(default_factory=dict)

    def argmax(self) -> float:
        return float(self.axis[int(np.argmax(self.objective))])

    def max_objective(self) -> float:
        return float(np.max(self.objective))


@dataclass
class OptimizationResult:
    best_params: dict
    best_objective: float
    trace: list = field(default_factory=list)
    evaluations: int = 0


def _axis_grid(lo, hi, n, spacing):
    if spacing == "linear":
        return np.linspace(lo, hi, n)
    if spacing == "log":
        if lo <= 0:
            raise ValueError("log spacing needs a positive lower edge")
        return np.logspace(math.log10(lo), math.log10(hi), n)
    raise ValueError(f"unknown spacing {spacing!r}")


def _annulus_at(i_fixed, rho, delta_rho, n, alpha, epsilon, h):
    r = solve_inner_radius(i_fixed, rho, delta_rho, n, alpha, epsilon, h)
    return PeriodicAnnulus(rho=rho, delta_rho=delta_rho, r_inner=r,
                           r_outer=epsilon * r, n_sectors=n, alpha=alpha,
                           height=h), r


def scan_alpha(n: int, epsilon: float, i_fixed: float, h: float, rc: float,
               rho: float, delta_rho: float, grid: int = 48,
               alpha_min: float = 0.0, alpha_max: float | None = None,
               spacing: str = "linear", tol: float = 1e-6) -> ScanResult:
    """Objective P against the sector angle in [alpha_min, alpha_max].

    The default range is the full [0, 2 pi / n]; at every point the inner
    radius is re-solved for the fixed inertia.
    """
    if grid < 8:
        raise ValueError("grid must be at least 8 points")
    upper = 2.0 * math.pi / n if alpha_max is None else alpha_max
    alphas = _axis_grid(alpha_min, upper, grid, spacing)
    obj = np.zeros(grid)
    rs = np.zeros(grid)
    flags = []
    for i, alpha in enumerate(alphas):
        try:
            model, r = _annulus_at(i_fixed, rho, delta_rho, n, alpha,
                                   epsilon, h)
            rs[i] = r
            obj[i] = radial_factor_p(model, rc, tol=tol).value
            flags.append("")
        except Exception as exc:    # noqa: BLE001 - per-point diagnosis
            obj[i] = math.nan
            rs[i] = math.nan
            flags.append(f"failed:{type(exc).__name__}")
    return ScanResult(axis_name="alpha_rad", axis=alphas, objective=obj,
                      r_solved=rs, flags=flags,
                      fixed={"n": n, "epsilon": epsilon, "inertia": i_fixed,
                             "h": h, "rc": rc, "rho": rho,
                             "delta_rho": delta_rho, "objective": "P"})


def scan_height(n: int, epsilon: float, i_fixed: float, alpha: float,
                rc: float, rho: float, delta_rho: float, h_grid,
                tol: float = 1e-6) -> ScanResult:
    """Objective P x Y against the height; r re-solved per point."""
    hs = np.asarray(h_grid, dtype=float)
    if hs.size < 2 or np.any(hs <= 0):
        raise ValueError("h grid must be positive with at least two points")
    obj = np.zeros(hs.size)
    rs = np.zeros(hs.size)
    flags = []
    for i, h in enumerate(hs):
        try:
            model, r = _annulus_at(i_fixed, rho, delta_rho, n, alpha,
                                   epsilon, h)
            rs[i] = r
            p = radial_factor_p(model, rc, tol=tol).value
            obj[i] = p * axial_factor_y(h, rc)
            flags.append("")
        except Exception as exc:    # noqa: BLE001
            obj[i] = math.nan
            rs[i] = math.nan
            flags.append(f"failed:{type(exc).__name__}")
    return ScanResult(axis_name="h_m", axis=hs, objective=obj, r_solved=rs,
                      flags=flags,
                      fixed={"n": n, "epsilon": epsilon, "inertia": i_fixed,
                             "alpha": alpha, "rc": rc, "rho": rho,
                             "delta_rho": delta_rho, "objective": "P*Y"})


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, evals: int):
    """Golden-section maximisation on [lo, hi] under an evaluation budget.

    Assumes local unimodality (callers bracket with a coarse grid first).
    Returns (x_best, f_best, trace) where trace lists every (x, f(x)).
    """
    trace = []

    def probe(x):
        v = f(x)
        trace.append((x, v))
        return v

    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    budget = max(evals, 2)
    fc = probe(c)
    fd = probe(d)
    budget -= 2
    while budget > 0 and (b - a) > 1e-12 * max(abs(a), abs(b), 1.0):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = probe(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = probe(d)
        budget -= 1
    best = max(trace, key=lambda t: t[1])
    return best[0], best[1], trace


def optimize_geometry(objective: str, n_values, alpha_range, h_range,
                      epsilon_values, i_fixed: float, rc: float,
                      rho: float, delta_rho: float,
                      budget: int = 400, s_th: float | None = None,
                      constants=None, coarse: int = 9,
                      tol: float = 1e-5) -> OptimizationResult:
    """Coarse grid over (n, epsilon) x golden-section refinement in alpha, h.

    ``objective`` is one of "p" (radial factor only, h fixed at the range
    midpoint), "py" (radial times axial factor), or "inverse_lambda"
    (identical argmax to "py" at fixed floor; reported in bound units
    when ``s_th`` is given).  Deterministic for fixed inputs; stops on
    budget exhaustion with the best point so far.
    """
    if budget < 100:
        raise ValueError("budget must be at least 100 evaluations")
    if objective not in ("p", "py", "inverse_lambda"):
        raise ValueError(f"unknown objective {objective!r}")
    n_values = list(n_values)
    epsilon_values = list(epsilon_values)
    if not n_values or not epsilon_values:
        raise ValueError("empty search ranges")
    a_lo, a_hi = alpha_range
    h_lo, h_hi = h_range
    state = {"evals": 0}
    trace = []

    def measure(n, eps, alpha, h):
        if state["evals"] >= budget:
            raise _BudgetExhausted()
        state["evals"] += 1
        alpha = min(alpha, 2.0 * math.pi / n)
        model, r = _annulus_at(i_fixed, rho, delta_rho, n, alpha, eps, h)
        p = radial_factor_p(model, rc, tol=tol).value
        val = p if objective == "p" else p * axial_factor_y(h, rc)
        trace.append({"n": n, "epsilon": eps, "alpha": alpha, "h": h,
                      "r": r, "value": val})
        return val

    best = {"value": -math.inf}

    def consider(n, eps, alpha, h, val):
        if val > best.get("value", -math.inf):
            best.update({"n": n, "epsilon": eps, "alpha": alpha, "h": h,
                         "value": val})

    h_mid = math.sqrt(h_lo * h_hi)
    try:
        for n in n_values:
            for eps in epsilon_values:
                hi_alpha = min(a_hi, 2.0 * math.pi / n)
                grid = np.linspace(max(a_lo, hi_alpha * 1e-4), hi_alpha,
                                   coarse)
                for alpha in grid:
                    consider(n, eps, alpha, h_mid,
                             measure(n, eps, alpha, h_mid))
        # refine alpha around the coarse winner
        n, eps = best["n"], best["epsilon"]
        hi_alpha = min(a_hi, 2.0 * math.pi / n)
        step = hi_alpha / (coarse - 1)
        lo = max(a_lo, best["alpha"] - step)
        hi = min(hi_alpha, best["alpha"] + step)
        remaining = max(8, (budget - state["evals"]) // 2)
        a_best, v, _ = golden_section_max(
            lambda a: measure(n, eps, a, h_mid), lo, hi, remaining)
        consider(n, eps, a_best, h_mid, v)
        if objective in ("py", "inverse_lambda"):
            h_best, v, _ = golden_section_max(
                lambda h: measure(n, eps, best["alpha"], h),
                h_lo, h_hi, max(8, budget - state["evals"]))
            consider(n, eps, best["alpha"], h_best, v)
    except _BudgetExhausted:
        pass

    params = {k: best[k] for k in ("n", "epsilon", "alpha", "h")}
    value = best["value"]
    if objective == "inverse_lambda" and s_th is not None:
        from .constants import DEFAULT_CONSTANTS
        cons = constants or DEFAULT_CONSTANTS
        # value currently holds P*Y; convert to 1/lambda_max
        value = (cons.hbar ** 2 * value
                 / (4.0 * cons.m0 ** 2 * rc ** 4 * s_th))
    return OptimizationResult(best_params=params, best_objective=value,
                              trace=trace, evaluations=state["evals"])


class _BudgetExhausted(Exception):
    pass


# merit-function series coefficients around ratio -> 0 (cancellation zone)
_MERIT_SERIES = (1.0 / 6.0, -1.0 / 20.0, 3.0 / 280.0, -1.0 / 540.0,
                 1.0 / 3696.0)


def half_cylinder_merit(ratio: float) -> float:
    """Merit function F of the half-cylinder radius over correlation length.

    F(q) = [2 - 3 q^2 + e^{-q^2}(q^2 - 2) + sqrt(pi) q^3 erf(q)] / q^4;
    the radial collapse factor of a half cylinder is
    (16/3) drho^2 rc^4 R^4 F(R/rc), and F peaks near q = 3.  A series is
    used below q = 0.35 where the closed form cancels catastrophically.
    """
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    q = float(ratio)
    if q < 0.35:
        q2 = q * q
        acc = 0.0
        for c in reversed(_MERIT_SERIES):
            acc = acc * q2 + c
        return acc * q2
    q2 = q * q
    return (2.0 - 3.0 * q2 + math.exp(-q2) * (q2 - 2.0)
            + math.sqrt(math.pi) * q2 * q * math.erf(q)) / (q2 * q2)
