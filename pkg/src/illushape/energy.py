"""Energy functionals of the phase-transition model.

The total energy charges canyon-weighted gradient and double-well terms plus
a soft confinement that pins the phase to zero on the inducers.  The convex
surrogate built around a frozen iterate majorizes the total energy; its
minimizer is the next iterate of the outer scheme, and its first variation is
the weak form of the linearized elliptic equation.  Energy and operator share
one face stencil and one quadrature so the discrete decrease bound holds
exactly, not merely in the continuum limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canyon import CanyonField, ConfigurationMask
from .grid import GridField, face_diffs, face_means

__all__ = [
    "PhaseField",
    "ModelParams",
    "double_well",
    "surrogate_target",
    "total_energy",
    "surrogate_energy",
    "first_variation",
    "energy_drop_bound",
    "profile_measure_1d",
]


@dataclass(frozen=True, eq=False)
class PhaseField(GridField):
    """Scalar phase iterate with zero trace on the domain rim."""

    def __post_init__(self) -> None:
        super().__post_init__()
        v = self.values
        if v[0, :].any() or v[-1, :].any() or v[:, 0].any() or v[:, -1].any():
            raise ValueError("phase field must vanish on the boundary ring")


@dataclass(frozen=True)
class ModelParams:
    """Transition bandwidth, confinement weight, canyon, and inducer mask."""

    epsilon: float
    lam: float
    canyon: CanyonField
    mask: ConfigurationMask

    def __post_init__(self) -> None:
        if self.canyon.geometry != self.mask.geometry:
            raise ValueError("canyon and mask live on different grids")
        h = self.canyon.geometry.h
        hi = max(0.25, h)  # grids under 4 cells have h > 0.25; allow epsilon = h there
        if not (h <= self.epsilon <= hi):
            raise ValueError(
                f"epsilon must lie in [h, {hi:g}] = [{h:g}, {hi:g}], got {self.epsilon:g}"
            )
        if self.lam <= 0:
            raise ValueError("lam must be positive")

    @property
    def geometry(self):
        return self.canyon.geometry


def double_well(z):
    """Double-well potential (1 - z)^2 z^2 with minima at the pure phases."""
    return np.square(1.0 - z) * np.square(z)


def surrogate_target(z):
    """Cellwise target 3 z^2 / (1 + 2 z^2) of the convex surrogate.

    Fixed points of the map are 0, 1/2, and 1, matching the critical points
    of the double well.
    """
    zz = np.square(z)
    return 3.0 * zz / (1.0 + 2.0 * zz)


def _check_field(z: GridField, p: ModelParams) -> None:
    if z.geometry != p.geometry:
        raise ValueError("field does not match the model grid")


def total_energy(z: PhaseField, p: ModelParams) -> float:
    """Discrete total energy of a zero-trace phase field.

    Face-gradient term (epsilon/2) G |grad z|^2, cell double-well term
    G Phi(z) / (2 epsilon), and confinement lam chi z^2 / (2 epsilon), all
    under midpoint quadrature.  Note (dz/h)^2 h^2 = dz^2, so face sums need
    no explicit h factors.
    """
    _check_field(z, p)
    zv = z.values
    G = p.canyon.values
    h = p.geometry.h
    eps = p.epsilon
    dzx, dzy = face_diffs(zv)
    gx, gy = face_means(G)
    grad = 0.5 * eps * (float(np.sum(gx * dzx * dzx)) + float(np.sum(gy * dzy * dzy)))
    cell_scale = h * h / (2.0 * eps)
    well = cell_scale * float(np.sum(G * double_well(zv)))
    pin = p.lam * cell_scale * float(np.sum(p.mask.indicator() * zv * zv))
    return grad + well + pin


def surrogate_energy(z: PhaseField, z_n: PhaseField, p: ModelParams) -> float:
    """Strictly convex quadratic majorant of the total energy at iterate z_n."""
    _check_field(z, p)
    _check_field(z_n, p)
    zv = z.values
    zn = z_n.values
    G = p.canyon.values
    h = p.geometry.h
    eps = p.epsilon
    dzx, dzy = face_diffs(zv)
    gx, gy = face_means(G)
    grad = 0.5 * eps * (float(np.sum(gx * dzx * dzx)) + float(np.sum(gy * dzy * dzy)))
    weight = 1.0 + 2.0 * np.square(zn)
    target = surrogate_target(zn)
    cell_scale = h * h / (2.0 * eps)
    cell = cell_scale * float(np.sum(G * weight * np.square(zv - target)))
    pin = p.lam * cell_scale * float(np.sum(p.mask.indicator() * zv * zv))
    return grad + cell + pin


def first_variation(z: PhaseField, u: PhaseField, z_n: PhaseField, p: ModelParams) -> float:
    """Directional derivative of the surrogate at z in direction u.

    Vanishes for every zero-trace direction exactly when z solves the
    linearized elliptic equation assembled from z_n.
    """
    _check_field(z, p)
    _check_field(u, p)
    _check_field(z_n, p)
    zv = z.values
    uv = u.values
    zn = z_n.values
    G = p.canyon.values
    h = p.geometry.h
    eps = p.epsilon
    dzx, dzy = face_diffs(zv)
    dux, duy = face_diffs(uv)
    gx, gy = face_means(G)
    grad = eps * (float(np.sum(gx * dzx * dux)) + float(np.sum(gy * dzy * duy)))
    weight = 1.0 + 2.0 * np.square(zn)
    target = surrogate_target(zn)
    cell_scale = h * h / eps
    cell = cell_scale * float(np.sum(G * weight * (zv - target) * uv))
    pin = p.lam * cell_scale * float(np.sum(p.mask.indicator() * zv * uv))
    return grad + cell + pin


def energy_drop_bound(prev: PhaseField, new: PhaseField, p: ModelParams) -> float:
    """Guaranteed per-step energy decrease of the majorize-minimize update.

    For iterates in [0, 1] the decrease is at least the canyon-weighted
    quadrature of (new - prev)^2 (2 prev + 4 m (1 - m)) / (2 epsilon) with m
    the midpoint of the two iterates; nonnegative whenever both lie in [0, 1].
    """
    _check_field(prev, p)
    _check_field(new, p)
    a = prev.values
    b = new.values
    m = 0.5 * (a + b)
    h = p.geometry.h
    factor = 2.0 * a + 4.0 * m * (1.0 - m)
    integrand = p.canyon.values * np.square(b - a) * factor
    return float(h * h / (2.0 * p.epsilon) * np.sum(integrand))


def profile_measure_1d(epsilon: float, half_length: float, n_points: int) -> float:
    """Transition-layer measure of the 1-D logistic profile.

    Samples z(t) = S(t / epsilon) with the logistic S on
    [-half_length, half_length], using the analytic derivative
    z' = z (1 - z) / epsilon, and integrates
    epsilon/2 z'^2 + Phi(z) / (2 epsilon) by the trapezoid rule.  As the
    window widens the value tends to 1/6, the total variation of
    z^2/2 - z^3/3 across the well.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if half_length < 8.0 * epsilon:
        raise ValueError("half_length must cover at least 8 epsilon")
    if n_points < 1024:
        raise ValueError("need at least 1024 sample points")
    t = np.linspace(-half_length, half_length, n_points)
    z = 0.5 * (1.0 + np.tanh(0.5 * t / epsilon))
    dz = z * (1.0 - z) / epsilon
    integrand = 0.5 * epsilon * dz * dz + double_well(z) / (2.0 * epsilon)
    return float(np.trapezoid(integrand, t))
