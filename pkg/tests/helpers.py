"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np

from illushape import (
    CanyonField,
    ConfigurationMask,
    GridField,
    GridGeometry,
    LinearizedData,
    ModelParams,
    PhaseField,
    linearize,
)


def empty_mask(geom: GridGeometry) -> ConfigurationMask:
    return ConfigurationMask(geom, np.zeros(geom.shape, dtype=bool))


def flat_canyon(geom: GridGeometry, value: float = 1.0) -> CanyonField:
    return CanyonField(geom, np.full(geom.shape, value), alpha=value, beta=0.0)


def flat_model(
    geom: GridGeometry,
    g_value: float = 1.0,
    epsilon: float | None = None,
    lam: float = 1.0,
    mask: ConfigurationMask | None = None,
) -> ModelParams:
    """Model with a constant canyon; epsilon defaults to 2h."""
    if epsilon is None:
        epsilon = 2.0 * geom.h
    if mask is None:
        mask = empty_mask(geom)
    return ModelParams(epsilon=epsilon, lam=lam, canyon=flat_canyon(geom, g_value), mask=mask)


def random_canyon(geom: GridGeometry, rng: np.random.Generator) -> CanyonField:
    values = rng.uniform(0.1, 1.1, size=geom.shape)
    return CanyonField(geom, values, alpha=0.1, beta=1.0)


def random_mask(geom: GridGeometry, rng: np.random.Generator, p: float = 0.2) -> ConfigurationMask:
    return ConfigurationMask(geom, rng.random(geom.shape) < p)


def random_model(geom: GridGeometry, rng: np.random.Generator, lam: float = 1.0) -> ModelParams:
    return ModelParams(
        epsilon=min(2.0 * geom.h, 0.25),
        lam=lam,
        canyon=random_canyon(geom, rng),
        mask=random_mask(geom, rng),
    )


def random_phase(geom: GridGeometry, rng: np.random.Generator, lo: float = 0.0, hi: float = 1.0) -> PhaseField:
    values = rng.uniform(lo, hi, size=geom.shape)
    values[0, :] = 0.0
    values[-1, :] = 0.0
    values[:, 0] = 0.0
    values[:, -1] = 0.0
    return PhaseField(geom, values)


def random_instance(
    geom: GridGeometry, rng: np.random.Generator
) -> tuple[LinearizedData, ModelParams]:
    """Random linearized inner problem: z_n in [0,1], G in [0.1, 1.1], random mask."""
    model = random_model(geom, rng)
    z_n = GridField(geom, rng.uniform(0.0, 1.0, size=geom.shape))
    return linearize(z_n, model), model
