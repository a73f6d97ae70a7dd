"""
Material data of the heat problem: diffusivity fields and the radiative
boundary condition.
"""

from dataclasses import dataclass

import numpy as np

STEFAN_BOLTZMANN = 5.67e-8
INNER_HALF_SIDE = 1.0


@dataclass(frozen=True, eq=False)
class DiffusivityField:
    """
    Piecewise-constant diffusivity, one value per triangle.

    Attributes:
        mesh: Owning mesh
        values: (n_triangles,) strictly positive diffusivities
        kind: "uniform" or "bimaterial"
        mu: Parameter value the field was built from
    """

    mesh: object
    values: np.ndarray
    kind: str
    mu: float

    def __post_init__(self):
        if self.values.shape != (self.mesh.triangle_count,):
            raise ValueError("diffusivity needs one value per triangle")
        if not np.all(self.values > 0):
            raise ValueError("diffusivity must be strictly positive")


def uniform_diffusivity(mesh, mu):
    """Mono-material plate: D = mu everywhere."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    values = np.full(mesh.triangle_count, float(mu))
    values.setflags(write=False)
    return DiffusivityField(mesh, values, "uniform", float(mu))


def bimaterial_diffusivity(mesh, mu, inner_value=1.0):
    """
    Bi-material plate: ``inner_value`` on triangles whose centroid lies in
    (-1, 1)^2, ``mu * inner_value`` outside.
    """
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    centroids = mesh.triangle_centroids()
    inside = np.all(np.abs(centroids) < INNER_HALF_SIDE, axis=1)
    values = np.where(inside, inner_value, mu * inner_value).astype(float)
    values.setflags(write=False)
    return DiffusivityField(mesh, values, "bimaterial", float(mu))


@dataclass(frozen=True)
class RadiationBC:
    """Stefan-Boltzmann flux -D du/dn = sigma * epsilon * (u^4 - u_r^4)."""

    epsilon: float = 3e-3
    u_r: float = 303.15
    sigma: float = STEFAN_BOLTZMANN

    def __post_init__(self):
        if self.sigma <= 0 or self.epsilon <= 0:
            raise ValueError("sigma and epsilon must be positive")
        if self.u_r <= 0:
            raise ValueError("enclosure temperature must be positive (Kelvin)")

    @property
    def coefficient(self):
        return self.sigma * self.epsilon
