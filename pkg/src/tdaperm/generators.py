"""Seeded synthetic data generators for the power and timing experiments.

Three families: noisy samples of compressed circles/spheres (the compression
parameter r in [0, 1) squeezes one axis by 1 - r), synthetic persistence
diagrams with uniform births and Beta-distributed persistence, and random
dot product graphs with entropy node values.  Every generator is a pure
function of its spec, including the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .diagram import NoiseSpec, PersistenceDiagram, perturb_diagram
from .errors import ValidationError
from .filtration import Graph

__all__ = [
    "ShapeSpec",
    "PdProcessSpec",
    "RdpgSpec",
    "sample_shape",
    "generate_pd_process",
    "generate_rdpg",
]

SHAPES = ("circle-ellipse", "sphere-ellipsoid")


def _derive_seed(seed, stream):
    # independent child seed for a named stream of one generator call
    return int(np.random.SeedSequence([int(seed), int(stream)]).generate_state(1)[0])


@dataclass(frozen=True)
class ShapeSpec:
    """Noisy sample of a unit circle/sphere compressed by r along one axis."""

    shape: str
    r: float = 0.0
    n_points: int = 50
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValidationError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if not (0.0 <= self.r < 1.0):
            raise ValidationError(f"r must lie in [0, 1), got {self.r}")
        if self.n_points < 1:
            raise ValidationError(f"n_points must be positive, got {self.n_points}")
        if self.noise_sigma < 0:
            raise ValidationError(f"noise_sigma must be nonnegative, got {self.noise_sigma}")


def sample_shape(spec):
    """Point cloud on the compressed shape plus Gaussian coordinate noise.

    Circle: angles are uniform and the y coordinate is scaled by 1 - r, so
    noiseless points satisfy x^2 + y^2/(1-r)^2 = 1.  Sphere: normalized 3D
    Gaussians give uniform sphere points and the z coordinate is scaled.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.shape == "circle-ellipse":
        theta = rng.uniform(0.0, 2.0 * math.pi, spec.n_points)
        pts = np.column_stack([np.cos(theta), (1.0 - spec.r) * np.sin(theta)])
    else:
        g = rng.normal(size=(spec.n_points, 3))
        norms = np.linalg.norm(g, axis=1)
        # a zero vector has probability 0; guard anyway
        norms[norms == 0] = 1.0
        pts = g / norms[:, None]
        pts[:, 2] *= 1.0 - spec.r
    if spec.noise_sigma > 0:
        pts = pts + rng.normal(0.0, spec.noise_sigma, size=pts.shape)
    return pts


@dataclass(frozen=True)
class PdProcessSpec:
    """Synthetic diagram: births uniform on (0, 1), persistence Beta(a, b)."""

    n_points: int = 50
    z_beta: Tuple[float, float] = (1.0, 1.0)
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        a, b = self.z_beta
        if not (a > 0 and b > 0):
            raise ValidationError(f"Beta parameters must be positive, got {self.z_beta}")
        if self.n_points < 1:
            raise ValidationError(f"n_points must be positive, got {self.n_points}")
        if self.noise_sigma < 0:
            raise ValidationError(f"noise_sigma must be nonnegative, got {self.noise_sigma}")


def generate_pd_process(spec, hom_dim=0):
    """Draw a synthetic persistence diagram from the birth/persistence process.

    Gaussian noise, when requested, perturbs both coordinates; noisy points
    that would fall below the diagonal are clamped onto it.
    """
    rng = np.random.default_rng(spec.seed)
    births = rng.uniform(0.0, 1.0, spec.n_points)
    pers = rng.beta(spec.z_beta[0], spec.z_beta[1], spec.n_points)
    dgm = PersistenceDiagram(hom_dim, np.column_stack([births, births + pers]))
    if spec.noise_sigma > 0:
        dgm = perturb_diagram(dgm, NoiseSpec(spec.noise_sigma, _derive_seed(spec.seed, 1)))
    return dgm


@dataclass(frozen=True)
class RdpgSpec:
    """Random dot product graph on Dirichlet latent positions."""

    n_nodes: int = 100
    dirichlet_alpha: Tuple[float, float, float] = (1.5, 1.5, 1.5)
    node_noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValidationError(f"n_nodes must be positive, got {self.n_nodes}")
        if len(self.dirichlet_alpha) != 3 or not all(a > 0 for a in self.dirichlet_alpha):
            raise ValidationError(
                f"dirichlet_alpha must be 3 positive reals, got {self.dirichlet_alpha}"
            )
        if self.node_noise_sigma < 0:
            raise ValidationError(
                f"node_noise_sigma must be nonnegative, got {self.node_noise_sigma}"
            )


def generate_rdpg(spec):
    """Graph with Bernoulli(x_i . x_j) edges and entropy node values.

    Latent positions live on the probability simplex, so every dot product
    is a valid edge probability.  Node values are -sum x log x with the
    0 log 0 = 0 convention, plus optional Gaussian noise.
    """
    rng = np.random.default_rng(spec.seed)
    x = rng.dirichlet(spec.dirichlet_alpha, size=spec.n_nodes)
    probs = x @ x.T
    iu, ju = np.triu_indices(spec.n_nodes, k=1)
    keep = rng.random(iu.size) < probs[iu, ju]
    edges = np.column_stack([iu[keep], ju[keep]])
    safe = np.where(x > 0, x, 1.0)
    values = -np.sum(x * np.log(safe), axis=1)
    if spec.node_noise_sigma > 0:
        values = values + rng.normal(0.0, spec.node_noise_sigma, size=values.shape)
    return Graph(spec.n_nodes, edges, values)
