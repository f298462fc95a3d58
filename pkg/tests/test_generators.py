import math

import numpy as np
import pytest

from tdaperm import (
    PdProcessSpec,
    RdpgSpec,
    ShapeSpec,
    ValidationError,
    generate_pd_process,
    generate_rdpg,
    sample_shape,
)


class TestShapeSampler:
    def test_unit_circle(self):
        pts = sample_shape(ShapeSpec("circle-ellipse", r=0.0, noise_sigma=0.0,
                                     n_points=500, seed=0))
        assert pts.shape == (500, 2)
        np.testing.assert_allclose(np.sum(pts ** 2, axis=1), 1.0, atol=1e-12)

    def test_ellipse_quadric(self):
        pts = sample_shape(ShapeSpec("circle-ellipse", r=0.02, noise_sigma=0.0,
                                     n_points=300, seed=1))
        quad = pts[:, 0] ** 2 + pts[:, 1] ** 2 / 0.98 ** 2
        np.testing.assert_allclose(quad, 1.0, atol=1e-12)

    def test_unit_sphere(self):
        pts = sample_shape(ShapeSpec("sphere-ellipsoid", r=0.0, noise_sigma=0.0,
                                     n_points=400, seed=2))
        assert pts.shape == (400, 3)
        np.testing.assert_allclose(np.sum(pts ** 2, axis=1), 1.0, atol=1e-12)

    def test_ellipsoid_quadric(self):
        pts = sample_shape(ShapeSpec("sphere-ellipsoid", r=0.3, noise_sigma=0.0,
                                     n_points=200, seed=3))
        quad = pts[:, 0] ** 2 + pts[:, 1] ** 2 + pts[:, 2] ** 2 / 0.7 ** 2
        np.testing.assert_allclose(quad, 1.0, atol=1e-12)

    def test_noise_standard_deviation(self):
        spec = ShapeSpec("circle-ellipse", r=0.0, noise_sigma=0.05,
                         n_points=10_000, seed=4)
        clean = sample_shape(ShapeSpec("circle-ellipse", r=0.0, noise_sigma=0.0,
                                       n_points=10_000, seed=4))
        noisy = sample_shape(spec)
        deviations = (noisy - clean).ravel()
        assert 0.045 <= deviations.std() <= 0.055

    def test_determinism(self):
        spec = ShapeSpec("sphere-ellipsoid", r=0.1, noise_sigma=0.02,
                         n_points=50, seed=5)
        np.testing.assert_array_equal(sample_shape(spec), sample_shape(spec))

    def test_different_seeds_differ(self):
        a = sample_shape(ShapeSpec("circle-ellipse", n_points=10, seed=0))
        b = sample_shape(ShapeSpec("circle-ellipse", n_points=10, seed=1))
        assert not np.array_equal(a, b)

    def test_validation(self):
        with pytest.raises(ValidationError):
            ShapeSpec("torus", r=0.0)
        with pytest.raises(ValidationError):
            ShapeSpec("circle-ellipse", r=1.0)
        with pytest.raises(ValidationError):
            ShapeSpec("circle-ellipse", r=-0.1)
        with pytest.raises(ValidationError):
            ShapeSpec("circle-ellipse", n_points=0)
        with pytest.raises(ValidationError):
            ShapeSpec("circle-ellipse", noise_sigma=-1.0)


class TestPdProcess:
    def test_death_never_below_birth(self):
        for seed in range(5):
            dgm = generate_pd_process(PdProcessSpec(n_points=200, z_beta=(0.5, 2.0),
                                                    noise_sigma=0.1, seed=seed))
            assert np.all(dgm.deaths >= dgm.births)

    def test_uniform_persistence_mean(self):
        dgm = generate_pd_process(PdProcessSpec(n_points=10_000, z_beta=(1.0, 1.0),
                                                seed=6))
        mean = float((dgm.deaths - dgm.births).mean())
        assert 0.48 <= mean <= 0.52

    def test_beta_persistence_mean(self):
        dgm = generate_pd_process(PdProcessSpec(n_points=10_000, z_beta=(1.0, 1.8),
                                                seed=7))
        mean = float((dgm.deaths - dgm.births).mean())
        assert abs(mean - 1 / 2.8) <= 0.02

    def test_births_uniform_on_unit_interval(self):
        dgm = generate_pd_process(PdProcessSpec(n_points=10_000, seed=8))
        assert np.all((dgm.births >= 0) & (dgm.births <= 1))
        assert abs(float(dgm.births.mean()) - 0.5) <= 0.02

    def test_hom_dim_label(self):
        dgm = generate_pd_process(PdProcessSpec(n_points=5, seed=9), hom_dim=1)
        assert dgm.hom_dim == 1

    def test_determinism(self):
        spec = PdProcessSpec(n_points=100, z_beta=(2.0, 3.0), noise_sigma=0.05, seed=10)
        a = generate_pd_process(spec)
        b = generate_pd_process(spec)
        np.testing.assert_array_equal(a.points, b.points)

    def test_noise_changes_points_but_keeps_validity(self):
        base = generate_pd_process(PdProcessSpec(n_points=100, seed=11))
        noisy = generate_pd_process(PdProcessSpec(n_points=100, noise_sigma=0.1, seed=11))
        assert not np.array_equal(base.points, noisy.points)
        assert np.all(noisy.deaths >= noisy.births)

    def test_validation(self):
        with pytest.raises(ValidationError):
            PdProcessSpec(n_points=0)
        with pytest.raises(ValidationError):
            PdProcessSpec(z_beta=(0.0, 1.0))
        with pytest.raises(ValidationError):
            PdProcessSpec(z_beta=(1.0, -2.0))
        with pytest.raises(ValidationError):
            PdProcessSpec(noise_sigma=-0.5)


class TestRdpg:
    def test_entropy_approaches_ln3_for_concentrated_dirichlet(self):
        # huge alpha concentrates x at (1/3, 1/3, 1/3) where the node value
        # attains its maximum ln 3; entropy is flat there so the gap is tiny
        g = generate_rdpg(RdpgSpec(n_nodes=50, dirichlet_alpha=(1e6, 1e6, 1e6),
                                   node_noise_sigma=0.0, seed=12))
        np.testing.assert_allclose(g.node_values, math.log(3), atol=1e-3)

    def test_node_values_bounded_by_ln3(self):
        g = generate_rdpg(RdpgSpec(n_nodes=200, dirichlet_alpha=(0.5, 1.0, 2.0),
                                   seed=13))
        assert np.all(g.node_values >= -1e-12)
        assert np.all(g.node_values <= math.log(3) + 1e-12)

    def test_edges_canonical(self):
        g = generate_rdpg(RdpgSpec(n_nodes=60, seed=14))
        assert g.node_count == 60
        if g.edges.size:
            assert np.all(g.edges[:, 0] < g.edges[:, 1])
            assert np.all((g.edges >= 0) & (g.edges < 60))

    def test_mean_edge_density_matches_monte_carlo(self):
        alpha = (1.5, 1.5, 1.5)
        rng = np.random.default_rng(99)
        x = rng.dirichlet(alpha, size=1_000_000 // 2)
        y = rng.dirichlet(alpha, size=1_000_000 // 2)
        expected = float(np.sum(x * y, axis=1).mean())
        densities = []
        n = 100
        pairs = n * (n - 1) / 2
        for seed in range(100):
            g = generate_rdpg(RdpgSpec(n_nodes=n, dirichlet_alpha=alpha, seed=seed))
            densities.append(g.edges.shape[0] / pairs)
        assert abs(float(np.mean(densities)) - expected) <= 0.03

    def test_node_noise_can_go_negative(self):
        g = generate_rdpg(RdpgSpec(n_nodes=300, dirichlet_alpha=(0.3, 0.3, 0.3),
                                   node_noise_sigma=0.5, seed=15))
        assert float(g.node_values.min()) < 0

    def test_determinism(self):
        spec = RdpgSpec(n_nodes=40, node_noise_sigma=0.1, seed=16)
        a = generate_rdpg(spec)
        b = generate_rdpg(spec)
        np.testing.assert_array_equal(a.edges, b.edges)
        np.testing.assert_array_equal(a.node_values, b.node_values)

    def test_validation(self):
        with pytest.raises(ValidationError):
            RdpgSpec(n_nodes=0)
        with pytest.raises(ValidationError):
            RdpgSpec(dirichlet_alpha=(1.0, 1.0))
        with pytest.raises(ValidationError):
            RdpgSpec(dirichlet_alpha=(1.0, 0.0, 1.0))
        with pytest.raises(ValidationError):
            RdpgSpec(node_noise_sigma=-0.1)
