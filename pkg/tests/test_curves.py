import numpy as np
import pytest

from cslinks.curves import (CATALOG_NAMES, LinkCurve, catalog,
                            validate_embedding)
from cslinks.errors import EmbeddingError


class TestEvaluation:
    def test_periodicity(self):
        c = catalog("trefoil")
        ts = np.linspace(0, 2 * np.pi, 17)
        assert np.allclose(c.eval(0, ts), c.eval(0, ts + 2 * np.pi),
                           atol=1e-12)

    def test_round_circle_tangent(self):
        c = catalog("unknot-round")
        assert np.allclose(c.tangent(0, 0.0), [0, 1, 0], atol=1e-12)

    def test_tangent_is_normalized_derivative(self):
        c = catalog("figure8")
        rng = np.random.default_rng(0)
        h = 1e-6
        for t in rng.uniform(0, 2 * np.pi, 10):
            fd = (c.eval(0, t + h) - c.eval(0, t)) / h
            v = c.deriv(0, t)
            assert np.linalg.norm(fd - v) < 1e-4 * max(1, np.linalg.norm(v))
            assert abs(np.linalg.norm(c.tangent(0, t)) - 1) < 1e-12


class TestCatalog:
    @pytest.mark.parametrize("name", CATALOG_NAMES)
    def test_all_entries_embed(self, name):
        rep = validate_embedding(catalog(name))
        assert rep["min_speed"] > 0

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            catalog("no-such-knot")

    def test_hopf_components_separated(self):
        rep = validate_embedding(catalog("hopf-link"))
        assert rep["min_separation_cross"] > 0.1

    def test_round_unknot_is_planar_unit_circle(self):
        c = catalog("unknot-round")
        ts = np.linspace(0, 2 * np.pi, 64)
        pts = c.eval(0, ts)
        assert np.allclose(np.linalg.norm(pts[:, :2], axis=1), 1, atol=1e-12)
        assert np.allclose(pts[:, 2], 0, atol=1e-12)


class TestValidation:
    def test_coincident_circles_fail_with_witness(self):
        c = LinkCurve([
            ([0, 0, 0], [[1, 0, 0]], [[0, 1, 0]]),
            ([0, 0, 0], [[1, 0, 0]], [[0, 1, 0]]),
        ])
        with pytest.raises(EmbeddingError) as err:
            validate_embedding(c)
        assert err.value.witness is not None

    def test_self_intersecting_fails(self):
        # planar limaçon without the lift self-intersects at the curl; a
        # transversal crossing needs eta matched to the sampling resolution
        c = LinkCurve([([1, 0, 0], [[1, 0, 0], [1, 0, 0]],
                        [[0, 1, 0], [0, 1, 0]])])
        with pytest.raises(EmbeddingError):
            validate_embedding(c, samples=8192, eta=0.01)

    def test_zero_velocity_fails(self):
        c = LinkCurve([([0, 0, 0], [[0, 0, 0]], [[0, 0, 0]])])
        with pytest.raises(EmbeddingError):
            validate_embedding(c)


class TestJson:
    def test_roundtrip(self):
        c = catalog("trefoil")
        back = LinkCurve.from_json(c.to_json())
        ts = np.linspace(0, 2 * np.pi, 11)
        assert np.allclose(c.eval(0, ts), back.eval(0, ts), atol=1e-15)

    def test_schema_fields(self):
        import json
        data = json.loads(catalog("hopf-link").to_json())
        assert len(data["components"]) == 2
        assert set(data["components"][0]) == {"const", "cos", "sin"}
