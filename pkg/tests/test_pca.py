import numpy as np
import pytest
from scipy.spatial.distance import pdist

from nn_meaning import PcaModel, SynthSpec, VectorDataset, pca_fit, pca_project
from nn_meaning.synth import gaussian_dataset, subspace_gaussian


def make_ds(arr, name="t"):
    return VectorDataset(name=name, data=np.asarray(arr, dtype=np.float32), source="native")


LINE = make_ds([[-1.0, -1.0], [0.0, 0.0], [1.0, 1.0]], name="line")


class TestFit:
    def test_line_first_component(self):
        model = pca_fit(LINE, 1)
        expected = np.array([1.0, 1.0]) / np.sqrt(2.0)
        assert np.allclose(model.components[0], expected, atol=1e-12)
        # sample variance of the projected coordinates {-sqrt(2), 0, sqrt(2)}
        # with 1/(n-1) normalization
        assert model.explained_variance[0] == pytest.approx(2.0, abs=1e-12)

    def test_sign_convention(self):
        model = pca_fit(LINE, 2)
        for row in model.components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_components_orthonormal(self):
        rng = np.random.default_rng(7)
        ds = make_ds(rng.standard_normal((400, 12)))
        model = pca_fit(ds, 8)
        gram = model.components @ model.components.T
        assert np.allclose(gram, np.eye(8), atol=1e-6)

    def test_isotropic_gaussian_eigenvalues(self):
        ds = gaussian_dataset(SynthSpec(kind="gaussian", n=50_000, d=8, seed=15))
        model = pca_fit(ds, 8)
        assert np.all(np.abs(model.explained_variance - 1.0) < 0.1)

    def test_rank_deficient_trailing_variances(self):
        ds = subspace_gaussian(
            SynthSpec(kind="subspace_gaussian", n=2000, d=64, intrinsic_dim=4, seed=8)
        )
        model = pca_fit(ds, 64)
        assert np.all(model.explained_variance[4:] < 1e-8)
        assert np.all(np.diff(model.explained_variance) <= 1e-12)

    def test_explained_variance_prefix_property(self):
        rng = np.random.default_rng(3)
        ds = make_ds(rng.standard_normal((300, 10)))
        small = pca_fit(ds, 4)
        large = pca_fit(ds, 9)
        assert np.allclose(
            small.explained_variance, large.explained_variance[:4], atol=1e-8
        )

    def test_output_dim_out_of_range(self):
        with pytest.raises(ValueError):
            pca_fit(LINE, 0)
        with pytest.raises(ValueError):
            pca_fit(LINE, 3)  # min(n, d) == 2

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        ds = make_ds(rng.standard_normal((200, 6)))
        a = pca_fit(ds, 3)
        b = pca_fit(ds, 3)
        assert np.array_equal(a.components, b.components)
        assert np.array_equal(a.explained_variance, b.explained_variance)

    def test_large_input_uses_seeded_subsample(self, monkeypatch):
        import nn_meaning.pca as pca_mod

        monkeypatch.setattr(pca_mod, "_FULL_FIT_ELEMENTS", 1000)
        monkeypatch.setattr(pca_mod, "_SUBSAMPLE_ROWS", 200)
        rng = np.random.default_rng(6)
        ds = make_ds(rng.standard_normal((2000, 4)))
        a = pca_fit(ds, 4, sample_seed=1)
        b = pca_fit(ds, 4, sample_seed=1)
        assert np.array_equal(a.components, b.components)
        # isotropic data: subsampled eigenvalues still near 1
        assert np.all(np.abs(a.explained_variance - 1.0) < 0.5)


class TestProject:
    def test_line_projection_coordinates(self):
        model = pca_fit(LINE, 1)
        out = pca_project(model, LINE)
        got = sorted(out.data.ravel().tolist())
        assert got == pytest.approx([-np.sqrt(2), 0.0, np.sqrt(2)], abs=1e-6)

    def test_full_rank_projection_is_isometric(self):
        rng = np.random.default_rng(9)
        ds = make_ds(rng.standard_normal((300, 16)))
        model = pca_fit(ds, 16)
        out = pca_project(model, ds)
        before = pdist(ds.data.astype(np.float64))
        after = pdist(out.data.astype(np.float64))
        assert np.allclose(after, before, rtol=1e-5)

    def test_projection_never_increases_l2_distances(self):
        rng = np.random.default_rng(21)
        ds = make_ds(rng.standard_normal((150, 20)))
        model = pca_fit(ds, 7)
        out = pca_project(model, ds)
        before = pdist(ds.data.astype(np.float64))
        after = pdist(out.data.astype(np.float64))
        assert np.all(after <= before * (1 + 1e-9) + 1e-9)

    def test_dim_mismatch(self):
        model = pca_fit(LINE, 1)
        other = make_ds(np.ones((4, 3)))
        with pytest.raises(ValueError, match="dim"):
            pca_project(model, other)

    def test_count_preserved_and_provenance(self):
        rng = np.random.default_rng(2)
        ds = make_ds(rng.standard_normal((50, 8)), name="orig")
        out = pca_project(pca_fit(ds, 3), ds)
        assert out.count == 50 and out.dim == 3
        assert out.meta["pca"]["from"] == "orig"
        assert out.meta["pca"]["output_dim"] == 3


class TestModelIo:
    def test_save_load_roundtrip(self, tmp_path):
        rng = np.random.default_rng(33)
        ds = make_ds(rng.standard_normal((100, 5)))
        model = pca_fit(ds, 2)
        path = tmp_path / "model.json"
        model.save(path)
        back = PcaModel.load(path)
        assert back.input_dim == 5 and back.output_dim == 2
        assert np.allclose(back.components, model.components)
        assert np.allclose(back.mean, model.mean)
        assert np.allclose(back.explained_variance, model.explained_variance)
