import json

import numpy as np
import pytest

from embex import vstore
from embex.errors import (
    DimensionMismatch,
    DuplicateToken,
    MalformedHeader,
    NonFiniteValue,
    OutOfVocabulary,
    TruncatedFile,
)
from embex.vstore import EmbeddingModel, ModelMeta

from conftest import make_random_model


class TestLoadText:
    def test_minimal_file(self, toy2x3):
        model = vstore.load_text(toy2x3)
        assert model.tokens == ["a", "b"]
        assert model.dim == 3
        np.testing.assert_array_equal(model.matrix[0], [1, 0, 0])
        np.testing.assert_array_equal(model.matrix[1], [0, 1, 0])

    def test_dimension_mismatch_reports_line(self, tmp_path):
        path = tmp_path / "bad.vec"
        path.write_text("1 3\na 1 0\n")
        with pytest.raises(DimensionMismatch) as exc:
            vstore.load_text(str(path))
        assert exc.value.line_no == 2

    def test_duplicate_token(self, tmp_path):
        path = tmp_path / "dup.vec"
        path.write_text("2 2\na 1 0\na 0 1\n")
        with pytest.raises(DuplicateToken):
            vstore.load_text(str(path))

    @pytest.mark.parametrize("bad", ["nan", "inf", "-inf"])
    def test_non_finite_value(self, tmp_path, bad):
        path = tmp_path / "nf.vec"
        path.write_text(f"1 2\na 1 {bad}\n")
        with pytest.raises(NonFiniteValue) as exc:
            vstore.load_text(str(path))
        assert exc.value.line_no == 2

    @pytest.mark.parametrize("header", ["", "3", "x y", "2 3 4", "-1 3", "2 0"])
    def test_malformed_header(self, tmp_path, header):
        path = tmp_path / "h.vec"
        path.write_text(f"{header}\na 1 0 0\n")
        with pytest.raises(MalformedHeader):
            vstore.load_text(str(path))

    def test_fewer_rows_than_header(self, tmp_path):
        path = tmp_path / "short.vec"
        path.write_text("3 2\na 1 0\nb 0 1\n")
        with pytest.raises(TruncatedFile):
            vstore.load_text(str(path))

    def test_header_dim_reported(self, tmp_path):
        n, dim = 1000, 300
        model = make_random_model(n, dim, seed=0)
        path = tmp_path / "big.vec"
        vstore.save_text(model, str(path))
        loaded = vstore.load_text(str(path))
        assert loaded.dim == 300
        assert vstore.model_info(loaded)["dim"] == 300
        assert loaded.vocab_size == 1000


class TestLoadBinary:
    def test_equivalent_to_text(self, toy2x3, tmp_path):
        m_text = vstore.load_text(toy2x3)
        bin_path = tmp_path / "toy.bin"
        vstore.save_binary(m_text, str(bin_path))
        m_bin = vstore.load_binary(str(bin_path))
        assert m_bin.tokens == m_text.tokens
        np.testing.assert_array_equal(m_bin.matrix, m_text.matrix)

    def test_truncated_mid_vector(self, tmp_path):
        model = make_random_model(3, 4, seed=1)
        path = tmp_path / "t.bin"
        vstore.save_binary(model, str(path))
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 7])
        with pytest.raises(TruncatedFile):
            vstore.load_binary(str(path))

    def test_truncated_token(self, tmp_path):
        path = tmp_path / "t2.bin"
        path.write_bytes(b"2 2\nabc " + np.zeros(2, "<f4").tobytes() + b"longtokenwithoutsep")
        with pytest.raises(TruncatedFile):
            vstore.load_binary(str(path))

    def test_non_finite(self, tmp_path):
        path = tmp_path / "nf.bin"
        row = np.array([1.0, np.nan], "<f4")
        path.write_bytes(b"1 2\na " + row.tobytes() + b"\n")
        with pytest.raises(NonFiniteValue):
            vstore.load_binary(str(path))

    def test_tolerates_missing_record_newlines(self, tmp_path):
        rows = np.array([[1, 2], [3, 4]], "<f4")
        blob = b"2 2\n" + b"a " + rows[0].tobytes() + b"b " + rows[1].tobytes()
        path = tmp_path / "nn.bin"
        path.write_bytes(blob)
        model = vstore.load_binary(str(path))
        assert model.tokens == ["a", "b"]
        np.testing.assert_array_equal(model.matrix, rows)


class TestRoundTrips:
    def test_text_round_trip_within_tolerance(self, tmp_path):
        for seed in range(20):
            model = make_random_model(20, 10, seed=seed)
            path = tmp_path / f"m{seed}.vec"
            vstore.save_text(model, str(path))
            again = vstore.load_text(str(path))
            assert again.tokens == model.tokens
            np.testing.assert_allclose(again.matrix, model.matrix, atol=1e-6)

    def test_binary_round_trip_bit_exact(self, tmp_path):
        for seed in range(20):
            model = make_random_model(20, 10, seed=seed)
            path = tmp_path / f"m{seed}.bin"
            vstore.save_binary(model, str(path))
            again = vstore.load_binary(str(path))
            assert again.tokens == model.tokens
            assert again.matrix.tobytes() == model.matrix.tobytes()

    def test_loaders_identical_on_equivalent_encodings(self, tmp_path):
        # full-precision decimal text parses back to the exact same float32s
        model = make_random_model(30, 7, seed=5)
        bin_path = tmp_path / "m.bin"
        vstore.save_binary(model, str(bin_path))
        text_path = tmp_path / "m.vec"
        with open(text_path, "w", encoding="utf-8") as fh:
            fh.write(f"{model.vocab_size} {model.dim}\n")
            for tok, row in zip(model.tokens, model.matrix):
                comps = " ".join(np.format_float_positional(v, unique=True) for v in row)
                fh.write(f"{tok} {comps}\n")
        m_text = vstore.load_text(str(text_path))
        m_bin = vstore.load_binary(str(bin_path))
        assert m_text.tokens == m_bin.tokens
        assert m_text.matrix.tobytes() == m_bin.matrix.tobytes()

    def test_meta_survives_save_load(self, tmp_path):
        meta = ModelMeta(dim=4, feature_kind="lemma_lower", frequency_threshold=7, window=3, source="unit")
        model = EmbeddingModel(["x", "y"], np.ones((2, 4), np.float32), meta)
        path = tmp_path / "m.vec"
        vstore.save_text(model, str(path))
        again = vstore.load_text(str(path))
        assert again.meta.feature_kind == "lemma_lower"
        assert again.meta.frequency_threshold == 7
        assert again.meta.window == 3
        assert again.meta.source == "unit"

    def test_absent_sidecar_gives_defaults(self, tmp_path):
        path = tmp_path / "m.vec"
        path.write_text("1 2\na 1 0\n")
        model = vstore.load_text(str(path))
        assert model.meta.feature_kind == "wordform"
        assert model.meta.frequency_threshold == 0
        assert model.meta.window is None

    def test_autodetect(self, tmp_path):
        model = make_random_model(10, 5, seed=2)
        tpath, bpath = tmp_path / "m.vec", tmp_path / "m.bin"
        vstore.save_text(model, str(tpath))
        vstore.save_binary(model, str(bpath))
        assert vstore.load(str(tpath)).tokens == model.tokens
        assert vstore.load(str(bpath)).matrix.tobytes() == model.matrix.tobytes()


class TestLookup:
    def test_exact_hit(self, toy2x3):
        model = vstore.load_text(toy2x3)
        np.testing.assert_array_equal(vstore.lookup(model, "a"), [1, 0, 0])

    def test_no_case_folding(self, toy2x3):
        model = vstore.load_text(toy2x3)
        with pytest.raises(OutOfVocabulary):
            vstore.lookup(model, "A")

    def test_every_vocab_token_resolves(self, random_model):
        for i, tok in enumerate(random_model.tokens):
            np.testing.assert_array_equal(
                vstore.lookup(random_model, tok), random_model.matrix[i]
            )


class TestModelInvariants:
    def test_unit_matrix_norms(self, random_model):
        norms = np.linalg.norm(random_model.unit_matrix, axis=1)
        assert np.all(np.abs(norms - 1.0) <= 1e-6)

    def test_zero_rows_kept_and_flagged(self):
        mat = np.array([[1, 0], [0, 0], [0, 2]], np.float32)
        model = EmbeddingModel(["a", "b", "c"], mat, ModelMeta(dim=2))
        assert model.zero_mask.tolist() == [False, True, False]
        np.testing.assert_array_equal(model.unit_matrix[1], [0, 0])
        assert vstore.model_info(model)["zero_norm_rows"] == 1

    def test_vocab_order_is_file_order(self, tmp_path):
        path = tmp_path / "ord.vec"
        path.write_text("3 2\nzeta 1 0\nalpha 0 1\nmu 1 1\n")
        model = vstore.load_text(path.as_posix())
        assert model.tokens == ["zeta", "alpha", "mu"]

    def test_matrix_is_immutable(self, random_model):
        with pytest.raises(ValueError):
            random_model.matrix[0, 0] = 5.0

    def test_model_info_fields(self, toy2x3):
        info = vstore.model_info(vstore.load_text(toy2x3))
        assert info["dim"] == 3
        assert info["vocab_size"] == 2

    def test_duplicate_rejected_at_construction(self):
        with pytest.raises(DuplicateToken):
            EmbeddingModel(["a", "a"], np.ones((2, 2), np.float32), ModelMeta(dim=2))

    def test_sidecar_file_schema(self, tmp_path):
        model = make_random_model(4, 3, seed=0)
        path = tmp_path / "m.vec"
        vstore.save_text(model, str(path))
        sidecar = json.loads((tmp_path / "m.vec.meta.json").read_text())
        assert set(sidecar) == {"dim", "feature_kind", "frequency_threshold", "window", "source"}
