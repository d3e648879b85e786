import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distlearn.datagen import (
    PRESETS,
    Component,
    LibSVMFormatError,
    SyntheticSpec,
    format_libsvm_line,
    generate,
    min_normalized_margin,
    read_libsvm,
    read_manifest,
    write_libsvm,
    write_manifest,
)
from distlearn.types import weighted_error


def test_benchmark_size_preset():
    spec = PRESETS["synthetic1"]
    assert spec.k == 2 and spec.n_per_party == 5000 and spec.d == 50
    assert spec.total == 10000


def test_benchmark_preset_generates_full_size():
    data = generate(PRESETS["synthetic1"])
    assert len(data.full) == 10000 and data.full.dimension == 50


def test_gamma_zero_keeps_counts():
    data = generate(SyntheticSpec(k=3, d=2, n_per_party=50, gamma=0.0, seed=1))
    assert [len(p) for p in data.parties] == [50, 50, 50]


def test_by_cluster_two_components():
    comps = (Component((0.0, 0.0), 1.0, 30, 0), Component((10.0, 10.0), 1.0, 30, 0))
    spec = SyntheticSpec(k=2, d=2, n_per_party=30, gamma=0.0, mixture=comps,
                         partition_mode="by_cluster", separable=False)
    data = generate(spec)
    assert np.all(data.components[0] == 0) and np.all(data.components[1] == 1)


def test_by_halfspace_gives_disjoint_regions():
    spec = SyntheticSpec(k=3, d=2, n_per_party=40, partition_mode="by_halfspace",
                         partition_normal=(1.0, 0.0), seed=2)
    parts = generate(spec).parties
    for left, right in zip(parts, parts[1:]):
        assert left.X[:, 0].max() <= right.X[:, 0].min()


def test_rejection_limit():
    comps = (Component((0.0, 0.0), 0.01, 20, 1),)
    spec = SyntheticSpec(k=1, d=2, n_per_party=20, gamma=5.0, mixture=comps, truth_normal=(1.0, 0.0))
    with pytest.raises(RuntimeError):
        generate(spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(gamma=-1)
    with pytest.raises(ValueError):
        SyntheticSpec(partition_mode="diagonal")
    with pytest.raises(ValueError):
        generate(SyntheticSpec(d=2, k=1, n_per_party=5, mixture=(Component((0.0, 0.0), 1.0, 4),)))


@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(1, 6),
       st.sampled_from(["random", "by_halfspace", "by_cluster"]), st.floats(0, 0.3))
def test_separable_output_invariants(seed, k, d, mode, gamma):
    spec = SyntheticSpec(k=k, d=d, n_per_party=30, gamma=gamma, partition_mode=mode, seed=seed)
    data = generate(spec)
    full = data.full
    assert sum(len(p) for p in data.parties) == len(full) == spec.total
    # disjoint cover: every generated row appears exactly once
    rows = {tuple(x) for x in full.X}
    assert len(rows) == len(full)
    assert weighted_error(data.truth, full) == 0.0
    assert min_normalized_margin(data.truth, full) >= gamma - 1e-12


def test_deterministic_per_seed():
    a = generate(PRESETS["small"])
    b = generate(PRESETS["small"])
    assert all(np.array_equal(x.X, y.X) for x, y in zip(a.parties, b.parties))


class TestLibSVM:
    def test_sparse_line(self, tmp_path):
        path = tmp_path / "a.svm"
        path.write_text("+1 1:0.5 3:2.0\n")
        ds = read_libsvm(path, 3)
        assert np.array_equal(ds.X, [[0.5, 0.0, 2.0]]) and ds.y[0] == 1

    def test_empty_features(self, tmp_path):
        path = tmp_path / "a.svm"
        path.write_text("+1\n-1 2:1\n")
        ds = read_libsvm(path)
        assert np.array_equal(ds.X[0], [0.0, 0.0])

    def test_label_mapping(self, tmp_path):
        path = tmp_path / "a.svm"
        path.write_text("0 1:1\n-1 1:1\n2 1:1\n")
        assert list(read_libsvm(path).y) == [-1, -1, 1]

    @pytest.mark.parametrize("line,where", [("+1 2:1 1:3", "line 2"), ("+1 1:x", "line 2"),
                                            ("abc 1:1", "line 2"), ("+1 0:1", "line 2"),
                                            ("+1 1-2", "line 2")])
    def test_malformed(self, tmp_path, line, where):
        path = tmp_path / "bad.svm"
        path.write_text("+1 1:1\n" + line + "\n")
        with pytest.raises(LibSVMFormatError, match=where):
            read_libsvm(path)

    def test_round_trip_is_byte_stable(self, tmp_path):
        ds = generate(PRESETS["small"]).full
        p1, p2 = tmp_path / "1.svm", tmp_path / "2.svm"
        write_libsvm(ds, p1)
        back = read_libsvm(p1, ds.dimension)
        write_libsvm(back, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert np.array_equal(back.X, ds.X) and np.array_equal(back.y, ds.y)

    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=6), st.sampled_from([-1, 1]))
    def test_line_round_trip(self, x, label):
        import tempfile
        from pathlib import Path

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "p.svm"
            path.write_text(format_libsvm_line(x, label) + "\n")
            ds = read_libsvm(path, len(x))
        assert np.array_equal(ds.X[0], np.asarray(x, float)) and ds.y[0] == label


def test_manifest_round_trip(tmp_path):
    spec = PRESETS["adversarial2"]
    write_manifest(tmp_path / "m.json", spec, ["a.svm", "b.svm"])
    back, files = read_manifest(tmp_path / "m.json")
    assert back == spec and files == ["a.svm", "b.svm"]
