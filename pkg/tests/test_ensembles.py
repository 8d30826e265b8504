import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entdyn import ensembles


def test_qrem_band_zero_is_diagonal():
    spec = ensembles.QremSpec(n_spins=1, band_b=0.0)
    h = ensembles.sample_qrem(spec, 0, 1).to_dense()
    assert h.shape == (2, 2)
    assert h[0, 1] == 0.0 and h[1, 0] == 0.0


def test_qrem_offdiagonal_structure():
    spec = ensembles.QremSpec(n_spins=3, band_b=2.0)
    h = ensembles.sample_qrem(spec, 0, 1).to_dense()
    for row in range(8):
        offsets = sorted(abs(col - row) for col in range(8) if col != row and h[row, col] != 0)
        assert offsets == [1, 2, 4]


def test_qrem_element_variance_matches_map():
    # pooled over 5e4 realizations; offset 2^1 at L=2, band_b=1 has
    # Gaussian variance 1/(1+4) = 0.2
    spec = ensembles.QremSpec(n_spins=2, band_b=1.0)
    vals = []
    for i in range(50000):
        s = ensembles.sample_qrem(spec, i, 7)
        mask = (s.cols - s.rows) == 2
        vals.append(s.values[mask])
    vals = np.concatenate(vals)
    assert len(vals) == 100000
    var = vals.var(ddof=1)
    se = var * np.sqrt(2.0 / (len(vals) - 1))
    assert abs(var - 0.2) < 4 * se
    assert abs(vals.mean()) < 4 * np.sqrt(0.2 / len(vals))


def test_qrem_diagonal_variance():
    spec = ensembles.QremSpec(n_spins=4, band_b=0.0)
    vals = np.concatenate(
        [ensembles.sample_qrem(spec, i, 3).values for i in range(2000)]
    )
    var = vals.var(ddof=1)
    se = var * np.sqrt(2.0 / (len(vals) - 1))
    assert abs(var - 2.0) < 4 * se  # L/2 = 2


def test_anderson_coordination_shell1():
    spec = ensembles.AndersonSpec(side=4, diag_w=1.0, hop_mean_t=0.5)
    h = ensembles.sample_anderson(spec, 0, 1).to_dense()
    counts = (np.abs(h) > 0).sum(axis=1) - 1
    assert set(counts.tolist()) == {6}


def test_anderson_coordination_shell2():
    spec = ensembles.AndersonSpec(side=5, diag_w=1.0, shell_k=2, hop_mean_t=0.5)
    h = ensembles.sample_anderson(spec, 0, 1).to_dense()
    counts = (np.abs(h) > 0).sum(axis=1) - 1
    assert set(counts.tolist()) == {24}


def test_anderson_constant_hopping():
    spec = ensembles.AndersonSpec(side=4, diag_w=1.0, hop_var_w1=0.0, hop_mean_t=0.5)
    s = ensembles.sample_anderson(spec, 0, 1)
    off = s.rows != s.cols
    assert np.all(s.values[off] == 0.5)


def test_anderson_rejects_small_lattice():
    with pytest.raises(ValueError):
        ensembles.AndersonSpec(side=4, diag_w=1.0, shell_k=2)


def test_qrem_rejects_above_cap():
    spec = ensembles.QremSpec(n_spins=15, band_b=1.0)
    with pytest.raises(ValueError):
        ensembles.sample_qrem(spec, 0, 1)


def test_symmetry_exact():
    spec = ensembles.QremSpec(n_spins=5, band_b=3.0)
    h = ensembles.sample_qrem(spec, 2, 9).to_dense()
    assert np.array_equal(h, h.T)


def test_reproducibility_bit_identical():
    spec = ensembles.AndersonSpec(side=4, diag_w=2.0, hop_var_w1=1.0, hop_mean_t=0.3)
    a = ensembles.sample_anderson(spec, 5, 11)
    b = ensembles.sample_anderson(spec, 5, 11)
    assert np.array_equal(a.values, b.values)
    c = ensembles.sample_anderson(spec, 6, 11)
    assert not np.array_equal(a.values, c.values)


def test_variance_map_values():
    qmap = ensembles.variance_map(ensembles.QremSpec(n_spins=2, band_b=1.0))
    assert qmap["diagonal"] == (0.0, 2.0)  # v = L
    # Gaussian variance is v/2 = 1/(1+(2^r/b)^2)
    assert qmap["offdiag_2^1"][1] / 2.0 == pytest.approx(0.2)
    amap = ensembles.variance_map(ensembles.AndersonSpec(side=4, diag_w=3.0, hop_mean_t=0.5))
    assert amap["diagonal"] == (0.0, 9.0)
    assert amap["hopping"] == (0.5, 0.0)


def test_dump_sample_roundtrip(tmp_path):
    spec = ensembles.QremSpec(n_spins=2, band_b=1.0)
    s = ensembles.sample_qrem(spec, 0, 1)
    path = tmp_path / "sample.txt"
    ensembles.dump_sample(s, path)
    lines = path.read_text().splitlines()
    n, nnz, seed = lines[0].split()
    assert int(n) == 4 and int(nnz) == s.nnz and int(seed) == s.realization_seed
    assert len(lines) == 1 + s.nnz
    r, c, v = lines[1].split()
    assert float(v) == s.values[0]  # 17 significant digits round-trip exactly


@given(
    n_spins=st.integers(min_value=1, max_value=6),
    band_b=st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
    index=st.integers(min_value=0, max_value=1000),
)
@settings(max_examples=25, deadline=None)
def test_qrem_structure_property(n_spins, band_b, index):
    spec = ensembles.QremSpec(n_spins=n_spins, band_b=band_b)
    h = ensembles.sample_qrem(spec, index, 13).to_dense()
    assert np.array_equal(h, h.T)
    n = 2 ** n_spins
    expected = n_spins if band_b > 0 else 0
    for row in range(n):
        nz = [col for col in range(n) if col != row and h[row, col] != 0]
        assert len(nz) == expected
        for col in nz:
            assert bin(row ^ col).count("1") == 1
