import numpy as np
import pytest
from scipy import stats

from matfp.noise import NoiseSpec, add_noise, standard_normals


def test_zero_level_identity():
    f = np.arange(30.0)
    out = add_noise(f, NoiseSpec(0.0, 3))
    assert np.array_equal(out, f) and out is not f


def test_deterministic():
    f = np.linspace(-1, 4, 240)
    a = add_noise(f, NoiseSpec(0.05, 11))
    b = add_noise(f, NoiseSpec(0.05, 11))
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, add_noise(f, NoiseSpec(0.05, 12)))


def test_sample_std():
    f = np.zeros(10_000)
    f[0] = 2.0
    noisy = add_noise(f, NoiseSpec(0.05, 0))
    target = 0.05 * 2.0
    s = np.std(noisy[1:], ddof=1)
    # 99.9% chi-square interval is about +-3.3% for n = 1e4
    lo, hi = (np.sqrt(stats.chi2.ppf(q, 9998) / 9998) for q in (0.0005, 0.9995))
    assert lo * target <= s <= hi * target
    assert abs(s / target - 1) <= 0.03


def test_box_muller_reference():
    u = np.random.Generator(np.random.PCG64(5)).random(4)
    r0 = np.sqrt(-2 * np.log(1 - u[0]))
    expect = [r0 * np.cos(2 * np.pi * u[1]), r0 * np.sin(2 * np.pi * u[1])]
    assert np.allclose(standard_normals(3, 5)[:2], expect, rtol=1e-15)
    assert standard_normals(3, 5).shape == (3,)


def test_normality():
    z = standard_normals(20_000, 1)
    assert stats.kstest(z, "norm").pvalue > 1e-3


def test_split_parts_use_own_maximum():
    f = np.concatenate([np.full(20, 100.0), np.full(220, 1e-3)])
    noisy = add_noise(f, NoiseSpec(0.01, 2, "unsupervised_split"), (20, 220))
    assert np.std(noisy[20:] - f[20:]) < 1e-4
    assert np.std(noisy[:20] - f[:20]) > 0.1
    whole = add_noise(f, NoiseSpec(0.01, 2, "supervised_stress"), (20, 220))
    assert np.std(whole[20:] - f[20:]) > 0.1


def test_invalid_spec():
    with pytest.raises(ValueError):
        NoiseSpec(-0.1)
    with pytest.raises(ValueError):
        NoiseSpec(0.1, 0, "everything")
