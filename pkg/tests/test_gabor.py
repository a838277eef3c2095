import math

import numpy as np
import pytest

from microloc import (
    GridSignal,
    InadmissibleParameters,
    Weight,
    build_agp,
    check_partition,
    coefficients,
    discrete_mod_norm,
    reconstruct,
    stft,
    support_index_set,
)
from microloc.fixtures import random_band_limited

TWO_PI = 2 * math.pi


def test_build_agp_partition_constant_1d():
    sys0 = build_agp(1.0, math.pi, d=1)
    assert sys0.partition_constant == pytest.approx(0.5)
    assert check_partition(sys0, n=512) <= 1e-10


def test_build_agp_rejects_inadmissible():
    with pytest.raises(InadmissibleParameters):
        build_agp(1.0, TWO_PI)
    with pytest.raises(InadmissibleParameters):
        build_agp(2.0, math.pi)  # product exactly 2*pi
    with pytest.raises(InadmissibleParameters):
        build_agp(1.0, 1.0, alpha1=0.5)  # window side below alpha


def test_build_agp_partition_constant_2d():
    sys0 = build_agp(0.5, math.pi, d=2)
    # (beta / 2 pi)^d with beta = pi, d = 2
    assert sys0.partition_constant == pytest.approx(0.25)
    assert check_partition(sys0, n=48) <= 1e-10


def test_check_partition_detects_broken_systems():
    import dataclasses

    sys0 = build_agp(1.0, math.pi, d=1)
    theta = sys0.partition_constant

    doubled = dataclasses.replace(
        sys0,
        phi=dataclasses.replace(sys0.phi, fn=lambda p, _f=sys0.phi.fn: 2.0 * _f(p)),
    )
    assert check_partition(doubled, n=128) == pytest.approx(theta, rel=1e-9)

    killed = dataclasses.replace(
        sys0, psi=dataclasses.replace(sys0.psi, fn=lambda p: np.zeros(p.shape[0]))
    )
    assert check_partition(killed, n=128) == pytest.approx(theta, rel=1e-12)


def test_partition_identity_100_random_systems(rng):
    worst = 0.0
    for _ in range(100):
        while True:
            alpha = float(rng.uniform(0.3, 2.5))
            beta = float(rng.uniform(0.3, 2.5))
            if alpha * beta < 0.95 * TWO_PI:
                break
        sys0 = build_agp(alpha, beta, d=1)
        worst = max(worst, check_partition(sys0, n=128))
    assert worst <= 1e-10


def test_partition_holds_across_epsilon():
    sys0 = build_agp(0.9, 1.7, d=1)
    for eps in (1.0, 0.5, 0.25, 0.125):
        assert check_partition(sys0.with_epsilon(eps), n=256) <= 1e-10


def test_coefficients_zero_signal():
    sys0 = build_agp(1.0, 1.0, d=1)
    z = GridSignal.from_samples(np.zeros(2048, complex), [-8.0], [16 / 2048])
    table = coefficients(z, sys0, 20.0)
    assert table.values.shape[0] == 0 or np.all(table.values == 0)


def test_coefficient_of_isolated_window_is_its_energy():
    # with translates far apart, (psi_{0,0}, psi_{0,0}) = ||psi||^2 and
    # non-overlapping j give exactly zero
    sys0 = build_agp(4.0, 0.5, d=1)
    n, lo = 2**12, -16.0
    h = -2 * lo / n
    x = lo + h * np.arange(n)
    f = GridSignal.from_samples(sys0.psi(x[:, None]).astype(complex), [lo], [h])
    table = coefficients(f, sys0, 5.0)
    row0 = table.rows_for(np.array([[0]]))[0]
    k0 = int(np.nonzero((table.ks == 0).all(axis=1))[0][0])
    energy = h * float(np.sum(np.abs(f.samples) ** 2))
    assert table.values[row0, k0] == pytest.approx(energy, rel=1e-10)
    for row, j in enumerate(table.js):
        if j[0] != 0 and abs(j[0]) > 1:
            assert np.max(np.abs(table.values[row])) < 1e-14


def test_coefficient_modulation_index_shift():
    sys0 = build_agp(1.0, 1.0, d=1)
    f = random_band_limited(n=4096, bandwidth=5.0, seed=5)
    m = 3
    table0 = coefficients(f, sys0, 12.0)
    table1 = coefficients(f.modulate([m * sys0.beta]), sys0, 12.0)
    ks = table0.ks[:, 0]
    for k in range(-5, 6):
        a = table1.values[:, ks == k]
        b = table0.values[:, ks == k - m]
        assert np.max(np.abs(a - b)) < 1e-10


def test_coefficients_match_stft_convention():
    sys0 = build_agp(1.0, 1.5, d=1).with_epsilon(0.5)
    f = random_band_limited(n=4096, bandwidth=4.0, seed=9)
    table = coefficients(f, sys0, 6.0)
    scale = TWO_PI**0.5
    w = sys0.psi.scaled(sys0.epsilon)
    for j in (-1, 0, 2):
        row = table.rows_for(np.array([[j]]))[0]
        for idx in (0, len(table.ks) // 2, len(table.ks) - 1):
            xi = table.xi[idx]
            x = sys0.epsilon * sys0.x_point([j])
            expected = scale * stft(f, w, x, xi)
            assert abs(table.values[row, idx] - expected) < 1e-10


def test_reconstruct_zero_table_and_round_trip():
    sys0 = build_agp(1.0, math.pi, d=1)
    f = random_band_limited(n=4096, bandwidth=6.0, seed=2)
    table = coefficients(f, sys0, 180.0)
    zeroed = table.__class__(
        table.js, table.ks, table.xi, np.zeros_like(table.values),
        table.epsilon, table.freq_radius, table.lambda2,
    )
    assert np.all(reconstruct(zeroed, sys0, f).samples == 0)
    for eps in (1.0, 0.5):
        se = sys0.with_epsilon(eps)
        t = coefficients(f, se, 6.0 + 320.0 / (eps * se.alpha1))
        rec = reconstruct(t, se, f)
        rel = np.linalg.norm(rec.samples - f.samples) / np.linalg.norm(f.samples)
        assert rel <= 1e-6


def test_round_trip_2d_small():
    sys0 = build_agp(1.0, 1.3, d=2)
    rng = np.random.default_rng(3)
    n, lo = 256, -3.0
    h = -2 * lo / n
    x = lo + h * np.arange(n)
    env = np.exp(-((x / 1.1) ** 6))
    field = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    # keep only low frequencies, then window to compact support
    spec = np.fft.fft2(field)
    keep = 4
    mask = np.zeros((n, n))
    mask[:keep, :keep] = mask[-keep:, :keep] = mask[:keep, -keep:] = mask[-keep:, -keep:] = 1
    smooth = np.fft.ifft2(spec * mask)
    samples = smooth * np.outer(env, env)
    f = GridSignal.from_samples(samples, [lo, lo], [h, h])
    table = coefficients(f, sys0, 90.0)
    rec = reconstruct(table, sys0, f)
    rel = np.linalg.norm(rec.samples - f.samples) / np.linalg.norm(f.samples)
    assert rel <= 1e-6


def test_support_index_set_examples():
    sys0 = build_agp(1.0, 1.0, d=1)  # phi side 2*pi
    js = support_index_set(sys0, [0.0])
    assert js[:, 0].tolist() == [-3, -2, -1, 0, 1, 2, 3]
    far = support_index_set(sys0, [1e9])
    assert far.shape[0] == 0
    counts = {
        eps: support_index_set(sys0.with_epsilon(eps), [0.0]).shape[0]
        for eps in (1.0, 0.5, 0.25)
    }
    assert len(set(counts.values())) == 1  # both supports and spacing scale
    shifted = {
        eps: support_index_set(sys0.with_epsilon(eps), [0.3]).shape[0]
        for eps in (1.0, 0.5, 0.25)
    }
    assert max(shifted.values()) - min(shifted.values()) <= 1


def test_support_index_set_2d_shape():
    sys0 = build_agp(2.0, 1.0, d=2).with_epsilon(0.25)
    js = support_index_set(sys0, [0.1, -0.2])
    assert js.shape[1] == 2
    assert js.shape[0] >= 9
    lex = [tuple(j) for j in js.tolist()]
    assert lex == sorted(lex)


def test_discrete_mod_norm_examples():
    sys0 = build_agp(1.0, 1.0, d=1)
    f = random_band_limited(n=4096, bandwidth=5.0, seed=1)
    table = coefficients(f, sys0, 15.0)
    w0 = Weight.bracket_power(0.0)

    zeroed = table.__class__(
        table.js, table.ks, table.xi, np.zeros_like(table.values),
        table.epsilon, table.freq_radius, table.lambda2,
    )
    assert discrete_mod_norm(zeroed, w0, 1, 1) == 0.0

    single = np.zeros_like(table.values)
    single[2, 5] = 3 - 4j
    one_entry = table.__class__(
        table.js, table.ks, table.xi, single,
        table.epsilon, table.freq_radius, table.lambda2,
    )
    for p, q in ((1, 1), (2, math.inf), (math.inf, 3), (2, 2)):
        assert discrete_mod_norm(one_entry, w0, p, q) == pytest.approx(5.0)

    direct = float(np.sqrt(np.sum(np.abs(table.values) ** 2)))
    assert discrete_mod_norm(table, w0, 2, 2) == pytest.approx(direct, rel=1e-12)


def test_coefficient_table_csv(tmp_path):
    sys0 = build_agp(1.0, 1.0, d=1)
    f = random_band_limited(n=2048, bandwidth=3.0, seed=4)
    table = coefficients(f, sys0, 4.0)
    path = table.to_csv(tmp_path / "coeffs.csv")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "j0,k0,re,im"
    assert len(lines) == 1 + table.js.shape[0] * table.ks.shape[0]
