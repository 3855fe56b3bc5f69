import numpy as np
import pytest

from cartex.frame import analyze, build_spline_bank, synthesize


def test_low_pass_kernel():
    bank = build_spline_bank()
    expected = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]]) / 16.0
    assert np.allclose(bank.kernel(0), expected, atol=1e-15)


def test_diagonal_kernel():
    # a2 (x) a2
    bank = build_spline_bank()
    expected = np.array([[1, 0, -1], [0, 0, 0], [-1, 0, 1]]) * (2.0 / 16.0)
    assert np.allclose(bank.kernel(4), expected, atol=1e-15)


def test_high_pass_kernels_sum_to_zero():
    bank = build_spline_bank()
    for k in range(1, bank.n_channels):
        assert abs(bank.kernel(k).sum()) < 1e-14


def test_bank_has_nine_channels():
    assert build_spline_bank().n_channels == 9


def test_constant_image_coefficients():
    img = np.full((16, 12), 0.7)
    c = analyze(img)
    assert np.allclose(c[0], 0.7, atol=1e-14)
    assert np.max(np.abs(c[1:])) < 1e-14


def test_impulse_response_is_reversed_kernel():
    bank = build_spline_bank()
    img = np.zeros((8, 8))
    img[3, 4] = 1.0
    c = analyze(img, bank)
    for k in range(9):
        expected = np.zeros((8, 8))
        rev = bank.kernel(k)[::-1, ::-1]
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                expected[(3 + dy) % 8, (4 + dx) % 8] += rev[dy + 1, dx + 1]
        assert np.allclose(c[k], expected, atol=1e-15)


def test_perfect_reconstruction():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.random((32, 24))
        err = np.max(np.abs(synthesize(analyze(x)) - x))
        assert err <= 1e-10


def test_adjoint_identity():
    rng = np.random.default_rng(1)
    bank = build_spline_bank()
    for _ in range(10):
        x = rng.standard_normal((17, 23))
        y = rng.standard_normal((9, 17, 23))
        lhs = np.vdot(analyze(x, bank), y)
        rhs = np.vdot(x, synthesize(y, bank))
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1.0)


def test_zero_coefficients_give_zero_image():
    out = synthesize(np.zeros((9, 10, 14)))
    assert np.all(out == 0.0)


def test_linearity():
    rng = np.random.default_rng(2)
    x = rng.random((16, 16))
    y = rng.random((16, 16))
    lhs = analyze(2.5 * x - 0.3 * y)
    rhs = 2.5 * analyze(x) - 0.3 * analyze(y)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_synthesize_rejects_wrong_channel_count():
    with pytest.raises(ValueError):
        synthesize(np.zeros((4, 8, 8)))
