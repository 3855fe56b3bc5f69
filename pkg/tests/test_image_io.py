import numpy as np
import pytest

from cartex.image_io import (
    read_image,
    read_mask,
    write_image,
    write_mask,
)


@pytest.fixture
def img():
    return np.random.default_rng(6).random((20, 28))


@pytest.mark.parametrize("suffix", [".pgm", ".png"])
@pytest.mark.parametrize("depth,tol", [(8, 0.5 / 255), (16, 0.5 / 65535)])
def test_round_trip(tmp_path, img, suffix, depth, tol):
    path = tmp_path / f"img{suffix}"
    write_image(img, path, bit_depth=depth)
    back = read_image(path)
    assert back.shape == img.shape
    assert np.max(np.abs(back - img)) <= tol + 1e-12


def test_write_clips_out_of_range(tmp_path):
    img = np.array([[-0.5, 0.0], [1.0, 1.5]])
    path = tmp_path / "clip.png"
    write_image(img, path)
    back = read_image(path)
    assert back[0, 0] == 0.0 and back[1, 1] == 1.0


def test_mask_round_trip(tmp_path):
    mask = np.random.default_rng(7).random((16, 16)) > 0.4
    path = tmp_path / "mask.png"
    write_mask(mask, path)
    assert np.array_equal(read_mask(path), mask)


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_image(np.zeros((8, 8)), tmp_path / "img.tiff")
    with pytest.raises(ValueError):
        read_image(tmp_path / "img.bmp")


def test_pgm_rejects_garbage(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
    with pytest.raises(ValueError):
        read_image(path)
