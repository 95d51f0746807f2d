import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from pipelearn.errors import ImageIOError
from pipelearn.imgcore import (Connectivity, connected_components, contour_lengths,
                               count_foreground, load_binary, load_gray, save_binary)

from oracles import boundary_pixels, flood_fill_labels, same_partition

binary_images = arrays(bool, st.tuples(st.integers(1, 16), st.integers(1, 16)))


def test_load_gray_roundtrip_2x2(tmp_path):
    path = tmp_path / "a.png"
    Image.fromarray(np.array([[0, 255], [128, 64]], dtype=np.uint8)).save(path)
    img = load_gray(path)
    assert img.shape == (2, 2)
    assert img.tolist() == [[0, 255], [128, 64]]


def test_load_gray_converts_color_to_luminance(tmp_path):
    path = tmp_path / "c.png"
    rgb = np.zeros((1, 3, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 0, 0)
    rgb[0, 1] = (0, 255, 0)
    rgb[0, 2] = (255, 255, 255)
    Image.fromarray(rgb).save(path)
    img = load_gray(path)
    assert img[0, 2] == 255
    assert 0 < img[0, 0] < img[0, 1] < 255


def test_load_gray_missing_file(tmp_path):
    with pytest.raises(ImageIOError, match="file not found"):
        load_gray(tmp_path / "nope.png")


def test_load_gray_degenerate(tmp_path):
    path = tmp_path / "empty.pgm"
    path.write_bytes(b"P5\n0 0\n255\n")
    with pytest.raises(ImageIOError, match="degenerate"):
        load_gray(path)


def test_load_gray_unsupported(tmp_path):
    path = tmp_path / "junk.png"
    path.write_bytes(b"this is not an image")
    with pytest.raises(ImageIOError):
        load_gray(path)


@pytest.mark.parametrize("fill", [False, True])
def test_save_binary_constant(tmp_path, fill):
    path = tmp_path / "b.png"
    save_binary(np.full((4, 4), fill), path)
    raw = np.asarray(Image.open(path))
    assert raw.dtype == np.uint8
    assert np.all(raw == (255 if fill else 0))


@settings(max_examples=50, deadline=None)
@given(img=binary_images)
def test_save_binary_roundtrip(tmp_path_factory, img):
    path = tmp_path_factory.mktemp("rt") / "x.png"
    save_binary(img, path)
    assert np.array_equal(load_binary(path), img)


def test_save_binary_unwritable(tmp_path):
    with pytest.raises(ImageIOError):
        save_binary(np.ones((2, 2), bool), tmp_path / "missing_dir" / "x.png")


def test_components_empty():
    assert connected_components(np.zeros((5, 5), bool)).component_count == 0


def test_components_diagonal():
    img = np.array([[1, 0], [0, 1]], dtype=bool)
    assert connected_components(img, Connectivity.EIGHT).component_count == 1
    assert connected_components(img, Connectivity.FOUR).component_count == 2


def test_components_two_blocks():
    img = np.zeros((5, 5), bool)
    img[0:2, 0:2] = True
    img[3:5, 3:5] = True
    lab = connected_components(img)
    assert lab.component_count == 2
    assert sorted(lab.component_sizes.tolist()) == [4, 4]


@settings(max_examples=200, deadline=None)
@given(img=binary_images, conn=st.sampled_from([4, 8]))
def test_components_match_flood_fill(img, conn):
    lab = connected_components(img, Connectivity(conn))
    ref_labels, ref_sizes = flood_fill_labels(img, conn)
    assert lab.component_count == len(ref_sizes)
    assert same_partition(lab.labels, ref_labels)
    assert set(np.unique(lab.labels[lab.labels > 0]).tolist()) == set(range(1, lab.component_count + 1))
    assert sorted(lab.component_sizes.tolist()) == sorted(ref_sizes)
    assert lab.component_sizes.sum() == img.sum()


@settings(max_examples=200, deadline=None)
@given(img=binary_images)
def test_eight_never_more_components_than_four(img):
    assert (connected_components(img, Connectivity.EIGHT).component_count
            <= connected_components(img, Connectivity.FOUR).component_count)


def test_contour_solid_block():
    img = np.zeros((5, 5), bool)
    img[1:4, 1:4] = True
    assert contour_lengths(img) == [8]


def test_contour_single_pixel_and_empty():
    img = np.zeros((3, 3), bool)
    assert contour_lengths(img) == []
    img[1, 1] = True
    assert contour_lengths(img) == [1]


@settings(max_examples=200, deadline=None)
@given(img=binary_images, conn=st.sampled_from([4, 8]))
def test_contour_lengths_match_oracle(img, conn):
    lengths = contour_lengths(img, Connectivity(conn))
    labels, sizes = flood_fill_labels(img, conn)
    edge = boundary_pixels(img)
    expected = sorted(sum(1 for (r, c) in edge if labels[r, c] == k) for k in range(1, len(sizes) + 1))
    assert sorted(lengths) == expected
    assert sum(lengths) <= count_foreground(img)


def test_count_foreground():
    assert count_foreground(np.zeros((4, 4), bool)) == 0
    assert count_foreground(np.ones((4, 4), bool)) == 16
    checker = (np.add.outer(np.arange(4), np.arange(4)) % 2).astype(bool)
    assert count_foreground(checker) == 8
