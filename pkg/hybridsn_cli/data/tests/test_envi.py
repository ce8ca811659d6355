import numpy as np
import pytest

from hybridsn_cli.data.envi import load_envi_cube, read_envi_header, to_row_col_band
from hybridsn_cli.errors import DataError


def write_header(path, lines, samples, bands, interleave="bsq", data_type=4, byte_order=0, extra=""):
    path.write_text(
        "ENVI\n"
        "description = {test cube}\n"
        f"samples = {samples}\n"
        f"lines = {lines}\n"
        f"bands = {bands}\n"
        f"header offset = 0\n"
        f"data type = {data_type}\n"
        f"interleave = {interleave}\n"
        f"byte order = {byte_order}\n"
        f"{extra}"
    )
    return path


def write_cube(tmp_path, cube, interleave, dtype="<f4", data_type=4, byte_order=0):
    lines, samples, bands = cube.shape
    layout = {"bsq": (2, 0, 1), "bil": (0, 2, 1), "bip": (0, 1, 2)}[interleave]
    data = tmp_path / f"cube_{interleave}.img"
    np.ascontiguousarray(cube.transpose(layout), dtype=dtype).tofile(data)
    header = tmp_path / f"cube_{interleave}.hdr"
    write_header(header, lines, samples, bands, interleave, data_type, byte_order)
    return header, data


def test_bsq_layout(tmp_path):
    data = tmp_path / "cube.img"
    np.arange(12, dtype="<f4").tofile(data)
    header = write_header(tmp_path / "cube.hdr", lines=2, samples=2, bands=3)

    cube = load_envi_cube(str(header), str(data))

    assert cube.data.shape == (2, 2, 3)
    np.testing.assert_array_equal(cube.data[0, 0], [0, 4, 8])
    np.testing.assert_array_equal(cube.data[1, 1], [3, 7, 11])


def test_single_sample(tmp_path):
    data = tmp_path / "cube.img"
    np.array([7.0], dtype="<f4").tofile(data)
    header = write_header(tmp_path / "cube.hdr", lines=1, samples=1, bands=1)

    cube = load_envi_cube(str(header), str(data))
    assert cube.data.shape == (1, 1, 1)
    assert cube.data[0, 0, 0] == 7.0


def test_interleaves_yield_identical_cubes(tmp_path):
    expected = np.random.default_rng(3).normal(size=(3, 4, 5)).astype(np.float32)

    cubes = [load_envi_cube(*map(str, write_cube(tmp_path, expected, il))) for il in ("bsq", "bil", "bip")]

    for cube in cubes:
        np.testing.assert_array_equal(cube.data, expected.astype(np.float64))


def test_big_endian_integer_samples_are_not_scaled(tmp_path):
    expected = np.arange(24, dtype=np.int16).reshape(2, 3, 4) * 100
    header, data = write_cube(tmp_path, expected, "bip", dtype=">i2", data_type=2, byte_order=1)

    cube = load_envi_cube(str(header), str(data))
    assert cube.data.dtype == np.float64
    np.testing.assert_array_equal(cube.data, expected)


def test_header_offset_is_skipped(tmp_path):
    data = tmp_path / "cube.img"
    data.write_bytes(b"\xff" * 16 + np.arange(4, dtype="<f8").tobytes())
    header = tmp_path / "cube.hdr"
    write_header(header, lines=1, samples=2, bands=2, interleave="bip", data_type=5)
    header.write_text(header.read_text().replace("header offset = 0", "header offset = 16"))

    cube = load_envi_cube(str(header), str(data))
    np.testing.assert_array_equal(cube.data.ravel(), [0, 1, 2, 3])


def test_indian_pines_extents(tmp_path):
    header = write_header(tmp_path / "ip.hdr", lines=145, samples=145, bands=224, data_type=12)
    data = tmp_path / "ip.img"
    np.zeros(145 * 145 * 224, dtype="<u2").tofile(data)

    cube = load_envi_cube(str(header), str(data))
    assert (cube.height, cube.width, cube.bands) == (145, 145, 224)


def test_header_keys_are_case_insensitive_and_blocks_span_lines(tmp_path):
    header = tmp_path / "cube.hdr"
    header.write_text(
        "ENVI\nSAMPLES = 2\nLines = 3\nbands = 4\nData Type = 4\nInterleave = BIL\nbyte order = 0\n"
        "wavelength = {\n 400.0, 410.0,\n 420.0, 430.0 }\n"
    )

    parsed = read_envi_header(str(header))

    assert parsed["samples"] == 2
    assert parsed["lines"] == 3
    assert parsed["interleave"] == "bil"
    assert "420.0" in parsed["wavelength"]


VALID = "ENVI\nsamples = 1\nlines = 1\nbands = 1\ndata type = 4\ninterleave = bsq\nbyte order = 0\n"


@pytest.mark.parametrize(
    "body, match, line",
    [
        ("samples = 2\n", "ENVI", 1),
        ("ENVI\nsamples = 2\nlines 3\n", "Unparsable", 3),
        (VALID.replace("samples = 1", "samples = two"), "integer", 2),
        (VALID.replace("= bsq", "= bxx"), "interleave", 6),
        (VALID.replace("type = 4", "type = 9"), "data type", 5),
        (VALID.replace("order = 0", "order = 2"), "byte order", 7),
        (VALID.replace("lines = 1", "lines = 0"), "lines", 3),
        ("ENVI\nsamples = 1\nwavelength = { 400,\n", "Unterminated", 3),
    ],
)
def test_malformed_header_reports_line(tmp_path, body, match, line):
    header = tmp_path / "bad.hdr"
    header.write_text(body)

    with pytest.raises(DataError, match=match) as error:
        read_envi_header(str(header))
    assert error.value.line == line
    assert str(error.value).startswith(f"{header}:{line}:")


def test_missing_required_key(tmp_path):
    header = tmp_path / "bad.hdr"
    header.write_text("ENVI\nsamples = 1\nlines = 1\n")

    with pytest.raises(DataError, match="bands"):
        read_envi_header(str(header))


def test_missing_header_file(tmp_path):
    with pytest.raises(DataError, match="Cannot read ENVI header"):
        read_envi_header(str(tmp_path / "absent.hdr"))


def test_data_size_mismatch(tmp_path):
    data = tmp_path / "cube.img"
    np.arange(11, dtype="<f4").tofile(data)
    header = write_header(tmp_path / "cube.hdr", lines=2, samples=2, bands=3)

    with pytest.raises(DataError, match="44 bytes") as error:
        load_envi_cube(str(header), str(data))
    assert error.value.path == str(data)


def test_unknown_interleave_in_reorder():
    with pytest.raises(DataError):
        to_row_col_band(np.zeros(4), 1, 2, 2, "bxx")
