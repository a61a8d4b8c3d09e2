"""Readers and writers for parameter, sample-set, image and label files.

Text forms are JSON.  Python's ``json`` writes floats with their shortest
round-trip representation, so text files are lossless.  Images also have a
binary form (PWIF):

    magic  b"PWIF"
    u32    version (1)
    u32    height
    u32    width
    u16    p
    f64    looks
    f64    re, im of every entry, full p x p matrices, pixels row-major

All fields are little-endian.
"""

import csv
import json
import struct

import numpy as np

from . import hermitian as hm
from .clustering import CovarianceImage
from .errors import FormatError, PolWishartError
from .wishart import SampleSet, WishartParams

PWIF_MAGIC = b"PWIF"
PWIF_VERSION = 1
_PWIF_HEADER = struct.Struct("<4sIIIHd")
_COMPLEX_LE = np.dtype("<c16")


def _load_json(text, where):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{where}: invalid JSON ({exc.msg} at column {exc.colno})") from None


def _read_text(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# -- parameters -------------------------------------------------------------

def params_to_document(theta):
    return {"n": theta.n, "sigma": hm.to_document(theta.sigma)}


def _located(func, doc, where):
    # keep the package error type, prefix the location
    try:
        return func(doc)
    except PolWishartError as exc:
        raise type(exc)(f"{where}: {exc}") from None
    except (TypeError, ValueError, KeyError) as exc:
        raise FormatError(f"{where}: {exc}") from None


def _params(doc):
    return WishartParams(hm.from_document(doc["sigma"]), float(doc["n"]))


def params_from_document(doc, where="parameter file"):
    if not isinstance(doc, dict) or "n" not in doc or "sigma" not in doc:
        raise FormatError(f"{where}: expected an object with 'n' and 'sigma'")
    return _located(_params, doc, where)


def write_params(path, theta, **extra):
    doc = params_to_document(theta)
    doc.update(extra)
    _write_text(path, json.dumps(doc, indent=2) + "\n")


def read_params(path):
    return params_from_document(_load_json(_read_text(path), f"{path}: line 1"), str(path))


# -- sample sets ------------------------------------------------------------

def _matrix_lines(lines, start, count, p, path):
    out = np.empty((count, p, p), dtype=np.complex128)
    for i in range(count):
        lineno = start + i + 1
        if start + i >= len(lines) or not lines[start + i].strip():
            raise FormatError(f"{path}: line {lineno}: expected {count} matrices, found {i}")
        where = f"{path}: line {lineno}"
        doc = _load_json(lines[start + i], where)
        m = _located(hm.from_document, doc, where)
        if m.shape != (p, p):
            raise FormatError(f"{where}: matrix is {m.shape[0]}x{m.shape[1]}, header says p={p}")
        out[i] = m
    extra = [j for j in range(start + count, len(lines)) if lines[j].strip()]
    if extra:
        raise FormatError(f"{path}: line {extra[0] + 1}: more records than the header announces")
    return out


def _header(lines, path, keys):
    if not lines or not lines[0].strip():
        raise FormatError(f"{path}: line 1: empty file, expected a header")
    head = _load_json(lines[0], f"{path}: line 1")
    if not isinstance(head, dict) or any(k not in head for k in keys):
        raise FormatError(f"{path}: line 1: header must contain {', '.join(keys)}")
    return head


def write_samples(path, samples):
    z = samples.matrices if isinstance(samples, SampleSet) else np.asarray(samples)
    lines = [json.dumps({"p": int(z.shape[-1]), "N": int(z.shape[0])})]
    lines.extend(json.dumps(hm.to_document(m)) for m in z)
    _write_text(path, "\n".join(lines) + "\n")


def read_samples(path):
    lines = _read_text(path).splitlines()
    head = _header(lines, path, ("p", "N"))
    p, N = int(head["p"]), int(head["N"])
    if p < 1 or N < 1:
        raise FormatError(f"{path}: line 1: p and N must be positive, got p={p}, N={N}")
    return SampleSet(_matrix_lines(lines, 1, N, p, path), validated=True)


# -- images -----------------------------------------------------------------

def write_image_text(path, img):
    head = {"height": img.height, "width": img.width, "p": img.p, "looks": img.looks}
    lines = [json.dumps(head)]
    lines.extend(json.dumps(hm.to_document(m)) for m in img.flat())
    _write_text(path, "\n".join(lines) + "\n")


def read_image_text(path):
    lines = _read_text(path).splitlines()
    head = _header(lines, path, ("height", "width", "p", "looks"))
    h, w, p = int(head["height"]), int(head["width"]), int(head["p"])
    px = _matrix_lines(lines, 1, h * w, p, path)
    return CovarianceImage(px.reshape(h, w, p, p), float(head["looks"]))


def image_to_pwif(img):
    head = _PWIF_HEADER.pack(PWIF_MAGIC, PWIF_VERSION, img.height, img.width, img.p, img.looks)
    return head + np.ascontiguousarray(img.pixels, dtype=_COMPLEX_LE).tobytes()


def image_from_pwif(data):
    data = bytes(data)
    if data[:4] != PWIF_MAGIC:
        raise FormatError("not a PWIF file")
    hsize = _PWIF_HEADER.size
    if len(data) < hsize:
        raise FormatError(
            f"truncated PWIF header: {len(data)} bytes present, {hsize} needed "
            f"(missing {hsize - len(data)} bytes at offset {len(data)})"
        )
    _, version, h, w, p, looks = _PWIF_HEADER.unpack_from(data)
    if version != PWIF_VERSION:
        raise FormatError(f"unsupported PWIF version {version} at offset 4")
    if p < 1:
        raise FormatError(f"PWIF dimension p must be positive (offset 16), got {p}")
    need = h * w * p * p * _COMPLEX_LE.itemsize
    body = len(data) - hsize
    if body < need:
        raise FormatError(
            f"truncated PWIF pixel data: expected {need} bytes from offset {hsize}, "
            f"found {body} (missing {need - body} bytes at offset {len(data)})"
        )
    if body > need:
        raise FormatError(f"{body - need} unexpected trailing bytes at offset {hsize + need}")
    px = np.frombuffer(data, dtype=_COMPLEX_LE, count=h * w * p * p, offset=hsize)
    return CovarianceImage(px.astype(np.complex128).reshape(h, w, p, p), looks)


def write_image_pwif(path, img):
    with open(path, "wb") as fh:
        fh.write(image_to_pwif(img))


def read_image_pwif(path):
    with open(path, "rb") as fh:
        return image_from_pwif(fh.read())


def is_pwif(path):
    with open(path, "rb") as fh:
        return fh.read(4) == PWIF_MAGIC


def read_image(path):
    """Read an image in either form, telling them apart by the magic bytes."""
    return read_image_pwif(path) if is_pwif(path) else read_image_text(path)


# -- label maps -------------------------------------------------------------

def write_pgm(path, labels, binary=False):
    """Label map as a PGM raster whose gray levels are the labels themselves."""
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise FormatError(f"label map must be 2-D, got shape {labels.shape}")
    if labels.size and labels.min() < 0:
        raise FormatError("labels must be non-negative")
    maxval = max(1, int(labels.max()) if labels.size else 1)
    if maxval > 65535:
        raise FormatError(f"labels up to {maxval} exceed the PGM range")
    h, w = labels.shape
    head = f"{'P5' if binary else 'P2'}\n{w} {h}\n{maxval}\n".encode("ascii")
    if binary:
        dtype = ">u1" if maxval < 256 else ">u2"
        body = labels.astype(dtype).tobytes()
    else:
        body = ("\n".join(" ".join(str(int(v)) for v in row) for row in labels) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(head + body)


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header at offset {pos}")
        tokens.append(data[start:pos].decode("ascii"))
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic == "P2":
        values = np.array(data[pos:].split(), dtype=np.int64)
        if values.size != w * h:
            raise FormatError(f"{path}: expected {w * h} values, found {values.size}")
        return values.reshape(h, w)
    if magic == "P5":
        dtype = np.dtype(">u1" if maxval < 256 else ">u2")
        body = data[pos + 1:]
        need = w * h * dtype.itemsize
        if len(body) < need:
            raise FormatError(f"{path}: truncated P5 raster, missing {need - len(body)} bytes at offset {len(data)}")
        return np.frombuffer(body, dtype=dtype, count=w * h).astype(np.int64).reshape(h, w)
    raise FormatError(f"{path}: not a PGM file (magic {magic!r})")


def write_label_csv(path, labels):
    labels = np.asarray(labels)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["row", "col", "label"])
        for (r, c), v in np.ndenumerate(labels):
            out.writerow([r, c, int(v)])


def read_label_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise FormatError(f"{path}: no label rows")
    r = np.array([int(x["row"]) for x in rows])
    c = np.array([int(x["col"]) for x in rows])
    labels = np.zeros((r.max() + 1, c.max() + 1), dtype=np.int64)
    labels[r, c] = [int(x["label"]) for x in rows]
    return labels
