# Copyright 2026 The oodsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Cross-language checks of the weight file, its manifest and the dataset.

The weight format and forward pass are reimplemented here with numpy and
compared against the C++ library. Paths to the helper binaries come from the
OODSIM_FIXTURE and OODSIM_CLI environment variables.
"""

import csv
import json
import os
import struct
import subprocess
import tempfile
import unittest
from pathlib import Path

import numpy as np

FIXTURE = os.environ.get("OODSIM_FIXTURE", "oodsim_fixture")
CLI = os.environ.get("OODSIM_CLI", "oodsim")

TAG_CONV, TAG_BN, TAG_ELU, TAG_POOL, TAG_FLATTEN, TAG_DENSE = range(6)
ARRAYS_PER_TAG = {TAG_CONV: 3, TAG_BN: 5, TAG_ELU: 1, TAG_POOL: 0, TAG_FLATTEN: 0, TAG_DENSE: 2}


# ---- weight file


def read_oodw(data: bytes):
    """Returns (version, [(tag, [arrays])]) and checks nothing trails."""
    if data[:4] != b"OODW":
        raise ValueError("bad magic")
    version, count = struct.unpack_from("<II", data, 4)
    pos = 12
    layers = []
    for _ in range(count):
        tag = data[pos]
        pos += 1
        arrays = []
        for _ in range(ARRAYS_PER_TAG[tag]):
            (rank,) = struct.unpack_from("<I", data, pos)
            pos += 4
            shape = struct.unpack_from(f"<{rank}I", data, pos)
            pos += 4 * rank
            n = int(np.prod(shape))
            if pos + 4 * n > len(data):
                raise ValueError("payload shorter than declared shape")
            arrays.append(np.frombuffer(data, dtype="<f4", count=n, offset=pos).reshape(shape))
            pos += 4 * n
        layers.append((tag, arrays))
    if pos != len(data):
        raise ValueError(f"{len(data) - pos} trailing bytes")
    return version, layers


def write_oodw(layers, version=1) -> bytes:
    out = bytearray(b"OODW")
    out += struct.pack("<II", version, len(layers))
    for tag, arrays in layers:
        out.append(tag)
        for a in arrays:
            a = np.asarray(a, dtype="<f4")
            out += struct.pack("<I", a.ndim)
            out += struct.pack(f"<{a.ndim}I", *a.shape)
            out += a.tobytes()
    return bytes(out)


def read_manifest(path: Path):
    kv = {}
    for line in path.read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            k, v = line.split("=", 1)
            kv[k.strip()] = v.strip()
    return kv


# ---- forward pass (float64)


def conv2d(x, k, b, stride, pad):
    c, h, w = x.shape
    o, _, kh, kw = k.shape
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    cols = np.empty((c, kh, kw, oh, ow))
    for i in range(kh):
        for j in range(kw):
            cols[:, i, j] = xp[:, i : i + stride * oh : stride, j : j + stride * ow : stride]
    y = np.tensordot(k.astype(np.float64), cols, axes=([1, 2, 3], [0, 1, 2]))
    return y + b.astype(np.float64)[:, None, None]


def forward(layers, x):
    x = x.astype(np.float64)
    for tag, a in layers:
        if tag == TAG_CONV:
            x = conv2d(x, a[0], a[1], int(a[2][0]), int(a[2][1]))
        elif tag == TAG_BN:
            g, beta, mean, var, eps = (t.astype(np.float64) for t in a)
            x = g[:, None, None] * (x - mean[:, None, None]) / np.sqrt(var[:, None, None] + eps[0]) + beta[:, None, None]
        elif tag == TAG_ELU:
            alpha = float(a[0][0])
            x = np.where(x > 0, x, alpha * np.expm1(np.minimum(x, 0)))
        elif tag == TAG_POOL:
            c, h, w = x.shape
            x = x[:, : h // 2 * 2, : w // 2 * 2].reshape(c, h // 2, 2, w // 2, 2).max(axis=(2, 4))
        elif tag == TAG_FLATTEN:
            x = x.reshape(-1)
        elif tag == TAG_DENSE:
            x = a[0].astype(np.float64) @ x + a[1].astype(np.float64)
    d = x.size // 2
    return x[:d], x[d:]


# ---- images


def read_ppm(path: Path):
    data = path.read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while data[pos : pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    pos += 1
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != b"P6" or maxval != 255:
        raise ValueError(f"unsupported PPM header {tokens}")
    img = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=pos).reshape(h, w, 3)
    if pos + w * h * 3 != len(data):
        raise ValueError("PPM has trailing bytes")
    return img


def to_tensor(img):
    return (img.astype(np.float32) / np.float32(255.0)).transpose(2, 0, 1)


class Fixture:
    _dir = None

    @classmethod
    def dir(cls) -> Path:
        if cls._dir is None:
            cls._tmp = tempfile.TemporaryDirectory(prefix="oodsim_py_")
            cls._dir = Path(cls._tmp.name)
            subprocess.run([FIXTURE, "export", str(cls._dir)], check=True)
        return cls._dir


class WeightFormatTest(unittest.TestCase):
    def test_header_and_layout(self):
        data = (Fixture.dir() / "small.oodw").read_bytes()
        version, layers = read_oodw(data)
        self.assertEqual(version, 1)
        tags = [t for t, _ in layers]
        self.assertEqual(tags[0], TAG_CONV)
        self.assertIn(TAG_FLATTEN, tags)
        self.assertEqual(tags[-1], TAG_DENSE)

    def test_reserialize_is_byte_identical(self):
        for name in ("small.oodw", "full.oodw"):
            data = (Fixture.dir() / name).read_bytes()
            version, layers = read_oodw(data)
            self.assertEqual(write_oodw(layers, version), data, name)

    def test_manifest_matches_model(self):
        for name in ("small.oodw", "full.oodw"):
            m = read_manifest(Fixture.dir() / (name + ".manifest"))
            self.assertEqual(m["format"], "OODW")
            self.assertEqual(m["version"], "1")
            self.assertEqual([int(v) for v in m["input_shape"].split(",")], [3, 48, 128])
            _, layers = read_oodw((Fixture.dir() / name).read_bytes())
            self.assertEqual(layers[-1][1][0].shape[0], 2 * int(m["latent_dim"]))

    def test_full_architecture_has_1568_hidden_units(self):
        _, layers = read_oodw((Fixture.dir() / "full.oodw").read_bytes())
        dense = [a for t, a in layers if t == TAG_DENSE]
        self.assertEqual(dense[0][0].shape[0], 1568)
        self.assertEqual(dense[-1][0].shape[0], 60)

    def test_truncated_payload_rejected(self):
        data = (Fixture.dir() / "small.oodw").read_bytes()
        with self.assertRaises(ValueError):
            read_oodw(data[:-4])
        bad = Fixture.dir() / "bad.oodw"
        bad.write_bytes(data[:-4])
        (Fixture.dir() / "bad.oodw.manifest").write_bytes((Fixture.dir() / "small.oodw.manifest").read_bytes())
        r = subprocess.run([FIXTURE, "encode", str(bad), str(Fixture.dir() / "img_00.ppm")], capture_output=True)
        self.assertEqual(r.returncode, 2)


class ForwardPassTest(unittest.TestCase):
    def check(self, model):
        expected = json.loads((Fixture.dir() / "expected.json").read_text())[model]
        _, layers = read_oodw((Fixture.dir() / f"{model}.oodw").read_bytes())
        worst = 0.0
        for item in expected:
            img = read_ppm(Fixture.dir() / item["image"])
            self.assertEqual(img.shape, (48, 128, 3))
            mu, logvar = forward(layers, to_tensor(img))
            worst = max(worst, np.max(np.abs(mu - item["out"]["mu"])), np.max(np.abs(logvar - item["out"]["logvar"])))
        self.assertLess(worst, 1e-4)
        return len(expected)

    def test_small_model_twenty_images(self):
        self.assertEqual(self.check("small"), 20)

    def test_full_model(self):
        self.assertGreaterEqual(self.check("full"), 2)

    def test_python_written_file_loads_in_library(self):
        rng = np.random.default_rng(3)
        d = 4
        layers = [
            (TAG_CONV, [rng.uniform(-0.3, 0.3, (2, 3, 3, 3)), rng.uniform(-0.1, 0.1, 2), np.array([2.0, 1.0])]),
            (TAG_BN, [np.ones(2), np.zeros(2), np.zeros(2), np.ones(2), np.array([1e-5])]),
            (TAG_ELU, [np.array([0.7])]),
            (TAG_POOL, []),
            (TAG_FLATTEN, []),
            (TAG_DENSE, [rng.uniform(-0.05, 0.05, (2 * d, 2 * 12 * 32)), rng.uniform(-0.1, 0.1, 2 * d)]),
        ]
        path = Fixture.dir() / "py.oodw"
        path.write_bytes(write_oodw(layers))
        Path(str(path) + ".manifest").write_text(f"format=OODW\nversion=1\ninput_shape=3,48,128\nlatent_dim={d}\n")
        images = [Fixture.dir() / f"img_{i:02d}.ppm" for i in range(3)]
        r = subprocess.run([FIXTURE, "encode", str(path), *map(str, images)], check=True, capture_output=True, text=True)
        got = json.loads(r.stdout)
        _, parsed = read_oodw(path.read_bytes())
        for img_path, out in zip(images, got):
            mu, logvar = forward(parsed, to_tensor(read_ppm(img_path)))
            np.testing.assert_allclose(out["mu"], mu, atol=1e-5)
            np.testing.assert_allclose(out["logvar"], logvar, atol=1e-5)


class DatasetTest(unittest.TestCase):
    def test_rendered_dataset_index_and_frames(self):
        with tempfile.TemporaryDirectory(prefix="oodsim_ds_") as tmp:
            out = Path(tmp)
            subprocess.run(
                [CLI, "render-dataset", "--frames", "24", "--ood-fraction", "0.5", "--out", str(out)],
                check=True,
                capture_output=True,
            )
            with open(out / "index.csv", newline="") as f:
                reader = csv.DictReader(f)
                self.assertEqual(
                    reader.fieldnames, ["file", "label", "obstacle", "distance_m", "illumination", "view_fraction"]
                )
                rows = list(reader)
            self.assertEqual(len(rows), 24)
            files = sorted(p.name for p in (out / "frames").iterdir())
            self.assertEqual(files, sorted(Path(r["file"]).name for r in rows))
            labels = set()
            for r in rows:
                img = read_ppm(out / r["file"])
                self.assertEqual(img.shape, (48, 128, 3))
                labels.add(r["label"])
                self.assertIn(r["label"], ("id", "ood"))
                if r["label"] == "id":
                    self.assertEqual(r["obstacle"], "none")
                    self.assertEqual(float(r["view_fraction"]), 0.0)
                else:
                    self.assertIn(r["obstacle"], ("duck", "cone", "box", "bot"))
                    self.assertGreater(float(r["distance_m"]), 0.0)
                    self.assertLessEqual(float(r["distance_m"]), 0.6)
                self.assertTrue(0.9 <= float(r["illumination"]) <= 1.1)
                self.assertTrue(0.0 <= float(r["view_fraction"]) <= 1.0)
            self.assertEqual(labels, {"id", "ood"})


if __name__ == "__main__":
    unittest.main(verbosity=2)
