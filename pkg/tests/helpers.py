import os
import struct
import tempfile

import numpy as np

import exemplio
from exemplio._pe._common import HEADER_OFFSET_FIELD, MIN_HEADER_SIZE

np.random.seed(42)

# Small architecture for fast tests
cnn_hyperparameters = {
    "max_length": 2048,
    "embedding_dim": 4,
    "filters": 8,
    "window": 16,
    "stride": 16,
}

benign_profile = [[0x20, 0x7E, 0.85], [0, 0, 0.15]]
malicious_profile = [[0x80, 0xFF, 0.7], [0, 255, 0.3]]


def tempdir(filename=None):
    temp_dir = tempfile.mkdtemp()
    return os.path.join(temp_dir, filename) if filename else temp_dir


def make_pe(seed=0, **kwargs):
    """Build a small valid program (2 sections of 300 bytes by default)."""
    return exemplio.synth_pe(seed=seed, **kwargs)


def make_sample(label="malicious", seed=0, size=600, **kwargs):
    profile = malicious_profile if label == "malicious" else benign_profile
    data = make_pe(
        seed=seed,
        num_sections=3,
        sections=[{"size": size, "profile": profile} for _ in range(3)],
        **kwargs,
    )

    return exemplio.RawExe(data, f"{label}-{seed}", label)


def make_dataset(n_per_class=6, seed=0):
    return [
        make_sample(label, seed + i)
        for label in ("benign", "malicious")
        for i in range(n_per_class)
    ]


def tiny_cnn(seed=0, **kwargs):
    return exemplio.classifiers.init_cnn({**cnn_hyperparameters, **kwargs}, seed)


def optional_header_offset(data):
    return struct.unpack_from("<I", data, HEADER_OFFSET_FIELD)[0] + MIN_HEADER_SIZE


def set_u32(data, offset, value):
    out = bytearray(data)
    struct.pack_into("<I", out, offset, value)

    return bytes(out)


def write_corpus(dirname, n_per_class=4, seed=0):
    """Write a small corpus and return its manifest path."""
    exemplio.make_corpus({"n_per_class": n_per_class}, seed, dirname)

    return os.path.join(dirname, "manifest.json")


class ConstantClassifier(exemplio.classifiers.BaseClassifier):
    _kind = "constant"
    _name = "Constant"

    def __init__(self, value=0.9, threshold=0.5):
        super().__init__(threshold)
        self.value = value
        self.calls = 0

    def score(self, data):
        self.calls += 1
        return self.value

    @property
    def hyperparameters(self):
        return {"value": self.value}


class ZeroCounter(exemplio.classifiers.BaseClassifier):
    """Score is the fraction of null bytes, monotonic in appended zeros."""

    _kind = "zeros"
    _name = "Zero counter"

    def score(self, data):
        b = np.frombuffer(bytes(data), dtype=np.uint8)
        return float(1.0 - np.mean(b == 0))

    @property
    def hyperparameters(self):
        return {}
