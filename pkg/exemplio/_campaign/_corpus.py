import os

import numpy as np

from .._common import check_keys, read_json, write_json
from .._exceptions import ConfigError, InconsistentSpec
from .._pe import read_exe, sample_bytes, synth_pe, write_exe
from .._pe._common import LABELS

__all__ = [
    "make_corpus",
    "read_manifest",
]


default_corpus = {
    "n_per_class": 100,
    "num_sections": 3,
    "section_size": [256, 1024],
    "overlay_len": [0, 0],
    "file_alignment": 512,
    "section_alignment": 4096,
    "size_of_headers": None,
    "pe_format": "pe32",
    # Text-like goodware, high-entropy malware
    "benign_profile": [[0x20, 0x7E, 0.85], [0, 0, 0.15]],
    "malicious_profile": [[0x80, 0xFF, 0.7], [0, 255, 0.3]],
}


def _check_range(spec, key):
    """Return a [low, high] integer range."""
    value = spec[key]
    low, high = (value, value) if np.ndim(value) == 0 else value
    if low < 0 or low > high:
        raise InconsistentSpec(f"Invalid range for '{key}': {value}.")

    return int(low), int(high)


def make_corpus(spec=None, seed=0, outdir="corpus"):
    """
    Write a synthetic labelled corpus of valid programs.

    Section contents of each class are drawn from a distinct byte profile,
    so classes are separable by construction.

    Parameters
    ----------
    spec : dict, str, pathlike or None, optional, default None
        Corpus description (or JSON file):

         - 'n_per_class': number of programs per class (default 100)
         - 'num_sections': number of sections per program (default 3)
         - 'section_size': [min, max] section content size (default [256, 1024])
         - 'overlay_len': [min, max] overlay size (default [0, 0])
         - 'file_alignment', 'section_alignment', 'size_of_headers',
           'pe_format': forwarded to the program builder
         - 'benign_profile', 'malicious_profile': byte bands [low, high, weight]

    seed : int, optional, default 0
        Random seed. Same seed yields identical files.
    outdir : str or pathlike, optional, default 'corpus'
        Output directory. Programs are written to `benign/` and `malicious/`
        sub-directories, labels to `manifest.json`.

    Returns
    -------
    list of dict
        Manifest entries {'path', 'label'}, paths relative to `outdir`.

    """
    spec = dict(read_json(spec)) if spec is not None else {}
    try:
        check_keys(spec, default_corpus, "corpus spec")

    except ConfigError as e:
        raise InconsistentSpec(str(e))

    spec = {**default_corpus, **spec}
    n = spec["n_per_class"]
    if n < 1:
        raise InconsistentSpec("Number of programs per class must be at least 1.")

    section_size = _check_range(spec, "section_size")
    if section_size[0] < 1:
        raise InconsistentSpec("Section content cannot be empty.")
    overlay_len = _check_range(spec, "overlay_len")

    # Check both profiles before writing anything
    for label in LABELS:
        sample_bytes(np.random.default_rng(0), 1, spec[f"{label}_profile"])

    builder = {
        k: spec[k]
        for k in ("num_sections", "file_alignment", "section_alignment", "pe_format")
    }
    if spec["size_of_headers"] is not None:
        builder["size_of_headers"] = spec["size_of_headers"]

    num_sections = spec["num_sections"]
    rng = np.random.default_rng(seed)
    manifest = []
    for label in LABELS:
        os.makedirs(os.path.join(outdir, label), exist_ok=True)
        profile = spec[f"{label}_profile"]

        for i in range(n):
            sizes = rng.integers(*section_size, endpoint=True, size=num_sections)
            data = synth_pe(
                builder,
                sections=[{"size": int(s), "profile": profile} for s in sizes],
                overlay_len=int(rng.integers(*overlay_len, endpoint=True)),
                seed=int(rng.integers(2 ** 31)),
            )

            path = f"{label}/{i:04d}.exe"
            write_exe(os.path.join(outdir, path), data)
            manifest.append({"path": path, "label": label})

    write_json(os.path.join(outdir, "manifest.json"), manifest)

    return manifest


def read_manifest(filename):
    """
    Read the programs listed in a dataset manifest.

    Parameters
    ----------
    filename : str or pathlike
        JSON list of {'path', 'label'}. Relative paths are resolved from the
        manifest directory.

    Returns
    -------
    list of RawExe
        Programs in manifest order.

    """
    entries = read_json(filename)
    if not isinstance(entries, list):
        raise ConfigError("Dataset manifest must be a list.")

    root = os.path.dirname(os.path.abspath(filename))
    out = []
    for i, entry in enumerate(entries):
        check_keys(entry, {"path", "label"}, f"manifest[{i}]")
        if entry.get("label") not in LABELS or "path" not in entry:
            raise ConfigError(f"Invalid manifest entry {i}.")

        path = os.path.join(root, entry["path"])
        out.append(read_exe(path, entry["label"], entry["path"]))

    return out
