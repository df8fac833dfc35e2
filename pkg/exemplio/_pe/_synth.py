import struct

import numpy as np

from .._common import check_keys, read_json
from .._exceptions import InconsistentSpec
from ._common import (
    DOS_HEADER_SIZE,
    DOS_MAGIC,
    HEADER_OFFSET_FIELD,
    MIN_HEADER_SIZE,
    OPT_SECTION_ALIGNMENT,
    OPT_SIZE_OF_HEADERS,
    OPT_SIZE_OF_IMAGE,
    PE_SIGNATURE,
    SECTION_HEADER_SIZE,
    format_to_data_directories,
    format_to_optional_magic,
    format_to_optional_size,
)
from ._regions import align_up, is_power_of_two

__all__ = [
    "synth_pe",
    "read_builder_spec",
    "sample_bytes",
]


DOS_STUB = (
    b"\x0e\x1f\xba\x0e\x00\xb4\x09\xcd\x21\xb8\x01\x4c\xcd\x21"
    b"This program cannot be run in DOS mode.\r\r\n$"
)

IMAGE_SCN_CNT_CODE = 0x00000020
IMAGE_SCN_CNT_INITIALIZED_DATA = 0x00000040
IMAGE_SCN_MEM_EXECUTE = 0x20000000
IMAGE_SCN_MEM_READ = 0x40000000
IMAGE_SCN_MEM_WRITE = 0x80000000

name_to_characteristics = {
    ".text": IMAGE_SCN_CNT_CODE | IMAGE_SCN_MEM_EXECUTE | IMAGE_SCN_MEM_READ,
    ".rdata": IMAGE_SCN_CNT_INITIALIZED_DATA | IMAGE_SCN_MEM_READ,
    ".data": (
        IMAGE_SCN_CNT_INITIALIZED_DATA | IMAGE_SCN_MEM_READ | IMAGE_SCN_MEM_WRITE
    ),
}
default_names = [".text", ".rdata", ".data", ".rsrc", ".reloc", ".pdata", ".tls"]
default_flags = IMAGE_SCN_CNT_INITIALIZED_DATA | IMAGE_SCN_MEM_READ

format_to_machine = {"pe32": 0x14C, "pe32+": 0x8664}
format_to_characteristics = {"pe32": 0x0102, "pe32+": 0x0022}
format_to_image_base = {"pe32": 0x400000, "pe32+": 0x140000000}

builder_keys = {
    "num_sections",
    "file_alignment",
    "section_alignment",
    "sections",
    "overlay_len",
    "overlay",
    "seed",
    "pe_format",
    "header_offset",
    "size_of_headers",
}
section_keys = {"name", "size", "content", "profile", "virtual_size", "characteristics"}

default_profile = [[0, 255, 1.0]]


def read_builder_spec(filename):
    """
    Read a builder description from a JSON file.

    Parameters
    ----------
    filename : str, pathlike or buffer
        JSON document with keys `num_sections`, `file_alignment`,
        `section_alignment`, `sections`, `overlay_len`, `seed` and optionally
        `pe_format`, `header_offset`, `size_of_headers`.

    Returns
    -------
    dict
        Builder description.

    """
    spec = read_json(filename)
    check_keys(spec, builder_keys, "builder spec")
    for i, section in enumerate(spec.get("sections", [])):
        check_keys(section, section_keys, f"sections[{i}]")

        if isinstance(section.get("content"), str):
            section["content"] = bytes.fromhex(section["content"])

    return spec


def sample_bytes(rng, n, profile):
    """
    Draw bytes from a mixture of uniform byte bands.

    Parameters
    ----------
    rng : numpy.random.Generator
        Random number generator.
    n : int
        Number of bytes.
    profile : list of [low, high, weight]
        Byte bands. A band draws uniformly in [low, high].

    Returns
    -------
    bytes
        Sampled bytes.

    """
    bands = np.asarray(profile, dtype=float)
    if bands.ndim != 2 or bands.shape[1] != 3 or not len(bands):
        raise InconsistentSpec("Byte profile must be a list of [low, high, weight].")

    low, high, weight = bands.T
    if (
        (low < 0).any()
        or (high > 255).any()
        or (low > high).any()
        or (weight < 0.0).any()
        or weight.sum() <= 0.0
    ):
        raise InconsistentSpec("Invalid byte profile.")

    idx = rng.choice(len(bands), size=n, p=weight / weight.sum())
    values = low[idx] + np.floor(rng.random(n) * (high[idx] - low[idx] + 1.0))

    return np.minimum(values, high[idx]).astype(np.uint8).tobytes()


def synth_pe(spec=None, **kwargs):
    """
    Build a valid synthetic PE file.

    Parameters
    ----------
    spec : dict, str, pathlike or None, optional, default None
        Builder description (or JSON file). Keyword arguments override its keys.

    Other Parameters
    ----------------
    num_sections : int, optional, default 2
        Number of sections.
    file_alignment : int, optional, default 512
        File alignment (power of two).
    section_alignment : int, optional, default 4096
        Section alignment (power of two, not smaller than `file_alignment`).
    sections : list of dict, optional
        Per-section description with keys `name`, `content` (bytes) or `size`
        and `profile` (random content), `virtual_size` and `characteristics`.
        Missing sections are filled with 300 random bytes.
    overlay_len : int, optional, default 0
        Number of random overlay bytes.
    overlay : bytes, optional
        Explicit overlay content (takes precedence over `overlay_len`).
    seed : int, optional, default 0
        Seed for random content.
    pe_format : str ('pe32', 'pe32+'), optional, default 'pe32'
        Optional header flavor.
    header_offset : int, optional, default 0x80
        Offset of the PE header (end of the DOS stub).
    size_of_headers : int or None, optional, default None
        Reserve header room. Defaults to the aligned end of the section table.

    Returns
    -------
    bytes
        File content.

    """
    spec = dict(read_json(spec)) if spec is not None else {}
    spec.update(kwargs)
    check_keys(spec, builder_keys, "builder spec")

    pe_format = spec.get("pe_format", "pe32")
    if pe_format not in format_to_optional_magic:
        raise InconsistentSpec(f"Unknown PE format '{pe_format}'.")

    fa = spec.get("file_alignment", 512)
    sa = spec.get("section_alignment", 4096)
    if not (is_power_of_two(fa) and is_power_of_two(sa)):
        raise InconsistentSpec("Alignments must be powers of two.")
    if sa < fa:
        raise InconsistentSpec(
            f"Section alignment {sa} is smaller than file alignment {fa}."
        )

    rng = np.random.default_rng(spec.get("seed", 0))
    contents, names, virtual_sizes, flags = _sections(spec, rng)

    header_offset = spec.get("header_offset", 0x80)
    if header_offset < DOS_HEADER_SIZE or header_offset % 8:
        raise InconsistentSpec(f"Invalid header offset 0x{header_offset:x}.")

    # Header layout
    size_of_optional_header = format_to_optional_size[pe_format]
    opt = header_offset + MIN_HEADER_SIZE
    table = opt + size_of_optional_header
    table_end = table + SECTION_HEADER_SIZE * len(contents)
    size_of_headers = spec.get("size_of_headers")
    if size_of_headers is None:
        size_of_headers = align_up(table_end, fa)
    elif size_of_headers < table_end or size_of_headers % fa:
        raise InconsistentSpec(
            f"Size of headers 0x{size_of_headers:x} cannot hold the section table."
        )

    # Section layout
    raw_pointer = size_of_headers
    virtual_address = align_up(size_of_headers, sa)
    layout = []
    for content, virtual_size in zip(contents, virtual_sizes):
        raw_size = align_up(len(content), fa)
        layout.append((virtual_address, virtual_size, raw_pointer, raw_size))
        raw_pointer += raw_size
        virtual_address = align_up(virtual_address + max(virtual_size, raw_size), sa)
    size_of_image = virtual_address

    overlay = spec.get("overlay")
    if overlay is None:
        overlay = rng.integers(0, 256, spec.get("overlay_len", 0), dtype=np.uint8)
        overlay = overlay.tobytes()

    # Assemble
    out = bytearray(raw_pointer)
    out[:2] = DOS_MAGIC
    struct.pack_into("<HH", out, 2, 0x90, 3)
    struct.pack_into("<I", out, HEADER_OFFSET_FIELD, header_offset)
    stub = DOS_STUB[: header_offset - DOS_HEADER_SIZE]
    out[DOS_HEADER_SIZE : DOS_HEADER_SIZE + len(stub)] = stub

    out[header_offset : header_offset + 4] = PE_SIGNATURE
    struct.pack_into(
        "<HHIIIHH",
        out,
        header_offset + 4,
        format_to_machine[pe_format],
        len(contents),
        0,
        0,
        0,
        size_of_optional_header,
        format_to_characteristics[pe_format],
    )
    _write_optional_header(
        out, opt, pe_format, layout, flags, fa, sa, size_of_image, size_of_headers
    )

    for i, (name, flag, (va, vs, ptr, rs)) in enumerate(zip(names, flags, layout)):
        offset = table + i * SECTION_HEADER_SIZE
        out[offset : offset + 8] = name
        struct.pack_into("<4I", out, offset + 8, vs, va, rs, ptr)
        struct.pack_into("<I", out, offset + 36, flag)

    for content, (_, _, ptr, _) in zip(contents, layout):
        out[ptr : ptr + len(content)] = content

    return bytes(out) + bytes(overlay)


def _sections(spec, rng):
    """Resolve section contents, names, virtual sizes and flags."""
    sections = list(spec.get("sections", []))
    num_sections = spec.get("num_sections", max(len(sections), 2))
    if num_sections < 1 or num_sections > 96 or len(sections) > num_sections:
        raise InconsistentSpec(f"Invalid number of sections {num_sections}.")
    sections += [{} for _ in range(num_sections - len(sections))]

    contents, names, virtual_sizes, flags = [], [], [], []
    for i, section in enumerate(sections):
        check_keys(section, section_keys, f"sections[{i}]")

        content = section.get("content")
        if content is None:
            profile = section.get("profile", default_profile)
            content = sample_bytes(rng, section.get("size", 300), profile)
        content = bytes(content)
        if not content:
            raise InconsistentSpec(f"Section {i} content is empty.")

        name = section.get("name", default_names[i % len(default_names)])
        name = name.encode("latin-1") if isinstance(name, str) else bytes(name)
        if len(name) > 8:
            raise InconsistentSpec(f"Section name {name!r} is longer than 8 bytes.")

        contents.append(content)
        names.append(name.ljust(8, b"\x00"))
        virtual_sizes.append(section.get("virtual_size", len(content)))
        flags.append(
            section.get(
                "characteristics",
                name_to_characteristics.get(name.decode("latin-1"), default_flags),
            )
        )

    return contents, names, virtual_sizes, flags


def _write_optional_header(
    out, opt, pe_format, layout, flags, fa, sa, size_of_image, size_of_headers
):
    """Fill the optional header."""
    sizes = [(flag & IMAGE_SCN_CNT_CODE, lay[3]) for flag, lay in zip(flags, layout)]
    code = [rs for is_code, rs in sizes if is_code]
    data = [rs for is_code, rs in sizes if not is_code]
    entry_point = layout[0][0]

    struct.pack_into(
        "<HBBIIIII",
        out,
        opt,
        format_to_optional_magic[pe_format],
        14,
        0,
        sum(code),
        sum(data),
        0,
        entry_point,
        entry_point,
    )
    if pe_format == "pe32":
        base_of_data = layout[-1][0]
        image_base = format_to_image_base[pe_format]
        struct.pack_into("<II", out, opt + 24, base_of_data, image_base)
    else:
        struct.pack_into("<Q", out, opt + 24, format_to_image_base[pe_format])

    struct.pack_into("<II", out, opt + OPT_SECTION_ALIGNMENT, sa, fa)
    struct.pack_into("<HHHHHH", out, opt + 40, 6, 0, 0, 0, 6, 0)
    struct.pack_into("<I", out, opt + OPT_SIZE_OF_IMAGE, size_of_image)
    struct.pack_into("<I", out, opt + OPT_SIZE_OF_HEADERS, size_of_headers)
    struct.pack_into("<HH", out, opt + 68, 3, 0x8140)

    stack_heap = (0x100000, 0x1000, 0x100000, 0x1000)
    if pe_format == "pe32":
        struct.pack_into("<4I", out, opt + 72, *stack_heap)
    else:
        struct.pack_into("<4Q", out, opt + 72, *stack_heap)

    directories = opt + format_to_data_directories[pe_format]
    struct.pack_into("<II", out, directories - 8, 0, 16)
