import helpers
import numpy as np
import pefile
import pytest

import exemplio
from exemplio._exceptions import (
    BadAlignment,
    BadDosMagic,
    BadHeaderOffset,
    BadSignature,
    InconsistentSpec,
    TruncatedFile,
    ZeroAlignment,
)
from exemplio._pe import align_up, header_room, locate_overlay, locate_slack
from exemplio._pe._parse import load_image


@pytest.mark.parametrize("pe_format", ["pe32", "pe32+"])
def test_parse(pe_format):
    data = helpers.make_pe(num_sections=2, file_alignment=512, pe_format=pe_format)
    pe = exemplio.parse(data)

    assert pe.num_sections == 2
    assert pe.file_alignment == 512
    assert pe.section_alignment == 4096
    assert pe.pe_format == pe_format
    assert pe.header_offset == 0x80
    assert pe.size_of_headers == 512
    assert [s.label for s in pe.sections] == [".text", ".rdata"]
    assert [s.raw_pointer for s in pe.sections] == [512, 1024]
    assert [s.raw_size for s in pe.sections] == [512, 512]
    assert [s.virtual_address for s in pe.sections] == [4096, 8192]
    assert pe.entry_point == 4096
    assert pe.size_of_image == 12288
    assert not pe.signed


@pytest.mark.parametrize(
    "kwargs",
    [
        {},
        {"num_sections": 5, "overlay_len": 33},
        {"pe_format": "pe32+", "file_alignment": 4096, "header_offset": 0x40},
        {"size_of_headers": 1024, "section_alignment": 512},
    ],
)
def test_serialize(kwargs):
    data = helpers.make_pe(**kwargs)

    assert exemplio.serialize(exemplio.parse(data)) == data


def test_serialize_updated_fields():
    data = helpers.make_pe()
    pe = exemplio.parse(data)
    new = exemplio.parse(exemplio.serialize(pe._replace(entry_point=0x1234)))

    assert new.entry_point == 0x1234
    assert new._replace(raw=pe.raw, entry_point=pe.entry_point) == pe


def test_parse_errors():
    data = helpers.make_pe()
    opt = helpers.optional_header_offset(data)

    with pytest.raises(BadDosMagic):
        exemplio.parse(b"ZZ" + data[2:])

    with pytest.raises(TruncatedFile):
        exemplio.parse(data[:32])

    with pytest.raises(TruncatedFile):
        exemplio.parse(data[:1])

    with pytest.raises(BadHeaderOffset):
        exemplio.parse(helpers.set_u32(data, 0x3C, len(data)))

    with pytest.raises(BadSignature):
        exemplio.parse(data[:0x80] + b"NE\x00\x00" + data[0x84:])

    with pytest.raises(BadAlignment):
        exemplio.parse(helpers.set_u32(data, opt + 36, 500))

    with pytest.raises(TypeError):
        exemplio.parse("MZ")


@pytest.mark.parametrize(
    "data, rule",
    [
        (b"ZZ" + bytes(200), "bad-dos-magic"),
        (b"MZ" + bytes(30), "truncated-file"),
        (b"", "truncated-file"),
        (None, "parse-error"),
    ],
)
def test_validate_malformed(data, rule):
    report = exemplio.validate(data)

    assert not report.ok
    assert report.rules == {rule}
    assert rule in str(report)


def test_validate():
    data = helpers.make_pe()
    report = exemplio.validate(data)
    assert report.ok
    assert str(report) == "OK"

    # Misaligned raw pointer of the first section
    table = helpers.optional_header_offset(data) + 224
    report = exemplio.validate(helpers.set_u32(data, table + 20, 0x210))
    assert not report.ok
    assert "raw-alignment" in report.rules

    # Size of image too small
    opt = helpers.optional_header_offset(data)
    report = exemplio.validate(helpers.set_u32(data, opt + 56, 4096))
    assert report.rules == {"image-size"}


def test_validate_signed():
    data = helpers.make_pe()
    security = helpers.optional_header_offset(data) + 96 + 8 * 4
    data = helpers.set_u32(helpers.set_u32(data, security, 1536), security + 4, 8)
    report = exemplio.validate(data)

    assert exemplio.parse(data).signed
    assert report.rules == {"signed-binary"}


@pytest.mark.parametrize(
    "value, alignment, ref",
    [(0, 512, 0), (1, 512, 512), (512, 512, 512), (513, 512, 1024), (5, 1, 5)],
)
def test_align_up(value, alignment, ref):
    assert align_up(value, alignment) == ref


def test_align_up_errors():
    with pytest.raises(ZeroAlignment):
        align_up(10, 0)

    with pytest.raises(ValueError):
        align_up(10, 3)


def test_synth_pe():
    data = helpers.make_pe(
        sections=[{"content": bytes(range(100)) * 3}], num_sections=1, overlay_len=10
    )
    pe = exemplio.parse(data)

    assert pe.sections[0].raw_size == 512
    assert pe.sections[0].virtual_size == 300
    assert pe.section_content(pe.sections[0]) == bytes(range(100)) * 3
    assert locate_overlay(pe, data) == (len(data) - 10, len(data))


def test_synth_pe_deterministic():
    assert helpers.make_pe(seed=3, overlay_len=50) == helpers.make_pe(
        seed=3, overlay_len=50
    )
    assert helpers.make_pe(seed=3) != helpers.make_pe(seed=4)


@pytest.mark.parametrize("seed", range(20))
def test_synth_pe_valid(seed):
    rng = np.random.default_rng(seed)
    file_alignment = int(2 ** rng.integers(9, 13))
    data = exemplio.synth_pe(
        num_sections=int(rng.integers(1, 8)),
        file_alignment=file_alignment,
        section_alignment=int(file_alignment * 2 ** rng.integers(0, 3)),
        overlay_len=int(rng.integers(0, 100)),
        pe_format=["pe32", "pe32+"][seed % 2],
        seed=seed,
    )

    assert exemplio.validate(data).ok


@pytest.mark.parametrize(
    "kwargs",
    [
        {"file_alignment": 4096, "section_alignment": 512},
        {"file_alignment": 0},
        {"num_sections": 0},
        {"sections": [{"content": b""}]},
        {"sections": [{"name": ".toolongname"}]},
        {"pe_format": "elf"},
        {"size_of_headers": 256},
        {"sections": [{"size": 10, "profile": [[10, 5, 1.0]]}]},
    ],
)
def test_synth_pe_errors(kwargs):
    with pytest.raises(InconsistentSpec):
        exemplio.synth_pe(**kwargs)


def test_read_builder_spec():
    spec = exemplio._pe.read_builder_spec(
        {"num_sections": 1, "sections": [{"name": ".text", "content": "c3"}]}
    )
    data = exemplio.synth_pe(spec)

    pe = exemplio.parse(data)
    assert pe.section_content(pe.sections[0]) == b"\xc3"


def test_locate_slack():
    data = helpers.make_pe()
    pe = exemplio.parse(data)

    assert locate_slack(pe, data) == [(812, 1024), (1324, 1536)]
    assert locate_slack(pe) == locate_slack(pe, data)

    # No slack when content fills the raw size
    data = helpers.make_pe(sections=[{"size": 512}, {"size": 1024}])
    assert locate_slack(exemplio.parse(data)) == []

    # Virtual size larger than raw size
    data = helpers.make_pe(
        sections=[{"size": 300, "virtual_size": 8192}, {"size": 300}]
    )
    assert locate_slack(exemplio.parse(data)) == [(1324, 1536)]


def test_locate_overlay():
    data = helpers.make_pe()
    assert locate_overlay(exemplio.parse(data)) == (len(data), len(data))

    data = helpers.make_pe(overlay=b"overlay")
    start, end = locate_overlay(exemplio.parse(data))
    assert data[start:end] == b"overlay"


def test_header_room():
    assert header_room(exemplio.parse(helpers.make_pe())) == 1
    assert header_room(exemplio.parse(helpers.make_pe(size_of_headers=1024))) == 14
    assert header_room(exemplio.parse(helpers.make_pe(num_sections=3))) == 0


def test_read_write_exe():
    data = helpers.make_pe()
    filename = helpers.tempdir("sample.exe")
    exemplio.write_exe(filename, data)
    sample = exemplio.read_exe(filename, "benign")

    assert sample.bytes == data
    assert sample.sample_id == "sample.exe"
    assert sample.label == "benign"

    with pytest.raises(ValueError):
        exemplio.read_exe(filename, "unknown")


def test_pefile_agrees():
    data = helpers.make_pe(num_sections=3, overlay_len=20)
    ref = pefile.PE(data=data)
    pe = exemplio.parse(data)

    assert ref.FILE_HEADER.NumberOfSections == pe.num_sections
    assert ref.OPTIONAL_HEADER.FileAlignment == pe.file_alignment
    assert ref.OPTIONAL_HEADER.SectionAlignment == pe.section_alignment
    assert ref.OPTIONAL_HEADER.SizeOfHeaders == pe.size_of_headers
    assert ref.OPTIONAL_HEADER.SizeOfImage == pe.size_of_image
    assert ref.OPTIONAL_HEADER.AddressOfEntryPoint == pe.entry_point
    for x, y in zip(ref.sections, pe.sections):
        assert x.Name == y.name
        assert x.PointerToRawData == y.raw_pointer
        assert x.SizeOfRawData == y.raw_size
        assert x.VirtualAddress == y.virtual_address
    assert ref.get_overlay_data_start_offset() == pe.overlay[0]


@pytest.mark.parametrize(
    "data, error",
    [
        (b"MZ" + bytes(10), TruncatedFile),
        (bytes(64), BadDosMagic),
        (b"MZ" + bytes(58) + (1000).to_bytes(4, "little"), BadHeaderOffset),
    ],
)
def test_load_image_errors(data, error):
    with pytest.raises(error):
        load_image(data)


def test_serialize_new_section_entry():
    data = helpers.make_pe(num_sections=2, size_of_headers=1024)
    pe = exemplio.parse(data)
    section = pe.sections[1]._replace(
        name=b".new\x00\x00\x00\x00", virtual_address=0x3000
    )
    new = exemplio.parse(
        exemplio.serialize(
            pe._replace(num_sections=3, sections=pe.sections + (section,))
        )
    )

    assert new.num_sections == 3
    assert new.sections[2] == section
    assert new.sections[:2] == pe.sections

    with pytest.raises(ValueError):
        exemplio.serialize(pe._replace(header_offset=0x40))


def test_validate_section_count():
    data = helpers.make_pe(num_sections=2)
    table = helpers.optional_header_offset(data) + 224
    data = data[: table + 40] + bytes(40) + data[table + 80 :]
    report = exemplio.validate(data)

    # Decoding stops at the null entry
    assert len(exemplio.parse(data).sections) == 1
    assert "section-count" in report.rules
