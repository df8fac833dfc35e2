import helpers
import numpy as np
import pytest

import exemplio
from exemplio._exceptions import (
    HeaderBudgetExceeded,
    InvalidInput,
    LengthMismatch,
    MisalignedAmount,
    NoHeaderRoom,
    OverlapError,
    SignedBinary,
    UnknownManipulation,
)
from exemplio.manipulations import (
    SectionPayload,
    apply,
    apply_bytes,
    chain,
    combine,
    extend,
    full_dos,
    inject_section,
    padding,
    partial_dos,
    region_bytes,
    shift,
    slack_fill,
    slack_padding,
)

data = helpers.make_pe()


def check_untouched(old, new, patchable):
    """Bytes outside editable regions are preserved."""
    mask = np.ones(len(new), dtype=bool)
    mask[patchable.positions] = False
    old = np.frombuffer(old, dtype=np.uint8)
    new = np.frombuffer(new, dtype=np.uint8)

    assert (old[mask] == new[mask]).all()


def test_partial_dos():
    p = partial_dos(data)

    assert p.bytes == data
    assert p.editable == ((2, 60),)
    assert p.size == 58
    assert p.manipulation == "partial_dos"

    rng = np.random.default_rng(0)
    for _ in range(10):
        out = apply_bytes(p, rng.integers(0, 256, p.size))
        assert exemplio.validate(out).ok
        check_untouched(data, out, p)


@pytest.mark.parametrize(
    "header_offset, editable",
    [(0x80, ((2, 60), (64, 128))), (0x40, ((2, 60),))],
)
def test_full_dos(header_offset, editable):
    sample = helpers.make_pe(header_offset=header_offset)
    p = full_dos(sample)

    assert p.bytes == sample
    assert p.editable == editable

    out = apply_bytes(p, bytes(range(p.size)))
    assert exemplio.validate(out).ok
    assert exemplio.parse(out).header_offset == header_offset


def test_extend():
    p = extend(data, 512)
    pe, new = exemplio.parse(data), exemplio.parse(p.bytes)

    assert len(p.bytes) == len(data) + 512
    assert p.editable == ((0x80, 0x280),)
    assert p.inserted == [(0x80, 512)]
    assert new.header_offset == 0x280
    assert new.size_of_headers == pe.size_of_headers + 512
    assert exemplio.validate(p.bytes).ok
    for s1, s2 in zip(pe.sections, new.sections):
        assert s2.raw_pointer == s1.raw_pointer + 512
        assert s2.virtual_address == s1.virtual_address
        assert pe.section_content(s1) == new.section_content(s2)

    # Largest amount fitting before the first section in memory
    assert exemplio.validate(extend(data, 3584).bytes).ok


def test_extend_errors():
    with pytest.raises(MisalignedAmount):
        extend(data, 100)

    with pytest.raises(MisalignedAmount):
        extend(data, 0)

    with pytest.raises(HeaderBudgetExceeded):
        extend(data, 4096)

    with pytest.raises(TypeError):
        extend(data, 512.0)


def test_shift():
    sample = helpers.make_pe(size_of_headers=1024, overlay_len=10)
    p = shift(sample, 512)
    pe, new = exemplio.parse(sample), exemplio.parse(p.bytes)

    assert pe.sections[0].raw_pointer == 0x400
    assert p.editable == ((0x400, 0x600),)
    assert new.header_offset == pe.header_offset
    assert exemplio.validate(p.bytes).ok
    assert p.bytes[-10:] == sample[-10:]
    for s1, s2 in zip(pe.sections, new.sections):
        assert s2.raw_pointer == s1.raw_pointer + 512
        assert pe.section_content(s1) == new.section_content(s2)

    with pytest.raises(MisalignedAmount):
        shift(sample, 256)


def test_padding():
    p = padding(data)
    assert p.bytes == data
    assert p.editable == ()

    n = len(data)
    p = padding(data, 100)
    assert p.bytes[:n] == data
    assert p.bytes[n:] == bytes(100)
    assert p.editable == ((n, n + 100),)
    assert exemplio.validate(p.bytes).ok

    before = exemplio.parse(data).overlay
    after = exemplio.parse(p.bytes).overlay
    assert after[1] - after[0] == before[1] - before[0] + 100

    with pytest.raises(ValueError):
        padding(data, -1)


def test_slack_fill():
    p = slack_fill(data)
    assert p.bytes == data
    assert p.editable == ((812, 1024), (1324, 1536))

    sample = helpers.make_pe(sections=[{"size": 512}, {"size": 512}])
    assert slack_fill(sample).editable == ()


def test_slack_padding():
    n = len(data)
    p = slack_padding(data, 100)

    assert p.editable == ((812, 1024), (1324, 1536), (n, n + 100))
    assert p.manipulation == "slack_fill+padding"
    assert combine(slack_fill(data), padding(data, 100)).editable == p.editable

    out = apply_bytes(p, np.full(p.size, 0xCC))
    assert exemplio.validate(out).ok
    check_untouched(p.bytes, out, p)


def test_combine_overlap():
    p = partial_dos(data)

    with pytest.raises(OverlapError):
        combine(p, p)


def test_chain():
    a = chain(partial_dos(data), "extend", amount=512)
    b = chain(extend(data, 512), "partial_dos")

    assert a.editable == b.editable == ((2, 60), (0x80, 0x280))
    assert a.bytes == b.bytes

    # Appended region moves with inserted bytes
    n = len(data)
    p = chain(padding(data, 100), ("shift", {"amount": 512}))
    assert p.editable == ((512, 1024), (n + 512, n + 612))
    assert exemplio.validate(p.bytes).ok


def test_inject_section():
    payload = SectionPayload(bytes(range(250)) * 4, ".data", "goodware.exe")
    sample = helpers.make_pe(overlay=b"overlay")

    p = inject_section(sample, payload, 0.0)
    assert p.bytes == sample
    assert p.editable == ()

    p = inject_section(sample, payload, 1.0)
    pe = exemplio.parse(p.bytes)
    section = pe.sections[-1]
    assert p.editable == ()
    assert pe.num_sections == 3
    assert section.label == ".data"
    assert section.raw_size == 1024
    assert section.virtual_size == 1000
    assert pe.section_content(section) == payload.content
    assert p.bytes.endswith(b"overlay")
    assert exemplio.validate(p.bytes).ok

    p = inject_section(sample, payload, 0.3)
    assert exemplio.parse(p.bytes).sections[-1].virtual_size == 300

    with pytest.raises(NoHeaderRoom):
        inject_section(p.bytes, payload, 1.0)

    with pytest.raises(ValueError):
        inject_section(sample, payload, 1.5)


@pytest.mark.parametrize("use", ["bytes", "directory"])
def test_inject_section_slot_in_use(use):
    payload = SectionPayload(bytes(range(250)), ".data", "goodware.exe")
    sample = helpers.make_pe(size_of_headers=1024)
    slot = exemplio.parse(sample).section_table_end

    if use == "bytes":
        sample = sample[: slot + 16] + b"\x01" + sample[slot + 17 :]
    else:
        # Bound import directory of a PE32 optional header
        offset = helpers.optional_header_offset(sample) + 96 + 8 * 11
        sample = helpers.set_u32(sample, offset, slot + 8)
        sample = helpers.set_u32(sample, offset + 4, 64)

    with pytest.raises(NoHeaderRoom):
        inject_section(sample, payload, 1.0)


def test_apply_bytes():
    p = full_dos(data)

    assert apply_bytes(p, region_bytes(p)) == p.bytes

    with pytest.raises(LengthMismatch):
        apply_bytes(p, bytes(p.size - 1))

    with pytest.raises(LengthMismatch):
        apply_bytes(p, bytes(p.size + 1))

    with pytest.raises(ValueError):
        apply_bytes(p, [256] * p.size)


def test_registry():
    assert exemplio.manipulations.available() == [
        "extend",
        "full_dos",
        "inject_section",
        "padding",
        "partial_dos",
        "shift",
        "slack_fill",
        "slack_padding",
    ]
    assert exemplio.manipulations.parameters("extend") == ["amount"]
    assert exemplio.manipulations.parameters("slack_padding") == ["n"]
    assert exemplio.manipulations.parameters("partial_dos") == []
    assert apply(data, "extend", amount=512) == extend(data, 512)
    assert apply(data, ("padding", {"n": 10})) == padding(data, 10)

    with pytest.raises(UnknownManipulation):
        apply(data, "nop")


def test_invalid_input():
    with pytest.raises(InvalidInput):
        partial_dos(b"ZZ" + data[2:])

    security = helpers.optional_header_offset(data) + 96 + 8 * 4
    signed = helpers.set_u32(helpers.set_u32(data, security, 1536), security + 4, 8)
    with pytest.raises(SignedBinary):
        padding(signed, 10)


def test_payloads():
    payloads = [
        SectionPayload(b"abc", ".data", "a.exe"),
        SectionPayload(bytes(1000), b".rdata\x00\x00", "b.exe"),
    ]
    dirname = helpers.tempdir()
    exemplio.manipulations.write_payloads(dirname, payloads)

    assert exemplio.manipulations.read_payloads(dirname) == payloads

    with pytest.raises(ValueError):
        SectionPayload(b"")
