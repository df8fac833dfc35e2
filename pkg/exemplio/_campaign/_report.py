import json

from .._common import filetype_from_filename, open_file, register_format
from ._common import CampaignResult

__all__ = [
    "register",
    "emit_report",
    "report_rows",
]


_extension_to_filetype = {}
_writer_map = {}

columns = ["attack", "engine", "checkpoint", "detection_rate", "n_samples"]


def register(file_format, extensions, writer):
    """
    Register a new report format.

    Parameters
    ----------
    file_format : str
        File format to register.
    extensions : array_like
        List of extensions to associate to the new format.
    writer : callable
        Write function.

    """
    register_format(
        fmt=file_format,
        ext_to_fmt=_extension_to_filetype,
        reader_map={},
        writer_map=_writer_map,
        extensions=extensions,
        reader=None,
        writer=writer,
    )


def format_rate(rate):
    """Format a detection rate as a percentage with one decimal."""
    return "" if rate is None else f"{100.0 * rate:.1f}"


def report_rows(result):
    """
    Flatten a campaign result into report rows.

    Rows are ordered by attack (configuration order), then checkpoint.

    """
    rows = []
    for attack in result.attacks:
        for checkpoint, rate in zip(attack.checkpoints, attack.detection_rates):
            rows.append(
                {
                    "attack": attack.name,
                    "engine": attack.engine,
                    "checkpoint": checkpoint,
                    "detection_rate": format_rate(rate),
                    "n_samples": attack.n_samples,
                }
            )

    return rows


def emit_report(result, filename, file_format=None):
    """
    Write a detection rate report.

    Parameters
    ----------
    result : CampaignResult
        Campaign result.
    filename : str, pathlike or buffer
        Output file name or buffer.
    file_format : str ('csv', 'json') or None, optional, default None
        Report format. Inferred from the file extension if `None` (default
        'csv').

    """
    if not isinstance(result, CampaignResult):
        raise TypeError()

    if not result.attacks:
        raise ValueError("Campaign result is empty.")

    fmt = (
        file_format
        if file_format
        else filetype_from_filename(filename, _extension_to_filetype, "csv")
    )
    if fmt not in _writer_map:
        raise ValueError(f"Unknown report format '{fmt}'.")

    _writer_map[fmt](filename, result)


def write_csv(filename, result):
    """Write report as CSV."""
    with open_file(filename, "w") as f:
        f.write(",".join(columns) + "\n")
        for row in report_rows(result):
            f.write(",".join(str(row[k]) for k in columns) + "\n")


def write_json(filename, result):
    """Write report as JSON."""
    out = {
        "threshold": result.threshold,
        "n_samples": result.n_samples,
        "original_detection_rate": format_rate(result.original_detection_rate),
        "inapplicable": {a.name: a.inapplicable for a in result.attacks},
        "rows": report_rows(result),
    }

    with open_file(filename, "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")


register("csv", [".csv"], write_csv)
register("json", [".json"], write_json)
