import sys

from ._attack import attack
from ._campaign import campaign
from ._harvest import harvest
from ._report import report
from ._synth import synth
from ._train import train
from ._validate import validate

__all__ = [
    "attack",
    "campaign",
    "harvest",
    "report",
    "synth",
    "train",
    "validate",
    "main",
]


_command_map = {
    "synth": synth,
    "validate": validate,
    "train": train,
    "harvest": harvest,
    "attack": attack,
    "campaign": campaign,
    "report": report,
}


def main(argv=None):
    """Dispatch to a command, e.g. 'exemplio attack sample.exe -m model.exmd'."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in _command_map:
        commands = ", ".join(_command_map)
        print(f"usage: exemplio {{{commands}}} ...", file=sys.stderr)

        return 0 if argv and argv[0] in {"-h", "--help"} else 1

    return _command_map[argv[0]](argv[1:])
