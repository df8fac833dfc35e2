import inspect

from .._exceptions import UnknownManipulation
from ._common import Patchable, combine, remap

__all__ = [
    "register",
    "apply",
    "available",
    "parameters",
    "chain",
]


_manipulation_map = {}


def register(manipulation, function):
    """
    Register a new manipulation.

    Parameters
    ----------
    manipulation : str
        Manipulation identifier.
    function : callable
        Function `f(data, **params)` returning a :class:`Patchable`.

    """
    _manipulation_map[manipulation] = function


def available():
    """Return identifiers of registered manipulations."""
    return sorted(_manipulation_map)


def parameters(manipulation):
    """Return names of the parameters accepted by a manipulation."""
    manipulation, _ = resolve(manipulation)
    signature = inspect.signature(_manipulation_map[manipulation])

    return list(signature.parameters)[1:]


def resolve(manipulation, params=None):
    """Split a manipulation given as id or (id, params) pair."""
    if isinstance(manipulation, (tuple, list)):
        manipulation, params_ = manipulation
        params = {**(params_ or {}), **(params or {})}

    if manipulation not in _manipulation_map:
        raise UnknownManipulation(f"Unknown manipulation '{manipulation}'.")

    return manipulation, dict(params or {})


def apply(data, manipulation, **params):
    """
    Apply a registered manipulation.

    Parameters
    ----------
    data : bytes
        Program content.
    manipulation : str or tuple
        Manipulation identifier, or (identifier, parameters) pair.

    Other Parameters
    ----------------
    params
        Parameters forwarded to the manipulation (e.g., `amount` for 'extend'
        and 'shift', `n` for 'padding' and 'slack_padding').

    Returns
    -------
    Patchable
        Manipulated buffer and editable regions.

    """
    manipulation, params = resolve(manipulation, params)

    return _manipulation_map[manipulation](data, **params)


def chain(patchable, manipulation, **params):
    """
    Apply a manipulation on top of a previous one and merge their regions.

    Parameters
    ----------
    patchable : Patchable
        Previous rewrite.
    manipulation : str or tuple
        Manipulation identifier, or (identifier, parameters) pair.

    Returns
    -------
    Patchable
        Combined rewrite. Regions of `patchable` are moved through any
        insertion performed by the new manipulation.

    """
    if not isinstance(patchable, Patchable):
        raise TypeError()

    new = apply(patchable.bytes, manipulation, **params)

    return combine(remap(patchable, new.inserted, new.bytes), new)
