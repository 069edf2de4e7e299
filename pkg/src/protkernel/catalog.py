"""Named small graphs used by problem specs and exclusion flags."""

from __future__ import annotations

from .errors import ConfigError
from .graph import Graph, build_graph


def _complete(n: int) -> Graph:
    return build_graph(n, [(a, b) for a in range(n) for b in range(a + 1, n)])


def _cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def _path(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


FAMILY_NAMES = ("K2", "K3", "K4", "C4", "C5", "P3", "P4")

_BUILDERS = {
    "K2": lambda: _complete(2),
    "K3": lambda: _complete(3),
    "K4": lambda: _complete(4),
    "K5": lambda: _complete(5),
    "C4": lambda: _cycle(4),
    "C5": lambda: _cycle(5),
    "P3": lambda: _path(3),
    "P4": lambda: _path(4),
    "K33": lambda: build_graph(6, [(a, b) for a in range(3) for b in range(3, 6)]),
}


def named_graph(name: str) -> Graph:
    try:
        return _BUILDERS[name]()
    except KeyError:
        known = ", ".join(sorted(_BUILDERS))
        raise ConfigError(f"unknown graph name {name!r}; known: {known}") from None


def graph_name(g: Graph) -> str | None:
    for name, make in _BUILDERS.items():
        if make() == g:
            return name
    return None
