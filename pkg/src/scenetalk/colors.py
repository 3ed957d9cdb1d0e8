"""Natural-language color naming over a fixed 140-name web palette.

Queries about color must be answered with a color *name*, never a HEX
code, so the mapping has to be deterministic and testable: nearest
palette entry by RGB euclidean distance, ties broken alphabetically.
"""

from __future__ import annotations

import math
from functools import lru_cache
from importlib import resources

from .types import ColorRGBA

# Largest possible RGB distance: black to white.
_MAX_DISTANCE = math.sqrt(3 * 255 * 255)


@lru_cache(maxsize=1)
def palette() -> dict[str, ColorRGBA]:
    """The bundled name -> color table (alphabetical order)."""
    text = resources.files("scenetalk.resources").joinpath("colors.txt").read_text("utf-8")
    table: dict[str, ColorRGBA] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, hexv = line.split()
        table[name] = ColorRGBA.from_hex(hexv)
    return table


def _rgb_distance(a: ColorRGBA, b: ColorRGBA) -> float:
    return math.sqrt((a.r - b.r) ** 2 + (a.g - b.g) ** 2 + (a.b - b.b) ** 2)


def color_name(c: ColorRGBA) -> str:
    """Nearest palette name; exact palette entries map to themselves.
    Alphabetical iteration plus strict < comparison breaks ties toward
    the alphabetically first name."""
    best_name = ""
    best = math.inf
    for name, entry in palette().items():
        d = _rgb_distance(c, entry)
        if d < best:
            best = d
            best_name = name
    return best_name


def color_similarity(a: ColorRGBA, b: ColorRGBA) -> float:
    """1 at equal RGB, 0 at black-vs-white; alpha is ignored."""
    return 1.0 - _rgb_distance(a, b) / _MAX_DISTANCE
