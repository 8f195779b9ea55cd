"""
Identity-component catalog shared by the group-identification and
compact-group modules.

Keys are ``(g, lie_dim, center_dim)``; ``center_dim`` is the dimension of the
center of the Lefschetz Lie algebra and separates tori from semisimple parts.
"""

from enum import Enum
from typing import Dict, List, Tuple

from .errors import UnknownComponentError


class ComponentTag(str, Enum):
    U1 = "U1"
    SU2 = "SU2"
    U1xU1 = "U1xU1"
    U1xSU2 = "U1xSU2"
    SU2xSU2 = "SU2xSU2"
    USp4 = "USp4"
    SU2diag = "SU2diag"
    USp6 = "USp6"


LIE_DIMS: Dict[ComponentTag, int] = {
    ComponentTag.U1: 1,
    ComponentTag.SU2: 3,
    ComponentTag.U1xU1: 2,
    ComponentTag.U1xSU2: 4,
    ComponentTag.SU2xSU2: 6,
    ComponentTag.USp4: 10,
    ComponentTag.SU2diag: 3,
    ComponentTag.USp6: 21,
}

CENTER_DIMS: Dict[ComponentTag, int] = {
    ComponentTag.U1: 1,
    ComponentTag.SU2: 0,
    ComponentTag.U1xU1: 2,
    ComponentTag.U1xSU2: 1,
    ComponentTag.SU2xSU2: 0,
    ComponentTag.USp4: 0,
    ComponentTag.SU2diag: 0,
    ComponentTag.USp6: 0,
}

# genera each tag embeds into
GENERA: Dict[ComponentTag, Tuple[int, ...]] = {
    ComponentTag.U1: (1, 2, 3),
    ComponentTag.SU2: (1,),
    ComponentTag.U1xU1: (2,),
    ComponentTag.U1xSU2: (2,),
    ComponentTag.SU2xSU2: (2,),
    ComponentTag.USp4: (2,),
    ComponentTag.SU2diag: (2, 3),
    ComponentTag.USp6: (3,),
}


def _build_index() -> Dict[Tuple[int, int, int], ComponentTag]:
    index: Dict[Tuple[int, int, int], ComponentTag] = {}
    for tag, genera in GENERA.items():
        for g in genera:
            key = (g, LIE_DIMS[tag], CENTER_DIMS[tag])
            if key in index:
                raise RuntimeError(f"catalog collision at {key}: {index[key]} and {tag}")
            index[key] = tag
    return index


CATALOG_INDEX = _build_index()


def lookup(g: int, lie_dim: int, center_dim: int) -> ComponentTag:
    """Catalog tag for the computed invariants; never guesses."""
    try:
        return CATALOG_INDEX[(g, lie_dim, center_dim)]
    except KeyError:
        raise UnknownComponentError(
            f"no catalog identity component with g={g}, lie_dim={lie_dim}, "
            f"center_dim={center_dim}",
            lie_dim=lie_dim,
        ) from None


def tags_for_genus(g: int) -> List[ComponentTag]:
    """Catalog identity components that embed in USp(2g)."""
    return [tag for tag, genera in GENERA.items() if g in genera]
