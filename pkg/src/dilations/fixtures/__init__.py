"""Golden fixtures shipped with the package.

``crabb_davie.json`` holds the dim-8 commuting contraction triple and
the cubic polynomial whose operator norm on the triple is 4, beating
the torus supremum (about 3.61).  The construction is documented in
:func:`dilations.dilation.crabb_davie_tuple`; the file is regenerated
and independently re-derived by ``scripts/crabb_davie_oracle.py``.
"""

from __future__ import annotations

import json
from importlib import resources

from ..dilation import MultiPolynomial
from ..interpolation import ContractionTuple

__all__ = ["load_crabb_davie"]


def load_crabb_davie() -> tuple[ContractionTuple, MultiPolynomial]:
    with resources.files(__package__).joinpath("crabb_davie.json").open() as handle:
        obj = json.load(handle)
    tup = ContractionTuple.from_json(obj["tuple"], tol=1e-12)
    poly = MultiPolynomial.from_json(obj["polynomial"])
    return tup, poly
