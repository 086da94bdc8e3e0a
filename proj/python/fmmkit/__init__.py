"""Python front end for the fmmkit C++ library.

Matrices cross the boundary as nested lists; entries may be ints, strings
such as "3/2", or fractions.Fraction values.
"""

from fractions import Fraction

from . import _fmmkit
from ._fmmkit import (
    ContractError,
    ParseError,
    ShapeError,
    Tensor,
    classical,
    count_multiplications,
    direct_sum,
    dumps,
    embed,
    error_scan,
    hopcroft_rank_bound,
    kronecker,
    load,
    parse,
    save,
    search,
    serendipity_groups,
    symmetry,
    type_polynomial,
    verify_approximate,
    verify_exact,
)

__all__ = [
    "ContractError",
    "ParseError",
    "ShapeError",
    "Tensor",
    "classical",
    "count_multiplications",
    "direct_sum",
    "dumps",
    "embed",
    "error_scan",
    "hopcroft_rank_bound",
    "isotropy",
    "kronecker",
    "load",
    "multiply",
    "parse",
    "save",
    "search",
    "serendipity_groups",
    "symmetry",
    "type_polynomial",
    "verify_approximate",
    "verify_exact",
]


def _text(matrix):
    return [[str(Fraction(x)) for x in row] for row in matrix]


def multiply(schedule, a, b):
    """Exact product through a list of tensors; returns (rows of Fractions, multiplication count)."""
    c, count = _fmmkit.multiply(list(schedule), _text(a), _text(b))
    return [[Fraction(x) for x in row] for row in c], count


def isotropy(tensor, u, v, w):
    return _fmmkit.isotropy(tensor, _text(u), _text(v), _text(w))
