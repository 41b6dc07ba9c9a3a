"""Directed contact graphs and the strong-connectivity (irreducibility) test."""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .exceptions import ValidationError

__all__ = ["ContactGraph", "adjacency_matrix", "check_irreducible"]


@dataclass(frozen=True)
class ContactGraph:
    """Weighted digraph; an arc ``(j, i, w)`` means node j infects node i at rate w."""

    n: int
    arcs: tuple = ()
    is_irreducible: bool = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n <= 0:
            raise ValidationError(f"node count must be a positive integer, got {self.n!r}")
        arcs = tuple((int(s), int(t), float(w)) for s, t, w in self.arcs)
        for s, t, w in arcs:
            if not (0 <= s < self.n and 0 <= t < self.n):
                raise ValidationError(f"arc ({s}, {t}) has a node index outside [0, {self.n})")
            if not np.isfinite(w) or w < 0:
                raise ValidationError(f"arc ({s}, {t}) has invalid weight {w}")
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "is_irreducible", check_irreducible(adjacency_matrix(self)))

    @classmethod
    def from_matrix(cls, B):
        B = np.asarray(B, dtype=float)
        rows, cols = np.nonzero(B)
        return cls(B.shape[0], tuple((j, i, B[i, j]) for i, j in zip(rows, cols)))


def adjacency_matrix(g):
    """Dense matrix with entry (i, j) = weight of arc j -> i. Repeated arcs accumulate."""
    A = np.zeros((g.n, g.n))
    for s, t, w in g.arcs:
        A[t, s] += w
    return A


def check_irreducible(B):
    """True iff the pattern of strictly positive entries of ``B`` is strongly connected."""
    B = np.asarray(B)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {B.shape}")
    if B.shape[0] == 1:
        return True
    n_comp, _ = connected_components(B > 0, directed=True, connection="strong")
    return n_comp == 1
