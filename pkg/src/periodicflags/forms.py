"""Invariant symplectic and orthogonal pairings on the windowed module.

The pairing couples degree d only with degree -d:

    <z^d x, z^e y> = B(x, y) * delta(d + e, 0)

where B is the base pairing fixed by the ambient variant:

* symplectic (rank 2n): coordinates e_1..e_n, f_n..f_1 with
  B(e_i, f_i) = 1 = -B(f_i, e_i), all other values 0.
* orthogonal_even (rank 2n): B(i, j) = 1 iff i + j = rank + 1 (1-based).
* orthogonal_odd (rank 2n+1): hyperbolic pairs as in the even case plus a
  middle coordinate r with B(r, r) = eta; odd modulus required.

Since <zv, w> = <v, zw>, the orthogonal complement of a lattice is again a
lattice; complements are computed in a window enlarged by one so they stay
representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .exactfield import kernel_basis, span
from .laurent_model import (
    Ambient,
    PeriodicSubspace,
    coord_index,
    coord_of,
    lattice,
    leq,
    widen,
)


class WindowMismatch(ValueError):
    """Vectors from different windows fed to the pairing."""


_PERP_CACHE = {}


@dataclass(frozen=True)
class InvariantForm:
    ambient: Ambient
    eta: int = 1

    def __post_init__(self):
        v = self.ambient.variant
        if v == "linear":
            raise ValueError("linear ambient carries no invariant form")
        if v in ("orthogonal_even", "orthogonal_odd") and self.ambient.q == 2:
            raise ValueError("orthogonal forms need an odd modulus")
        if self.eta % self.ambient.q == 0:
            raise ValueError("eta must be a unit")

    @property
    def kind(self):
        return self.ambient.variant

    def base_pairing(self, i: int, j: int) -> int:
        """B on the rank base coordinates (0-based)."""
        rank, q = self.ambient.rank, self.ambient.q
        if self.kind == "symplectic":
            if i + j == rank - 1:
                return 1 if i < j else (q - 1)
            return 0
        if i + j == rank - 1:
            if i == j:  # middle coordinate of the odd form
                return self.eta % q
            return 1
        return 0

    @cached_property
    def pair_map(self):
        """Per base coordinate i, the unique (j, B(i, j)) with B nonzero."""
        rank = self.ambient.rank
        return tuple(
            (rank - 1 - i, self.base_pairing(i, rank - 1 - i))
            for i in range(rank)
        )


def eval_shifted(form: InvariantForm, k: int, v, w, m: int = 0) -> int:
    """The pairing <v, z^m w> of two flat window vectors of exponent k.

    Degrees of z^m w outside the window pair only with degrees v lacks, so
    truncation loses nothing."""
    rank, q = form.ambient.rank, form.ambient.q
    if len(v) != 2 * k * rank or len(w) != 2 * k * rank:
        raise WindowMismatch("vector length does not match the window")
    pm = form.pair_map
    acc = 0
    for flat, c in enumerate(v):
        if not c:
            continue
        d, i = coord_of(k, rank, flat)
        e = -d - m
        if not (-k <= e < k):
            continue
        j, b = pm[i]
        acc += c * b * w[(e + k) * rank + j]
    return acc % q


def eval_vectors(form: InvariantForm, k: int, v, w) -> int:
    """Pairing of two flat window vectors in a window of exponent k."""
    return eval_shifted(form, k, v, w, 0)


def perp(form: InvariantForm, w: PeriodicSubspace) -> PeriodicSubspace:
    """Orthogonal complement of a lattice, as a lattice.

    For a positive lattice with z^k H+ <= W, the complement satisfies
    z^(k+1) H+ <= W-perp <= z^(-k+1) H+, so it is computed in window k+1.
    Pairing against the invisible tail z^(k+1) H+ of W forces the degree
    -(k+1) block of any complement vector to vanish; the negative side has
    no such boundary condition because its tail pairs entirely outside the
    window.
    """
    if form.ambient != w.ambient:
        raise ValueError("form and lattice ambients differ")
    key = (form.ambient, form.eta, w.side, w.window_exp, w.space.basis)
    hit = _PERP_CACHE.get(key)
    if hit is not None:
        return hit
    rank, q = w.rank, w.ambient.q
    k2 = w.window_exp + 1
    wide = widen(w, k2)
    dim = 2 * k2 * rank
    pm = form.pair_map
    constraints = []
    for row in wide.space.basis:
        # linear functional v -> <v, row>: degree d couples only with -d,
        # coordinate i only with its pair-map partner
        func = [0] * dim
        for flat in range(dim):
            d, i = coord_of(k2, rank, flat)
            if not -k2 <= -d < k2:
                continue
            j, b = pm[i]
            c = row[(-d + k2) * rank + j]
            if c:
                func[flat] = (b * c) % q
        constraints.append(tuple(func))
    if w.side == "positive":
        for i in range(rank):
            unit = [0] * dim
            unit[coord_index(k2, rank, -k2, i)] = 1
            constraints.append(tuple(unit))
    ker = kernel_basis(constraints, q, dim)
    out = lattice(w.ambient, w.side, k2, span(q, dim, ker))
    if len(_PERP_CACHE) < 200000:
        _PERP_CACHE[key] = out
    return out


def is_isotropic(form: InvariantForm, w: PeriodicSubspace) -> bool:
    return leq(w, perp(form, w))


def is_coisotropic(form: InvariantForm, w: PeriodicSubspace) -> bool:
    return leq(perp(form, w), w)


def hyperbolic_pair(form: InvariantForm, k: int, u, v) -> bool:
    """True when the two window vectors span a hyperbolic plane."""
    return (
        eval_vectors(form, k, u, u) == 0
        and eval_vectors(form, k, v, v) == 0
        and eval_vectors(form, k, u, v) != 0
    )


def form_for(ambient: Ambient, eta: int = 1) -> InvariantForm:
    return InvariantForm(ambient, eta)
