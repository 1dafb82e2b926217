"""Shared fixtures and helpers for the test suite."""

import random

import pytest

from periodicflags.apartments import chamber_at, standard_frame
from periodicflags.flags import is_face, make_flag
from periodicflags.laurent_model import (
    Ambient,
    LaurentMatrix,
    group_apply,
    lattice,
    span,
    widen,
)
from periodicflags.verify import complete_from
from periodicflags.weyl import ball

# Smallest ambient of each variant; the isometry forms need an odd modulus.
SMALL_AMBIENTS = {
    "linear": Ambient(3, 2, "linear"),
    "symplectic": Ambient(4, 3, "symplectic"),
    "oriflamme_single": Ambient(5, 3, "orthogonal_odd"),
    "oriflamme_double": Ambient(6, 3, "orthogonal_even"),
}


def weyl_matrix(amb: Ambient, w) -> LaurentMatrix:
    """The monomial Laurent matrix carrying frame line U_l to U_{w(l)}:
    column j holds z^m in row c where w(j) = c + m * rank.

    For the symplectic variant the coefficient sign is corrected on pairs
    whose orientation the permutation flips, so the matrix preserves the
    alternating form exactly."""
    rank = amb.rank
    coeff = [1] * rank
    if amb.variant == "symplectic":
        for i in range(rank // 2):
            ib = rank - 1 - i
            if w(i) % rank > w(ib) % rank:
                coeff[ib] = amb.q - 1
    cells = [[() for _ in range(rank)] for _ in range(rank)]
    for j in range(rank):
        v = w(j)
        c = v % rank
        m = (v - c) // rank
        cells[c][j] = ((m, coeff[j]),)
    return LaurentMatrix(amb.q, tuple(tuple(r) for r in cells))


def apply_to_flag(g: LaurentMatrix, flag):
    return make_flag([group_apply(g, lat) for _, lat in flag.members()],
                     variant=flag.variant)


def chamber_pool(amb: Ambient, variant: str, radius: int, completions: int,
                 seed: int, side: str = "positive"):
    """Apartment-ball chambers plus seeded random completions."""
    from periodicflags.laurent_model import involute, standard_positive

    rng = random.Random(seed)
    std = standard_frame(amb)
    pool = [chamber_at(std, w, side)
            for w in ball(std.type_tag, std.weyl_n, radius)]
    top = standard_positive(amb, 1)
    if side == "negative":
        top = involute(top)
    vertex = make_flag([top], variant=variant)
    for _ in range(completions):
        pool.append(complete_from(vertex, rng))
    return pool


def adjacent_chambers(c1, c2) -> bool:
    """Two distinct chambers sharing a panel."""
    if c1 == c2:
        return False
    orbits = c1.orbits()
    for o in orbits:
        face = c1.restrict([x for x in orbits if x != o])
        if is_face(face, c2):
            return True
    return False


def join_lattices(a, b):
    """Smallest lattice containing both (same ambient and side)."""
    k = max(a.window_exp, b.window_exp)
    wa, wb = widen(a, k), widen(b, k)
    rows = wa.space.basis + wb.space.basis
    return lattice(a.ambient, a.side, k,
                   span(a.ambient.q, 2 * k * a.ambient.rank, rows))


@pytest.fixture(scope="session")
def linear_pool():
    return chamber_pool(SMALL_AMBIENTS["linear"], "linear", 2, 3, seed=11)


@pytest.fixture(scope="session")
def symplectic_pool():
    return chamber_pool(SMALL_AMBIENTS["symplectic"], "symplectic", 2, 3, seed=11)
