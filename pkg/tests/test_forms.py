"""Invariant forms and orthogonal complements of lattices."""

import random

import pytest

from conftest import SMALL_AMBIENTS, join_lattices
from periodicflags.forms import (
    eval_shifted,
    eval_vectors,
    form_for,
    hyperbolic_pair,
    is_coisotropic,
    is_isotropic,
    perp,
)
from periodicflags.laurent_model import (
    Ambient,
    coord_index,
    leq,
    random_lattice,
    shift_apply,
    standard_positive,
)

ISO_AMBIENTS = [SMALL_AMBIENTS[v]
                for v in ("symplectic", "oriflamme_single", "oriflamme_double")]


def test_form_validation():
    with pytest.raises(ValueError):
        form_for(Ambient(3, 3, "linear"))
    with pytest.raises(ValueError):
        form_for(Ambient(4, 3, "symplectic"), eta=3)


@pytest.mark.parametrize("amb", ISO_AMBIENTS)
def test_pair_map_matches_base_pairing(amb):
    form = form_for(amb)
    rank = amb.rank
    for i in range(rank):
        j, b = form.pair_map[i]
        assert b == form.base_pairing(i, j) != 0
        for j2 in range(rank):
            if j2 != j:
                assert form.base_pairing(i, j2) == 0


@pytest.mark.parametrize("amb", ISO_AMBIENTS)
def test_pairing_symmetry(amb):
    form = form_for(amb)
    rank, q, k = amb.rank, amb.q, 2
    rng = random.Random(4)
    for _ in range(30):
        v = tuple(rng.randrange(q) for _ in range(2 * k * rank))
        w = tuple(rng.randrange(q) for _ in range(2 * k * rank))
        a, b = eval_vectors(form, k, v, w), eval_vectors(form, k, w, v)
        if form.kind == "symplectic":
            assert (a + b) % q == 0
        else:
            assert a == b


@pytest.mark.parametrize("amb", ISO_AMBIENTS)
def test_shifted_pairing_degree_coupling(amb):
    # <v, z^m w> couples degree d of v with degree -d-m of w only
    form = form_for(amb)
    rank, k = amb.rank, 2
    for d in range(-k, k):
        for e in range(-k, k):
            v = [0] * (2 * k * rank)
            w = [0] * (2 * k * rank)
            i = 0
            j, b = form.pair_map[i]
            v[coord_index(k, rank, d, i)] = 1
            w[coord_index(k, rank, e, j)] = 1
            for m in range(-2 * k, 2 * k + 1):
                want = b if d + e + m == 0 else 0
                assert eval_shifted(form, k, v, w, m) == want % amb.q


@pytest.mark.parametrize("amb", ISO_AMBIENTS)
def test_hyperbolic_pair_of_standard_lines(amb):
    form = form_for(amb)
    rank, k = amb.rank, 1
    u = [0] * (2 * rank)
    v = [0] * (2 * rank)
    u[coord_index(k, rank, 0, 0)] = 1
    v[coord_index(k, rank, 0, rank - 1)] = 1
    assert hyperbolic_pair(form, k, tuple(u), tuple(v))


@pytest.mark.parametrize("amb", ISO_AMBIENTS)
def test_perp_of_standard(amb):
    form = form_for(amb)
    h = standard_positive(amb)
    assert perp(form, h) == shift_apply(h, 1)
    assert perp(form, shift_apply(h, 1)) == h


@pytest.mark.parametrize("amb", ISO_AMBIENTS)
def test_perp_involution_and_dimension(amb):
    form = form_for(amb)
    rng = random.Random(17)
    for _ in range(25):
        side = rng.choice(("positive", "negative"))
        w = random_lattice(amb, side, rng.choice((1, 2)), rng)
        p = perp(form, w)
        assert p.side == side
        sgn = -1 if side == "positive" else 1
        assert w.virtual_dim + p.virtual_dim == sgn * amb.rank
        assert perp(form, p) == w


@pytest.mark.parametrize("amb", ISO_AMBIENTS)
def test_perp_reverses_containment(amb):
    form = form_for(amb)
    rng = random.Random(23)
    for _ in range(20):
        side = rng.choice(("positive", "negative"))
        a = random_lattice(amb, side, 1, rng)
        b = join_lattices(a, random_lattice(amb, side, 1, rng))
        assert leq(perp(form, b), perp(form, a))


@pytest.mark.parametrize("amb", ISO_AMBIENTS)
def test_isotropy_flags(amb):
    form = form_for(amb)
    h = standard_positive(amb)
    zh = shift_apply(h, 1)
    # z H+ is contained in its complement H+; H+ contains its complement
    assert is_isotropic(form, zh)
    assert is_coisotropic(form, h)
    assert not is_isotropic(form, h)
