"""Windowed model of z-periodic lattices in F_q((z))^rank.

A positive lattice is a subspace W with z^k H+ <= W <= z^-k H+ and
zW <= W, where H+ is the span of all nonnegative z-degrees.  We store only
the image of W in the 2k*rank-dimensional quotient z^-k H+ / z^k H+, with
coordinates ordered by (degree, base index), degree -k first.  In that
quotient the tail z^k H+ is zero, so the single stored invariant is
stability under the truncated up-shift.  Negative lattices mirror the
picture with z replaced by 1/z: they sit between z^k H- and z^-k H- where
H- is the span of all negative degrees.

Every constructor normalizes to the minimal window, so structural equality
of the frozen dataclass is equality of lattices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactfield import Subspace, is_prime, rref, span

VARIANTS = ("linear", "symplectic", "orthogonal_even", "orthogonal_odd")


class NotInvertible(ValueError):
    """Laurent matrix whose determinant is not a unit monomial."""


class NotStable(ValueError):
    """Window subspace that is not shift stable (not a lattice)."""


@dataclass(frozen=True)
class Ambient:
    rank: int
    q: int
    variant: str = "linear"

    def __post_init__(self):
        if self.rank < 2:
            raise ValueError("rank must be at least 2")
        if not is_prime(self.q):
            raise ValueError(f"q={self.q} is not prime")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant}")
        if self.variant in ("symplectic", "orthogonal_even") and self.rank % 2:
            raise ValueError(f"{self.variant} needs even rank")
        if self.variant == "orthogonal_odd" and self.rank % 2 == 0:
            raise ValueError("orthogonal_odd needs odd rank")


def coord_index(k: int, rank: int, degree: int, base: int) -> int:
    """Flat index of z^degree e_base inside the window of exponent k."""
    if not (-k <= degree < k):
        raise IndexError(f"degree {degree} outside window {k}")
    return (degree + k) * rank + base

def coord_of(k: int, rank: int, flat: int):
    return flat // rank - k, flat % rank


@dataclass(frozen=True)
class PeriodicSubspace:
    ambient: Ambient
    side: str
    window_exp: int
    space: Subspace

    @property
    def virtual_dim(self) -> int:
        return self.space.dim - self.window_exp * self.ambient.rank

    @property
    def rank(self) -> int:
        return self.ambient.rank

    def to_json(self):
        return {
            "rank": self.ambient.rank,
            "q": self.ambient.q,
            "variant": self.ambient.variant,
            "side": self.side,
            "window_exp": self.window_exp,
            "basis": [list(row) for row in self.space.basis],
        }


def from_json(data) -> PeriodicSubspace:
    amb = Ambient(data["rank"], data["q"], data.get("variant", "linear"))
    sp = span(amb.q, 2 * data["window_exp"] * amb.rank,
              [tuple(r) for r in data["basis"]])
    return lattice(amb, data["side"], data["window_exp"], sp)


def _shift_image(k, rank, q, vec, side, amount=1):
    """Truncated multiplication by z (positive side) or 1/z (negative)."""
    out = [0] * (2 * k * rank)
    step = amount if side == "positive" else -amount
    for flat, c in enumerate(vec):
        if not c:
            continue
        d, i = coord_of(k, rank, flat)
        d2 = d + step
        if side == "positive" and d2 >= k:
            continue  # lands in z^k H+, zero in the quotient
        if side == "negative" and d2 < -k:
            continue  # lands in z^-k H-, zero in the quotient
        out[coord_index(k, rank, d2, i)] = (out[coord_index(k, rank, d2, i)] + c) % q
    return tuple(out)


def _is_stable(k, rank, q, sp: Subspace, side) -> bool:
    return all(sp.contains(_shift_image(k, rank, q, v, side)) for v in sp.basis)


def _tail_degrees(k_small, k_big, side):
    """Degrees of the unit generators the bigger window makes visible."""
    if side == "positive":
        return range(k_small, k_big)
    return range(-k_big, -k_small)


def lattice(ambient: Ambient, side: str, window_exp: int, sp: Subspace,
            check: bool = True) -> PeriodicSubspace:
    """Canonical constructor: validates shift stability, shrinks the window."""
    if side not in ("positive", "negative"):
        raise ValueError(f"bad side {side}")
    k, rank, q = window_exp, ambient.rank, ambient.q
    if sp.ambient_dim != 2 * k * rank or sp.q != q:
        raise ValueError("subspace does not match the window")
    if check and not _is_stable(k, rank, q, sp, side):
        raise NotStable("window subspace is not shift stable")
    # shrink to the minimal window exponent
    k2 = _minimal_window(k, rank, q, sp, side)
    if k2 < k:
        sp = _project(k, k2, rank, q, sp, side)
        k = k2
    return PeriodicSubspace(ambient, side, k, sp)


def _minimal_window(k, rank, q, sp, side):
    unit = [0] * (2 * k * rank)

    def tail_contained(k2):
        for d in _tail_degrees(k2, k, side):
            for i in range(rank):
                vec = list(unit)
                vec[coord_index(k, rank, d, i)] = 1
                if not sp.contains(tuple(vec)):
                    return False
        return True

    def support_ok(k2):
        for row in sp.basis:
            for flat, c in enumerate(row):
                if c:
                    d, _ = coord_of(k, rank, flat)
                    if side == "positive" and d < -k2:
                        return False
                    if side == "negative" and d >= k2:
                        return False
        return True

    k2 = k
    while k2 > 1 and tail_contained(k2 - 1) and support_ok(k2 - 1):
        k2 -= 1
    return k2


def _project(k, k2, rank, q, sp, side):
    """Restrict to the smaller window; only valid after _minimal_window."""
    rows = []
    for row in sp.basis:
        out = [0] * (2 * k2 * rank)
        tail = False
        keep = False
        for flat, c in enumerate(row):
            if not c:
                continue
            d, i = coord_of(k, rank, flat)
            if (side == "positive" and d >= k2) or (side == "negative" and d < -k2):
                tail = True
                continue
            out[coord_index(k2, rank, d, i)] = c
            keep = True
        if keep:
            rows.append(tuple(out))
        else:
            assert tail  # pure tail rows are the dropped unit generators
    return span(q, 2 * k2 * rank, rows)


_WIDEN_CACHE = {}


def widen(w: PeriodicSubspace, k2: int) -> PeriodicSubspace:
    """Same lattice represented in a window of exponent k2 >= current."""
    k, rank, q = w.window_exp, w.rank, w.ambient.q
    if k2 < k:
        raise ValueError("widen target smaller than current window")
    if k2 == k:
        return w
    key = (w, k2)
    hit = _WIDEN_CACHE.get(key)
    if hit is not None:
        return hit
    rows = []
    for row in w.space.basis:
        out = [0] * (2 * k2 * rank)
        for flat, c in enumerate(row):
            if c:
                d, i = coord_of(k, rank, flat)
                out[coord_index(k2, rank, d, i)] = c
        rows.append(tuple(out))
    for d in _tail_degrees(k, k2, w.side):
        for i in range(rank):
            out = [0] * (2 * k2 * rank)
            out[coord_index(k2, rank, d, i)] = 1
            rows.append(tuple(out))
    # no shrink: the caller asked for this window; stability is inherited
    out = PeriodicSubspace(w.ambient, w.side, k2, span(q, 2 * k2 * rank, rows))
    if len(_WIDEN_CACHE) < 200000:
        _WIDEN_CACHE[key] = out
    return out


def standard_positive(ambient: Ambient, k: int = 1) -> PeriodicSubspace:
    """H+ = span of all coordinates of nonnegative degree."""
    rank, q = ambient.rank, ambient.q
    rows = []
    for d in range(0, k):
        for i in range(rank):
            out = [0] * (2 * k * rank)
            out[coord_index(k, rank, d, i)] = 1
            rows.append(tuple(out))
    return lattice(ambient, "positive", k, span(q, 2 * k * rank, rows), check=False)


def standard_negative(ambient: Ambient, k: int = 1) -> PeriodicSubspace:
    """H- = span of all coordinates of negative degree."""
    rank, q = ambient.rank, ambient.q
    rows = []
    for d in range(-k, 0):
        for i in range(rank):
            out = [0] * (2 * k * rank)
            out[coord_index(k, rank, d, i)] = 1
            rows.append(tuple(out))
    return lattice(ambient, "negative", k, span(q, 2 * k * rank, rows), check=False)


def virtual_dim(w: PeriodicSubspace) -> int:
    return w.virtual_dim


_SHIFT_CACHE = {}


def shift_apply(w: PeriodicSubspace, m: int) -> PeriodicSubspace:
    """Multiplication by z^m."""
    if m == 0:
        return w
    key = (w, m)
    hit = _SHIFT_CACHE.get(key)
    if hit is not None:
        return hit
    k, rank, q = w.window_exp, w.rank, w.ambient.q
    k2 = k + abs(m)
    wide = widen(w, k2)
    rows = []
    for row in wide.space.basis:
        out = [0] * (2 * k2 * rank)
        keep = False
        for flat, c in enumerate(row):
            if not c:
                continue
            d, i = coord_of(k2, rank, flat)
            d2 = d + m
            if w.side == "positive" and d2 >= k2:
                continue
            if w.side == "negative" and d2 < -k2:
                continue
            out[coord_index(k2, rank, d2, i)] = c
            keep = True
        if keep:
            rows.append(tuple(out))
    # re-add the shifted tail generators that fell outside the old tail
    if w.side == "positive":
        tail = range(max(k + m, -k2), k2)
    else:
        tail = range(-k2, min(-k + m, k2))
    for d in tail:
        for i in range(rank):
            out = [0] * (2 * k2 * rank)
            out[coord_index(k2, rank, d, i)] = 1
            rows.append(tuple(out))
    res = lattice(w.ambient, w.side, k2, span(q, 2 * k2 * rank, rows), check=False)
    if len(_SHIFT_CACHE) < 200000:
        _SHIFT_CACHE[key] = res
    return res


def involute(w: PeriodicSubspace) -> PeriodicSubspace:
    """The swap z -> 1/z: degree d goes to -d-1 and the side flips."""
    k, rank, q = w.window_exp, w.rank, w.ambient.q
    rows = []
    for row in w.space.basis:
        out = [0] * (2 * k * rank)
        for flat, c in enumerate(row):
            if c:
                d, i = coord_of(k, rank, flat)
                out[coord_index(k, rank, -d - 1, i)] = c
        rows.append(tuple(out))
    side = "negative" if w.side == "positive" else "positive"
    return lattice(w.ambient, side, k, span(q, 2 * k * rank, rows), check=False)


def leq(a: PeriodicSubspace, b: PeriodicSubspace) -> bool:
    """Containment a <= b as lattices."""
    if a.ambient != b.ambient or a.side != b.side:
        raise ValueError("cannot compare lattices of different ambient/side")
    k = max(a.window_exp, b.window_exp)
    return widen(b, k).space.contains_space(widen(a, k).space)


def common_window(*ws):
    k = max(w.window_exp for w in ws)
    return tuple(widen(w, k) for w in ws)


def random_lattice(ambient: Ambient, side: str, k: int, rng) -> PeriodicSubspace:
    """Random shift-stable window subspace (spanned by shift closures of a
    few random vectors)."""
    rank, q = ambient.rank, ambient.q
    dim = 2 * k * rank
    rows = []
    for _ in range(rng.randrange(0, 2 * k + 1)):
        vec = tuple(rng.randrange(q) for _ in range(dim))
        while any(vec):
            rows.append(vec)
            vec = _shift_image(k, rank, q, vec, side)
    return lattice(ambient, side, k, span(q, dim, rows), check=False)


# ---------------------------------------------------------------------------
# Laurent polynomial matrices and the loop-group action


def _poly_mul(a, b, q):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            out[e] = (out.get(e, 0) + c1 * c2) % q
    return {e: c for e, c in out.items() if c}


def _poly_add(a, b, q):
    out = dict(a)
    for e, c in b.items():
        out[e] = (out.get(e, 0) + c) % q
    return {e: c for e, c in out.items() if c}


def _poly_neg(a, q):
    return {e: (-c) % q for e, c in a.items()}


@dataclass(frozen=True)
class LaurentMatrix:
    """Square matrix of Laurent polynomials over F_q.

    Entries are stored as tuples of (exponent, coefficient) pairs.
    """

    q: int
    entries: tuple  # rank x rank grid of ((exp, coeff), ...) tuples

    def __post_init__(self):
        norm = tuple(
            tuple(tuple(sorted((e, c % self.q) for e, c in cell if c % self.q))
                  for cell in row)
            for row in self.entries
        )
        object.__setattr__(self, "entries", norm)

    @property
    def rank(self):
        return len(self.entries)

    def cell(self, r, c):
        return dict(self.entries[r][c])

    @property
    def degree_bound(self):
        exps = [abs(e) for row in self.entries for cell in row for e, _ in cell]
        return max(exps, default=0)

    def det(self):
        """Determinant as a Laurent polynomial dict, by memoized expansion."""
        n, q = self.rank, self.q
        memo = {}

        def minor(row, cols):
            if not cols:
                return {0: 1}
            key = (row, cols)
            if key in memo:
                return memo[key]
            acc = {}
            for pos, c in enumerate(cols):
                cell = self.cell(row, c)
                if cell:
                    sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
                    term = _poly_mul(cell, sub, q)
                    if pos % 2:
                        term = _poly_neg(term, q)
                    acc = _poly_add(acc, term, q)
            memo[key] = acc
            return acc

        return minor(0, tuple(range(n)))

    def unit_monomial(self):
        """(coeff, exponent) of det if it is c*z^m, else raise NotInvertible."""
        d = self.det()
        if len(d) != 1:
            raise NotInvertible("determinant is not a monomial")
        ((m, c),) = d.items()
        return c, m

    def inverse(self) -> "LaurentMatrix":
        n, q = self.rank, self.q
        c, m = self.unit_monomial()
        cinv = pow(c, q - 2, q)
        adj = [[None] * n for _ in range(n)]
        for r in range(n):
            for cidx in range(n):
                rows = tuple(i for i in range(n) if i != r)
                cols = tuple(j for j in range(n) if j != cidx)
                sub = LaurentMatrix(
                    q, tuple(tuple(self.entries[i][j] for j in cols) for i in rows))
                cof = sub.det() if rows else {0: 1}
                if (r + cidx) % 2:
                    cof = _poly_neg(cof, q)
                # adjugate transposes the cofactor grid; divide by det
                adj[cidx][r] = tuple(
                    (e - m, (coeff * cinv) % q) for e, coeff in cof.items())
        return LaurentMatrix(q, tuple(tuple(row) for row in adj))

    def matmul(self, other: "LaurentMatrix") -> "LaurentMatrix":
        n, q = self.rank, self.q
        out = []
        for r in range(n):
            row = []
            for c in range(n):
                acc = {}
                for j in range(n):
                    acc = _poly_add(acc, _poly_mul(self.cell(r, j), other.cell(j, c), q), q)
                row.append(tuple(acc.items()))
            out.append(tuple(row))
        return LaurentMatrix(q, tuple(out))


def identity_matrix(q, rank) -> LaurentMatrix:
    return LaurentMatrix(q, tuple(
        tuple(((0, 1),) if i == j else () for j in range(rank)) for i in range(rank)))


def diag_matrix(q, monomials) -> LaurentMatrix:
    """Diagonal matrix from (coeff, exponent) pairs."""
    rank = len(monomials)
    return LaurentMatrix(q, tuple(
        tuple(((monomials[i][1], monomials[i][0]),) if i == j else ()
              for j in range(rank)) for i in range(rank)))


def group_apply(g: LaurentMatrix, w: PeriodicSubspace) -> PeriodicSubspace:
    """g.W for an invertible Laurent matrix g (positive side).

    Window bookkeeping: with D the degree bound of g and D' of its inverse,
    g.W contains z^(k+D') H+ and is contained in z^-(k+D) H+, so the result
    lives in the window k + max(D, D').
    """
    if w.side != "positive":
        raise ValueError("group action implemented on the positive side")
    if g.rank != w.rank or g.q != w.ambient.q:
        raise ValueError("matrix does not match the ambient")
    k, rank, q = w.window_exp, w.rank, w.ambient.q
    D = g.degree_bound
    Dinv = g.inverse().degree_bound
    g.unit_monomial()  # raises NotInvertible when det is not a unit
    k2 = k + max(D, Dinv)
    wide = widen(w, k2)
    gens = [_apply_matrix(g, k2, rank, q, _window_terms(k2, rank, row))
            for row in wide.space.basis]
    # images of the tail generators of z^k H+ below the enlarged window
    for d in range(k2, k2 + D):
        for i in range(rank):
            gens.append(_apply_matrix(g, k2, rank, q, [(d, i, 1)]))
    return lattice(w.ambient, "positive", k2,
                   span(q, 2 * k2 * rank, [r for r in gens if any(r)]), check=False)


def _window_terms(k, rank, row):
    terms = []
    for flat, c in enumerate(row):
        if c:
            d, i = coord_of(k, rank, flat)
            terms.append((d, i, c))
    return terms


def _apply_matrix(g, k, rank, q, terms):
    """Image of sum c * z^d e_i under g, truncated to the window."""
    out = [0] * (2 * k * rank)
    for d, i, c in terms:
        for r in range(rank):
            for e, coeff in g.entries[r][i]:
                d2 = d + e
                if d2 >= k:
                    continue  # inside z^k H+, zero in the quotient
                if d2 < -k:
                    raise AssertionError("window underflow in group action")
                flat = coord_index(k, rank, d2, r)
                out[flat] = (out[flat] + c * coeff) % q
    return tuple(out)
