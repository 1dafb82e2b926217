"""Apartments: frames of periodic lines and the chambers they carry.

A frame is a basis v_0..v_{r-1} of window vectors; its lines are
U_{j + m*rank} = z^m v_j.  A Weyl element pi selects for each tail index k
the lattice spanned by the lines U_{pi(l)}, l >= k (positive side) or
l <= -1-k (negative side); those tails, with the extra swapped-line slots
at the fork nodes, form the chamber of pi.

For the isometry variants a frame must be adapted to the pairing: line j
pairs to 1 exactly with its partner line and to 0 with everything else
(the middle line of the odd orthogonal form pairs with itself to eta).

Right multiplication by a simple generator changes exactly one slot of a
chamber, so apartments are thin and Weyl-indexed by construction; both
facts are checked mechanically, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactfield import (
    Subspace,
    kernel_basis,
    meet as sp_meet,
    reduce_against,
    span,
    solve,
)
from .flags import (
    FlagError,
    PeriodicFlag,
    TYPE_TAG_OF_VARIANT,
    VARIANT_OF_AMBIENT,
    layout,
    make_flag,
)
from .forms import eval_shifted, form_for, perp
from .laurent_model import (
    Ambient,
    LaurentMatrix,
    PeriodicSubspace,
    coord_index,
    coord_of,
    lattice,
    leq,
    shift_apply,
    widen,
)
from .weyl import AffineWeylElement, ball, generator, generators, identity, node_count


class FrameError(ValueError):
    pass


class NoCommonApartment(ValueError):
    pass


@dataclass(frozen=True)
class Frame:
    ambient: Ambient
    window_exp: int
    vectors: tuple  # rank flat window vectors, each of length 2*window_exp*rank

    def __post_init__(self):
        rank = self.ambient.rank
        dim = 2 * self.window_exp * rank
        if len(self.vectors) != rank:
            raise FrameError("a frame needs exactly rank line vectors")
        for v in self.vectors:
            if len(v) != dim:
                raise FrameError("frame vector length does not match the window")
        from .laurent_model import NotInvertible

        try:
            _, exp = self.matrix().unit_monomial()
        except NotInvertible:
            raise FrameError("frame vectors are not a basis")
        if exp != 0:
            raise FrameError("frame determinant must be a unit of degree zero")
        if self.ambient.variant != "linear":
            _check_adapted(self)

    @property
    def rank(self) -> int:
        return self.ambient.rank

    @property
    def type_tag(self) -> str:
        return TYPE_TAG_OF_VARIANT[VARIANT_OF_AMBIENT[self.ambient.variant]]

    @property
    def weyl_n(self) -> int:
        rank = self.rank
        return rank if self.type_tag == "A" else rank // 2

    def matrix(self) -> LaurentMatrix:
        """Columns are the frame vectors as Laurent polynomials."""
        rank, k = self.rank, self.window_exp
        cells = [[() for _ in range(rank)] for _ in range(rank)]
        for j, vec in enumerate(self.vectors):
            per_row = {}
            for flat, c in enumerate(vec):
                if c:
                    d, i = coord_of(k, rank, flat)
                    per_row.setdefault(i, []).append((d, c))
            for i, terms in per_row.items():
                cells[i][j] = tuple(sorted(terms))
        return LaurentMatrix(self.ambient.q, tuple(tuple(r) for r in cells))

    def line(self, l: int, K: int, side: str = "positive"):
        """Flat window-K vector of the line U_l = z^m v_j, truncated on the
        ideal side of the window; None when the line is not representable
        (support crossing the other boundary) or not visible at all."""
        rank, k = self.rank, self.window_exp
        m, j = divmod(l, rank)
        out = [0] * (2 * K * rank)
        seen = False
        for flat, c in enumerate(self.vectors[j]):
            if not c:
                continue
            d, i = coord_of(k, rank, flat)
            d2 = d + m
            if -K <= d2 < K:
                out[coord_index(K, rank, d2, i)] = c
                seen = True
            elif (side == "positive") == (d2 < -K):
                # support beyond the non-ideal boundary cannot be truncated
                return None
        return tuple(out) if seen else None

    def to_json(self):
        return {
            "window": self.window_exp,
            "vectors": [list(v) for v in self.vectors],
        }


def frame_from_json(ambient: Ambient, data) -> Frame:
    return Frame(ambient, data["window"], tuple(tuple(v) for v in data["vectors"]))


def _check_adapted(frame: Frame):
    """Pairing conditions: <v_i, v_pair(i)> = 1 (eta on the middle line of
    the odd form), all other products 0, as Laurent scalars."""
    form = form_for(frame.ambient)
    rank, k = frame.rank, frame.window_exp
    for i, vi in enumerate(frame.vectors):
        for j, vj in enumerate(frame.vectors):
            want = {}
            if j == rank - 1 - i:
                if i == j:
                    want = {0: form.eta % frame.ambient.q}
                elif i < j:
                    want = {0: 1}
                else:
                    want = {0: (-1) % frame.ambient.q if form.kind == "symplectic" else 1}
            for m in range(-2 * k, 2 * k + 1):
                val = eval_shifted(form, k, vi, vj, m)
                if val != want.get(-m, 0) % frame.ambient.q:
                    raise FrameError(
                        f"frame lines {i}, {j} are not adapted to the pairing")


def standard_frame(ambient: Ambient) -> Frame:
    rank = ambient.rank
    vecs = []
    for j in range(rank):
        v = [0] * (2 * rank)
        v[coord_index(1, rank, 0, j)] = 1
        vecs.append(tuple(v))
    return Frame(ambient, 1, tuple(vecs))


def _tail(frame: Frame, w: AffineWeylElement, k: int, side: str,
          extra_line: int | None = None) -> PeriodicSubspace:
    """Lattice spanned by the lines U_{w(l)} for l >= k (positive side) or
    l <= -1-k (negative side), optionally with one extra line thrown in."""
    rank, q = frame.rank, frame.ambient.q
    expected = -k if extra_line is None else -k + 1
    for K in range(frame.window_exp + 1, frame.window_exp + rank + 4):
        reach = (K + frame.window_exp + 2) * rank
        rows = []
        if side == "positive":
            indices = range(k, k + reach)
        else:
            indices = range(-1 - k, -1 - k - reach, -1)
        for l in indices:
            vec = frame.line(w(l), K, side)
            if vec is not None:
                rows.append(vec)
        if extra_line is not None:
            vec = frame.line(w(extra_line), K, side)
            if vec is not None:
                rows.append(vec)
        lat = lattice(frame.ambient, side, K, span(q, 2 * K * rank, rows))
        if lat.virtual_dim == expected:
            return lat
    raise FrameError("window exhausted while building a tail lattice")


def chamber_at(frame: Frame, w: AffineWeylElement, side: str = "positive") -> PeriodicFlag:
    """The chamber of the apartment of the frame indexed by w."""
    variant = VARIANT_OF_AMBIENT[frame.ambient.variant]
    if (w.type_tag, w.n) != (frame.type_tag, frame.weyl_n):
        raise FrameError("Weyl element does not match the frame type")
    lay = layout(variant, frame.rank)
    lats = []
    for r in sorted(lay):
        lats.append(_tail(frame, w, r, side))
        if lay[r] == 2:
            # the swapped-line slot of the fork node
            if side == "positive":
                lats.append(_tail(frame, w, r + 1, side, extra_line=r - 1))
            else:
                lats.append(_tail(frame, w, r + 1, side, extra_line=-r))
    return make_flag(lats, variant=variant)


def apartment_chambers(frame: Frame, radius: int, side: str = "positive"):
    """All (w, chamber) pairs for w of length at most radius."""
    return [
        (w, chamber_at(frame, w, side))
        for w in ball(frame.type_tag, frame.weyl_n, radius)
    ]


def is_subjacent(frame: Frame, lat: PeriodicSubspace) -> bool:
    """True when the lattice is spanned by the frame lines it contains."""
    if lat.ambient != frame.ambient:
        raise FrameError("frame and lattice ambients differ")
    rank, q = frame.rank, frame.ambient.q
    K = max(lat.window_exp, frame.window_exp) + 1
    wide = widen(lat, K)
    contained = []
    bound = (K + frame.window_exp + 1) * rank
    for l in range(-bound, bound):
        vec = frame.line(l, K, lat.side)
        if vec is None:
            # invisible or unrepresentable lines are never needed
            continue
        if wide.space.contains(vec):
            contained.append(vec)
    sp = span(q, 2 * K * rank, contained)
    return sp == wide.space


def flag_subjacent(frame: Frame, flag: PeriodicFlag) -> bool:
    return all(is_subjacent(frame, lat) for _, lat in flag.members())


def weyl_coord(frame: Frame, flag: PeriodicFlag) -> AffineWeylElement:
    """The Weyl element w with chamber_at(frame, w, side) == flag.

    The derived chain pins w(l) up to swapping the two lines at each fork
    node; admissibility (the parity conditions) resolves the swaps."""
    from .flags import derived_chain
    from .weyl import NotAdmissible, period

    side = flag.side
    rank = frame.rank
    p = period(frame.type_tag, frame.weyl_n)
    if p != rank:
        raise FrameError("index period does not match the rank")
    chain = derived_chain(flag)
    entries = {nu: lat for nu, lat in chain.items() if not isinstance(lat, tuple)}
    top = max(entries)
    # extend across the period so [top - rank, top] is covered
    m = 1 if side == "positive" else -1
    for nu in range(top - 1, top - rank - 1, -1):
        if nu not in entries and nu + rank in entries:
            entries[nu] = shift_apply(entries[nu + rank], m)
    nus = sorted((nu for nu in entries if top - rank <= nu <= top), reverse=True)
    K = max([frame.window_exp + 2] + [entries[nu].window_exp + 1 for nu in nus])
    wide = {nu: widen(entries[nu], K) for nu in nus}
    bound = (K + frame.window_exp + 1) * rank

    def lines_in(nu):
        out = set()
        for l in range(-bound, bound):
            vec = frame.line(l, K, side)
            if vec is not None and wide[nu].space.contains(vec):
                out.add(l)
        return out

    sets = {nu: lines_in(nu) for nu in nus}
    # between consecutive chain entries, the lines that leave occupy the
    # tail indices in between: one line per gap of 1, two per fork gap of 2
    fixed = {}
    options = []
    for hi, lo in zip(nus, nus[1:]):
        gap = hi - lo
        if gap not in (1, 2):
            raise FlagError("flag is not a chamber")
        diff = sets[hi] - sets[lo]
        # lines of one chain differ by whole periods; keep extremal reps
        reps = {}
        for l in diff:
            j = l % rank
            if j not in reps or (l < reps[j]) == (side == "positive"):
                reps[j] = l
        cands = sorted(reps.values())
        if len(cands) != gap:
            raise FlagError("flag is not subjacent to the frame")
        # tail indices a = -hi, ..., -lo - 1 in order
        args = [(-hi + t) if side == "positive" else (hi - 1 - t) for t in range(gap)]
        if gap == 1:
            fixed[args[0] % rank] = (cands[0], args[0])
        else:
            options.append((args, cands))

    def build(choice):
        perm = [None] * rank
        for r, (l, arg) in fixed.items():
            perm[r] = l - (arg - r)
        for (args, cands), pick in zip(options, choice):
            for arg, l in zip(args, (cands if pick == 0 else cands[::-1])):
                r = arg % rank
                perm[r] = l - (arg - r)
        if any(v is None for v in perm):
            return None
        try:
            return AffineWeylElement(frame.type_tag, frame.weyl_n, tuple(perm))
        except NotAdmissible:
            return None

    from itertools import product as iproduct

    found = []
    for choice in iproduct((0, 1), repeat=len(options)):
        w = build(choice)
        if w is not None and chamber_at(frame, w, side) == flag:
            found.append(w)
    if len(found) != 1:
        raise FlagError(f"expected one Weyl coordinate, found {len(found)}")
    return found[0]


def apartment_isomorphism(f1: Frame, f2: Frame) -> LaurentMatrix:
    """The linear map carrying the first frame to the second."""
    if f1.ambient != f2.ambient:
        raise FrameError("frames live in different ambients")
    return f2.matrix().matmul(f1.matrix().inverse())


def node_slot(frame: Frame, w: AffineWeylElement, i: int, side: str = "positive"):
    """The slot keys of chamber_at(frame, w) that the panel at Coxeter node
    i removes: the slots differing from the neighbour chamber."""
    ch = chamber_at(frame, w, side)
    from .weyl import compose

    nb = chamber_at(frame, compose(w, generator(frame.type_tag, frame.weyl_n, i)), side)
    mine = ch.slot_map()
    theirs = set(v for v in nb.slot_map().values())
    changed = [key for key, val in mine.items() if val not in theirs]
    return ch, changed


def panel_face(frame: Frame, w: AffineWeylElement, i: int, side: str = "positive"):
    """The codimension-one face of chamber_at(frame, w) at node i."""
    ch, changed = node_slot(frame, w, i, side)
    sm = ch.slot_map()
    keep = [sm[k][1] for k in sm if k not in changed]
    return make_flag(keep, variant=ch.variant)


def thinness_check(frame: Frame, radius: int, side: str = "positive"):
    """Inside one apartment every panel lies in exactly two chambers."""
    chambers = apartment_chambers(frame, radius, side)
    in_ball = {w.perm for w, _ in chambers}
    failures = []
    samples = 0
    from .flags import is_face
    from .weyl import compose, length

    for w, ch in chambers:
        if length(w) >= radius:
            continue  # neighbours may fall outside the ball
        for i in range(node_count(frame.type_tag, frame.weyl_n)):
            face = panel_face(frame, w, i, side)
            samples += 1
            holders = {w2.perm for w2, ch2 in chambers if is_face(face, ch2)}
            expect = {w.perm, compose(w, generator(frame.type_tag, frame.weyl_n, i)).perm}
            if holders != expect & in_ball:
                failures.append({
                    "w": list(w.perm),
                    "node": i,
                    "holders": sorted(list(x) for x in holders),
                })
    return {"check": "apartment_thinness", "samples": samples, "failures": failures}


# ---------------------------------------------------------------------------
# Common apartments


def _slot_list(flag: PeriodicFlag):
    """One period of line slots (lower < upper with a one-dimensional gap)
    in descending chain order; forks contribute one slot per member."""
    from .flags import derived_chain

    rank = flag.rank
    chain = derived_chain(flag)
    entries = {nu: lat for nu, lat in chain.items() if not isinstance(lat, tuple)}
    top = max(entries)
    m = 1 if flag.side == "positive" else -1
    for nu in range(top - 1, top - rank - 1, -1):
        if nu not in entries and nu + rank in entries:
            entries[nu] = shift_apply(entries[nu + rank], m)
    nus = sorted((nu for nu in entries if top - rank <= nu <= top), reverse=True)
    slots = []
    for hi, lo in zip(nus, nus[1:]):
        gap = hi - lo
        if gap == 1:
            slots.append({"level": hi, "upper": entries[hi], "lower": entries[lo],
                          "un": None})
        elif gap == 2:
            members = flag.member_at_nu(hi - 1)
            if len(members) != 2:
                raise FlagError("chain gap without a fork pair")
            for lat in members:
                slots.append({"level": hi - 1, "upper": lat, "lower": entries[lo],
                              "un": entries[hi]})
        else:
            raise FlagError("flag is not a chamber")
    if len(slots) != rank:
        raise FlagError("flag is not a chamber")
    return slots


def _lift(vec, k, K, rank):
    out = [0] * (2 * K * rank)
    for flat, c in enumerate(vec):
        if c:
            d, i = coord_of(k, rank, flat)
            out[coord_index(K, rank, d, i)] = c
    return tuple(out)


def _dual_slot_index(form, slots, idx):
    """Index of the slot whose line quotient pairs nondegenerately with
    slot idx under the form.

    A plain slot (lower < upper) pairs with (perp upper < perp lower).  A
    fork slot (inter < A) has complement (perp un < perp A); the matching
    slot of the complement fork is the member NOT congruent to perp A,
    because A/inter embeds in un'/perp(A) exactly off the other member."""
    from .flags import _member_key

    want_lower = _member_key(perp(form, slots[idx]["upper"]))
    want_upper = _member_key(perp(form, slots[idx]["lower"]))
    for j, s in enumerate(slots):
        if (_member_key(s["lower"]) == want_lower
                and _member_key(s["upper"]) == want_upper):
            return j
    if slots[idx]["un"] is not None:
        # want_upper is the complement fork's un, want_lower one member
        hits = [
            j for j, s in enumerate(slots)
            if s["un"] is not None
            and _member_key(s["un"]) == want_upper
            and _member_key(s["upper"]) != want_lower
        ]
        if len(hits) == 1:
            return hits[0]
    raise FlagError("derived chain is not closed under complements")


def _pairing_functional(form, K, u, m):
    """Row vector of the functional v -> <v, z^m u> on window-K vectors."""
    rank, q = form.ambient.rank, form.ambient.q
    dim = 2 * K * rank
    row = [0] * dim
    pair_map = form.pair_map
    for flat in range(dim):
        d, i = coord_of(K, rank, flat)
        e = -d - m
        if -K <= e < K:
            j, b = pair_map[i]
            row[flat] = (b * u[coord_index(K, rank, e, j)]) % q
    return tuple(row)


def _laurent_pairing(form, K, v, w):
    """Nonzero coefficients {m: <v, z^m w>} of the pairing as a Laurent
    scalar."""
    out = {}
    for m in range(-2 * K, 2 * K + 1):
        c = eval_shifted(form, K, v, w, m)
        if c:
            out[m] = c
    return out


def _shift_flat(vec, K, rank, m):
    out = [0] * len(vec)
    for flat, c in enumerate(vec):
        if c:
            d, i = coord_of(K, rank, flat)
            d2 = d + m
            if not (-K <= d2 < K):
                raise NoCommonApartment("line representative leaves the window")
            out[coord_index(K, rank, d2, i)] = c
    return tuple(out)


class _Matcher:
    """Shared state of the common-apartment search: the expanded slot grid
    of the second flag plus the constraints accumulated so far."""

    def __init__(self, f1, f2):
        amb = f1.ambient
        self.amb = amb
        self.q = amb.q
        self.rank = amb.rank
        self.variant = VARIANT_OF_AMBIENT[amb.variant]
        self.form = None if self.variant == "linear" else form_for(amb)
        self.slots1 = _slot_list(f1)
        slots2 = _slot_list(f2)
        k1 = max(lat.window_exp for _, lat in f1.members())
        k2 = max(lat.window_exp for _, lat in f2.members())
        P = k1 + k2 + 2
        self.K = max(
            [s["upper"].window_exp for s in self.slots1 + slots2]
            + [s["lower"].window_exp for s in self.slots1 + slots2]
        ) + P + 2
        self.exp2 = []
        for j2, s in enumerate(slots2):
            for m in range(-P, P + 1):
                amt = m if f2.side == "positive" else -m
                self.exp2.append({
                    "level": s["level"] - m * self.rank,
                    "upper": shift_apply(s["upper"], amt),
                    "lower": shift_apply(s["lower"], amt),
                    "chain": j2,
                })
        self.used2 = set()
        self.fixed = []  # lifted window-K vectors of finished lines
        self.fixed_rows = []  # their pairing functionals, kept in step
        self._geom = {}  # slot index -> memoized matching-cell geometry
        import random

        self.rng = random.Random(0)  # deterministic sampling fallback

    def add_fixed(self, vec):
        lifted = _lift(vec, _small_k(vec, self), self.K, self.rank)
        self.fixed.append(lifted)
        rows = []
        for m in range(-2 * self.K, 2 * self.K + 1):
            row = _pairing_functional(self.form, self.K, lifted, m)
            if any(row):
                rows.append(row)
        self.fixed_rows.append(rows)

    def pop_fixed(self):
        self.fixed.pop()
        self.fixed_rows.pop()

    def _geometry(self, idx):
        """Matching-cell geometry of slot1[idx] against every shifted slot
        of the second flag, lazily computed and memoized: the geometry
        depends only on the two flags, not on the search state."""
        state = self._geom.get(idx)
        if state is None:
            s1 = self.slots1[idx]
            order = sorted(
                self.exp2,
                key=lambda e: (abs(e["level"] - s1["level"]), -e["level"]),
            )

            def scan():
                for e in order:
                    # all meets in one shared window so the tails line up
                    kmax = max(s1["upper"].window_exp, s1["lower"].window_exp,
                               e["upper"].window_exp, e["lower"].window_exp)
                    if s1["upper"].side != e["upper"].side:
                        kmax += 1
                    u1 = widen(s1["upper"], kmax).space
                    l1 = widen(s1["lower"], kmax).space
                    u2 = widen(e["upper"], kmax).space
                    l2 = widen(e["lower"], kmax).space
                    cell = sp_meet(u1, u2)
                    below = span(
                        self.q, 2 * kmax * self.rank,
                        sp_meet(l1, u2).basis + sp_meet(u1, l2).basis,
                    )
                    if cell.dim - below.dim != 1:
                        continue
                    yield e, list(cell.basis), below, kmax

            state = ([], scan())
            self._geom[idx] = state
        cache, gen = state
        i = 0
        while True:
            if i == len(cache):
                item = next(gen, None)
                if item is None:
                    return
                cache.append(item)
            yield cache[i]
            i += 1

    def candidates(self, idx):
        """Yield (grid entry, cell basis rows, below subspace, window,
        constraint rows) wherever slot1[idx] meets a shifted slot of the
        second flag in a one-dimensional subquotient."""
        rows_cons = [row for rows in self.fixed_rows for row in rows]
        for e, cell_rows, below, kmax in self._geometry(idx):
            if e["chain"] in self.used2:
                continue
            yield e, cell_rows, below, kmax, rows_cons


def _combine(coeffs, rows, q):
    out = [0] * len(rows[0])
    for c, r in zip(coeffs, rows):
        if c:
            for j, x in enumerate(r):
                out[j] = (out[j] + c * x) % q
    return tuple(out)


def _constrained_cell(M, cell_rows, rows_cons):
    """Basis of the cell vectors orthogonal to every finished line."""
    if not rows_cons:
        return list(cell_rows)
    lifted = [_lift(r, _small_k(r, M), M.K, M.rank) for r in cell_rows]
    mat = [tuple(sum(a * b for a, b in zip(row, lv)) % M.q for lv in lifted)
           for row in rows_cons]
    coeffs = kernel_basis(mat, M.q, len(cell_rows))
    return [_combine(c, cell_rows, M.q) for c in coeffs]


def _line_family(M, cell_rows, below, rows_cons):
    """Admissible line representatives c*u0 + span(inner): vectors of the
    cell outside below, orthogonal to every finished line.  The quotient
    cell/below is one dimensional, so a single outer vector u0 suffices.
    Returns None when every constrained vector falls into below."""
    q = M.q
    vecs = _constrained_cell(M, cell_rows, rows_cons)
    u0 = res0 = None
    inner = []
    for v in vecs:
        r = reduce_against(below.basis, v, q)
        if r is None:
            if any(v):
                inner.append(v)
        elif u0 is None:
            u0, res0 = v, r
        else:
            piv = next(j for j, x in enumerate(res0) if x)
            lam = (r[piv] * pow(res0[piv], q - 2, q)) % q
            d = tuple((a - lam * b) % q for a, b in zip(v, u0))
            if any(d):
                inner.append(d)
    if u0 is None:
        return None
    return u0, inner


def _family_vectors(M, family, scalars=True, cap=6000):
    """Vectors c*base + combination(inner) of an admissible family;
    exhaustive for small families, seeded random sampling for large ones."""
    from itertools import product as iproduct

    u0, inner = family
    q = M.q
    mults = range(1, q) if scalars else (1,)
    if len(inner) <= 8:
        for c in mults:
            base = tuple((c * x) % q for x in u0)
            yield base
            for coeffs in iproduct(range(q), repeat=len(inner)):
                if not any(coeffs):
                    continue
                yield tuple(
                    (a + b) % q for a, b in zip(base, _combine(coeffs, inner, q)))
        return
    for _ in range(cap):
        c = M.rng.randrange(1, q) if scalars else 1
        base = tuple((c * x) % q for x in u0)
        coeffs = [M.rng.randrange(q) for _ in inner]
        yield base if not any(coeffs) else tuple(
            (a + b) % q for a, b in zip(base, _combine(coeffs, inner, q)))


def _is_null_line(form, K, vec):
    return all(c == 0 for c in _laurent_pairing(form, K, vec, vec).values())


def common_apartment(f1: PeriodicFlag, f2: PeriodicFlag, budget: int = 400) -> Frame:
    """A frame subjacent to both chambers.

    Same-side chambers always admit one (half of the building axioms); a
    positive and a negative chamber admit one exactly when they lie in a
    common twin apartment."""
    if f1.ambient != f2.ambient:
        raise FrameError("flags live in different ambients")
    if not (f1.is_full() and f2.is_full()):
        raise FrameError("common apartments are computed for chambers")
    try:
        frame = _search_apartment(f1, f2, budget)
    except NoCommonApartment:
        # the greedy slot order of one chamber can dead-end inside the
        # enumeration caps while the other's succeeds; a frame subjacent
        # to both is symmetric in the arguments, so retry swapped
        frame = _search_apartment(f2, f1, budget)
    return _untwist(frame)


def _search_apartment(f1, f2, budget):
    M = _Matcher(f1, f2)
    groups = []
    seen = set()
    for idx in range(len(M.slots1)):
        if idx in seen:
            continue
        if M.form is None:
            groups.append(("free", idx))
            seen.add(idx)
            continue
        didx = _dual_slot_index(M.form, M.slots1, idx)
        if didx == idx:
            groups.append(("middle", idx))
            seen.add(idx)
        else:
            groups.append(("pair", idx, didx))
            seen.update((idx, didx))
    # the depth-first search is greedy per slot group, and a bad early
    # commitment can exhaust the caps; the group order changes which
    # commitments come first, so try a few orderings
    from itertools import islice, permutations

    for order in islice(permutations(range(len(groups))), 24):
        assigned = {}
        if _extend(M, [groups[i] for i in order], 0, assigned, [budget]):
            return _assemble_frame(
                M, f1, assigned, [groups[i][1:] for i in order])
    raise NoCommonApartment("no compatible system of lines")


def _small_k(vec, M):
    return len(vec) // (2 * M.rank)


def _iter_free(M, idx):
    """Options for a slot of the linear variant: one per matching cell."""
    for e, cell_rows, below, kmax, rows_cons in M.candidates(idx):
        family = _line_family(M, cell_rows, below, rows_cons)
        if family is not None:
            yield (family[0],), (e["chain"],)


def _iter_middle(M, idx, per_cell=6):
    """Options for the self-paired line of the odd orthogonal form: null
    at every nonzero shift, pairing eta with itself at shift zero."""
    q = M.q
    eta = M.form.eta % q
    squares = {pow(t, 2, q): t for t in range(1, q)}
    for e, cell_rows, below, kmax, rows_cons in M.candidates(idx):
        family = _line_family(M, cell_rows, below, rows_cons)
        if family is None:
            continue
        served = 0
        for vec in _family_vectors(M, family):
            pairing = _laurent_pairing(M.form, _small_k(vec, M), vec, vec)
            if set(pairing) != {0}:
                continue
            ratio = (pairing[0] * pow(eta, q - 2, q)) % q
            if ratio not in squares:
                continue
            tinv = pow(squares[ratio], q - 2, q)
            yield (tuple((c * tinv) % q for c in vec),), (e["chain"],)
            served += 1
            if served >= per_cell:
                break


def _iter_pair(M, idx, didx, per_cell=4, partners_per_v=2):
    """Options for a slot and its complement slot: hyperbolic line pairs."""
    for e, cell_rows, below, kmax, rows_cons in M.candidates(idx):
        family = _line_family(M, cell_rows, below, rows_cons)
        if family is None:
            continue
        tried = 0
        for vec in _family_vectors(M, family):
            if not _is_null_line(M.form, _small_k(vec, M), vec):
                continue
            served = 0
            for w, chain2 in _iter_partner(M, didx, vec, e["chain"]):
                yield (vec, w), (e["chain"], chain2)
                served += 1
                if served >= partners_per_v:
                    break
            tried += 1
            if tried >= per_cell:
                break


def _iter_partner(M, didx, vec, reserved_chain, per_target=2):
    """Partner lines: pairing with vec a single monomial (realigned to
    shift zero with unit coefficient), null, orthogonal to every finished
    line, and filling the complement slot."""
    q, K, rank = M.q, M.K, M.rank
    kv = _small_k(vec, M)
    for e, cell_rows, below, kmax, rows_cons in M.candidates(didx):
        if e["chain"] == reserved_chain:
            continue
        basis = _constrained_cell(M, cell_rows, rows_cons)
        if not basis:
            continue
        kk = max(kmax, kv)
        vl = _lift(vec, kv, kk, rank)
        basis_k = [_lift(b, kmax, kk, rank) for b in basis]
        mrange = list(range(-2 * kk, 2 * kk + 1))
        # pairing profile of each basis vector against vec over all shifts
        profile = [tuple(eval_shifted(M.form, kk, b, vl, m) for m in mrange)
                   for b in basis_k]
        # coefficient vectors pairing to zero at every shift: kernel of the
        # transpose (rows indexed by shifts)
        rows_by_shift = list(zip(*profile))
        hom = kernel_basis(rows_by_shift, q, len(basis))
        for e0 in sorted(mrange, key=abs):
            target = tuple(1 if m == e0 else 0 for m in mrange)
            y = solve(profile, q, target)
            if y is None:
                continue
            w0 = _combine(y, basis, q)
            inner = [_combine(n, basis, q) for n in hom if any(n)]
            served = 0
            for wv in _family_vectors(M, (w0, inner), scalars=False):
                if below.contains(wv):
                    continue
                if not _is_null_line(M.form, _small_k(wv, M), wv):
                    continue
                w_lift = _lift(wv, kmax, K, rank)
                try:
                    aligned = _shift_flat(w_lift, K, rank, e0)
                except NoCommonApartment:
                    break
                yield aligned, e["chain"]
                served += 1
                if served >= per_target:
                    break


def _extend(M, groups, t, assigned, budget):
    """Depth-first assignment of lines to slot groups with backtracking."""
    if t == len(groups):
        return True
    kind = groups[t][0]
    if kind == "free":
        options = _iter_free(M, groups[t][1])
    elif kind == "middle":
        options = _iter_middle(M, groups[t][1])
    else:
        options = _iter_pair(M, groups[t][1], groups[t][2])
    for vecs, chains in options:
        if budget[0] <= 0:
            return False
        budget[0] -= 1
        idxs = groups[t][1:]
        for i, vv in zip(idxs, vecs):
            assigned[i] = vv
        added = 0
        if M.form is not None:
            for vv in vecs:
                M.add_fixed(vv)
                added += 1
        M.used2.update(chains)
        if _extend(M, groups, t + 1, assigned, budget):
            return True
        M.used2.difference_update(chains)
        for _ in range(added):
            M.pop_fixed()
        for i in idxs:
            assigned.pop(i, None)
    return False


def _assemble_frame(M, f1, assigned, pair_order):
    rank, q, K = M.rank, M.q, M.K
    vectors = [None] * rank
    if M.form is None:
        for j, (idx,) in enumerate(pair_order):
            vectors[j] = _lift(assigned[idx], _small_k(assigned[idx], M), K, rank)
    else:
        t = 0
        for group in pair_order:
            if len(group) == 1:
                vectors[rank // 2] = _lift(
                    assigned[group[0]], _small_k(assigned[group[0]], M), K, rank)
            else:
                idx, didx = group
                # the partner (pairing +1 against the first line) sits at
                # the lower frame index
                vectors[t] = _lift(assigned[didx], _small_k(assigned[didx], M), K, rank)
                vectors[rank - 1 - t] = _lift(
                    assigned[idx], _small_k(assigned[idx], M), K, rank)
                t += 1
    if any(v is None for v in vectors):
        raise NoCommonApartment("line pattern does not cover every chain")
    # trim to the minimal symmetric window holding every support
    kf = 1
    for v in vectors:
        for flat, c in enumerate(v):
            if c:
                d, _ = coord_of(K, rank, flat)
                kf = max(kf, d + 1, -d)
    trimmed = []
    for v in vectors:
        out = [0] * (2 * kf * rank)
        for flat, c in enumerate(v):
            if c:
                d, i = coord_of(K, rank, flat)
                out[coord_index(kf, rank, d, i)] = c
        trimmed.append(tuple(out))
    if M.form is None:
        # normalize the determinant exponent by shifting the first vector
        from .laurent_model import NotInvertible

        probe = Frame.__new__(Frame)
        object.__setattr__(probe, "ambient", M.amb)
        object.__setattr__(probe, "window_exp", kf)
        object.__setattr__(probe, "vectors", tuple(trimmed))
        try:
            _, exp = probe.matrix().unit_monomial()
        except NotInvertible:
            raise NoCommonApartment("chosen lines are not independent")
        if exp:
            kf2 = kf + abs(exp)
            grown = [_lift(v, kf, kf2, rank) for v in trimmed]
            grown[0] = _shift_flat(grown[0], kf2, rank, -exp)
            trimmed, kf = grown, kf2
    return Frame(M.amb, kf, tuple(trimmed))


# ---------------------------------------------------------------------------
# Fork typing.  An adapted frame can differ from the standard one by a
# diagram automorphism (an isometry outside the affine Weyl group: an odd
# sign change, or an odd total z-shift).  Such a frame swaps the two
# families at the fork nodes, which breaks the Weyl-valued codistance.
# The two families are separated by a classical invariant: two fork
# lattices at the same virtual dimension lie in the same family exactly
# when their intersection has even codimension in either.


def _family_parity(lat: PeriodicSubspace, ref: PeriodicSubspace) -> int:
    """Parity of dim(lat / (lat meet ref)) after normalizing lat by a
    power of z to the virtual dimension of ref."""
    rank = lat.ambient.rank
    d = ref.virtual_dim - lat.virtual_dim
    if lat.side != ref.side or d % rank:
        raise FrameError("family parity needs commensurable fork lattices")
    m = d // rank
    if lat.side == "positive":
        m = -m
    ln = shift_apply(lat, m)
    K = max(ln.window_exp, ref.window_exp)
    a, b = widen(ln, K), widen(ref, K)
    return (a.space.dim - sp_meet(a.space, b.space).dim) % 2


_FORK_REFS = {}


def _fork_pair_members(frame: Frame, w: AffineWeylElement, r: int):
    """The two fork-pair lattices of chamber_at(frame, w) at fork level r,
    without building the rest of the chamber."""
    m1 = _tail(frame, w, r, "positive")
    m2 = _tail(frame, w, r + 1, "positive", extra_line=r - 1)
    return m1, m2


def _fork_references(ambient: Ambient):
    """Reference fork lattices {residue: {node: lattice}} read off the
    identity chamber of the standard frame."""
    if ambient in _FORK_REFS:
        return _FORK_REFS[ambient]
    frame = standard_frame(ambient)
    ident = identity(frame.type_tag, frame.weyl_n)
    c = chamber_at(frame, ident, "positive")
    sm = c.slot_map()
    refs = {}
    for i in range(node_count(frame.type_tag, frame.weyl_n)):
        _, changed = node_slot(frame, ident, i, "positive")
        for key in changed:
            nu, lat = sm[key]
            if len(c.member_at_nu(nu)) > 1:
                refs.setdefault(key[0], {})[i] = lat
    _FORK_REFS[ambient] = refs
    return refs


def _fork_flip_bits(frame: Frame):
    """For each fork residue of the frame's identity chamber, whether its
    node assignment disagrees with the global family invariant.

    The node carried by each pair member is read off locally: moving along
    the panel of one fork node replaces exactly that node's member, so the
    member absent from the neighbour's pair is the one at that node."""
    refs = _fork_references(frame.ambient)
    if not refs:
        return {}
    tag, n = frame.type_tag, frame.weyl_n
    ident = identity(tag, n)
    bits = {}
    for r, by_node in refs.items():
        i1, i2 = sorted(by_node)
        m1, m2 = _fork_pair_members(frame, ident, r)
        neighbour = _fork_pair_members(frame, generator(tag, n, i1), r)
        if m1 in neighbour and m2 not in neighbour:
            at_i1, at_i2 = m2, m1
        elif m2 in neighbour and m1 not in neighbour:
            at_i1, at_i2 = m1, m2
        else:
            raise FrameError("fork panel move does not replace one member")
        p1 = _family_parity(at_i1, by_node[i1])
        p2 = _family_parity(at_i2, by_node[i2])
        if p1 != p2:
            raise FrameError("inconsistent fork families at one fork")
        bits[r] = p1
    return bits


def _pair_swap(frame: Frame) -> Frame:
    """Exchange the first hyperbolic pair (an odd sign change)."""
    vecs = list(frame.vectors)
    vecs[0], vecs[frame.rank - 1] = vecs[frame.rank - 1], vecs[0]
    return Frame(frame.ambient, frame.window_exp, tuple(vecs))


def _pair_shift(frame: Frame) -> Frame:
    """Shift the first hyperbolic pair by z and 1/z (an odd total shift)."""
    rank, k = frame.rank, frame.window_exp
    K = k + 1
    vecs = [_lift(v, k, K, rank) for v in frame.vectors]
    vecs[0] = _shift_flat(vecs[0], K, rank, 1)
    vecs[rank - 1] = _shift_flat(vecs[rank - 1], K, rank, -1)
    return Frame(frame.ambient, K, tuple(vecs))


def _untwist(frame: Frame) -> Frame:
    """Replace the frame by one with the same lines whose chamber labels
    respect the global fork families.  Only the fork types carry parity
    constraints that a diagram automorphism can violate."""
    if frame.type_tag not in ("B", "D"):
        return frame
    if not any(_fork_flip_bits(frame).values()):
        return frame
    for move in (_pair_swap, _pair_shift, lambda f: _pair_shift(_pair_swap(f))):
        fixed = move(frame)
        if not any(_fork_flip_bits(fixed).values()):
            return fixed
    raise FrameError("fork families cannot be aligned with the frame")


def cross_meet(wp: PeriodicSubspace, wn: PeriodicSubspace) -> Subspace:
    """The finite intersection of a positive and a negative lattice, as a
    subspace of their joint window."""
    if wp.side != "positive" or wn.side != "negative":
        raise FrameError("cross_meet expects a positive and a negative lattice")
    K = max(wp.window_exp, wn.window_exp) + 1
    return sp_meet(widen(wp, K).space, widen(wn, K).space)


def export_dot(frame: Frame, radius: int, side: str = "positive") -> str:
    """DOT graph of the apartment ball: chambers as nodes, panel adjacency
    as labelled edges."""
    from .weyl import compose, length

    chambers = apartment_chambers(frame, radius, side)
    index = {w.perm: f"c{i}" for i, (w, _) in enumerate(chambers)}
    lines = ["graph apartment {"]
    for w, _ in chambers:
        label = ",".join(str(x) for x in w.perm)
        lines.append(f'  {index[w.perm]} [label="{label}"];')
    seen = set()
    for w, _ in chambers:
        for i in range(node_count(frame.type_tag, frame.weyl_n)):
            w2 = compose(w, generator(frame.type_tag, frame.weyl_n, i))
            if w2.perm in index:
                edge = tuple(sorted([w.perm, w2.perm])) + (i,)
                if edge not in seen:
                    seen.add(edge)
                    lines.append(f"  {index[w.perm]} -- {index[w2.perm]} [label={i}];")
    lines.append("}")
    return "\n".join(lines)
