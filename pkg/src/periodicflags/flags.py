"""Periodic flags of lattices: linear, symplectic, and the two oriflamme
variants.

A flag stores one period of a z-periodic chain.  Slots are grouped by
virtual dimension; oriflamme node slots hold two incomparable lattices.
The stored period is normalized so the leading slot has the lowest
nonnegative virtual dimension, and every lattice is window-minimal, so
structural equality of flags is mathematical equality.

Layouts (slot residues r = -nu mod rank, for the positive side):

* linear (rank n):          r = 0..n-1, all single.
* symplectic (rank 2n):     r = 0..2n-1, all single, perp-closed with
                            perp(W at r) matching the member at -r.
* oriflamme_double (rank 2n):  pairs at r = 0 and r = n, singles at
                            2..n-2 and n+2..2n-2; nothing at distance 1
                            from a pair node.
* oriflamme_single (rank 2n+1): pair at r = 0, singles at 2..2n-1.

On the negative side virtual dimension grows with z, so the same layouts
apply with r = +nu mod rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .exactfield import Subspace, reduce_against, span
from .forms import InvariantForm, form_for, perp
from .laurent_model import (
    Ambient,
    PeriodicSubspace,
    common_window,
    leq,
    shift_apply,
    widen,
)


class FlagError(ValueError):
    pass


class NotNested(FlagError):
    pass


class PeriodicityViolated(FlagError):
    pass


class VariantConstraintViolated(FlagError):
    pass


class OriflammeConstraintViolated(VariantConstraintViolated):
    pass


class NotIsotropic(FlagError):
    pass


VARIANT_OF_AMBIENT = {
    "linear": "linear",
    "symplectic": "symplectic",
    "orthogonal_even": "oriflamme_double",
    "orthogonal_odd": "oriflamme_single",
}

TYPE_TAG_OF_VARIANT = {
    "linear": "A",
    "symplectic": "C",
    "oriflamme_double": "D",
    "oriflamme_single": "B",
}


def layout(variant: str, rank: int):
    """Map residue -> slot multiplicity for a chamber of this variant."""
    if variant == "linear":
        return {r: 1 for r in range(rank)}
    if variant == "symplectic":
        return {r: 1 for r in range(rank)}
    if variant == "oriflamme_double":
        n = rank // 2
        lay = {0: 2, n: 2}
        for r in range(2, n - 1):
            lay[r] = 1
        for r in range(n + 2, 2 * n - 1):
            lay[r] = 1
        return lay
    if variant == "oriflamme_single":
        lay = {0: 2}
        for r in range(2, rank - 1):
            lay[r] = 1
        return lay
    raise FlagError(f"unknown variant {variant}")


def dual_residue(variant: str, rank: int, r: int) -> int:
    return (-r) % rank


def orbit_of(variant: str, rank: int, slot_key):
    """Duality orbit of a slot key (residue, j); deleting a slot removes
    its whole orbit.  Pair-node slots are their own orbits."""
    r, j = slot_key
    if variant == "linear":
        return frozenset({(r, 0)})
    lay = layout(variant, rank)
    rd = dual_residue(variant, rank, r)
    if lay.get(r) == 2:
        return frozenset({(r, j)})
    return frozenset({(r, 0), (rd, 0)})


def all_orbits(variant: str, rank: int):
    seen = []
    for r, mult in sorted(layout(variant, rank).items()):
        for j in range(mult):
            o = orbit_of(variant, rank, (r, j))
            if o not in seen:
                seen.append(o)
    return seen


@dataclass(frozen=True)
class FlagTypeK:
    period: int
    slots: tuple  # sorted (residue, multiplicity) pairs


@dataclass(frozen=True)
class PeriodicFlag:
    variant: str
    side: str
    slots: tuple  # tuple of (nu, lattices-tuple) sorted by nu descending

    @property
    def ambient(self) -> Ambient:
        return self.slots[0][1][0].ambient

    @property
    def rank(self) -> int:
        return self.ambient.rank

    @property
    def type_tag(self) -> str:
        return TYPE_TAG_OF_VARIANT[self.variant]

    @property
    def weyl_n(self) -> int:
        r = self.rank
        return r if self.variant == "linear" else r // 2

    def residue_of(self, nu: int) -> int:
        return (-nu) % self.rank

    @property
    def typeK(self) -> FlagTypeK:
        counts = {}
        for nu, lats in self.slots:
            r = self.residue_of(nu)
            counts[r] = counts.get(r, 0) + len(lats)
        return FlagTypeK(self.rank, tuple(sorted(counts.items())))

    def members(self):
        for nu, lats in self.slots:
            for lat in lats:
                yield nu, lat

    def slot_map(self):
        """Map slot key (residue, j) -> (nu, lattice); j orders pair slots."""
        out = {}
        for nu, lats in self.slots:
            r = self.residue_of(nu)
            for j, lat in enumerate(lats):
                out[(r, j)] = (nu, lat)
        return out

    def member_at_nu(self, nu: int):
        """All member lattices of the infinite chain at virtual dimension
        nu, obtained by z-shifting the stored period."""
        rank = self.rank
        sign = -1 if self.side == "positive" else 1
        for snu, lats in self.slots:
            if (nu - snu) % rank == 0:
                m = (snu - nu) // rank if self.side == "positive" else (nu - snu) // rank
                return [shift_apply(lat, m) for lat in lats]
        return []

    def is_full(self) -> bool:
        counts = {}
        for nu, lats in self.slots:
            counts[self.residue_of(nu)] = len(lats)
        return counts == layout(self.variant, self.rank)

    def orbits(self):
        present = []
        for key in self.slot_map():
            o = orbit_of(self.variant, self.rank, key)
            if o not in present:
                present.append(o)
        return present

    def restrict(self, orbits_to_keep) -> "PeriodicFlag":
        keep = set()
        for o in orbits_to_keep:
            keep |= o
        sm = self.slot_map()
        lats = [sm[k][1] for k in sm if k in keep]
        return make_flag(lats, variant=self.variant)

    def canonical_key(self):
        return (self.variant, self.side,
                tuple((nu, tuple((l.window_exp, l.space.basis) for l in lats))
                      for nu, lats in self.slots))

    def to_json(self):
        return {
            "variant": self.variant,
            "side": self.side,
            "typeK": [list(p) for p in self.typeK.slots],
            "subspaces": [l.to_json() for _, l in self.members()],
            "oriflamme_pairs": [
                [i, i + 1]
                for i, (nu, lats) in enumerate(
                    (nu, lats) for nu, lats in self.slots)
                if len(lats) == 2
            ],
        }


def flag_from_json(data) -> PeriodicFlag:
    from .laurent_model import from_json as lat_from_json

    lats = [lat_from_json(d) for d in data["subspaces"]]
    return make_flag(lats, variant=data.get("variant"))


def _nu_sign(side: str) -> int:
    return -1 if side == "positive" else 1


def _shift_to_period(lat: PeriodicSubspace, nu0: int) -> PeriodicSubspace:
    """Shift a lattice so its virtual dimension lands in (nu0-rank, nu0]
    (positive side) or [nu0, nu0+rank) (negative side)."""
    rank = lat.rank
    nu = lat.virtual_dim
    k = (nu0 - nu) // rank  # nu + k*rank in (nu0 - rank, nu0]
    if nu + k * rank > nu0:
        k -= 1
    return shift_apply(lat, -k if lat.side == "positive" else k)


def make_flag(lattices, variant=None) -> PeriodicFlag:
    """Validated flag from a flat list of lattices (one or more periods,
    any shifts).  Two lattices of equal virtual dimension form an
    oriflamme pair slot."""
    lattices = list(lattices)
    if not lattices:
        raise FlagError("empty flag")
    amb = lattices[0].ambient
    side = lattices[0].side
    for lat in lattices:
        if lat.ambient != amb or lat.side != side:
            raise FlagError("mixed ambients or sides in flag")
    if variant is None:
        variant = VARIANT_OF_AMBIENT[amb.variant]
    if VARIANT_OF_AMBIENT[amb.variant] != variant:
        raise FlagError(f"variant {variant} does not match ambient {amb.variant}")
    rank = amb.rank

    # normalize: leading slot has the lowest nonnegative virtual dimension
    nu0 = min(l.virtual_dim % rank for l in lattices)
    shifted = [_shift_to_period(lat, nu0) for lat in lattices]
    by_nu = {}
    for lat in shifted:
        by_nu.setdefault(lat.virtual_dim, [])
        if lat not in by_nu[lat.virtual_dim]:
            by_nu[lat.virtual_dim].append(lat)
    slots = []
    for nu in sorted(by_nu, reverse=True):
        lats = sorted(by_nu[nu], key=lambda l: (l.window_exp, l.space.basis))
        if len(lats) > 2:
            raise VariantConstraintViolated(
                f"more than two lattices at virtual dimension {nu}")
        slots.append((nu, tuple(lats)))
    flag = PeriodicFlag(variant, side, tuple(slots))
    _validate(flag)
    return flag


def _validate(flag: PeriodicFlag):
    rank = flag.rank
    lay = layout(flag.variant, rank)
    slots = flag.slots
    # residues allowed, pair slots only at pair residues
    for nu, lats in slots:
        r = flag.residue_of(nu)
        if r not in lay:
            raise VariantConstraintViolated(
                f"virtual dimension {nu} (residue {r}) not allowed for {flag.variant}")
        if len(lats) > lay[r]:
            raise OriflammeConstraintViolated(
                f"two lattices at single-slot residue {r}")
    # nesting between consecutive slots, plus the periodic wrap
    chain = list(slots)
    for (nu_hi, hi), (nu_lo, lo) in zip(chain, chain[1:]):
        for a in hi:
            for b in lo:
                if not leq(b, a) or a == b:
                    raise NotNested(
                        f"slot at nu={nu_lo} not strictly inside slot at nu={nu_hi}")
    if len(chain) >= 1:
        nu_top, top = chain[0]
        nu_bot, bot = chain[-1]
        m = 1 if flag.side == "positive" else -1
        wrapped = [shift_apply(a, m) for a in top]
        for a in wrapped:
            for b in bot:
                if not leq(a, b) or a == b:
                    if len(chain) == 1 and len(top) == 1:
                        raise PeriodicityViolated(
                            "z-shift of the single slot is not strictly inside it")
                    raise PeriodicityViolated(
                        f"z-shift of top slot (nu={nu_top}) not inside bottom slot")
    # oriflamme pair conditions
    for nu, lats in slots:
        if len(lats) == 2:
            a, b = lats
            from .exactfield import meet as sp_meet, join as sp_join
            wa, wb = common_window(a, b)
            inter = sp_meet(wa.space, wb.space)
            un = sp_join(wa.space, wb.space)
            kdim = wa.window_exp * rank
            if inter.dim - kdim != nu - 1 or un.dim - kdim != nu + 1:
                raise OriflammeConstraintViolated(
                    f"pair at nu={nu} has wrong meet/join dimensions")
    # duality closure for the isometry variants
    if flag.variant != "linear":
        form = form_for(flag.ambient)
        sign = _nu_sign(flag.side)
        for nu, lats in slots:
            target = sign * rank - nu
            partners = flag.member_at_nu(target)
            if not partners:
                raise VariantConstraintViolated(
                    f"member at nu={nu} has no dual slot at nu={target}")
            for lat in lats:
                if perp(form, lat) not in partners:
                    raise VariantConstraintViolated(
                        f"perp of member at nu={nu} is not the member at nu={target}")


def type_of(flag: PeriodicFlag) -> FlagTypeK:
    return flag.typeK


def boundary(flag: PeriodicFlag):
    """All proper nonempty faces (orbit-closed subflags)."""
    orbits = flag.orbits()
    faces = []
    for r in range(1, len(orbits)):
        for keep in combinations(orbits, r):
            faces.append(flag.restrict(keep))
    return faces


def is_face(f1: PeriodicFlag, f2: PeriodicFlag) -> bool:
    keys2 = {_member_key(lat) for _, lat in f2.members()}
    return all(_member_key(lat) in keys2 for _, lat in f1.members())


def _member_key(lat: PeriodicSubspace):
    """Shift-invariant canonical key of a periodic lattice family."""
    rank = lat.rank
    nu = lat.virtual_dim
    m = (nu - nu % rank) // rank
    canon = shift_apply(lat, m if lat.side == "positive" else -m)
    return (canon.side, canon.window_exp, canon.space.basis)


def incident(w1: PeriodicSubspace, w2: PeriodicSubspace) -> bool:
    """True when some shifts give the sandwich w1 <= z^l1 w2 <= z^(l1+l2) w1."""
    if w1.ambient != w2.ambient or w1.side != w2.side:
        raise FlagError("incidence needs a common ambient and side")
    bound = w1.window_exp + w2.window_exp + 2
    for l1 in range(-bound, bound + 1):
        s2 = shift_apply(w2, l1)
        if not leq(w1, s2):
            continue
        for l2 in range(-bound, bound + 1):
            if leq(s2, shift_apply(w1, l1 + l2)):
                return True
    return False


def is_compatible(f1: PeriodicFlag, f2: PeriodicFlag) -> bool:
    """Every member of each flag is sandwiched by members of the other."""
    if f1.ambient != f2.ambient or f1.side != f2.side or f1.variant != f2.variant:
        raise FlagError("flags not comparable")
    for a, b in ((f1, f2), (f2, f1)):
        for nu, lat in a.members():
            if not any(incident(lat, other) for _, other in b.members()):
                return False
    return True


# ---------------------------------------------------------------------------
# Quotient helpers for enumeration and completion


def quotient_subspaces(upper: PeriodicSubspace, lower: PeriodicSubspace, dim: int):
    """All intermediate lattices lower <= U <= upper with
    dim(U/lower) = dim, via subspaces of the finite quotient."""
    wu, wl = common_window(upper, lower)
    q = upper.ambient.q
    # independent complement basis of lower inside upper
    comp_ind = []
    base = list(wl.space.basis)
    for row in wu.space.basis:
        if reduce_against(tuple(base), row, q) is not None:
            comp_ind.append(row)
            base = list(span(q, len(row), tuple(base) + (row,)).basis)
    g = len(comp_ind)
    from .laurent_model import lattice

    out = []
    for rows in _subspace_reps(q, g, dim):
        gens = list(wl.space.basis)
        for coeffs in rows:
            vec = [0] * len(comp_ind[0])
            for c, brow in zip(coeffs, comp_ind):
                if c:
                    for idx, x in enumerate(brow):
                        vec[idx] = (vec[idx] + c * x) % q
            gens.append(tuple(vec))
        sp = span(q, wu.space.ambient_dim, gens)
        if sp.dim != wl.space.dim + dim:
            continue
        try:
            out.append(lattice(upper.ambient, upper.side, wu.window_exp, sp))
        except Exception:
            continue
    # deduplicate (different coefficient matrices can give equal lattices
    # only if they span the same space, which _subspace_reps prevents)
    return out


def _subspace_reps(q, g, d):
    """Canonical rref representatives of all d-dim subspaces of F_q^g,
    enumerated by pivot set and free entries."""
    from itertools import product as iproduct

    if d < 0 or d > g:
        return
    for pivots in combinations(range(g), d):
        free_positions = [
            (i, c)
            for i, p in enumerate(pivots)
            for c in range(p + 1, g)
            if c not in pivots
        ]
        for values in iproduct(range(q), repeat=len(free_positions)):
            rows = [[0] * g for _ in range(d)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, c), v in zip(free_positions, values):
                rows[i][c] = v
            yield tuple(tuple(r) for r in rows)


def derived_chain(flag: PeriodicFlag):
    """The complete chain of lattices (members plus node intersections and
    spans), one per virtual dimension over a bit more than one period,
    sorted by nu descending."""
    from .exactfield import meet as sp_meet, join as sp_join
    from .laurent_model import lattice as mk

    rank = flag.rank
    entries = {}
    for nu, lats in flag.slots:
        if len(lats) == 1:
            entries[nu] = lats[0]
        else:
            a, b = common_window(*lats)
            k = a.window_exp
            entries[nu] = lats  # keep the pair at its own nu
            inter = mk(flag.ambient, flag.side, k,
                       sp_meet(a.space, b.space), check=False)
            un = mk(flag.ambient, flag.side, k,
                    sp_join(a.space, b.space), check=False)
            entries[nu - 1] = inter
            entries[nu + 1] = un
    return entries


def _insertion_site(flag: PeriodicFlag):
    """The cheapest missing slot of a partial flag with its sandwich, or
    None when the flag is already a chamber."""
    lay = layout(flag.variant, flag.rank)
    form = None if flag.variant == "linear" else form_for(flag.ambient)
    missing = _missing_slots(flag, lay)
    if not missing:
        return None
    best = None
    for target_nu, res in missing:
        upper, lower, gap, d = _sandwich(flag, target_nu)
        cost = min(d, gap - d)
        if best is None or cost < best[0]:
            best = (cost, target_nu, upper, lower, gap, d)
    _, target_nu, upper, lower, gap, d = best
    return form, upper, lower, d


def _try_insert(flag: PeriodicFlag, cand, form, size):
    """Extend by one candidate lattice (with its complement in the
    isometry variants); None when the extension is invalid or a no-op."""
    new = [lat for _, lat in flag.members()] + [cand]
    if form is not None:
        # duality closure: insert the whole orbit at once
        new.append(perp(form, cand))
    try:
        extended = make_flag(new, variant=flag.variant)
    except FlagError:
        return None
    if sum(len(lats) for _, lats in extended.slots) <= size:
        return None
    return extended


def insertions(flag: PeriodicFlag):
    """All flags obtained from a partial flag by one valid orbit insertion
    at the cheapest missing slot, in deterministic order."""
    site = _insertion_site(flag)
    if site is None:
        return []
    form, upper, lower, d = site
    size = sum(len(lats) for _, lats in flag.slots)
    candidates = []
    for cand in _candidate_lattices(flag, upper, lower, d, form):
        extended = _try_insert(flag, cand, form, size)
        if extended is not None and extended not in candidates:
            candidates.append(extended)
    return candidates


def complete(flag: PeriodicFlag, rng) -> PeriodicFlag:
    """Extend a partial flag to a chamber, drawing each insertion
    uniformly from the valid candidates at the cheapest missing slot.

    Candidates are visited in a seeded random order and the first valid
    one wins; under a uniform shuffle that draw is uniform over the valid
    insertions without enumerating them all."""
    current = flag
    guard = 0
    while not current.is_full():
        guard += 1
        if guard > 4 * flag.rank + 8:
            raise FlagError("completion did not terminate")
        site = _insertion_site(current)
        if site is None:
            raise FlagError("partial flag has no missing slot")
        form, upper, lower, d = site
        size = sum(len(lats) for _, lats in current.slots)
        extended = None
        for cand in _candidate_lattices(current, upper, lower, d, form,
                                        order_rng=rng):
            extended = _try_insert(current, cand, form, size)
            if extended is not None:
                break
        if extended is None:
            raise FlagError("no valid insertion into the partial flag")
        current = extended
    return current


def _lift_rows(k, k2, rank, rows):
    """Embed flat window-k vectors into the larger window k2."""
    from .laurent_model import coord_index, coord_of

    out = []
    dim2 = 2 * k2 * rank
    for row in rows:
        v = [0] * dim2
        for flat, c in enumerate(row):
            if c:
                d, i = coord_of(k, rank, flat)
                v[coord_index(k2, rank, d, i)] = c
        out.append(tuple(v))
    return out


def _complement_rows(wu, wl, q):
    """Independent rows extending the basis of wl to one of wu."""
    comp = []
    grown = list(wl.space.basis)
    for row in wu.space.basis:
        if reduce_against(tuple(grown), row, q) is not None:
            comp.append(row)
            grown = list(span(q, len(row), tuple(grown) + (row,)).basis)
    return comp


def _candidate_lattices(flag: PeriodicFlag, upper, lower, d, form,
                        order_rng=None):
    """Lattices U with lower < U < upper and dim(U/lower) = d, prefiltered
    by the pairing conditions perp-closure will impose.  The prefilter is a
    necessary condition only; callers still validate survivors fully.

    With order_rng the subspace representatives are visited in a seeded
    random order instead of the canonical one."""
    from .forms import eval_shifted
    from .laurent_model import lattice as mk

    wu, wl = common_window(upper, lower)
    q, rank = flag.ambient.q, flag.rank
    k = wu.window_exp
    base = wl.space.basis
    comp = _complement_rows(wu, wl, q)
    g = len(comp)
    target_nu = lower.virtual_dim + d
    ok = None
    if form is not None:
        sign = _nu_sign(flag.side)
        dual_nu = sign * rank - target_nu
        if (dual_nu - target_nu) % rank == 0:
            # self-dual slot: candidate must pair to zero with its z-shift
            m = (target_nu - dual_nu) // rank
            if flag.side == "negative":
                m = -m
            if any(eval_shifted(form, k, x, y, m) for x in base for y in base):
                return
            gbc = [[eval_shifted(form, k, x, c, m) for c in comp] for x in base]
            gcb = [[eval_shifted(form, k, c, x, m) for x in base] for c in comp]
            gcc = [[eval_shifted(form, k, c1, c2, m) for c2 in comp] for c1 in comp]

            def ok(C):
                for u in C:
                    for r in range(len(base)):
                        if sum(u[a] * gbc[r][a] for a in range(g)) % q:
                            return False
                        if sum(u[a] * gcb[a][r] for a in range(g)) % q:
                            return False
                    for v in C:
                        if sum(u[a] * gcc[a][b] * v[b]
                               for a in range(g) for b in range(g)) % q:
                            return False
                return True
        else:
            partners = flag.member_at_nu(dual_nu)
            pdata = []
            for p in partners:
                kk = max(k, p.window_exp)
                lb = _lift_rows(k, kk, rank, base)
                lc = _lift_rows(k, kk, rank, comp)
                prows = widen(p, kk).space.basis if p.window_exp < kk else p.space.basis
                if any(eval_shifted(form, kk, x, y) for x in lb for y in prows):
                    continue
                pdata.append([[eval_shifted(form, kk, c, y) for y in prows] for c in lc])
            if partners and not pdata:
                return
            if pdata:

                def ok(C):
                    for gcp in pdata:
                        if all(
                            sum(u[a] * gcp[a][s] for a in range(g)) % q == 0
                            for u in C
                            for s in range(len(gcp[0]))
                        ):
                            return True
                    return False

    dim = wu.space.ambient_dim
    reps = _subspace_reps(q, g, d)
    if order_rng is not None:
        reps = list(reps)
        order_rng.shuffle(reps)
    for C in reps:
        if ok is not None and not ok(C):
            continue
        gens = list(base)
        for coeffs in C:
            vec = [0] * dim
            for c, brow in zip(coeffs, comp):
                if c:
                    for idx, x in enumerate(brow):
                        vec[idx] = (vec[idx] + c * x) % q
            gens.append(tuple(vec))
        sp = span(q, dim, gens)
        if sp.dim != len(base) + d:
            continue
        # stability is inherited: z-shift of upper already sits inside lower
        yield mk(flag.ambient, flag.side, k, sp, check=False)


def _missing_slots(flag: PeriodicFlag, lay):
    rank = flag.rank
    present = {}
    nus = {}
    for nu, lats in flag.slots:
        r = flag.residue_of(nu)
        present[r] = len(lats)
        nus[r] = nu
    nu0 = flag.slots[0][0]
    missing = []
    for r, mult in lay.items():
        have = present.get(r, 0)
        if have >= mult:
            continue
        if r in nus:
            missing.append((nus[r], r))
            continue
        # place the residue inside the stored period (nu0 downward)
        for step in range(rank):
            nu = nu0 - step
            if flag.residue_of(nu) == r:
                missing.append((nu, r))
                break
    return missing


def _sandwich(flag: PeriodicFlag, target_nu: int):
    """Nearest enclosing lattices around the target virtual dimension,
    using the derived chain so oriflamme gaps stay small."""
    chain = derived_chain(flag)
    sign = _nu_sign(flag.side)
    rank = flag.rank

    def at(nu):
        if nu in chain:
            e = chain[nu]
            return e if not isinstance(e, tuple) else None
        # reach across periods
        for snu in list(chain):
            if (nu - snu) % rank == 0 and not isinstance(chain[snu], tuple):
                m = (snu - nu) // rank if flag.side == "positive" else (nu - snu) // rank
                return shift_apply(chain[snu], m)
        return None

    upper = lower = None
    du = dl = None
    for step in range(1, rank + 2):
        if upper is None:
            cand = at(target_nu + step)
            if cand is not None:
                upper, du = cand, step
        if lower is None:
            cand = at(target_nu - step)
            if cand is not None:
                lower, dl = cand, step
        if upper is not None and lower is not None:
            break
    if upper is None or lower is None:
        raise FlagError("no sandwich found for completion")
    gap = du + dl
    return upper, lower, gap, dl


def oriflamme_make(lattices) -> PeriodicFlag:
    """make_flag restricted to the fork variants."""
    flag = make_flag(lattices)
    if flag.variant not in ("oriflamme_double", "oriflamme_single"):
        raise FlagError("ambient does not carry an oriflamme structure")
    return flag


def _quotient_frame(w0: PeriodicSubspace):
    """Common-window data for the rank-dimensional quotient W0 / zW0."""
    m = 1 if w0.side == "positive" else -1
    zw0 = shift_apply(w0, m)
    a, b = common_window(w0, zw0)
    q = w0.ambient.q
    base = list(b.space.basis)
    comp = []
    grown = list(base)
    for row in a.space.basis:
        if reduce_against(tuple(grown), row, q) is not None:
            comp.append(row)
            grown = list(span(q, len(row), tuple(grown) + (row,)).basis)
    return a, b, tuple(base), tuple(comp)


def fiber_decompose(flag: PeriodicFlag):
    """Split a flag into its leading lattice W0 and the induced finite flag
    in the rank-dimensional quotient W0 / zW0.

    Returns (W0, slots) with slots a tuple of (nu, subspaces-of-quotient).
    The leading slot must be a single lattice."""
    from .exactfield import solve

    nu0, top = flag.slots[0]
    if len(top) != 1:
        raise FlagError("leading slot is an oriflamme pair; no single W0")
    w0 = top[0]
    wa, wb, base, comp = _quotient_frame(w0)
    q = flag.ambient.q
    out = []
    for nu, lats in flag.slots[1:]:
        quots = []
        for lat in lats:
            wide = widen(lat, wa.window_exp)
            vecs = []
            for row in wide.space.basis:
                sol = solve(base + comp, q, row)
                if sol is None:
                    raise FlagError("member does not sit between zW0 and W0")
                vecs.append(tuple(sol[len(base):]))
            quots.append(span(q, len(comp), vecs))
        out.append((nu, tuple(quots)))
    return w0, tuple(out)


def fiber_reconstruct(w0: PeriodicSubspace, fiber_slots, variant=None) -> PeriodicFlag:
    """Inverse of fiber_decompose: lift finite quotient subspaces back to
    lattices between zW0 and W0 and assemble the flag."""
    from .laurent_model import lattice as mk

    wa, wb, base, comp = _quotient_frame(w0)
    q = w0.ambient.q
    dim = wa.space.ambient_dim
    lats = [w0]
    for nu, quots in fiber_slots:
        for u in quots:
            gens = list(base)
            for coeffs in u.basis:
                vec = [0] * dim
                for c, brow in zip(coeffs, comp):
                    if c:
                        for j, x in enumerate(brow):
                            vec[j] = (vec[j] + c * x) % q
                gens.append(tuple(vec))
            lats.append(mk(w0.ambient, w0.side, wa.window_exp, span(q, dim, gens)))
    return make_flag(lats, variant=variant)


def isotropic_complete(flag_members, form: InvariantForm, variant=None) -> PeriodicFlag:
    """Close a chain of isotropic lattices under orthogonal complements to
    produce a valid isometry-variant flag."""
    members = list(flag_members)
    if not members:
        raise FlagError("empty input")
    for lat in members:
        from .forms import is_isotropic

        if not is_isotropic(form, lat):
            raise NotIsotropic(f"member at nu={lat.virtual_dim} is not isotropic")
    extended = list(members)
    for lat in members:
        extended.append(perp(form, lat))
    return make_flag(extended, variant=variant)
