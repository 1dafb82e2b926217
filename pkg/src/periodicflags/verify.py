"""Mechanical verification of the building and twin-building structure.

Every check here samples a finite, seeded collection of chambers and
verifies an axiom mechanically, returning a JSON-ready report dict:

* apartment cover: any two chambers lie in a common apartment;
* thinness: apartments are thin complexes indexed by the Weyl group;
* thickness: every panel carries exactly q + 1 chambers;
* codistance: the Weyl-valued codistance between opposite-side chambers
  agrees with the coordinate prediction inside a twin apartment;
* opposition: codistance 1 is equivalent to the intersection-dimension
  pattern dim(D+_a meet D-_b) = max(0, nu_a + nu_b);
* twin panels: on each panel the codistance takes two adjacent values,
  the longer one exactly once;
* involution: the degree mirror is an incidence-preserving involution
  exchanging the two sides.
"""

from __future__ import annotations

import random

from .apartments import (
    Frame,
    NoCommonApartment,
    chamber_at,
    common_apartment,
    cross_meet,
    flag_subjacent,
    standard_frame,
    thinness_check,
    weyl_coord,
)
from .flags import PeriodicFlag, boundary, insertions, is_face, make_flag
from .laurent_model import Ambient, involute
from .weyl import (
    AffineWeylElement,
    ball,
    compose,
    generator,
    identity,
    inverse,
    length,
    node_count,
    reduced_word,
)


class SideMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Codistance and opposition


def codistance(cpos: PeriodicFlag, cneg: PeriodicFlag) -> AffineWeylElement:
    """Weyl-valued codistance between a positive and a negative chamber.

    Both chambers are placed in a common twin apartment; the codistance is
    w1^-1 w2 in its coordinates.  Raises NoCommonApartment when the two
    chambers do not span a twin apartment."""
    if cpos.side != "positive" or cneg.side != "negative":
        raise SideMismatch("codistance takes a positive and a negative chamber")
    frame = common_apartment(cpos, cneg)
    w1 = weyl_coord(frame, cpos)
    w2 = weyl_coord(frame, cneg)
    return compose(inverse(w1), w2)


def opposite(cpos: PeriodicFlag, cneg: PeriodicFlag) -> bool:
    return codistance(cpos, cneg).is_identity


def _chain_entries(flag: PeriodicFlag, reach: int):
    """Derived-chain entries of a chamber (fork intersections and unions,
    not the fork members themselves) over a window of z-shift periods."""
    from .flags import derived_chain
    from .laurent_model import shift_apply

    rank = flag.rank
    sgn = -1 if flag.side == "positive" else 1
    base = [(nu, lat) for nu, lat in derived_chain(flag).items()
            if not isinstance(lat, tuple)]
    out = []
    for m in range(-reach, reach + 1):
        for nu, lat in base:
            out.append((nu + sgn * m * rank, shift_apply(lat, m)))
    return out


def opposition_dims_ok(cpos: PeriodicFlag, cneg: PeriodicFlag, reach: int = 1) -> bool:
    """The intersection-dimension criterion for opposition: every
    derived-chain member D+ at virtual dimension a meets every
    derived-chain member D- at virtual dimension b in dimension
    max(0, a + b), over a window of periods.  (Fork members are excluded:
    their line supports are non-contiguous and follow a different count.)"""
    for nua, la in _chain_entries(cpos, reach):
        for nub, lb in _chain_entries(cneg, reach):
            if cross_meet(la, lb).dim != max(0, nua + nub):
                return False
    return True


# ---------------------------------------------------------------------------
# Panels


def panel_chambers(chamber: PeriodicFlag, orbit):
    """All chambers sharing the panel of a chamber at one slot orbit."""
    orbits = chamber.orbits()
    face = chamber.restrict([o for o in orbits if o != orbit])
    return [f for f in insertions(face) if f.is_full()]


# ---------------------------------------------------------------------------
# Sampling helpers


def _pool(amb: Ambient, variant: str, side: str, radius: int, rng, extra: int = 2,
          window: int = 1):
    """Chambers of one side: the apartment ball of the standard frame plus
    a few seeded completions of a vertex of the given window exponent."""
    from .laurent_model import involute, standard_positive

    std = standard_frame(amb)
    pool = [chamber_at(std, w, side) for w in ball(std.type_tag, std.weyl_n, radius)]
    top = standard_positive(amb, window)
    if side == "negative":
        top = involute(top)
    vertex = make_flag([top], variant=variant)
    for _ in range(extra):
        pool.append(complete_from(vertex, rng))
    return pool


def complete_from(face: PeriodicFlag, rng):
    from .flags import complete

    return complete(face, rng)


def _report(check, amb, variant, failures, samples, **params):
    from .flags import TYPE_TAG_OF_VARIANT

    return {
        "check": check,
        "variant": variant,
        "type": TYPE_TAG_OF_VARIANT[variant],
        "rank": amb.rank,
        "q": amb.q,
        "samples": samples,
        "failures": failures,
        "passed": not failures,
        **params,
    }


# ---------------------------------------------------------------------------
# Building checks (one side)


def apartment_cover_check(amb, variant, radius=2, samples=12, seed=0, window=1):
    """Any two sampled chambers of one side lie in a common apartment."""
    rng = random.Random(seed)
    pool = _pool(amb, variant, "positive", radius, rng, window=window)
    failures = []
    done = 0
    for _ in range(samples):
        c1, c2 = rng.choice(pool), rng.choice(pool)
        done += 1
        try:
            fr = common_apartment(c1, c2)
        except NoCommonApartment as e:
            failures.append({"pair": done, "error": str(e)})
            continue
        if not (flag_subjacent(fr, c1) and flag_subjacent(fr, c2)):
            failures.append({"pair": done, "error": "frame not subjacent"})
    return _report("apartment_cover", amb, variant, failures, done,
                   radius=radius, seed=seed)


def thinness_report(amb, variant, radius=2):
    std = standard_frame(amb)
    rep = thinness_check(std, radius=radius)
    return _report("apartment_thinness", amb, variant, rep["failures"],
                   rep["samples"], radius=radius)


def thickness_check(amb, variant, radius=1, samples=4, seed=0, window=1):
    """Each panel of a sampled chamber carries exactly q + 1 chambers,
    among them the chamber itself."""
    rng = random.Random(seed)
    pool = _pool(amb, variant, "positive", radius, rng, extra=1, window=window)
    failures = []
    done = 0
    for _ in range(samples):
        c = rng.choice(pool)
        for orbit in c.orbits():
            done += 1
            panel = panel_chambers(c, orbit)
            if len(panel) != amb.q + 1:
                failures.append({
                    "orbit": sorted(orbit), "count": len(panel),
                    "expected": amb.q + 1})
            elif c not in panel:
                failures.append({"orbit": sorted(orbit),
                                 "error": "chamber missing from its panel"})
    return _report("panel_thickness", amb, variant, failures, done,
                   radius=radius, seed=seed)


# ---------------------------------------------------------------------------
# Twin checks (both sides)


def codistance_coordinate_check(amb, variant, radius=2, samples=8, seed=0):
    """codistance(chamber(w1)+, chamber(w2)-) == w1^-1 w2 for sampled
    coordinates in the standard twin apartment."""
    rng = random.Random(seed)
    std = standard_frame(amb)
    elements = ball(std.type_tag, std.weyl_n, radius)
    failures = []
    done = 0
    for _ in range(samples):
        w1, w2 = rng.choice(elements), rng.choice(elements)
        done += 1
        cpos = chamber_at(std, w1, "positive")
        cneg = chamber_at(std, w2, "negative")
        want = compose(inverse(w1), w2)
        try:
            got = codistance(cpos, cneg)
        except NoCommonApartment as e:
            failures.append({"w1": list(w1.perm), "w2": list(w2.perm),
                             "error": str(e)})
            continue
        if got != want:
            failures.append({"w1": list(w1.perm), "w2": list(w2.perm),
                             "got": list(got.perm), "want": list(want.perm)})
    return _report("codistance_coordinates", amb, variant, failures, done,
                   radius=radius, seed=seed)


def opposition_check(amb, variant, radius=1, samples=8, seed=0):
    """Codistance 1 holds exactly when the intersection-dimension pattern
    of an opposite pair holds."""
    rng = random.Random(seed)
    std = standard_frame(amb)
    elements = ball(std.type_tag, std.weyl_n, radius)
    failures = []
    done = 0
    for _ in range(samples):
        w1, w2 = rng.choice(elements), rng.choice(elements)
        done += 1
        cpos = chamber_at(std, w1, "positive")
        cneg = chamber_at(std, w2, "negative")
        by_codistance = compose(inverse(w1), w2).is_identity
        by_dims = opposition_dims_ok(cpos, cneg)
        if by_codistance != by_dims:
            failures.append({"w1": list(w1.perm), "w2": list(w2.perm),
                             "codistance_identity": by_codistance,
                             "dims_pattern": by_dims})
    return _report("opposition_criterion", amb, variant, failures, done,
                   radius=radius, seed=seed)


def twin_panel_check(amb, variant, radius=1, samples=3, seed=0):
    """On every panel of a negative chamber d, the codistance to a fixed
    positive chamber c takes exactly two values w and w*s_i; the longer of
    the two occurs on exactly one chamber of the panel.

    Each slot orbit of d realizes a distinct Coxeter node i, and together
    they cover all nodes."""
    rng = random.Random(seed)
    std = standard_frame(amb)
    tag, n = std.type_tag, std.weyl_n
    elements = ball(tag, n, radius)
    failures = []
    done = 0
    for _ in range(samples):
        w1, w2 = rng.choice(elements), rng.choice(elements)
        cpos = chamber_at(std, w1, "positive")
        d = chamber_at(std, w2, "negative")
        nodes_seen = []
        for orbit in d.orbits():
            done += 1
            panel = panel_chambers(d, orbit)
            deltas = []
            try:
                for dd in panel:
                    deltas.append(codistance(cpos, dd))
            except NoCommonApartment as e:
                failures.append({"orbit": sorted(orbit), "error": str(e)})
                continue
            values = []
            for dl in deltas:
                if dl not in values:
                    values.append(dl)
            if len(values) != 2:
                failures.append({"orbit": sorted(orbit),
                                 "error": f"{len(values)} codistance values"})
                continue
            a, b = values
            node = next(
                (i for i in range(node_count(tag, n))
                 if compose(a, generator(tag, n, i)) == b), None)
            if node is None:
                failures.append({"orbit": sorted(orbit),
                                 "error": "values not adjacent"})
                continue
            longer = a if length(a) > length(b) else b
            if sum(1 for dl in deltas if dl == longer) != 1:
                failures.append({"orbit": sorted(orbit),
                                 "error": "longer codistance not unique"})
            nodes_seen.append(node)
        if sorted(nodes_seen) != list(range(node_count(tag, n))):
            failures.append({"w2": list(w2.perm), "nodes": sorted(nodes_seen),
                             "error": "orbits do not cover the Coxeter nodes"})
    return _report("twin_panels", amb, variant, failures, done,
                   radius=radius, seed=seed)


def involution_check(amb, variant, radius=1, samples=6, seed=0, window=1):
    """The degree mirror is an incidence-preserving involution exchanging
    the positive and negative halves."""
    rng = random.Random(seed)
    pool = _pool(amb, variant, "positive", radius, rng, extra=1, window=window)
    failures = []
    done = 0
    for _ in range(samples):
        c = rng.choice(pool)
        done += 1
        mirrored = make_flag([involute(l) for _, l in c.members()], variant=variant)
        if mirrored.side != "negative":
            failures.append({"error": "mirror does not change side"})
            continue
        back = make_flag([involute(l) for _, l in mirrored.members()],
                         variant=variant)
        if back != c:
            failures.append({"error": "mirror is not an involution"})
            continue
        faces = boundary(c)
        for f in faces[: min(4, len(faces))]:
            mf = make_flag([involute(l) for _, l in f.members()], variant=variant)
            if not is_face(mf, mirrored):
                failures.append({"error": "mirror breaks incidence"})
                break
    return _report("side_involution", amb, variant, failures, done,
                   radius=radius, seed=seed)


# ---------------------------------------------------------------------------
# Aggregate runners


def building_checks(amb, variant, radius=2, samples=12, seed=0, window=1):
    return [
        apartment_cover_check(amb, variant, radius=radius, samples=samples, seed=seed,
                              window=window),
        thinness_report(amb, variant, radius=min(radius, 2)),
        thickness_check(amb, variant, radius=1, samples=max(2, samples // 4),
                        seed=seed, window=window),
    ]


def twin_checks(amb, variant, radius=1, samples=8, seed=0, window=1):
    return [
        codistance_coordinate_check(amb, variant, radius=max(radius, 2),
                                    samples=samples, seed=seed),
        opposition_check(amb, variant, radius=radius, samples=samples, seed=seed),
        twin_panel_check(amb, variant, radius=radius,
                         samples=max(2, samples // 3), seed=seed),
        involution_check(amb, variant, radius=radius, samples=samples, seed=seed,
                         window=window),
    ]


def all_checks(amb, variant, radius=2, samples=8, seed=0, window=1):
    reports = building_checks(amb, variant, radius=radius, samples=samples,
                              seed=seed, window=window)
    reports += twin_checks(amb, variant, radius=min(radius, 1), samples=samples,
                           seed=seed, window=window)
    return reports
