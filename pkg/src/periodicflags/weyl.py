"""Affine Weyl groups as admissible permutations of frame indices.

An element is a permutation pi of the integers with pi(k + p) = pi(k) + p,
stored through its values on 0..p-1, where p is the index period of the
frame family:

* type A (rank n):   p = n, no further structure; the translation part
  sums to zero, so this is the affine symmetric group.
* type C (rank 2n):  p = 2n, chains 0..n-1 carry e_1..e_n and chains
  n..2n-1 carry f_n..f_1; pi must commute with the pairing involution
  k -> 2n-1-k.
* type D (rank 2n):  the subgroup of type C with an even number of sign
  changes and an even total shift.
* type B (rank 2n+1): p = 2n+1 with a self-paired middle chain (the
  anisotropic coordinate); pairing k -> 2n-k; even total shift.

Sign changes and shifts are read off the e-chains: writing
pi(i) = c + p*m with 0 <= c < p, chain i changes sign when c lands among
the f-chains, and m is its shift.
"""

from __future__ import annotations

from dataclasses import dataclass


class TypeMismatch(ValueError):
    pass


class NotAdmissible(ValueError):
    pass


def period(type_tag: str, n: int) -> int:
    if type_tag == "A":
        return n
    if type_tag in ("C", "D"):
        return 2 * n
    if type_tag == "B":
        return 2 * n + 1
    raise TypeMismatch(f"unknown type {type_tag}")


def ambient_rank(type_tag: str, n: int) -> int:
    return period(type_tag, n)


def node_count(type_tag: str, n: int) -> int:
    return n if type_tag == "A" else n + 1


def pair_index(type_tag: str, n: int, k: int) -> int:
    """The frame index whose line pairs nontrivially with index k."""
    if type_tag == "A":
        raise TypeMismatch("type A frames carry no pairing")
    if type_tag == "B":
        return 2 * n - k
    return 2 * n - 1 - k


def _sign_shift_parities(type_tag, n, perm):
    p = period(type_tag, n)
    f_start = n if type_tag in ("C", "D") else n + 1
    signs = shifts = 0
    for i in range(n):
        c = perm[i] % p
        m = (perm[i] - c) // p
        if c >= f_start:
            signs += 1
        shifts += m
    return signs % 2, shifts % 2


@dataclass(frozen=True)
class AffineWeylElement:
    type_tag: str
    n: int
    perm: tuple  # pi(0), ..., pi(p-1)

    def __post_init__(self):
        p = period(self.type_tag, self.n)
        if len(self.perm) != p:
            raise NotAdmissible("wrong period")
        if sorted(v % p for v in self.perm) != list(range(p)):
            raise NotAdmissible("not a bijection modulo the period")
        if self.type_tag == "A":
            if sum(self.perm) != p * (p - 1) // 2:
                raise NotAdmissible("type A elements have zero total shift")
            return
        for k in range(p):
            if self(pair_index(self.type_tag, self.n, k)) != pair_index(
                self.type_tag, self.n, self(k)
            ):
                raise NotAdmissible("pairing not preserved")
        sg, sh = _sign_shift_parities(self.type_tag, self.n, self.perm)
        if self.type_tag in ("B", "D") and sh:
            raise NotAdmissible("odd total shift outside type C")
        if self.type_tag == "D" and sg:
            raise NotAdmissible("odd sign count outside types B/C")

    def __call__(self, k: int) -> int:
        p = len(self.perm)
        r = k % p
        return self.perm[r] + (k - r)

    @property
    def is_identity(self) -> bool:
        return all(self.perm[i] == i for i in range(len(self.perm)))

    def word_str(self, word) -> str:
        return ".".join(f"a{i}" for i in word)

    def to_json(self):
        return {"type": self.type_tag, "n": self.n, "perm": list(self.perm)}


def identity(type_tag: str, n: int) -> AffineWeylElement:
    return AffineWeylElement(type_tag, n, tuple(range(period(type_tag, n))))


def compose(w1: AffineWeylElement, w2: AffineWeylElement) -> AffineWeylElement:
    """w1 after w2: (w1 w2)(k) = w1(w2(k))."""
    if (w1.type_tag, w1.n) != (w2.type_tag, w2.n):
        raise TypeMismatch("cannot compose elements of different groups")
    p = period(w1.type_tag, w1.n)
    return AffineWeylElement(w1.type_tag, w1.n, tuple(w1(w2(k)) for k in range(p)))


def inverse(w: AffineWeylElement) -> AffineWeylElement:
    p = period(w.type_tag, w.n)
    inv = [0] * p
    for j in range(p):
        r = w.perm[j] % p
        inv[r] = j + (r - w.perm[j])
    return AffineWeylElement(w.type_tag, w.n, tuple(inv))


def generator(type_tag: str, n: int, i: int) -> AffineWeylElement:
    """The simple reflection alpha_i; see the Dynkin layouts in
    coxeter_matrix for which node is which."""
    p = period(type_tag, n)
    if not 0 <= i < node_count(type_tag, n):
        raise IndexError(f"no node {i} for type {type_tag} rank {n}")
    perm = list(range(p))
    if type_tag == "A":
        if i > 0:
            perm[i - 1], perm[i] = i, i - 1
        else:
            perm[0], perm[n - 1] = -1, n
        return AffineWeylElement(type_tag, n, tuple(perm))
    if 1 <= i <= n - 1:
        # swap e_i with e_{i+1} (and the paired f-chains)
        a, b = i - 1, i
        perm[a], perm[b] = b, a
        pa, pb = pair_index(type_tag, n, a), pair_index(type_tag, n, b)
        perm[pa], perm[pb] = pb, pa
        return AffineWeylElement(type_tag, n, tuple(perm))
    if i == n:
        if type_tag in ("C", "B"):
            # swap e_n with f_n
            a = n - 1
            b = n if type_tag == "C" else n + 1
            perm[a], perm[b] = b, a
        else:  # type D: e_{n-1} <-> f_n and e_n <-> f_{n-1}
            perm[n - 2], perm[n] = n, n - 2
            perm[n - 1], perm[n + 1] = n + 1, n - 1
        return AffineWeylElement(type_tag, n, tuple(perm))
    # i == 0, the affine node; the shift signs make right multiplication
    # by this generator change exactly the node-0 slot of a chamber
    if type_tag == "C":
        # e_1 <-> 1/z f_1
        f1 = pair_index(type_tag, n, 0)
        perm[0] = f1 - p
        perm[f1] = 0 + p
        return AffineWeylElement(type_tag, n, tuple(perm))
    # types B and D: e_1 -> 1/z f_2, e_2 -> 1/z f_1
    f1 = pair_index(type_tag, n, 0)
    f2 = pair_index(type_tag, n, 1)
    perm[0] = f2 - p
    perm[1] = f1 - p
    perm[f2] = 0 + p
    perm[f1] = 1 + p
    return AffineWeylElement(type_tag, n, tuple(perm))


def generators(type_tag: str, n: int):
    return [generator(type_tag, n, i) for i in range(node_count(type_tag, n))]


def coxeter_matrix(type_tag: str, n: int):
    """Bond orders read off the affine Dynkin diagrams; 0 means infinity."""
    size = node_count(type_tag, n)
    m = [[2] * size for _ in range(size)]
    for i in range(size):
        m[i][i] = 1

    def bond(a, b, order):
        m[a][b] = m[b][a] = order

    if type_tag == "A":
        if n == 2:
            bond(0, 1, 0)  # infinite bond of the infinite dihedral group
        else:
            for i in range(n):
                bond(i, (i + 1) % n, 3)
    elif type_tag == "C":
        bond(0, 1, 4)
        for i in range(1, n - 1):
            bond(i, i + 1, 3)
        bond(n - 1, n, 4)
    elif type_tag == "B":
        if n == 2:  # degenerate: both fork arms reach the double bond
            bond(0, 2, 4)
            bond(1, 2, 4)
        else:
            bond(0, 2, 3)
            bond(1, 2, 3)
            for i in range(2, n - 1):
                bond(i, i + 1, 3)
            bond(n - 1, n, 4)
    elif type_tag == "D":
        if n == 3:  # degenerate: the two forks share their center, a 4-cycle
            bond(0, 2, 3)
            bond(1, 2, 3)
            bond(1, 3, 3)
            bond(0, 3, 3)
        else:
            bond(0, 2, 3)
            bond(1, 2, 3)
            for i in range(2, n - 2):
                bond(i, i + 1, 3)
            bond(n - 2, n - 1, 3)
            bond(n - 2, n, 3)
    return m


def element_order(w: AffineWeylElement, cap: int = 24):
    """Order of w in the group, or None if it exceeds the cap."""
    acc = w
    for m in range(1, cap + 1):
        if acc.is_identity:
            return m
        acc = compose(acc, w)
    return None


def coxeter_check(type_tag: str, n: int, infinite_probe: int = 24):
    """Verify (s_i s_j)^m_ij = 1 against the printed diagram.

    Returns a report dict with any mismatches listed."""
    gens = generators(type_tag, n)
    expected = coxeter_matrix(type_tag, n)
    failures = []
    for i, si in enumerate(gens):
        for j, sj in enumerate(gens):
            order = element_order(compose(si, sj), cap=infinite_probe)
            want = expected[i][j]
            if want == 0:
                if order is not None:
                    failures.append({"i": i, "j": j, "expected": "infinity", "got": order})
            elif order != want:
                failures.append({"i": i, "j": j, "expected": want, "got": order})
    return {
        "check": "coxeter",
        "type": type_tag,
        "n": n,
        "nodes": node_count(type_tag, n),
        "failures": failures,
    }


# ---------------------------------------------------------------------------
# Length and reduced words via breadth-first search from the identity.
# Exact for the bounded lengths the artifact needs; the cache is shared.

_BFS_CACHE = {}


def _bfs_grow(type_tag, n, upto):
    key = (type_tag, n)
    cache, frontier, depth = _BFS_CACHE.get(
        key, ({identity(type_tag, n).perm: (0, ())}, [identity(type_tag, n)], 0)
    )
    _BFS_CACHE.setdefault(key, (cache, frontier, depth))
    gens = generators(type_tag, n)
    while depth < upto and frontier:
        nxt = []
        for w in frontier:
            base_len, base_word = cache[w.perm]
            for gi, g in enumerate(gens):
                v = compose(w, g)
                if v.perm not in cache:
                    cache[v.perm] = (base_len + 1, base_word + (gi,))
                    nxt.append(v)
        frontier = nxt
        depth += 1
        _BFS_CACHE[key] = (cache, frontier, depth)
    return cache


def length(w: AffineWeylElement, cap: int = 12) -> int:
    cache = _bfs_grow(w.type_tag, w.n, 0)
    for depth in range(cap + 1):
        if w.perm in cache:
            return cache[w.perm][0]
        cache = _bfs_grow(w.type_tag, w.n, depth + 1)
    if w.perm in cache:
        return cache[w.perm][0]
    raise ValueError(f"length exceeds search cap {cap}")


def reduced_word(w: AffineWeylElement, cap: int = 12):
    length(w, cap)
    return _BFS_CACHE[(w.type_tag, w.n)][0][w.perm][1]


def from_word(type_tag: str, n: int, word) -> AffineWeylElement:
    acc = identity(type_tag, n)
    for i in word:
        acc = compose(acc, generator(type_tag, n, i))
    return acc


def ball(type_tag: str, n: int, radius: int):
    """All elements of length <= radius, sorted by (length, perm)."""
    cache = _bfs_grow(type_tag, n, radius)
    out = [
        (l, perm)
        for perm, (l, _) in cache.items()
        if l <= radius
    ]
    out.sort()
    return [AffineWeylElement(type_tag, n, perm) for _, perm in out]
