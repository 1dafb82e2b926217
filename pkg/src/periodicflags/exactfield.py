"""Exact linear algebra over a prime field F_q.

Everything downstream (lattices, flags, forms) reduces to subspace
computations in small finite-dimensional F_q vector spaces.  Vectors are
tuples of ints in [0, q); subspaces are stored through their unique
reduced row-echelon basis so equality, hashing and set membership are
structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product


class AmbientMismatch(ValueError):
    """Operands live in different ambient spaces or fields."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def rref(rows, q):
    """Reduced row-echelon form of a list of row tuples; zero rows dropped.

    Returns a tuple of tuples.  The result is the canonical representative
    of the row space: two lists of rows span the same space iff their rrefs
    are equal.
    """
    mat = [[x % q for x in r] for r in rows]
    if not mat:
        return ()
    ncols = len(mat[0])
    nrows = len(mat)
    pivot_row = 0
    for col in range(ncols):
        # find a row with nonzero entry in this column
        sel = None
        for r in range(pivot_row, nrows):
            if mat[r][col]:
                sel = r
                break
        if sel is None:
            continue
        mat[pivot_row], mat[sel] = mat[sel], mat[pivot_row]
        prow = mat[pivot_row]
        if prow[col] != 1:
            inv = pow(prow[col], q - 2, q)
            prow = mat[pivot_row] = [(x * inv) % q for x in prow]
        for r in range(nrows):
            if r != pivot_row and mat[r][col]:
                c = mat[r][col]
                mat[r] = [(a - c * b) % q for a, b in zip(mat[r], prow)]
        pivot_row += 1
        if pivot_row == nrows:
            break
    return tuple(tuple(row) for row in mat[:pivot_row])


def is_rref(rows, q):
    """True if the rows already form a reduced row-echelon basis with all
    entries in [0, q); such rows pass through rref unchanged."""
    pivots = []
    last = -1
    for row in rows:
        piv = None
        for j, x in enumerate(row):
            if x < 0 or x >= q:
                return False
            if x and piv is None:
                piv = j
        if piv is None or piv <= last or row[piv] != 1:
            return False
        last = piv
        pivots.append(piv)
    for i, row in enumerate(rows):
        for r, j in enumerate(pivots):
            if r != i and row[j]:
                return False
    return True


def kernel_basis(rows, q, ncols):
    """Basis (rref) of the right kernel {x : M x = 0} of the matrix."""
    R = rref(rows, q)
    pivots = []
    for row in R:
        for j, x in enumerate(row):
            if x:
                pivots.append(j)
                break
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vec = [0] * ncols
        vec[f] = 1
        for i, p in enumerate(pivots):
            vec[p] = (-R[i][f]) % q
        basis.append(tuple(vec))
    return rref(basis, q)


@dataclass(frozen=True)
class FieldMatrix:
    """Dense matrix over F_q, row-major, entries reduced mod q."""

    q: int
    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"modulus {self.q} is not prime")
        object.__setattr__(
            self, "entries", tuple(tuple(x % self.q for x in row) for row in self.entries)
        )

    @property
    def rows(self):
        return len(self.entries)

    @property
    def cols(self):
        return len(self.entries[0]) if self.entries else 0

    def rref(self) -> "FieldMatrix":
        return FieldMatrix(self.q, rref(self.entries, self.q))

    def kernel(self) -> "Subspace":
        return Subspace(self.q, self.cols, kernel_basis(self.entries, self.q, self.cols))

    def rank(self) -> int:
        return len(rref(self.entries, self.q))


@dataclass(frozen=True)
class Subspace:
    """Subspace of F_q^n stored through its canonical rref basis."""

    q: int
    ambient_dim: int
    basis: tuple  # rref rows, linearly independent

    def __post_init__(self):
        canon = self.basis
        if not (isinstance(canon, tuple)
                and all(type(r) is tuple for r in canon)
                and is_rref(canon, self.q)):
            canon = rref(canon, self.q)
        object.__setattr__(self, "basis", canon)
        for row in canon:
            if len(row) != self.ambient_dim:
                raise AmbientMismatch("basis row length != ambient_dim")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, vec) -> bool:
        return reduce_against(self.basis, vec, self.q) is None

    def contains_space(self, other: "Subspace") -> bool:
        self._check(other)
        return all(self.contains(v) for v in other.basis)

    def vectors(self):
        """All vectors of the subspace (use only at small dimension)."""
        for coeffs in product(range(self.q), repeat=self.dim):
            vec = [0] * self.ambient_dim
            for c, row in zip(coeffs, self.basis):
                if c:
                    for j, x in enumerate(row):
                        vec[j] = (vec[j] + c * x) % self.q
            yield tuple(vec)

    def _check(self, other: "Subspace"):
        if self.q != other.q or self.ambient_dim != other.ambient_dim:
            raise AmbientMismatch("ambient dims or moduli differ")


def reduce_against(basis, vec, q):
    """Reduce vec by rref basis rows; return the residue or None if it lies
    in the span."""
    v = [x % q for x in vec]
    for row in basis:
        piv = -1
        for j, x in enumerate(row):
            if x:
                piv = j
                break
        if piv >= 0 and v[piv]:
            c = v[piv]
            v = [(a - c * b) % q for a, b in zip(v, row)]
    return None if not any(v) else tuple(v)


def zero_subspace(q, n) -> Subspace:
    return Subspace(q, n, ())


def full_subspace(q, n) -> Subspace:
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    return Subspace(q, n, ident)


def span(q, n, vectors) -> Subspace:
    return Subspace(q, n, tuple(vectors))


def join(u: Subspace, v: Subspace) -> Subspace:
    u._check(v)
    return Subspace(u.q, u.ambient_dim, u.basis + v.basis)


def annihilator(u: Subspace) -> Subspace:
    """Dot-product annihilator {x : b.x = 0 for all basis rows b}."""
    return Subspace(u.q, u.ambient_dim, kernel_basis(u.basis, u.q, u.ambient_dim))


def meet(u: Subspace, v: Subspace) -> Subspace:
    u._check(v)
    return annihilator(join(annihilator(u), annihilator(v)))


def solve(rows, q, target):
    """Coefficients expressing target as a combination of the given rows,
    or None if target is outside the row span.  Free coefficients are 0."""
    rows = tuple(rows)
    if not rows:
        return None if any(x % q for x in target) else ()
    nrows = len(rows)
    # columns of the system are the rows; eliminate on the transpose
    mat = [list(col) + [t % q] for col, t in zip(zip(*rows), target)]
    R = rref(mat, q)
    sol = [0] * nrows
    for row in R:
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            continue
        if piv == nrows:
            return None  # inconsistent system
        sol[piv] = row[nrows]
    for j in range(len(target)):
        acc = sum(sol[i] * rows[i][j] for i in range(nrows))
        if (acc - target[j]) % q:
            return None
    return tuple(sol)
