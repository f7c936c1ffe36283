"""Exact multivariate polynomials over the rationals.

Poly holds a dict from exponent tuples to Fraction coefficients. PolyMatrix
is a small dense matrix of Poly entries. SamplePlan and oracle_equal give a
seeded pointwise equality check for spot checks alongside symbolic equality.
"""

import random
from fractions import Fraction
from itertools import permutations

# symbolic comparison switches to sampling above this many terms
SYMBOLIC_TERM_LIMIT = 10 ** 5


def as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class Poly:
    """Polynomial in n_vars variables with Fraction coefficients."""

    __slots__ = ("n_vars", "terms", "_hash")

    def __init__(self, n_vars, terms=None):
        self.n_vars = n_vars
        clean = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != n_vars:
                    raise ValueError(f"exponent {exps} does not have length {n_vars}")
                c = as_fraction(c)
                if c != 0:
                    clean[exps] = clean.get(exps, 0) + c
                    if clean[exps] == 0:
                        del clean[exps]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n_vars, terms):
        p = cls.__new__(cls)
        p.n_vars = n_vars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, n_vars, c):
        c = as_fraction(c)
        if c == 0:
            return cls._raw(n_vars, {})
        return cls._raw(n_vars, {(0,) * n_vars: c})

    @classmethod
    def zero(cls, n_vars):
        return cls._raw(n_vars, {})

    @classmethod
    def var(cls, n_vars, i):
        if not 0 <= i < n_vars:
            raise IndexError(f"variable {i} out of range for {n_vars} variables")
        e = [0] * n_vars
        e[i] = 1
        return cls._raw(n_vars, {tuple(e): Fraction(1)})

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.n_vars != self.n_vars:
                raise ValueError(f"variable count mismatch: {self.n_vars} vs {other.n_vars}")
            return other
        return Poly.const(self.n_vars, other)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """Return the constant term as a Fraction."""
        return self.terms.get((0,) * self.n_vars, Fraction(0))

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, indices):
        idx = list(indices)
        if not self.terms:
            return -1
        return max(sum(e[i] for i in idx) for e in self.terms)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
        return Poly._raw(self.n_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = as_fraction(other)
            if c == 0:
                return Poly.zero(self.n_vars)
            return Poly._raw(self.n_vars, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v == 0:
                    out.pop(e, None)
                else:
                    out[e] = v
        return Poly._raw(self.n_vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        return self * (1 / c)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(self.n_vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n_vars == other.n_vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(self.n_vars, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_vars, frozenset(self.terms.items())))
        return self._hash

    def diff(self, i):
        if not 0 <= i < self.n_vars:
            raise IndexError(f"coordinate index {i} out of range for {self.n_vars} variables")
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly._raw(self.n_vars, out)

    def evaluate(self, point):
        """Evaluate at a point (Fractions, ints, or floats)."""
        if len(point) != self.n_vars:
            raise ValueError("point has wrong dimension")
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x ** k
            total = total + v
        return total

    def substitute(self, images):
        """Compose with a polynomial map: x_i -> images[i] (all Polys in a common ring)."""
        if len(images) != self.n_vars:
            raise ValueError("need one image per variable")
        if not images:
            return self
        target = images[0].n_vars
        out = Poly.zero(target)
        cache = {}
        for e, c in self.terms.items():
            mono = Poly.const(target, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    mono = mono * cache[key]
            out = out + mono
        return out

    def embed(self, n_new, offset=0):
        """View as a polynomial in n_new variables, own variables starting at offset."""
        if offset + self.n_vars > n_new:
            raise ValueError("embedding does not fit")
        pad_l = (0,) * offset
        pad_r = (0,) * (n_new - offset - self.n_vars)
        return Poly._raw(n_new, {pad_l + e + pad_r: c for e, c in self.terms.items()})

    def restrict(self, offset, count):
        """Inverse of embed: requires all other exponents to vanish."""
        out = {}
        for e, c in self.terms.items():
            if any(e[:offset]) or any(e[offset + count:]):
                raise ValueError("polynomial depends on variables outside the window")
            out[e[offset:offset + count]] = c
        return Poly._raw(count, out)

    def split_by(self, indices):
        """Group terms by the exponents of the given variables.

        Returns {exponent sub-tuple: Poly with those variables set to power 0}.
        """
        idx = list(indices)
        out = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in idx)
            ne = list(e)
            for i in idx:
                ne[i] = 0
            out.setdefault(key, {})[tuple(ne)] = c
        return {k: Poly._raw(self.n_vars, v) for k, v in out.items()}

    def to_str(self, names=None):
        if not self.terms:
            return "0"
        names = names or [f"x{i}" for i in range(self.n_vars)]
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.to_str()})"


def poly_diff(p, i):
    """Exact partial derivative of p with respect to x_i."""
    return p.diff(i)


class PolyMatrix:
    """Dense rows x cols matrix of Poly entries sharing n_vars."""

    __slots__ = ("rows", "cols", "n_vars", "entries")

    def __init__(self, rows, cols, n_vars, entries=None):
        self.rows = rows
        self.cols = cols
        self.n_vars = n_vars
        if entries is None:
            entries = [Poly.zero(n_vars) for _ in range(rows * cols)]
        entries = [e if isinstance(e, Poly) else Poly.const(n_vars, e) for e in entries]
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        for e in entries:
            if e.n_vars != n_vars:
                raise ValueError("entries must share n_vars")
        self.entries = entries

    @classmethod
    def from_rows(cls, rows, n_vars):
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(row)
        return cls(r, c, n_vars, flat)

    @classmethod
    def zero(cls, rows, cols, n_vars):
        return cls(rows, cols, n_vars)

    @classmethod
    def identity(cls, n, n_vars):
        m = cls(n, n, n_vars)
        for i in range(n):
            m.entries[i * n + i] = Poly.const(n_vars, 1)
        return m

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def replace(self, i, j, value):
        ent = list(self.entries)
        ent[i * self.cols + j] = value if isinstance(value, Poly) else Poly.const(self.n_vars, value)
        return PolyMatrix(self.rows, self.cols, self.n_vars, ent)

    def _check_same(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other):
        self._check_same(other)
        return PolyMatrix(self.rows, self.cols, self.n_vars,
                          [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_same(other)
        return PolyMatrix(self.rows, self.cols, self.n_vars,
                          [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return PolyMatrix(self.rows, self.cols, self.n_vars, [-a for a in self.entries])

    def scale(self, c):
        return PolyMatrix(self.rows, self.cols, self.n_vars, [a * c for a in self.entries])

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = self.row(i)
            for j in range(other.cols):
                acc = Poly.zero(self.n_vars)
                for k in range(self.cols):
                    a = row[k]
                    if a.terms:
                        b = other.entries[k * other.cols + j]
                        if b.terms:
                            acc = acc + a * b
                out.append(acc)
        return PolyMatrix(self.rows, other.cols, self.n_vars, out)

    def apply(self, vec):
        """Matrix times a list of Polys."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = []
        for i in range(self.rows):
            acc = Poly.zero(self.n_vars)
            for a, v in zip(self.row(i), vec):
                if a.terms and v.terms:
                    acc = acc + a * v
            out.append(acc)
        return out

    def T(self):
        return PolyMatrix(self.cols, self.rows, self.n_vars,
                          [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    transpose = T

    def map(self, fn):
        return PolyMatrix(self.rows, self.cols, self.n_vars, [fn(a) for a in self.entries])

    def diff(self, i):
        return self.map(lambda a: a.diff(i))

    def is_zero(self):
        return all(a.is_zero() for a in self.entries)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.entries)))

    def minor(self, i, j):
        ent = [self[a, b] for a in range(self.rows) if a != i for b in range(self.cols) if b != j]
        return PolyMatrix(self.rows - 1, self.cols - 1, self.n_vars, ent)

    def det(self):
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return Poly.const(self.n_vars, 1)
        if n == 1:
            return self.entries[0]
        if n == 2:
            return self[0, 0] * self[1, 1] - self[0, 1] * self[1, 0]
        total = Poly.zero(self.n_vars)
        for j in range(n):
            a = self[0, j]
            if a.terms:
                term = a * self.minor(0, j).det()
                total = total + term if j % 2 == 0 else total - term
        return total

    def adjugate(self):
        n = self.rows
        if n == 1:
            return PolyMatrix.identity(1, self.n_vars)
        ent = []
        for i in range(n):
            for j in range(n):
                c = self.minor(j, i).det()
                ent.append(c if (i + j) % 2 == 0 else -c)
        return PolyMatrix(n, n, self.n_vars, ent)

    def inverse(self):
        """Inverse of a matrix whose determinant is a nonzero constant."""
        d = self.det()
        if d.is_zero() or not d.is_constant():
            raise ValueError("matrix is not invertible over polynomials (determinant not a nonzero constant)")
        return self.adjugate().scale(1 / d.constant_value())

    def has_unit_det(self):
        if self.rows != self.cols:
            return False
        d = self.det()
        return (not d.is_zero()) and d.is_constant()

    def embed(self, n_new, offset=0):
        return PolyMatrix(self.rows, self.cols, n_new, [a.embed(n_new, offset) for a in self.entries])

    def __repr__(self):
        rows = ["[" + ", ".join(a.to_str() for a in self.row(i)) + "]" for i in range(self.rows)]
        return "PolyMatrix(" + ", ".join(rows) + ")"


def block_diag(a, b):
    n_vars = a.n_vars
    out = PolyMatrix.zero(a.rows + b.rows, a.cols + b.cols, n_vars)
    ent = list(out.entries)
    for i in range(a.rows):
        for j in range(a.cols):
            ent[i * out.cols + j] = a[i, j]
    for i in range(b.rows):
        for j in range(b.cols):
            ent[(a.rows + i) * out.cols + a.cols + j] = b[i, j]
    return PolyMatrix(out.rows, out.cols, n_vars, ent)


def commutator(a, b):
    return a @ b - b @ a


def vec_zero(n, n_vars):
    return [Poly.zero(n_vars) for _ in range(n)]


def dot(u, v):
    acc = None
    for a, b in zip(u, v):
        t = a * b
        acc = t if acc is None else acc + t
    return acc


def permutation_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def det_by_permutations(m):
    """Leibniz-formula determinant, used as an independent oracle in tests."""
    n = m.rows
    total = Poly.zero(m.n_vars)
    for perm in permutations(range(n)):
        term = Poly.const(m.n_vars, permutation_sign(perm))
        for i, j in enumerate(perm):
            term = term * m[i, j]
        total = total + term
    return total


class SamplePlan:
    """Seeded list of distinct rational points in Q^n_vars."""

    def __init__(self, seed, count, n_vars, spread=7):
        self.seed = seed
        self.count = count
        self.n_vars = n_vars
        rng = random.Random(seed)
        seen = set()
        points = []
        while len(points) < count:
            pt = tuple(Fraction(rng.randint(-spread * 6, spread * 6), rng.randint(1, 6))
                       for _ in range(n_vars))
            if pt in seen:
                if n_vars == 0:
                    break
                continue
            seen.add(pt)
            points.append(pt)
        self.points = points


def oracle_equal(p, q, plan):
    """Compare p and q at every plan point; returns (ok, first witness or None)."""
    if p.n_vars != q.n_vars:
        raise ValueError("variable count mismatch")
    diff = p - q
    for pt in plan.points:
        if diff.evaluate(pt) != 0:
            return False, pt
    return True, None


def polys_equal(p, q, plan=None):
    """Symbolic equality, falling back to sampling for very large expansions."""
    if len(p.terms) + len(q.terms) > SYMBOLIC_TERM_LIMIT and plan is not None:
        return oracle_equal(p, q, plan)[0]
    return p == q


def random_poly(rng, n_vars, degree, n_terms=3, coeff_range=3):
    """Random polynomial with small integer coefficients."""
    terms = {}
    for _ in range(n_terms):
        if n_vars == 0:
            e = ()
        else:
            total = rng.randint(0, degree)
            e = [0] * n_vars
            for _ in range(total):
                e[rng.randrange(n_vars)] += 1
            e = tuple(e)
        c = rng.randint(-coeff_range, coeff_range)
        terms[e] = terms.get(e, 0) + c
    return Poly(n_vars, terms)


def random_matrix(rng, rows, cols, n_vars, degree, n_terms=2, coeff_range=3):
    return PolyMatrix(rows, cols, n_vars,
                      [random_poly(rng, n_vars, degree, n_terms, coeff_range)
                       for _ in range(rows * cols)])


def random_unimodular(rng, n, n_vars, degree=1, steps=None):
    """Product of elementary matrices: polynomial entries, determinant +-1."""
    m = PolyMatrix.identity(n, n_vars)
    if n < 2:
        if n == 1 and rng.random() < 0.5:
            return m.scale(-1)
        return m
    steps = steps if steps is not None else n
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        e = PolyMatrix.identity(n, n_vars).replace(i, j, random_poly(rng, n_vars, degree, 2, 2))
        m = m @ e
    if rng.random() < 0.3:
        i, j = rng.sample(range(n), 2)
        perm = PolyMatrix.identity(n, n_vars)
        perm = perm.replace(i, i, 0).replace(j, j, 0).replace(i, j, 1).replace(j, i, -1)
        m = m @ perm
    return m
