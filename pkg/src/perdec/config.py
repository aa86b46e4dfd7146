"""Finite representations of integer-valued functions on Z^d.

Three concrete representations are provided:

* WindowConfig   -- values known only inside a box (a partial function;
                    nothing is assumed outside, never zero-padding),
* PeriodicConfig -- strongly periodic values keyed by lattice residues,
* FiberSum       -- a finite sum of periodic fibers, each supported on a
                    single rational line.

LazyConfig wraps an arbitrary evaluator on all of Z^d; decomposition
pipelines expose their components this way and callers rasterize.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd

from .errors import (DimensionMismatch, EmptyRegionError, LatticeError,
                     OutOfDomainError, PreconditionError)
from .laurent import LaurentPoly
from .lattice import (fundamental_residues, hnf_diagonal,
                      hnf_reduce, hnf_rows, is_zero_vector,
                      lattice_determinant, lattice_intersection, order_modulo,
                      primitive, vadd, vscale, vsub, zero_vector)

# ---------------------------------------------------------------------------
# boxes

def box_points(lo, hi):
    """All integer points of the box [lo, hi], in lexicographic order."""
    return product(*(range(a, b + 1) for a, b in zip(lo, hi)))


def box_size(lo, hi):
    n = 1
    for a, b in zip(lo, hi):
        n *= b - a + 1
    return n


def box_contains(lo, hi, x):
    return all(a <= c <= b for a, b, c in zip(lo, hi, x))


def box_intersect(b1, b2):
    lo = tuple(max(a, c) for a, c in zip(b1[0], b2[0]))
    hi = tuple(min(b, d) for b, d in zip(b1[1], b2[1]))
    if any(a > b for a, b in zip(lo, hi)):
        return None
    return lo, hi


def erode_box(lo, hi, support):
    """Points u with u - s inside [lo, hi] for every s in `support`."""
    cmax = tuple(max(s[i] for s in support) for i in range(len(lo)))
    cmin = tuple(min(s[i] for s in support) for i in range(len(lo)))
    elo = vadd(lo, cmax)
    ehi = vadd(hi, cmin)
    if any(a > b for a, b in zip(elo, ehi)):
        return None
    return elo, ehi


# ---------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class Verdict:
    """Outcome of a check that may be exact or window-evidence only."""
    holds: bool
    exact: bool
    region: tuple | None = None  # (lo, hi) the evidence covers

    @classmethod
    def exactly(cls, holds):
        return cls(holds=holds, exact=True)

    @classmethod
    def on_window(cls, holds, lo, hi):
        return cls(holds=holds, exact=False, region=(lo, hi))

    def __bool__(self):
        return self.holds


# ---------------------------------------------------------------------------
# window configuration

class WindowConfig:
    """Dense integer values over a box; undefined outside it."""

    __slots__ = ("dim", "lo", "hi", "values", "_strides")

    def __init__(self, lo, hi, values):
        self.lo = tuple(int(x) for x in lo)
        self.hi = tuple(int(x) for x in hi)
        self.dim = len(self.lo)
        if len(self.hi) != self.dim:
            raise DimensionMismatch("window corners of different dimension")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise EmptyRegionError(f"empty window {self.lo}..{self.hi}")
        self.values = [int(v) for v in values]
        if len(self.values) != box_size(self.lo, self.hi):
            raise LatticeError("window value array has the wrong length")
        strides = []
        acc = 1
        for a, b in zip(reversed(self.lo), reversed(self.hi)):
            strides.append(acc)
            acc *= b - a + 1
        self._strides = tuple(reversed(strides))

    @classmethod
    def from_function(cls, lo, hi, fn):
        return cls(lo, hi, [fn(x) for x in box_points(lo, hi)])

    @property
    def box(self):
        return self.lo, self.hi

    def index(self, x):
        return sum(s * (c - a) for s, c, a in zip(self._strides, x, self.lo))

    def contains(self, x):
        return box_contains(self.lo, self.hi, x)

    def value_at(self, x):
        if not self.contains(x):
            raise OutOfDomainError(
                f"{tuple(x)} outside window {self.lo}..{self.hi}")
        return self.values[self.index(x)]

    def translate(self, t):
        return WindowConfig(vadd(self.lo, t), vadd(self.hi, t), self.values)

    def __eq__(self, other):
        return (isinstance(other, WindowConfig) and self.lo == other.lo
                and self.hi == other.hi and self.values == other.values)

    def __repr__(self):
        return f"WindowConfig({self.lo}..{self.hi})"

    def grid_text(self):
        """Plain text dump; rows are the first coordinate (2-d only)."""
        if self.dim != 2:
            raise PreconditionError("grid dump is only defined for dim 2")
        lines = []
        for x0 in range(self.lo[0], self.hi[0] + 1):
            row = [str(self.value_at((x0, x1)))
                   for x1 in range(self.lo[1], self.hi[1] + 1)]
            lines.append(" ".join(row))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# strongly periodic configuration

class PeriodicConfig:
    """Values on Z^d invariant under a full-rank integer lattice.

    `basis` is the declared generator list (columns of the period matrix);
    values are keyed by the canonical HNF residues of that lattice and must
    cover all of them.
    """

    __slots__ = ("dim", "basis", "values", "_hnf", "_diag")

    def __init__(self, dim, basis, values):
        self.dim = int(dim)
        self.basis = tuple(tuple(int(x) for x in g) for g in basis)
        for g in self.basis:
            if len(g) != self.dim:
                raise DimensionMismatch("period generator of wrong dimension")
        self._hnf = hnf_rows(self.basis, self.dim)
        if len(self._hnf) != self.dim:
            raise LatticeError("period basis is singular")
        self._diag = hnf_diagonal(self._hnf, self.dim)
        vals = {tuple(int(c) for c in k): int(v) for k, v in values.items()}
        expected = set(fundamental_residues(self._hnf, self.dim))
        if set(vals) != expected:
            raise LatticeError(
                "periodic values must be keyed by exactly the canonical residues")
        self.values = vals

    @classmethod
    def from_function(cls, dim, basis, fn):
        rows = hnf_rows(basis, dim)
        if len(rows) != dim:
            raise LatticeError("period basis is singular")
        vals = {r: fn(r) for r in fundamental_residues(rows, dim)}
        return cls(dim, basis, vals)

    @classmethod
    def constant(cls, dim, value):
        ident = tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim))
        return cls(dim, ident, {zero_vector(dim): value})

    @property
    def determinant(self):
        return lattice_determinant(self._hnf, self.dim)

    @property
    def lattice_rows(self):
        return self._hnf

    def residues(self):
        return sorted(self.values)

    def value_at(self, x):
        return self.values[hnf_reduce(x, self._hnf)]

    def contains(self, x):
        return True

    def translate(self, t):
        return PeriodicConfig(
            self.dim, self.basis,
            {r: self.values[hnf_reduce(vsub(r, t), self._hnf)]
             for r in self.values})

    def is_zero(self):
        return all(v == 0 for v in self.values.values())

    def __eq__(self, other):
        return (isinstance(other, PeriodicConfig) and self.dim == other.dim
                and self._hnf == other._hnf and self.values == other.values)

    def __repr__(self):
        return f"PeriodicConfig(dim={self.dim}, det={self.determinant})"


def period_lattice(c: PeriodicConfig):
    """HNF basis of the lattice of all period vectors of c.

    Every coset of the declared lattice is tested as a candidate period, so
    the result is the full superlattice, found by brute force over the
    |det| residues.
    """
    periods = list(c.lattice_rows)
    for t in fundamental_residues(c.lattice_rows, c.dim):
        if is_zero_vector(t):
            continue
        if all(c.value_at(vadd(r, t)) == v for r, v in c.values.items()):
            periods.append(t)
    return hnf_rows(periods, c.dim)


# ---------------------------------------------------------------------------
# periodic fibers

class PeriodicFiber:
    """Periodic values on a single rational line, zero elsewhere.

    Invariants enforced here: the direction is primitive and sign
    normalized, the anchor is the canonical representative of the line
    modulo the direction, vals has minimal period and is not all zero.
    value(anchor + j*direction) = vals[j mod period].
    """

    __slots__ = ("dim", "anchor", "direction", "vals", "_pivot")

    def __init__(self, anchor, direction, vals):
        self.anchor = tuple(int(x) for x in anchor)
        self.direction = tuple(int(x) for x in direction)
        self.dim = len(self.anchor)
        if len(self.direction) != self.dim:
            raise DimensionMismatch("fiber anchor/direction dimension mismatch")
        if is_zero_vector(self.direction):
            raise LatticeError("fiber direction is zero")
        if self.direction != primitive(self.direction):
            raise LatticeError("fiber direction must be primitive and normalized")
        if hnf_reduce(self.anchor, (self.direction,)) != self.anchor:
            raise LatticeError("fiber anchor is not the canonical line point")
        self.vals = tuple(int(v) for v in vals)
        if not self.vals or all(v == 0 for v in self.vals):
            raise LatticeError("fiber values must not be all zero")
        if _minimal_period(self.vals) != len(self.vals):
            raise LatticeError("fiber values are not reduced to minimal period")
        self._pivot = next(i for i, a in enumerate(self.direction) if a)

    @property
    def period(self):
        return len(self.vals)

    def line_key(self):
        return (self.direction, self.anchor)

    def parameter_of(self, x):
        """Integer t with x = anchor + t*direction, or None off the line."""
        if hnf_reduce(x, (self.direction,)) != self.anchor:
            return None
        return ((x[self._pivot] - self.anchor[self._pivot])
                // self.direction[self._pivot])

    def value_at(self, x):
        t = self.parameter_of(x)
        if t is None:
            return 0
        return self.vals[t % self.period]

    def __eq__(self, other):
        return (isinstance(other, PeriodicFiber) and self.anchor == other.anchor
                and self.direction == other.direction and self.vals == other.vals)

    def __repr__(self):
        return (f"PeriodicFiber(anchor={self.anchor}, "
                f"dir={self.direction}, vals={list(self.vals)})")


def _minimal_period(vals):
    n = len(vals)
    for p in range(1, n + 1):
        if n % p == 0 and all(vals[j] == vals[j % p] for j in range(n)):
            return p
    return n


def make_fiber(anchor, direction, vals):
    """Canonicalize raw fiber data; returns None when the values vanish.

    Accepts any nonzero integer direction: non-primitive or negated
    directions are rewritten onto the primitive line parameterization
    (skipped positions become zeros), the anchor is reduced to the line's
    canonical point with the value table rotated to match, and the table is
    cut to its minimal period.
    """
    anchor = tuple(int(x) for x in anchor)
    direction = tuple(int(x) for x in direction)
    vals = [int(v) for v in vals]
    if is_zero_vector(direction):
        raise LatticeError("fiber direction is zero")
    if not vals:
        raise LatticeError("fiber needs at least one value")
    w = primitive(direction)
    pivot = next(i for i, a in enumerate(w) if a)
    scale = direction[pivot] // w[pivot]  # signed step in primitive units
    if scale != 1:
        n = len(vals) * abs(scale)
        spread = [0] * n
        for j, v in enumerate(vals):
            spread[(j * scale) % n] = v
        vals = spread
    canon = hnf_reduce(anchor, (w,))
    q = (anchor[pivot] - canon[pivot]) // w[pivot]
    if q:
        n = len(vals)
        vals = [vals[(j - q) % n] for j in range(n)]
    if all(v == 0 for v in vals):
        return None
    p = _minimal_period(tuple(vals))
    return PeriodicFiber(canon, w, vals[:p])


class FiberSum:
    """A finite sum of periodic fibers; the empty sum is the zero function.

    Fibers sharing a line are merged at construction (lcm period, pointwise
    sums) and identically-zero merges are dropped, so equality of canonical
    forms coincides with pointwise equality.
    """

    __slots__ = ("dim", "fibers", "_by_line")

    def __init__(self, dim, fibers=()):
        self.dim = int(dim)
        merged = {}
        for f in fibers:
            if f is None:
                continue
            if f.dim != self.dim:
                raise DimensionMismatch("fiber of wrong dimension")
            key = f.line_key()
            if key in merged:
                merged[key] = _merge_vals(merged[key], f.vals)
            else:
                merged[key] = f.vals
        out = []
        for (direction, anchor), vals in merged.items():
            fib = make_fiber(anchor, direction, vals)
            if fib is not None:
                out.append(fib)
        out.sort(key=lambda f: (f.direction, f.anchor))
        self.fibers = tuple(out)
        self._by_line = {f.line_key(): f for f in self.fibers}

    @classmethod
    def zero(cls, dim):
        return cls(dim, ())

    def is_zero(self):
        return not self.fibers

    def contains(self, x):
        return True

    def value_at(self, x):
        total = 0
        for f in self.fibers:
            total += f.value_at(x)
        return total

    def translate(self, t):
        return FiberSum(self.dim,
                        [make_fiber(vadd(f.anchor, t), f.direction, f.vals)
                         for f in self.fibers])

    def scaled(self, k):
        if k == 0:
            return FiberSum.zero(self.dim)
        return FiberSum(self.dim,
                        [make_fiber(f.anchor, f.direction,
                                    [k * v for v in f.vals])
                         for f in self.fibers])

    def directions(self):
        return sorted({f.direction for f in self.fibers})

    def parallel_part(self, direction):
        """The sub-sum of fibers parallel to `direction`."""
        w = primitive(direction)
        return FiberSum(self.dim, [f for f in self.fibers if f.direction == w])

    def __eq__(self, other):
        return (isinstance(other, FiberSum) and self.dim == other.dim
                and self.fibers == other.fibers)

    def __repr__(self):
        return f"FiberSum(dim={self.dim}, fibers={len(self.fibers)})"


def _merge_vals(a, b):
    p = len(a) * len(b) // gcd(len(a), len(b))
    return tuple(a[j % len(a)] + b[j % len(b)] for j in range(p))


# ---------------------------------------------------------------------------
# lazy evaluator view

class LazyConfig:
    """An evaluator on all of Z^d; values may be ints or Fractions.

    Used for decomposition components, whose values need not form a
    configuration (they can be unbounded); callers rasterize on demand.
    """

    __slots__ = ("dim", "fn", "label", "_cache")

    def __init__(self, dim, fn, label="evaluator", cache=True):
        self.dim = int(dim)
        self.fn = fn
        self.label = label
        self._cache = {} if cache else None

    def value_at(self, x):
        x = tuple(x)
        if self._cache is None:
            return self.fn(x)
        try:
            return self._cache[x]
        except KeyError:
            v = self.fn(x)
            if isinstance(v, Fraction) and v.denominator == 1:
                v = int(v)
            self._cache[x] = v
            return v

    def contains(self, x):
        return True

    def translate(self, t):
        t = tuple(t)
        return LazyConfig(self.dim, lambda x: self.value_at(vsub(x, t)),
                          label=f"shift{t}:{self.label}")

    def __repr__(self):
        return f"LazyConfig({self.label})"


ConfigView = (WindowConfig, PeriodicConfig, FiberSum, LazyConfig)


# ---------------------------------------------------------------------------
# generic operations

def evaluate(c, x):
    """c(x); raises OutOfDomainError outside a window's box."""
    x = tuple(int(v) for v in x)
    if len(x) != c.dim:
        raise DimensionMismatch("point of wrong dimension")
    return c.value_at(x)


def translate(c, t):
    """The translate of c by t: value at x equals c(x - t)."""
    t = tuple(int(v) for v in t)
    if len(t) != c.dim:
        raise DimensionMismatch("translation vector of wrong dimension")
    return c.translate(t)


def rasterize(c, lo, hi):
    """Dense window of c over [lo, hi]; exact, errors outside c's domain."""
    lo = tuple(int(v) for v in lo)
    hi = tuple(int(v) for v in hi)
    if isinstance(c, WindowConfig):
        if not (c.contains(lo) and c.contains(hi)):
            raise OutOfDomainError(
                f"box {lo}..{hi} exceeds window {c.lo}..{c.hi}")
    vals = []
    for x in box_points(lo, hi):
        v = c.value_at(x)
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise PreconditionError(
                    f"non-integer value {v} at {x}: cannot rasterize to an "
                    "integer window")
            v = int(v)
        vals.append(v)
    return WindowConfig(lo, hi, vals)


def apply_poly(f: LaurentPoly, c):
    """The convolution action: (fc)(u) = sum_i f_i * c(u - u_i).

    Windows shrink to the erosion of their box by supp(f); periodic
    configurations keep their lattice; fiber sums map to merged translated
    scaled fibers.  The zero polynomial yields the zero fiber sum.
    """
    if f.dim != c.dim:
        raise DimensionMismatch("polynomial/configuration dimension mismatch")
    if f.is_zero():
        return FiberSum.zero(c.dim)
    terms = f.terms()

    if isinstance(c, WindowConfig):
        eroded = erode_box(c.lo, c.hi, [e for e, _ in terms])
        if eroded is None:
            raise EmptyRegionError(
                "window too small: erosion by the polynomial support is empty")
        lo, hi = eroded
        return WindowConfig.from_function(
            lo, hi,
            lambda u: sum(k * c.value_at(vsub(u, e)) for e, k in terms))

    if isinstance(c, PeriodicConfig):
        return PeriodicConfig.from_function(
            c.dim, c.basis,
            lambda r: sum(k * c.value_at(vsub(r, e)) for e, k in terms))

    if isinstance(c, FiberSum):
        pieces = []
        for e, k in terms:
            for fib in c.fibers:
                pieces.append(make_fiber(vadd(fib.anchor, e), fib.direction,
                                         [k * v for v in fib.vals]))
        return FiberSum(c.dim, pieces)

    if isinstance(c, LazyConfig):
        return LazyConfig(
            c.dim,
            lambda u: sum(k * c.value_at(vsub(u, e)) for e, k in terms),
            label=f"poly*{c.label}")

    raise PreconditionError(f"unsupported configuration type {type(c)!r}")


def is_annihilated(f: LaurentPoly, c) -> Verdict:
    """Whether fc = 0: exact for periodic/fiber views, window evidence else.

    Lazy evaluators have no intrinsic finite check region; rasterize first.
    """
    if f.dim != c.dim:
        raise DimensionMismatch("polynomial/configuration dimension mismatch")
    if isinstance(c, PeriodicConfig):
        return Verdict.exactly(apply_poly(f, c).is_zero())
    if isinstance(c, FiberSum):
        return Verdict.exactly(apply_poly(f, c).is_zero())
    if isinstance(c, WindowConfig):
        out = apply_poly(f, c)  # raises EmptyRegionError when eroded away
        return Verdict.on_window(all(v == 0 for v in out.values),
                                 out.lo, out.hi)
    raise PreconditionError(
        "annihilation of an evaluator view is undecidable; rasterize first")


def add_views(views, coeffs=None):
    """Pointwise integer combination k1*c1 + ... + kn*cn.

    The result is a FiberSum when all inputs are, a PeriodicConfig on the
    intersection lattice when all inputs are periodic, a window on the box
    intersection when any input is a window, and a lazy evaluator for the
    remaining mixes (their common domain is all of Z^d, which no finite
    window can carry).
    """
    views = list(views)
    if not views:
        raise PreconditionError("add_views needs at least one view")
    if coeffs is None:
        coeffs = [1] * len(views)
    coeffs = [int(k) for k in coeffs]
    if len(coeffs) != len(views):
        raise PreconditionError("one coefficient per view is required")
    dim = views[0].dim
    for v in views:
        if v.dim != dim:
            raise DimensionMismatch("views of different dimension")

    if all(isinstance(v, FiberSum) for v in views):
        pieces = []
        for k, v in zip(coeffs, views):
            if k == 0:
                continue
            for fib in v.fibers:
                pieces.append(make_fiber(fib.anchor, fib.direction,
                                         [k * x for x in fib.vals]))
        return FiberSum(dim, pieces)

    if all(isinstance(v, PeriodicConfig) for v in views):
        rows = views[0].lattice_rows
        for v in views[1:]:
            rows = lattice_intersection(rows, v.lattice_rows, dim)
        if len(rows) != dim:
            raise LatticeError("intersection lattice lost rank (internal)")
        return PeriodicConfig.from_function(
            dim, rows,
            lambda r: sum(k * v.value_at(r) for k, v in zip(coeffs, views)))

    windows = [v for v in views if isinstance(v, WindowConfig)]
    if windows:
        box = windows[0].box
        for w in windows[1:]:
            nxt = box_intersect(box, w.box)
            if nxt is None:
                raise EmptyRegionError("window domains do not intersect")
            box = nxt
        lo, hi = box
        return WindowConfig.from_function(
            lo, hi,
            lambda x: sum(k * v.value_at(x) for k, v in zip(coeffs, views)))

    return LazyConfig(
        dim,
        lambda x: sum(k * v.value_at(x) for k, v in zip(coeffs, views)),
        label="sum")


def config_equal_on(c1, c2, lo, hi):
    """Pointwise equality of two views over a box."""
    return all(c1.value_at(x) == c2.value_at(x) for x in box_points(lo, hi))


def is_zero_config(c) -> bool:
    """Exact zero test for periodic and fiber views."""
    if isinstance(c, (PeriodicConfig, FiberSum)):
        return c.is_zero()
    if isinstance(c, WindowConfig):
        return all(v == 0 for v in c.values)
    raise PreconditionError("zero test for an evaluator view is undecidable")


def detect_period_multiple(c, direction, bound, window=None):
    """Smallest k in [1, bound] with c invariant under k*direction.

    Exact for PeriodicConfig (lattice membership) and FiberSum (structural
    comparison); window evidence otherwise.  Returns (k, exact_flag) or
    (None, exact_flag) when no such multiple exists within the bound.
    """
    w = tuple(int(x) for x in direction)
    if is_zero_vector(w):
        raise PreconditionError("the zero vector is not a direction")
    if isinstance(c, PeriodicConfig):
        return order_modulo(w, period_lattice(c), bound), True
    if isinstance(c, FiberSum):
        if c.is_zero():
            return 1, True
        wp = primitive(w)
        if any(f.direction != wp for f in c.fibers):
            return None, True  # some line drifts under every multiple
        for k in range(1, bound + 1):
            if translate(c, vscale(k, w)) == c:
                return k, True
        return None, True
    if isinstance(c, WindowConfig):
        for k in range(1, bound + 1):
            step = vscale(k, w)
            ov = box_intersect(c.box, (vadd(c.lo, step), vadd(c.hi, step)))
            if ov is None:
                return None, False
            lo, hi = ov
            if all(c.value_at(x) == c.value_at(vsub(x, step))
                   for x in box_points(lo, hi)):
                return k, False
        return None, False
    if isinstance(c, LazyConfig):
        if window is None:
            raise PreconditionError(
                "period evidence for an evaluator needs an explicit window")
        lo, hi = window
        return detect_period_multiple(rasterize(c, lo, hi), w, bound)
    raise PreconditionError(f"unsupported configuration type {type(c)!r}")


def periodic_in_subspace(c, V, bound) -> Verdict:
    """Whether c is periodic in every rational direction of V.

    Checking each basis direction suffices: integer combinations of periods
    are periods.  Strongly periodic views always pass; windows give
    evidence only.
    """
    if V.rank == 0:
        return Verdict.exactly(True)
    if isinstance(c, PeriodicConfig):
        return Verdict.exactly(True)
    exact = True
    region = None
    for b in V.integer_rows():
        k, ex = detect_period_multiple(c, b, bound)
        exact = exact and ex
        if isinstance(c, WindowConfig):
            region = c.box
        if k is None:
            if exact:
                return Verdict.exactly(False)
            return Verdict.on_window(False, *region)
    if exact:
        return Verdict.exactly(True)
    return Verdict.on_window(True, *region)
