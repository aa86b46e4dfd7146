"""Shared test utilities: independent oracles and random generators.

The convolution oracle here is deliberately primitive (nested loops over a
dense array) so it shares no code path with the library's apply_poly.
"""

from __future__ import annotations

import random

from perdec import (FiberSum, LaurentPoly, PeriodicConfig, WindowConfig,
                    make_fiber)


def naive_convolution(terms, window: WindowConfig):
    """Dense nested-loop convolution; returns (lo, hi, {point: value}).

    terms is a list of (exponent, coefficient).  The output box is the set
    of points u with every u - exponent inside the window, computed by
    scanning rather than by the library's erosion helper.
    """
    dim = window.dim
    out = {}
    lo = list(window.lo)
    hi = list(window.hi)
    for e, _ in terms:
        for i in range(dim):
            lo[i] = max(lo[i], window.lo[i] + e[i])
            hi[i] = min(hi[i], window.hi[i] + e[i])
    if any(a > b for a, b in zip(lo, hi)):
        return tuple(lo), tuple(hi), out

    def rec(prefix):
        i = len(prefix)
        if i == dim:
            u = tuple(prefix)
            total = 0
            for e, k in terms:
                total += k * window.value_at(
                    tuple(u[j] - e[j] for j in range(dim)))
            out[u] = total
            return
        for x in range(lo[i], hi[i] + 1):
            rec(prefix + [x])

    rec([])
    return tuple(lo), tuple(hi), out


def random_poly(rng: random.Random, dim, max_terms=5, exp_range=4,
                coef_range=9):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exp = tuple(rng.randint(-exp_range, exp_range) for _ in range(dim))
        coef = rng.randint(-coef_range, coef_range)
        if coef:
            terms[exp] = coef
    return LaurentPoly(dim, terms)


def random_hnf_basis(rng: random.Random, dim, det_bound):
    """Random full-rank HNF-style rows with determinant at most det_bound."""
    while True:
        diag = [rng.randint(1, max(1, int(det_bound ** (1 / dim)) + 2))
                for _ in range(dim)]
        det = 1
        for p in diag:
            det *= p
        if det <= det_bound:
            break
    rows = []
    for i in range(dim):
        row = [0] * dim
        row[i] = diag[i]
        for j in range(i + 1, dim):
            row[j] = rng.randrange(diag[j]) if diag[j] > 1 else 0
        rows.append(tuple(row))
    return rows


def random_periodic(rng: random.Random, dim, det_bound, value_range=5):
    basis = random_hnf_basis(rng, dim, det_bound)
    return PeriodicConfig.from_function(
        dim, basis,
        lambda r: rng.randint(-value_range, value_range))


def random_fiber_family(rng: random.Random, dim, direction, max_fibers=6,
                        max_period=8, anchor_range=6, value_range=4):
    """A random family of fibers parallel to one direction."""
    fibers = []
    for _ in range(rng.randint(1, max_fibers)):
        anchor = tuple(rng.randint(-anchor_range, anchor_range)
                       for _ in range(dim))
        period = rng.randint(1, max_period)
        vals = [rng.randint(-value_range, value_range) for _ in range(period)]
        if all(v == 0 for v in vals):
            vals[rng.randrange(period)] = 1
        fibers.append(make_fiber(anchor, direction, vals))
    return FiberSum(dim, fibers)


DIRECTIONS_2D = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (1, -2)]
