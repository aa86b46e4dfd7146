"""Translational tilings: tiles, co-tiler verification, independence.

A tile is a finite cell set D; a binary configuration c tiles by D when
the indicator polynomial of -D times c is the constant-1 function, i.e.
every translate of D covers exactly one cell of c's support.  Independent
tile families admit a common periodizer transversal to any low-dimensional
subspace, which feeds the k-periodic decomposition pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .config import (FiberSum, PeriodicConfig, Verdict, WindowConfig,
                     apply_poly)
from .decompose import Bounds, Decomposition, k_periodic_decompose
from .errors import PreconditionError, VerificationError
from .laurent import LaurentPoly, support_in_subspace
from .lattice import (SubspaceBasis, rank_rational, vneg, zero_vector)


@dataclass(frozen=True)
class Tile:
    """A finite nonempty set of grid cells."""
    dim: int
    cells: frozenset

    def __init__(self, dim, cells):
        cells = list(cells)
        object.__setattr__(self, "dim", int(dim))
        seen = set()
        for cell in cells:
            cell = tuple(int(x) for x in cell)
            if len(cell) != self.dim:
                raise PreconditionError("tile cell of wrong dimension")
            if cell in seen:
                raise PreconditionError(f"duplicate cell {cell}")
            seen.add(cell)
        if not seen:
            raise PreconditionError("a tile needs at least one cell")
        object.__setattr__(self, "cells", frozenset(seen))

    @property
    def normalized(self):
        return zero_vector(self.dim) in self.cells

    def sorted_cells(self):
        return sorted(self.cells)

    def __len__(self):
        return len(self.cells)


def tile_polynomial(tile: Tile) -> LaurentPoly:
    """Indicator polynomial of the negated cell set, all coefficients one."""
    return LaurentPoly(tile.dim, {vneg(cell): 1 for cell in tile.cells})


def _check_binary(c):
    if isinstance(c, PeriodicConfig):
        bad = [v for v in c.values.values() if v not in (0, 1)]
    elif isinstance(c, FiberSum):
        bad = [v for f in c.fibers for v in f.vals if v not in (0, 1)]
    elif isinstance(c, WindowConfig):
        bad = [v for v in c.values if v not in (0, 1)]
    else:
        raise PreconditionError("co-tiler check needs a concrete view")
    if bad:
        raise PreconditionError(
            f"co-tiler values must be 0/1; found {sorted(set(bad))[:4]}")


def verify_cotiler(tile: Tile, c) -> Verdict:
    """Whether c is a co-tiler of the tile: tile polynomial times c is 1.

    Exact for periodic and fiber views; window views give a verdict on the
    eroded region only, never extrapolated beyond it.
    """
    _check_binary(c)
    fc = apply_poly(tile_polynomial(tile), c)
    if isinstance(fc, PeriodicConfig):
        return Verdict.exactly(all(v == 1 for v in fc.values.values()))
    if isinstance(fc, FiberSum):
        if fc.dim == 1:
            return Verdict.exactly(
                len(fc.fibers) == 1 and fc.fibers[0].vals == (1,))
        return Verdict.exactly(False)  # finitely many lines never cover Z^d
    return Verdict.on_window(all(v == 1 for v in fc.values), fc.lo, fc.hi)


def independent(tiles) -> tuple:
    """Brute-force independence test with a witness.

    Tiles must be normalized (contain the origin).  Every choice of one
    nonzero cell per tile is rank-tested over the rationals; the result is
    (True, None) or (False, first dependent choice) in lexicographic choice
    order.  A rank test modulo a large prime screens each choice first;
    full modular rank already proves rational independence, and only the
    remaining choices pay for exact elimination.
    """
    tiles = list(tiles)
    if not tiles:
        raise PreconditionError("need at least one tile")
    for tile in tiles:
        if not tile.normalized:
            raise PreconditionError(
                "independence is defined for normalized tiles (0 in D)")
    k = len(tiles)
    if k > tiles[0].dim:
        raise PreconditionError("more tiles than grid dimensions")
    choice_sets = [
        [cell for cell in tile.sorted_cells() if any(cell)]
        for tile in tiles]
    for cs in choice_sets:
        if not cs:
            raise PreconditionError("a tile has no nonzero cell")
    for choice in product(*choice_sets):
        if _rank_mod_prime(choice) == k:
            continue  # full modular rank certifies rational independence
        if rank_rational(choice) < k:
            return False, choice
    return True, None


_FILTER_PRIME = 2_147_483_647


def _rank_mod_prime(vectors, p=_FILTER_PRIME):
    mat = [[x % p for x in v] for v in vectors]
    rank = 0
    cols = len(mat[0])
    for col in range(cols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], p - 2, p)
        mat[rank] = [(x * inv) % p for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[rank])]
        rank += 1
    return rank


def select_periodizer(fs, V: SubspaceBasis) -> LaurentPoly:
    """First polynomial whose support meets V exactly at the origin.

    For an independent family with 0 in every support such a member exists
    whenever dim V < family size; failure therefore signals dependent
    inputs and says so.
    """
    origin = None
    for f in fs:
        origin = zero_vector(f.dim)
        if f.coefficient(origin) == 0:
            raise PreconditionError("periodizer without the origin in support")
        if support_in_subspace(f, V) == {origin}:
            return f
    raise PreconditionError(
        "no family member is transversal to the subspace; the family is "
        "not independent (cross-check with independent())")


def cotiler_decompose(tiles, c, bounds: Bounds | None = None) -> Decomposition:
    """Decompose a common co-tiler of independent tiles into k-periodic parts.

    Verifies normalization, independence (with witness on failure) and the
    co-tiling property for every tile, then drives the k-periodic pipeline
    with the tile polynomials as the periodizer family.
    """
    bounds = bounds or Bounds()
    tiles = list(tiles)
    ok, witness = independent(tiles)
    if not ok:
        raise PreconditionError(
            f"tiles are not independent; dependent choice {witness}")
    polys = [tile_polynomial(t) for t in tiles]
    for tile, f in zip(tiles, polys):
        verdict = verify_cotiler(tile, c)
        if not verdict.holds:
            raise PreconditionError(
                f"input is not a co-tiler of the tile with cells "
                f"{tile.sorted_cells()}")
    dec = k_periodic_decompose(
        c, len(tiles), lambda V: select_periodizer(polys, V), bounds)
    for comp in dec.components:
        if rank_rational(comp.periods) != len(tiles):
            raise VerificationError(
                "component does not exhibit enough independent periods")
    return dec
