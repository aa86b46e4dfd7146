"""JSON schemas for polynomials, configurations, subspaces and tiles.

Parsers enforce the type invariants bit-exactly: no zero coefficients or
duplicate exponents in polynomials, canonical residue keys for periodic
values, primitive directions and canonical anchors for fibers, rationals
as "p/q" strings for subspace bases.  Serialization is deterministic
(sorted keys working outward), so identical values produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .config import (FiberSum, PeriodicConfig, PeriodicFiber, WindowConfig,
                     box_size)
from .errors import SchemaError
from .laurent import LaurentPoly
from .lattice import SubspaceBasis
from .tiling import Tile


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _int(value, what):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{what} must be an integer, got {value!r}")
    return value


def _int_vector(value, dim, what):
    if not isinstance(value, list) or len(value) != dim:
        raise SchemaError(f"{what} must be a list of {dim} integers")
    return tuple(_int(x, what) for x in value)


def _dim_of(obj):
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError("missing or invalid 'dim'")
    return dim


# ---------------------------------------------------------------------------
# polynomials

def poly_to_obj(f: LaurentPoly):
    return {"dim": f.dim,
            "terms": [{"exp": list(e), "coef": c} for e, c in f.terms()]}


def poly_from_obj(obj) -> LaurentPoly:
    if not isinstance(obj, dict):
        raise SchemaError("polynomial document must be an object")
    dim = _dim_of(obj)
    terms = obj.get("terms")
    if not isinstance(terms, list):
        raise SchemaError("polynomial needs a 'terms' list")
    seen = {}
    for item in terms:
        if not isinstance(item, dict) or set(item) != {"exp", "coef"}:
            raise SchemaError("each term needs exactly 'exp' and 'coef'")
        exp = _int_vector(item["exp"], dim, "exponent")
        coef = _int(item["coef"], "coefficient")
        if coef == 0:
            raise SchemaError(f"zero coefficient at exponent {list(exp)}")
        if exp in seen:
            raise SchemaError(f"duplicate exponent {list(exp)}")
        seen[exp] = coef
    return LaurentPoly(dim, seen)


# ---------------------------------------------------------------------------
# configurations

def config_to_obj(c):
    if isinstance(c, WindowConfig):
        return {"kind": "window", "dim": c.dim, "lo": list(c.lo),
                "hi": list(c.hi), "values": list(c.values)}
    if isinstance(c, PeriodicConfig):
        return {"kind": "periodic", "dim": c.dim,
                "basis": [list(g) for g in c.basis],
                "values": [{"res": list(r), "val": c.values[r]}
                           for r in c.residues()]}
    if isinstance(c, FiberSum):
        return {"kind": "fibersum", "dim": c.dim,
                "fibers": [{"anchor": list(f.anchor), "dir": list(f.direction),
                            "period": f.period, "vals": list(f.vals)}
                           for f in c.fibers]}
    raise SchemaError(f"cannot serialize configuration of type {type(c)!r}")


def config_from_obj(obj):
    if not isinstance(obj, dict):
        raise SchemaError("configuration document must be an object")
    kind = obj.get("kind")
    dim = _dim_of(obj)
    if kind == "window":
        lo = _int_vector(obj.get("lo"), dim, "lo")
        hi = _int_vector(obj.get("hi"), dim, "hi")
        values = obj.get("values")
        if not isinstance(values, list):
            raise SchemaError("window needs a 'values' list")
        if any(a > b for a, b in zip(lo, hi)):
            raise SchemaError(f"empty window {lo}..{hi}")
        if len(values) != box_size(lo, hi):
            raise SchemaError("window value count does not match the box")
        return WindowConfig(lo, hi, [_int(v, "value") for v in values])
    if kind == "periodic":
        basis = obj.get("basis")
        if not isinstance(basis, list) or len(basis) != dim:
            raise SchemaError("periodic basis must list dim generators")
        gens = [_int_vector(g, dim, "generator") for g in basis]
        raw = obj.get("values")
        if not isinstance(raw, list):
            raise SchemaError("periodic needs a 'values' list")
        values = {}
        for item in raw:
            if not isinstance(item, dict) or set(item) != {"res", "val"}:
                raise SchemaError("each value needs exactly 'res' and 'val'")
            res = _int_vector(item["res"], dim, "residue")
            if res in values:
                raise SchemaError(f"duplicate residue {list(res)}")
            values[res] = _int(item["val"], "value")
        try:
            cfg = PeriodicConfig(dim, gens, values)
        except Exception as exc:
            raise SchemaError(f"invalid periodic configuration: {exc}") from exc
        return cfg
    if kind == "fibersum":
        raw = obj.get("fibers")
        if not isinstance(raw, list):
            raise SchemaError("fibersum needs a 'fibers' list")
        fibers = []
        for item in raw:
            if (not isinstance(item, dict)
                    or set(item) != {"anchor", "dir", "period", "vals"}):
                raise SchemaError(
                    "each fiber needs exactly 'anchor', 'dir', 'period', 'vals'")
            anchor = _int_vector(item["anchor"], dim, "anchor")
            direction = _int_vector(item["dir"], dim, "direction")
            period = _int(item["period"], "period")
            vals = item["vals"]
            if not isinstance(vals, list) or len(vals) != period or period < 1:
                raise SchemaError("fiber 'vals' must list exactly 'period' values")
            vals = [_int(v, "fiber value") for v in vals]
            try:
                fiber = PeriodicFiber(anchor, direction,
                                      vals[:_minimal(vals)])
            except Exception as exc:
                raise SchemaError(f"invalid fiber: {exc}") from exc
            fibers.append(fiber)
        return FiberSum(dim, fibers)
    raise SchemaError(f"unknown configuration kind {kind!r}")


def _minimal(vals):
    n = len(vals)
    for p in range(1, n + 1):
        if n % p == 0 and all(vals[j] == vals[j % p] for j in range(n)):
            return p
    return n


# ---------------------------------------------------------------------------
# subspaces and tiles

def subspace_to_obj(V: SubspaceBasis):
    return {"dim": V.dim,
            "basis": [[f"{x.numerator}/{x.denominator}" for x in row]
                      for row in V.basis]}


def subspace_from_obj(obj) -> SubspaceBasis:
    if not isinstance(obj, dict):
        raise SchemaError("subspace document must be an object")
    dim = _dim_of(obj)
    basis = obj.get("basis")
    if not isinstance(basis, list):
        raise SchemaError("subspace needs a 'basis' list")
    rows = []
    for row in basis:
        if not isinstance(row, list) or len(row) != dim:
            raise SchemaError("subspace basis vector of wrong length")
        parsed = []
        for x in row:
            if isinstance(x, int) and not isinstance(x, bool):
                parsed.append(Fraction(x))
            elif isinstance(x, str):
                try:
                    p, _, q = x.partition("/")
                    parsed.append(Fraction(int(p), int(q)) if q
                                  else Fraction(int(p)))
                except (ValueError, ZeroDivisionError) as exc:
                    raise SchemaError(f"bad rational {x!r}") from exc
            else:
                raise SchemaError(f"bad rational {x!r}")
        rows.append(parsed)
    try:
        return SubspaceBasis(dim, rows)
    except Exception as exc:
        raise SchemaError(f"invalid subspace: {exc}") from exc


def tile_to_obj(tile: Tile):
    return {"dim": tile.dim, "cells": [list(c) for c in tile.sorted_cells()]}


def tile_from_obj(obj) -> Tile:
    if not isinstance(obj, dict):
        raise SchemaError("tile document must be an object")
    dim = _dim_of(obj)
    cells = obj.get("cells")
    if not isinstance(cells, list) or not cells:
        raise SchemaError("tile needs a nonempty 'cells' list")
    try:
        return Tile(dim, [_int_vector(c, dim, "cell") for c in cells])
    except Exception as exc:
        raise SchemaError(f"invalid tile: {exc}") from exc


# ---------------------------------------------------------------------------
# file helpers

def load_json(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def file_hash(path) -> str:
    with open(path, "rb") as fh:
        return sha256_hex(fh.read())
