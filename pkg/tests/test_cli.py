import json
import os

import pytest

from perdec.cli import main
from perdec.config import PeriodicConfig, box_points, evaluate, rasterize
from perdec.serialize import config_from_obj, config_to_obj, dumps, poly_to_obj
from perdec.laurent import LaurentPoly, difference_poly

CHECKER = PeriodicConfig(2, [(2, 0), (0, 2)],
                         {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 0})


def write(path, obj):
    path.write_text(dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    f = write(tmp_path / "f.json", poly_to_obj(difference_poly((1, 0))))
    g = write(tmp_path / "g.json", poly_to_obj(difference_poly((0, 1))))
    cb = write(tmp_path / "cb.json", config_to_obj(CHECKER))
    tile_x = {"dim": 2, "cells": [[0, 0], [1, 0]]}
    tile_y = {"dim": 2, "cells": [[0, 0], [0, 1]]}
    tiles = write(tmp_path / "tiles.json", [tile_x, tile_y])
    factors = write(tmp_path / "factors.json", [
        poly_to_obj(difference_poly((1, 1))),
        poly_to_obj(difference_poly((1, -1)))])
    tilepoly = write(tmp_path / "tilepoly.json",
                     poly_to_obj(LaurentPoly(2, {(0, 0): 1, (-1, 0): 1})))
    return tmp_path, dict(f=f, g=g, cb=cb, tiles=tiles, factors=factors,
                          tilepoly=tilepoly)


def manifest(out):
    with open(os.path.join(out, "manifest.json")) as fh:
        return json.load(fh)


def test_poly_mul(files):
    tmp, fx = files
    out = str(tmp / "out_mul")
    assert main(["--out", out, "poly", "mul", fx["f"], fx["g"]]) == 0
    with open(os.path.join(out, "result.json")) as fh:
        result = json.load(fh)
    assert len(result["terms"]) == 4
    m = manifest(out)
    assert set(m["inputs"]) == {fx["f"], fx["g"]}
    assert m["outputs"] == ["result.json"]


def test_poly_add_inverse_is_zero(files):
    tmp, fx = files
    neg = write(tmp / "neg.json", poly_to_obj(-difference_poly((1, 0))))
    out = str(tmp / "out_add")
    assert main(["--out", out, "poly", "add", fx["f"], neg]) == 0
    with open(os.path.join(out, "result.json")) as fh:
        assert json.load(fh)["terms"] == []


def test_poly_line_dir_absent(files):
    tmp, fx = files
    mono = write(tmp / "mono.json",
                 poly_to_obj(LaurentPoly.monomial((2, 1), 3)))
    out = str(tmp / "out_line")
    assert main(["--out", out, "poly", "line-dir", mono]) == 0
    assert manifest(out)["results"]["line"] == "absent"


def test_act_tile_polynomial_gives_constant(files):
    tmp, fx = files
    xm2 = write(tmp / "xm2.json", config_to_obj(
        PeriodicConfig.from_function(2, [(2, 0), (0, 1)], lambda r: r[0] % 2)))
    out = str(tmp / "out_act")
    assert main(["--out", out, "act", fx["tilepoly"], xm2]) == 0
    with open(os.path.join(out, "result.json")) as fh:
        result = config_from_obj(json.load(fh))
    assert all(v == 1 for v in result.values.values())


def test_act_identity(files):
    tmp, fx = files
    one = write(tmp / "one.json", poly_to_obj(LaurentPoly.constant(2, 1)))
    out = str(tmp / "out_id")
    assert main(["--out", out, "act", one, fx["cb"]]) == 0
    with open(os.path.join(out, "result.json")) as fh:
        assert config_from_obj(json.load(fh)) == CHECKER


def test_act_empty_erosion_fails(files):
    tmp, fx = files
    tiny = write(tmp / "tiny.json", config_to_obj(
        rasterize(CHECKER, (0, 0), (0, 0))))
    out = str(tmp / "out_tiny")
    assert main(["--out", out, "act", fx["f"], tiny]) == 1


def test_decompose_factors(files):
    tmp, fx = files
    out = str(tmp / "out_dec")
    assert main(["--out", out, "--window=-8..8,-8..8", "decompose",
                 fx["cb"], "--factors", fx["factors"]]) == 0
    m = manifest(out)
    assert m["verdicts"]["sum_matches"]
    comps = [config_from_obj(json.load(open(os.path.join(out, name))))
             for name in m["outputs"]]
    assert len(comps) == 2
    for x in box_points((-8, -8), (8, 8)):
        assert sum(evaluate(c, x) for c in comps) == evaluate(CHECKER, x)


def test_decompose_with_search(files):
    tmp, fx = files
    out = str(tmp / "out_search")
    assert main(["--out", out, "--window=-6..6,-6..6", "decompose",
                 fx["cb"], "--annihilator", fx["tilepoly"]]) == 0
    m = manifest(out)
    assert m["results"]["certificate"] == [[2, 0]]


def test_decompose_k_periodizers(files):
    tmp, fx = files
    t2 = write(tmp / "t2.json",
               poly_to_obj(LaurentPoly(2, {(0, 0): 1, (0, -1): 1})))
    out = str(tmp / "out_k")
    assert main(["--out", out, "--window=-6..6,-6..6", "decompose", fx["cb"],
                 "--k", "2", "--periodizers", fx["tilepoly"], t2]) == 0
    m = manifest(out)
    assert m["verdicts"]["sum_matches"]
    assert any(key.endswith("_periods") for key in m["results"])


def test_sparse_commands(files, tmp_path):
    tmp, fx = files
    fibers = {"kind": "fibersum", "dim": 2, "fibers": [
        {"anchor": [0, 0], "dir": [1, 0], "period": 2, "vals": [3, 5]},
        {"anchor": [0, 0], "dir": [0, 1], "period": 3, "vals": [1, 1, 0]}]}
    cfg = write(tmp / "fs.json", fibers)
    phi = write(tmp / "phi.json", poly_to_obj(difference_poly((2, 0))))
    psi = write(tmp / "psi.json", poly_to_obj(difference_poly((0, 3))))
    both = write(tmp / "both.json", [poly_to_obj(difference_poly((2, 0))),
                                     poly_to_obj(difference_poly((0, 3)))])
    expanded = write(tmp / "prod.json", poly_to_obj(
        difference_poly((2, 0)) * difference_poly((0, 3))))

    out = str(tmp / "out_split")
    assert main(["--out", out, "sparse", "split", cfg, phi, psi]) == 0
    m = manifest(out)
    assert m["outputs"] == ["family_00.json", "family_01.json"]

    out = str(tmp / "out_sd")
    assert main(["--out", out, "sparse", "decompose", cfg, both]) == 0

    out = str(tmp / "out_full")
    assert main(["--out", out, "sparse", "full", cfg, expanded]) == 0
    fams = [config_from_obj(json.load(
        open(os.path.join(out, f"family_{i:02d}.json")))) for i in (0, 1)]
    by_dir = {fam.fibers[0].direction: fam.fibers[0].vals for fam in fams}
    assert by_dir == {(0, 1): (1, 1, 0), (1, 0): (3, 5)}

    horiz = write(tmp / "h.json", {"kind": "fibersum", "dim": 2, "fibers": [
        {"anchor": [0, 0], "dir": [1, 0], "period": 2, "vals": [3, 5]}]})
    out = str(tmp / "out_fib")
    assert main(["--out", out, "sparse", "fibers", horiz,
                 "--direction", "1,0"]) == 0


def test_sparse_full_inconclusive_exit_code(files):
    tmp, fx = files
    c = {"kind": "fibersum", "dim": 2, "fibers": [
        {"anchor": [0, 0], "dir": [1, 0], "period": 6,
         "vals": [1, -1, 2, -2, 3, -3]}]}
    cfg = write(tmp / "c6.json", c)
    f = write(tmp / "f6.json", poly_to_obj(
        LaurentPoly(2, {(i, 0): 1 for i in range(6)})))
    out = str(tmp / "out_inc")
    assert main(["--out", out, "--bound-search", "4",
                 "sparse", "full", cfg, f]) == 2


def test_sparseness_command(files):
    tmp, fx = files
    out = str(tmp / "out_sp")
    assert main(["--out", out, "sparseness", fx["cb"],
                 "--constant", "3", "--m-max", "3"]) == 1
    m = manifest(out)
    assert m["verdicts"]["sparse"] is False
    assert m["results"]["certificate"]["violation"] is not None


def test_tiling_commands(files):
    tmp, fx = files
    out = str(tmp / "out_ind")
    assert main(["--out", out, "tiling", "independent", fx["tiles"]]) == 0
    assert manifest(out)["verdicts"]["independent"]

    out = str(tmp / "out_ver")
    assert main(["--out", out, "tiling", "verify", fx["tiles"],
                 fx["cb"]]) == 0
    m = manifest(out)
    assert m["verdicts"]["cotiler_00"] and m["verdicts"]["cotiler_01"]

    out = str(tmp / "out_td")
    assert main(["--out", out, "--window=-8..8,-8..8", "tiling", "decompose",
                 fx["tiles"], fx["cb"]]) == 0
    m = manifest(out)
    assert m["verdicts"]["sum_matches"]

    dep = write(tmp / "dep.json", [
        {"dim": 2, "cells": [[0, 0], [1, 0]]},
        {"dim": 2, "cells": [[0, 0], [2, 0]]}])
    out = str(tmp / "out_dep")
    assert main(["--out", out, "tiling", "decompose", dep, fx["cb"]]) == 1


def test_schema_error_exit_one(files, tmp_path):
    tmp, fx = files
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "terms": [{"exp": [0,0], "coef": 0}]}')
    out = str(tmp / "out_bad")
    assert main(["--out", out, "poly", "add", str(bad), fx["f"]]) == 1


def test_determinism_byte_identical_results(files):
    tmp, fx = files
    out1, out2 = str(tmp / "d1"), str(tmp / "d2")
    for out in (out1, out2):
        assert main(["--out", out, "--window=-6..6,-6..6", "decompose",
                     fx["cb"], "--factors", fx["factors"]]) == 0
    m1, m2 = manifest(out1), manifest(out2)
    assert m1["outputs"] == m2["outputs"]
    for name in m1["outputs"]:
        with open(os.path.join(out1, name), "rb") as fh:
            b1 = fh.read()
        with open(os.path.join(out2, name), "rb") as fh:
            b2 = fh.read()
        assert b1 == b2
    # manifests agree except for the wall time
    m1.pop("wall_time_s"), m2.pop("wall_time_s")
    m1["inputs"] = m2["inputs"] = None  # same content, fixture paths differ
    assert m1 == m2


def test_grid_format_emits_text_dump(files):
    tmp, fx = files
    out = str(tmp / "out_grid")
    assert main(["--out", out, "--format", "grid", "--window=-3..3,-3..3",
                 "decompose", fx["cb"], "--factors", fx["factors"]]) == 0
    m = manifest(out)
    assert "component_00.txt" in m["outputs"]
    text = open(os.path.join(out, "component_00.txt")).read()
    assert len(text.strip().splitlines()) == 7


def test_dim_flag_validates(files):
    tmp, fx = files
    out = str(tmp / "out_dim")
    assert main(["--out", out, "--dim", "3", "act", fx["f"], fx["cb"]]) == 1
    out2 = str(tmp / "out_dim2")
    assert main(["--out", out2, "--dim", "3", "poly", "mul",
                 fx["f"], fx["g"]]) == 1


def test_manifest_records_thread_cap(files, monkeypatch):
    tmp, fx = files
    monkeypatch.setenv("PERDEC_THREADS", "4")
    out = str(tmp / "out_threads")
    assert main(["--out", out, "poly", "add", fx["f"], fx["g"]]) == 0
    assert manifest(out)["threads"] == 4
