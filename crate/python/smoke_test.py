"""Smoke test for the pylotus extension.

Build with `cargo build -p pylotus --release`, then run
`python3 python/smoke_test.py`; the script finds the library under target/.
Pass an explicit path to the shared library as the first argument to override.
"""

import importlib.util
import json
import os
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load():
    if len(sys.argv) > 1:
        lib = pathlib.Path(sys.argv[1])
    else:
        candidates = [ROOT / "target" / p / "libpylotus.so" for p in ("release", "debug")]
        candidates = [c for c in candidates if c.exists()]
        if not candidates:
            sys.exit("libpylotus.so not found; run `cargo build -p pylotus` first")
        lib = max(candidates, key=lambda c: c.stat().st_mtime)
    # the import system wants the module name as the file stem
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "pylotus.so")
    spec = importlib.util.spec_from_file_location("pylotus", tmp / "pylotus.so")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    pl = load()
    fixtures = ROOT / "fixtures"

    cusp = pl.Lotus.from_steps((fixtures / "cusp.steps").read_text())
    assert len(cusp) == 3
    assert sorted(w for _, w in cusp.dual_graph_weights()) == [-3, -2, -1]
    assert sorted((l, o) for _, l, o in cusp.lambda_ord()) == [(2, 1), (3, 1), (5, 2)]
    assert cusp.semigroup("A") == ([2, 3], True)
    assert pl.Lotus.from_json(cusp.to_json()).is_isomorphic(cusp)
    assert "graph dual" in cusp.draw("dot", "dual")
    assert cusp.draw("svg").count("<polygon") == 3

    three = pl.Lotus.from_steps((fixtures / "three-branch.steps").read_text())
    assert three.intersection("A1", "A2") == 132
    assert three.delta() == 339 and three.milnor() == 676
    tree = three.tree()
    assert tree.tripod("A3", "A1") == 21
    assert tree.contact("A1", "A2") == "11/6"
    assert tree.trunk_decomposition_count() == 2
    assert tree.lotus(0).is_isomorphic(three)

    series = [("A1", "x^(3/2) + x^(13/6)"), ("A2", "x^(3/2) + x^(7/3) + x^(29/12)")]
    assert pl.EwTree.from_series(series).tripod("A1", "A2") == 132
    assert pl.intersection(series[0][1], series[1][1]) == 132
    assert pl.characteristic_exponents(series[1][1]) == ["3/2", "7/3", "29/12"]
    assert pl.semigroup_from_exponents(["3/2", "13/6"]) == [6, 9, 22]
    assert pl.continued_fraction("7/5") == ["1", "2", "2"]
    assert pl.wedge("4/3", "5/3") == "3/2"
    assert len(pl.Lotus.newton(["4/3", "5/3"])) == 5

    report = json.loads(pl.invariants_json((fixtures / "char3.json").read_text(), check=True))
    assert report["intersections"][0]["tripod"] == 27
    assert all(c["ok"] for c in report["checks"])
    assert "characteristic 2" in pl.invariants_text((fixtures / "char2.series").read_text())

    try:
        pl.Lotus.from_steps("lotus L L1\npetal L X\n")
    except ValueError:
        pass
    else:
        raise AssertionError("bad step script was accepted")

    print("pylotus smoke test passed")


if __name__ == "__main__":
    main()
