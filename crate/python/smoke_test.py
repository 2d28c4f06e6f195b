#!/usr/bin/env python3
"""Smoke test for the rlctkit_py extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p rlctkit-py` (debug or release), links it into a temp
directory under the importable name, and exercises the main operations.
"""

import json
import pathlib
import shutil
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_cdylib() -> pathlib.Path:
    names = ["librlctkit_py.so", "rlctkit_py.dll", "librlctkit_py.dylib"]
    for profile in ("release", "debug"):
        for name in names:
            cand = ROOT / "target" / profile / name
            if cand.exists():
                return cand
    raise SystemExit("build the extension first: cargo build -p rlctkit-py")


def main() -> None:
    lib = locate_cdylib()
    tmp = tempfile.mkdtemp(prefix="rlctkit_py_")
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(lib, pathlib.Path(tmp) / f"rlctkit_py{suffix}")
    sys.path.insert(0, tmp)
    import rlctkit_py as rk

    checks = 0

    def ok(cond, label):
        nonlocal checks
        if not cond:
            raise SystemExit(f"FAIL: {label}")
        checks += 1
        print(f"ok: {label}")

    # polynomial parsing round-trip
    printed = rk.parse_polynomial("(x+y)^2 + y^4", ["x", "y"])
    ok(rk.parse_polynomial(printed, ["x", "y"]) == printed, "parse/print fixed point")

    # Newton polyhedron of <x, y>
    p = json.loads(rk.newton(json.dumps({"vars": ["x", "y"], "gens": ["x", "y"]})))
    ok(sorted(p["generators"]) == [[0, 1], [1, 0]], "polyhedron generators")
    ok(len(p["facets"]) == 3, "polyhedron facets")

    # RLCT bounds: exact linear case and the inexact degenerate fixture
    pair = json.loads(rk.rlct_newton_bound(json.dumps({"vars": ["x", "y"], "gens": ["x", "y"]})))
    ok(pair == {"lambda": "2", "theta": 1, "exact": True}, "rlct of <x, y>")
    pair = json.loads(
        rk.rlct_newton_bound(json.dumps({"vars": ["x", "y"], "gens": ["(x+y)^2 + y^4"]}))
    )
    ok(pair["lambda"] == "1" and not pair["exact"], "degenerate fixture is an inexact bound")

    # monomial formula and chain regions
    ok(rk.rlct_monomial([1, 2], [0, 0]) == ("1/2", 1), "monomial rlct")
    ok(rk.rlct_chain([1, 2], [0, 1]) == ("2/3", 1), "chain 0<=x<=y")
    ok(rk.rlct_chain([1, 2], [1, 0]) == ("1/2", 1), "chain 0<=y<=x")

    # nondegeneracy witness for x + y
    verdict = json.loads(rk.nondegenerate(json.dumps({"vars": ["x", "y"], "gens": ["x+y"]})))
    ok(verdict["status"] == "degenerate", "x+y is sos-degenerate")
    w = verdict["witness"]
    ok(abs(w[0] + w[1]) < 1e-6 * (1 + abs(w[0])), "witness sits on x = -y")

    # asymptotics of the xy box integral
    asym = json.loads(rk.asympt([1, 1]))
    coeffs = {t["i"]: t["c"] for t in asym["laplace"]}
    ok(abs(coeffs[2] - 1.0) < 1e-12, "leading Laplace coefficient")
    ok(abs(coeffs[1] - 0.5772156649015329) < 1e-9, "Euler-gamma subleading coefficient")

    # the 132-patient case study end to end
    report = json.loads(rk.mixture_score([43, 16, 3, 6, 11, 10, 9, 18, 16]))
    ok(report["stratum"] == "S2_generic" and report["lambda"] == "7/2", "case-study stratum")
    ok(abs(report["bic"] - (-280.7992160)) < 1e-3, "BIC score")
    ok(abs(report["rlct"] - (-275.9164140)) < 1e-3, "RLCT score")
    exact = rk.egg132_reference()
    ok(abs(report["rlct"] - exact) < abs(report["bic"] - exact), "RLCT closer to exact")

    model = json.loads(rk.builtin_model())
    ok(model["k"] == 9 and len(model["vars"]) == 9, "builtin model shape")

    print(f"PASS: {checks} checks")


if __name__ == "__main__":
    main()
