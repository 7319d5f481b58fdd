"""Smoke test for the Python bindings.

Build and run:

    cargo build -p homogeneous-py --release
    cp target/release/libhomogeneous_py.so python/homogeneous.so
    python3 python/smoke_test.py
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import homogeneous as h

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    s3 = h.Group.symmetric(3)
    assert s3.order == 6 and len(s3) == 6
    assert s3.is_normal(["(0 1 2)"]) and not s3.is_normal(["(0 1)"])

    natural = h.Action.natural(s3)
    assert natural.invariant_measure() == ["1/3", "1/3", "1/3"]
    assert natural.phi(0) is None
    probe = natural.probe("cor34")
    assert probe["status"] == "witness" and probe["alpha"]["cycles"] == "(1 2)"
    assert sorted(natural.decompose()) == [1, 2]

    regular = h.Action.regular(s3)
    assert all(regular.phi(x) is not None for x in range(6))
    assert sorted(regular.decompose()) == [1, 1, 2, 2]
    assert regular.commutant_dimension() == (6, 6)
    assert regular.probe("conjecture")["status"] == "counterexample"

    q8 = h.Group.quaternion8()
    cosets = h.Action.coset(q8, ["(0 4)(1 5)(2 6)(3 7)"])
    assert cosets.degree == 4 and not cosets.profile()["faithful"]
    assert cosets.probe("thm44")["status"] == "certified"
    assert cosets.verify("all")

    text = (ROOT / "instances" / "z12_regular.json").read_text()
    z12 = h.Action.from_json(text)
    report = z12.decomposition(seed=7)
    assert report["dims"] == [1] * 12
    assert all(row == [1] * 12 for row in report["probes"]["fixed_intersection_dims"])

    two_orbits = h.Action.natural(h.Group.from_generators(4, ["(0 1)(2 3)"]))
    assert two_orbits.invariant_measure_space_dim() == 2

    try:
        h.Group.from_generators(3, ["(0 1"])
    except ValueError as e:
        assert "(0 1" in str(e)
    else:
        raise AssertionError("bad permutation accepted")

    print(json.dumps({"module": h.__version__, "ok": True}))


if __name__ == "__main__":
    main()
