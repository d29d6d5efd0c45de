"""Smoke test for the compiled `mopalg` extension module."""

import json
from fractions import Fraction

import mopalg


def status(report):
    states = {c["status"] for c in report["certificates"]}
    for s in ("fail", "inconclusive"):
        if s in states:
            return s
    return "pass"


def main():
    w = mopalg.Weight("hermite-2x2", {"a": Fraction(2, 3)})
    assert w.size == 2

    d1 = mopalg.Op(
        "dx^2*[[1,0],[0,1]] + dx*[[-2*x,2*a],[0,-2*x]] + [[-2,0],[0,0]]",
        params={"a": "2/3"},
    )
    m = w.membership(d1)
    assert m["accepted"] and m["certified"], m
    assert m["eigenvalue"] == "[[-2*n-2,0],[0,-2*n]]", m["eigenvalue"]

    bad = w.membership(mopalg.Op("dx*I"))
    assert not bad["accepted"] and bad["n"] == 1, bad

    assert w.dagger(w.dagger(d1)) == d1
    assert (d1 * d1).order == 4
    op = mopalg.Op("dx*x", size=1)
    assert mopalg.Op(str(op), size=1) == op

    scalar = mopalg.Weight("laguerre", {"b": 1})
    assert scalar.mops(2)[1] == "[[x-2]]", scalar.mops(2)

    assert mopalg.exceptional_degrees("dx^2 - dx*(2*x + 8*x/(1+2*x^2))", 10) == [1, 2]

    text = mopalg.reproduce("hermite", {"a": "2/3"}, seed=7, specializations=1)
    assert text == mopalg.reproduce("hermite", {"a": "2/3"}, seed=7, specializations=1)
    report = json.loads(text)
    assert status(report) == "pass", [c for c in report["certificates"] if c["status"] != "pass"]
    assert "s1.D1.lambda" in report["values"] and "s1.U" in report["values"]

    try:
        mopalg.Weight("hermite-2x2", {"a": "0.5"})
    except ValueError:
        pass
    else:
        raise AssertionError("decimal parameter accepted")

    try:
        mopalg.Op("dx*(")
    except ValueError as e:
        assert "column" in str(e)
    else:
        raise AssertionError("parse error not raised")

    print("smoke test passed")


if __name__ == "__main__":
    main()
