#!/usr/bin/env python3
"""Smoke test for the solvgroup_py extension module.

Build the module first:

    cargo build -p solvgroup-py

then run this script from anywhere:

    python3 python/smoke_test.py

The script locates the built cdylib under target/, exposes it as an
importable module and exercises the bindings end to end, including a
round trip through the independent report checker.
"""

import json
import os
import shutil
import sys
import tempfile


def import_module():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    candidates = [
        os.path.join(root, "target", profile, "libsolvgroup_py.so")
        for profile in ("release", "debug")
    ]
    built = next((p for p in candidates if os.path.exists(p)), None)
    if built is None:
        sys.exit("libsolvgroup_py.so not found; run `cargo build -p solvgroup-py` first")
    stage = tempfile.mkdtemp(prefix="solvgroup-py-")
    shutil.copy(built, os.path.join(stage, "solvgroup_py.so"))
    sys.path.insert(0, stage)
    import solvgroup_py

    return solvgroup_py


def main():
    sg = import_module()

    # families and set calculus
    ball = sg.heisenberg_ball(1)
    assert len(ball) == 7, len(ball)
    assert ball.dim() == 3
    assert ball.contains_identity() and ball.is_symmetric()
    square = ball.product(ball)
    assert len(square) == 29, len(square)
    assert len(ball.power(2)) == 29

    # JSON round trip
    clone = sg.GroupSet.from_json(ball.to_json())
    assert clone == ball
    assert len(sg.diag_progression("2", 3)) == 7
    assert len(sg.random_upper_triangular(3, 10, seed=42)) == 10

    # growth statistics
    stats = json.loads(sg.stats(ball, max_power=3))
    assert stats["sizes"] == [7, 29, 83], stats["sizes"]
    assert stats["doubling"] == {"num": "29", "den": "7"}

    # certificates round-trip through the independent checker
    report = sg.certify(ball)
    checks = sg.verify(report)
    assert checks and all(status != "fail" for _, status, _ in checks), checks

    # tampering is caught
    broken = json.loads(report)
    broken["payload"]["a_square"]["elements"].pop()
    bad_checks = sg.verify(json.dumps(broken))
    assert any(status == "fail" for _, status, _ in bad_checks), bad_checks

    # nilpotency: the radius-1 ball generates a step-2 group
    nil = json.loads(sg.nilstep(ball, cutoff=3))
    assert nil["payload"]["verdict"]["result"] == {"kind": "step", "step": 2}
    assert all(s != "fail" for _, s, _ in sg.verify(json.dumps(nil)))

    # decomposition: the ball already sits in a coset of a nilpotent group
    dec = json.loads(sg.decompose_set(ball))
    rep = dec["payload"]["report"]
    assert rep["density"] == {"num": "1", "den": "1"}
    assert len(rep["a_prime"]["elements"]) == 7
    assert all(s != "fail" for _, s, _ in sg.verify(json.dumps(dec)))

    # error reporting crosses the boundary as ValueError
    try:
        sg.unitriangular_ball(3, 9, cap=100)
    except ValueError as e:
        assert "cap" in str(e) or "budget" in str(e), e
    else:
        sys.exit("growth cap violation was not raised")

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
