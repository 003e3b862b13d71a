"""Smoke test for the quantum6j_py extension.

Build with `maturin develop -m crates/py/Cargo.toml`, or copy
target/release/libquantum6j_py.so next to this file as quantum6j_py.so.
"""
import cmath
import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import quantum6j_py as q


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * (1 + abs(b))


ctx = q.RootContext(3)
assert ctx.n == 3
assert close(ctx.xi(), cmath.exp(1j * math.pi / 3))
assert close(ctx.qint(2), 1.0)  # [2] = 2 cos(pi/3)

# theta graph and tetrahedron through the diagram machinery
assert close(q.invariant("theta", 3), 1.0)
colors = {"a": 1.13, "b": 0.23, "c": 0.70, "d": 0.34, "e": 0.36, "f": 0.57}
t = q.invariant("tetrahedron", 3)
t_face = q.invariant("tetrahedron", 3, face_model=True, cut_edge="f")
assert close(t, t_face), (t, t_face)
c = {k: complex(v) for k, v in colors.items()}
assert close(t, q.tet(3, [c["a"], c["b"], c["e"], c["d"], c["c"], c["f"]]))

# figure-eight Kashaev value at N = 3
assert abs(q.kashaev_limit("figure-eight", 3) - 13) < 1e-5

# regular ideal tetrahedron
v = q.ideal_volume(math.pi / 3, math.pi / 3, math.pi / 3)
assert abs(v - 1.0149416064096536) < 1e-12

try:
    q.RootContext(1)
    raise SystemExit("expected an error for n = 1")
except ValueError as e:
    assert str(e).startswith("INVALID_ORDER"), e

rep = json.loads(q.run_verify("qarith", [2, 3], 1, 2, 1e-8))
assert rep["failed"] == 0 and rep["passed"] > 0

print("smoke test ok")
