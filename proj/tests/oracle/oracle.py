"""Independent reference values for the unit tests (scipy rotations, numpy).

Run: python3 tests/oracle/oracle.py
Values printed here are frozen into tests/*.cpp.
"""
import numpy as np
from scipy.spatial.transform import Rotation as R


def quat(r):
    x, y, z, w = r.as_quat()
    q = np.array([w, x, y, z])
    return q if q[0] >= 0 else -q


def show(name, v):
    print(f"{name}: " + ", ".join(repr(float(c)) for c in np.ravel(v)))


z90 = R.from_rotvec([0, 0, np.pi / 2])
show("compose z90 z90", quat(z90 * z90))
show("inverse z90", quat(z90.inv()))
show("rotate z90 (1,0,0)", z90.apply([1, 0, 0]))
show("rotate x180 (0,1,0)", R.from_rotvec([np.pi, 0, 0]).apply([0, 1, 0]))
conj = z90 * R.from_rotvec([np.radians(30), 0, 0]) * z90.inv()
show("conjugate z90 x30 rotvec", conj.as_rotvec())
show("slerp id z90 0.5", quat(R.from_rotvec([0, 0, np.pi / 4])))
show("pose_dist (0,0,0)-(3,4,0)", np.linalg.norm([3, 4, 0]))
show("pose_dist id z90", z90.magnitude())
show("screen dv (1,0,0) qref z90", z90.inv().apply([1, 0, 0]))

# Gains.
show("deadband 0.1 at 0.3", (0.3 - 0.1) / 0.3)
show("dist a1 b2 c2 at 0.5", 1 + 2 * 0.5 ** 2)
show("speed a1 b1 c1 0.02/0.01", 1 + 1 * (0.02 / 0.01) ** 1)

# Clutch cycle, absolute k=1, d=0.1 along x.
d = 0.1
obj = np.zeros(3)
pc0, pd0 = np.zeros(3), obj.copy()
obj = pd0 + (np.array([d, 0, 0]) - pc0)          # engaged move +d
dev = np.array([d, 0, 0]) - np.array([d, 0, 0])  # disengaged move -d
pc0, pd0 = dev.copy(), obj.copy()
obj = pd0 + (dev + np.array([d, 0, 0]) - pc0)    # re-engaged move +d
show("clutch cycle object", obj)

# Relative k=2, two steps of 0.1 along x.
show("relative k2", 2 * 0.1 + 2 * 0.1)
# Rate k=1, offset 0.1 held for 5 ticks.
show("rate 5 ticks", 5 * 0.1)
# Incremental k=3 on 10 deg about x.
show("k3 of x10 rotvec", (R.from_rotvec([np.radians(10), 0, 0]) ** 3).as_rotvec()
     if hasattr(R, "__pow__") else np.array([np.radians(30), 0, 0]))

# Generator: single axis rotation about z, 90 deg in 9 steps.
for i in (1, 9):
    show(f"single_axis_rotation step {i}", quat(R.from_rotvec([0, 0, np.radians(10 * i)])))

# Golden run: line 4 steps to (1,0,0), absolute k=1 allocentric, identity start.
print("golden absolute line: object p_x =", [0.25 * i for i in range(5)])
