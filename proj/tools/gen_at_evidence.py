#!/usr/bin/env python3
"""Writes models/at.pp: aircraft tracking with six radars.

Evidence is synthetic: one forward run of the same generative model with a
fixed seed. The generating trajectory's final x is recorded in the header.
"""
import sys

import numpy as np
from scipy.stats import truncnorm

SEED = 20240611
STEPS = 8
RADARS = [(-4.0, -1.0, 4.0), (0.0, 5.0, 4.0), (3.0, 0.0, 4.0),
          (-3.0, 6.0, 3.5), (5.0, 5.0, 3.5), (1.0, -4.0, 3.5)]
OBS_SD = 0.01


def simulate(rng):
    x, y = rng.normal(-1.5, 1.0), rng.normal(2.0, 1.0)
    obs, xs = [], []
    for i in range(1, STEPS + 1):
        if i > 1:
            x += rng.normal(0.0, 2.0)
            y += rng.normal(0.0, 2.0)
        row = []
        for rx, ry, r in RADARS:
            dist = np.hypot(x - rx, y - ry)
            z = truncnorm.rvs(0.0, r, loc=0.0, scale=1.0, random_state=rng)
            if dist > r:
                d = r if rng.uniform() < 0.999 else r + 0.001 * z
            else:
                d = dist + 0.1 * z
            row.append(d + rng.normal(0.0, OBS_SD))
        obs.append(row)
        xs.append((x, y))
    return obs, xs


def main(out_path):
    rng = np.random.default_rng(SEED)
    obs, xs = simulate(rng)
    norm = 1.0 / (OBS_SD * np.sqrt(2.0 * np.pi))
    L = []
    L.append("// aircraft tracking, six radars, eight time steps")
    L.append(f"// synthetic evidence: tools/gen_at_evidence.py, seed {SEED}")
    L.append(f"// generating trajectory: final x = {xs[-1][0]!r}, final y = {xs[-1][1]!r}")
    for j, (rx, ry, r) in enumerate(RADARS, 1):
        L.append(f"// radar {j}: centre ({rx}, {ry}), range {r}")
    L.append("x ~ N(-1.5, 1);")
    L.append("y ~ N(2, 1);")
    L.append("time := 0;")
    L.append(f"while (time < {STEPS}) {{")
    L.append("  time := time + 1;")
    L.append("  dx ~ N(0, 2);")
    L.append("  dy ~ N(0, 2);")
    L.append("  x := x + [time > 1] * dx;")
    L.append("  y := y + [time > 1] * dy;")
    for j, (rx, ry, r) in enumerate(RADARS, 1):
        L.append(f"  dist{j} := sqrt((x - {rx}) * (x - {rx}) + (y - {ry}) * (y - {ry}));")
        L.append(f"  miss{j} ~ B(0.999);")
        L.append(f"  z{j} ~ N_T(0, {r}, 0, 1);")
        L.append(f"  d{j} := [dist{j} > {r}] * ([miss{j} == 1] * {r} + [miss{j} == 0] * ({r} + 0.001 * z{j}))")
        L.append(f"        + [dist{j} <= {r}] * (dist{j} + 0.1 * z{j});")
    for j in range(len(RADARS)):
        terms = " + ".join(f"[time == {i + 1}] * {obs[i][j]:.6f}" for i in range(STEPS))
        L.append(f"  o{j + 1} := {terms};")
    for j in range(len(RADARS)):
        L.append(f"  score(density_ratio(N(o{j + 1}, {OBS_SD}), d{j + 1}, {norm:.15f}));")
    L.append("}")
    L.append("return x")
    with open(out_path, "w") as f:
        f.write("\n".join(L) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "models/at.pp")
