"""Independent reference computations used by the tests.

Nothing here calls into the closed-form Dubins solutions: planar paths are
found by shooting over the first arc angle of every word and refining each
sign change of the terminal residual with Brent's method.
"""

import math

import numpy as np
from scipy.optimize import brentq

TWO_PI = 2.0 * math.pi


def _turn_sign(letter):
    return 1.0 if letter == "L" else -1.0


def _after_arc(x, y, h, sign, r, t):
    h1 = h + sign * t
    return x + sign * r * (np.sin(h1) - np.sin(h)), y - sign * r * (np.cos(h1) - np.cos(h)), h1


def _circle_center(x, y, h, sign, r):
    return x - sign * r * math.sin(h), y + sign * r * math.cos(h)


def _roots(fun, grid):
    vals = fun(grid)
    out = [float(grid[i]) for i in range(len(grid)) if vals[i] == 0.0]
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0.0:
            out.append(brentq(lambda t: float(fun(np.array([t]))[0]), grid[i], grid[i + 1], xtol=1e-14, rtol=1e-14))
    return out


def _csc(word, start, goal, r, grid):
    x0, y0, h0 = start
    x1, y1, h1 = goal
    s1, s2 = _turn_sign(word[0]), _turn_sign(word[2])
    cgx, cgy = _circle_center(x1, y1, h1, s2, r)

    def residual(t):
        px, py, h = _after_arc(x0, y0, h0, s1, r, t)
        return np.cos(h) * (cgy - py) - np.sin(h) * (cgx - px) - s2 * r

    best = math.inf
    for t in _roots(residual, grid):
        px, py, h = _after_arc(x0, y0, h0, s1, r, np.array([t]))
        px, py, h = float(px[0]), float(py[0]), float(h[0])
        p = math.cos(h) * (cgx - px) + math.sin(h) * (cgy - py)
        if p < -1e-9:
            continue
        q = (s2 * (h1 - h)) % TWO_PI
        best = min(best, r * (t + q) + max(p, 0.0))
    return best


def _ccc(word, start, goal, r, grid):
    x0, y0, h0 = start
    x1, y1, h1 = goal
    s1, s2 = _turn_sign(word[0]), _turn_sign(word[1])
    c1x, c1y = _circle_center(x0, y0, h0, s1, r)
    cgx, cgy = _circle_center(x1, y1, h1, s1, r)

    def residual(t):
        px, py, _ = _after_arc(x0, y0, h0, s1, r, t)
        return np.hypot(2 * px - c1x - cgx, 2 * py - c1y - cgy) - 2 * r

    best = math.inf
    for t in _roots(residual, grid):
        px, py, h = _after_arc(x0, y0, h0, s1, r, np.array([t]))
        px, py, h = float(px[0]), float(py[0]), float(h[0])
        c2x, c2y = 2 * px - c1x, 2 * py - c1y
        qx, qy = 0.5 * (c2x + cgx), 0.5 * (c2y + cgy)
        hq = math.atan2(qy - c2y, qx - c2x) + s2 * 0.5 * math.pi
        p = (s2 * (hq - h)) % TWO_PI
        q = (s1 * (h1 - hq)) % TWO_PI
        best = min(best, r * (t + p + q))
    return best


def brute_force_dubins(start, goal, r, samples=4000):
    """Shortest planar Dubins length by shooting over every word's first arc.

    ``start`` and ``goal`` are ``(x, y, heading)`` tuples.
    """
    if math.hypot(goal[0] - start[0], goal[1] - start[1]) < 1e-12 and abs(
        (goal[2] - start[2] + math.pi) % TWO_PI - math.pi
    ) < 1e-12:
        return 0.0
    grid = np.linspace(0.0, TWO_PI, samples)
    best = math.inf
    for word in ("LSL", "RSR", "LSR", "RSL"):
        best = min(best, _csc(word, start, goal, r, grid))
    for word in ("RLR", "LRL"):
        best = min(best, _ccc(word, start, goal, r, grid))
    return best


def integrate_cost_reference(path, field, model, dl, objective="energy"):
    """Scalar loop version of the Euler-forward cost integration."""
    from windplan.dubins import sample_path
    from windplan.energy import power
    from windplan.kinematics import solve_wind_triangle

    total = path.length
    if objective == "distance":
        return total
    time = energy = 0.0
    s = 0.0
    while s < total - 1e-12:
        step = min(dl, total - s)
        smp = path._eval(np.array([s]))
        pos, tan = smp[1][0], smp[3][0]
        sol = solve_wind_triangle(tan, field.sample(pos), model)
        if not sol.feasible:
            return math.inf
        dt = step / sol.ground_speed
        time += dt
        energy += power(sol.gamma_air, model) * dt
        s += dl
    return time if objective == "time" else energy
