"""Dubins car and Dubins airplane paths.

Planar paths use the closed-form solutions of the six Dubins words, with the
long-distance set classification narrowing the candidate words. Altitude is
handled with the non-optimal airplane construction: when the planar path is too
short to reach the goal altitude at the maximum flight path angle, extra turning
(a helix) is flown on the start circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from windplan.kinematics import VehicleModel

TWO_PI = 2.0 * math.pi
WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")

# full-circle residues below this are rounding noise from the closed forms
_ARC_SNAP = 1e-10


def wrap_2pi(angle: float) -> float:
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:
        a = 0.0
    return a


def wrap_pi(angle: float) -> float:
    a = wrap_2pi(angle + math.pi) - math.pi
    return a


def _arc(angle: float) -> float:
    a = wrap_2pi(angle)
    if a > TWO_PI - _ARC_SNAP:
        a = 0.0
    return a


@dataclass(frozen=True)
class State:
    """Position in metres and ground-relative bearing in radians, normalised to ``[0, 2*pi)``."""

    x: float
    y: float
    z: float = 0.0
    heading: float = 0.0

    def __post_init__(self):
        for name in ("x", "y", "z", "heading"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"State.{name} must be finite")
        object.__setattr__(self, "heading", wrap_2pi(float(self.heading)))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.z, self.heading)


# --------------------------------------------------------------------------
# planar words, normalised to unit turn radius


def _lsl(alpha, beta, d, sa, sb, ca, cb, cab):
    p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb)
    if p2 < 0.0:
        return None
    tmp = math.atan2(cb - ca, d + sa - sb)
    return _arc(tmp - alpha), math.sqrt(p2), _arc(beta - tmp)


def _rsr(alpha, beta, d, sa, sb, ca, cb, cab):
    p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa)
    if p2 < 0.0:
        return None
    tmp = math.atan2(ca - cb, d - sa + sb)
    return _arc(alpha - tmp), math.sqrt(p2), _arc(tmp - beta)


def _lsr(alpha, beta, d, sa, sb, ca, cb, cab):
    p2 = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb)
    if p2 < 0.0:
        return None
    p = math.sqrt(p2)
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return _arc(tmp - alpha), p, _arc(tmp - beta)


def _rsl(alpha, beta, d, sa, sb, ca, cb, cab):
    p2 = d * d - 2.0 + 2.0 * cab - 2.0 * d * (sa + sb)
    if p2 < 0.0:
        return None
    p = math.sqrt(p2)
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return _arc(alpha - tmp), p, _arc(beta - tmp)


def _rlr(alpha, beta, d, sa, sb, ca, cb, cab):
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = _arc(TWO_PI - math.acos(tmp))
    t = _arc(alpha - math.atan2(ca - cb, d - sa + sb) + 0.5 * p)
    return t, p, _arc(alpha - beta - t + p)


def _lrl(alpha, beta, d, sa, sb, ca, cb, cab):
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = _arc(TWO_PI - math.acos(tmp))
    t = _arc(-alpha - math.atan2(ca - cb, d + sa - sb) + 0.5 * p)
    return t, p, _arc(beta - alpha - t + p)


_WORD_FN = {"LSL": _lsl, "RSR": _rsr, "LSR": _lsr, "RSL": _rsl, "RLR": _rlr, "LRL": _lrl}

# Candidate words when no CCC word exists, indexed by the quadrants of the
# normalised start and goal headings.
_LONG_CANDIDATES = {
    (0, 0): ("RSL",),
    (0, 1): ("RSL", "RSR", "LSR"),
    (0, 2): ("RSR", "LSR"),
    (0, 3): ("RSR", "RSL", "LSR"),
    (1, 0): ("RSL", "LSL", "LSR"),
    (1, 1): ("RSL", "LSL", "RSR"),
    (1, 2): ("RSR",),
    (1, 3): ("RSR", "RSL"),
    (2, 0): ("LSL", "LSR"),
    (2, 1): ("LSL",),
    (2, 2): ("LSR", "LSL", "RSR"),
    (2, 3): ("LSR", "RSR", "RSL"),
    (3, 0): ("LSL", "RSL", "LSR"),
    (3, 1): ("LSL", "RSL"),
    (3, 2): ("LSR", "LSL", "RSL"),
    (3, 3): ("LSR",),
}
_QUADRANT_EPS = 1e-6


def _near_quadrant_edge(angle: float) -> bool:
    r = math.fmod(angle, 0.5 * math.pi)
    return r < _QUADRANT_EPS or 0.5 * math.pi - r < _QUADRANT_EPS


def _ccc_possible(d, sa, sb, cab) -> bool:
    # both CCC words need their outer circles within four radii
    base = 6.0 - d * d + 2.0 * cab
    return abs(base + 2.0 * d * (sa - sb)) <= 8.0 + _QUADRANT_EPS or abs(base + 2.0 * d * (sb - sa)) <= 8.0 + _QUADRANT_EPS


def candidate_words(alpha: float, beta: float, d: float) -> tuple[str, ...]:
    """Words that can be optimal for normalised headings ``alpha``, ``beta`` and distance ``d``.

    Set classification only applies when neither CCC word exists; headings
    within 1e-6 rad of a quadrant edge fall back to all six words.
    """
    sa, sb = math.sin(alpha), math.sin(beta)
    if _ccc_possible(d, sa, sb, math.cos(alpha - beta)) or _near_quadrant_edge(alpha) or _near_quadrant_edge(beta):
        return WORDS
    qa = min(3, int(alpha / (0.5 * math.pi)))
    qb = min(3, int(beta / (0.5 * math.pi)))
    return _LONG_CANDIDATES[(qa, qb)]


def _normalised(x0, y0, h0, x1, y1, h1, radius):
    dx, dy = x1 - x0, y1 - y0
    d = math.hypot(dx, dy) / radius
    theta = math.atan2(dy, dx) if d > 0.0 else 0.0
    return wrap_2pi(h0 - theta), wrap_2pi(h1 - theta), d


def _solve_words(alpha, beta, d, words):
    sa, sb, ca, cb = math.sin(alpha), math.sin(beta), math.cos(alpha), math.cos(beta)
    cab = math.cos(alpha - beta)
    best = None
    for w in words:
        params = _WORD_FN[w](alpha, beta, d, sa, sb, ca, cb, cab)
        if params is None:
            continue
        length = params[0] + params[1] + params[2]
        if best is None or length < best[0]:
            best = (length, w, params)
    return best


@dataclass(frozen=True)
class PlanarDubinsPath:
    """Shortest planar path: word class and the three segment lengths in metres."""

    word: str
    lengths: tuple[float, float, float]
    radius: float

    @property
    def length(self) -> float:
        return sum(self.lengths)


def _planar(x0, y0, h0, x1, y1, h1, radius, classify=True) -> PlanarDubinsPath:
    if abs(x1 - x0) < 1e-12 and abs(y1 - y0) < 1e-12 and abs(wrap_pi(h1 - h0)) < 1e-12:
        return PlanarDubinsPath("LSL", (0.0, 0.0, 0.0), radius)
    alpha, beta, d = _normalised(x0, y0, h0, x1, y1, h1, radius)
    words = candidate_words(alpha, beta, d) if classify else WORDS
    best = _solve_words(alpha, beta, d, words)
    if best is None:
        best = _solve_words(alpha, beta, d, WORDS)
    _, word, (t, p, q) = best
    return PlanarDubinsPath(word, (t * radius, p * radius, q * radius), radius)


def dubins_2d_shortest(start: State, goal: State, turn_radius: float, classify: bool = True) -> PlanarDubinsPath:
    """Shortest planar Dubins path between the horizontal projections of two states."""
    if not turn_radius > 0.0:
        raise ValueError("turn_radius must be positive")
    return _planar(start.x, start.y, start.heading, goal.x, goal.y, goal.heading, turn_radius, classify)


# --------------------------------------------------------------------------
# airplane paths


def _advance(x, y, h, kind, length, radius):
    """Planar endpoint after flying ``length`` metres of segment ``kind``."""
    if kind == "S":
        return x + length * math.cos(h), y + length * math.sin(h), h
    k = 1.0 / radius if kind == "L" else -1.0 / radius
    h1 = h + k * length
    return x + (math.sin(h1) - math.sin(h)) / k, y - (math.cos(h1) - math.cos(h)) / k, wrap_2pi(h1)


@dataclass(frozen=True)
class Segment:
    kind: str  # "L", "R" or "S"
    length: float  # horizontal length in metres
    curvature: float  # signed horizontal curvature, positive to the left
    gamma: float
    start: State

    @property
    def length_3d(self) -> float:
        return self.length / math.cos(self.gamma)


@dataclass(frozen=True)
class PathSample:
    s: float
    state: State
    tangent: tuple[float, float, float]
    curvature: float


@dataclass(frozen=True)
class DubinsAirplanePath:
    """Piecewise arc/straight path flown at one ground-relative flight path angle."""

    start: State
    segments: tuple[Segment, ...]
    gamma: float
    word: str
    helix_turns: int = 0
    extra_angle: float = 0.0
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lengths = [seg.length_3d for seg in self.segments]
        object.__setattr__(self, "_offsets", np.concatenate([[0.0], np.cumsum(lengths)]))

    @property
    def length(self) -> float:
        """Total 3D arc length."""
        return float(self._offsets[-1])

    @property
    def horizontal_length(self) -> float:
        return sum(seg.length for seg in self.segments)

    def end_state(self) -> State:
        if not self.segments:
            return self.start
        seg = self.segments[-1]
        x, y, h = _advance(seg.start.x, seg.start.y, seg.start.heading, seg.kind, seg.length, 1.0 / abs(seg.curvature) if seg.curvature else 1.0)
        return State(x, y, seg.start.z + seg.length * math.tan(self.gamma), h)

    def sample_arrays(self, ds: float, include_end: bool = True):
        """Sample the path at ``s = 0, ds, 2 ds, ...`` (and exactly at ``S`` if ``include_end``).

        Without ``include_end`` only the starts of the ``ds`` pieces are
        returned, so a zero-length path yields no samples. Returns
        ``(s, positions, headings, tangents, curvatures)`` as numpy arrays.
        """
        if not ds > 0.0:
            raise ValueError("ds must be positive")
        total = self.length
        eps = 1e-9 * max(1.0, total)
        s = np.arange(int(math.floor(total / ds)) + 1, dtype=float) * ds
        s = s[s < total - eps]
        if include_end:
            s = np.append(s, total)
        return self._eval(s)

    def _eval(self, s: np.ndarray):
        s = np.asarray(s, dtype=float)
        nseg = len(self.segments)
        if nseg == 0:
            zeros = np.zeros_like(s)
            pos = np.tile([self.start.x, self.start.y, self.start.z], (len(s), 1))
            head = np.full_like(s, self.start.heading)
            tan = np.column_stack([np.cos(head), np.sin(head), zeros])
            return s, pos, head, tan, zeros
        idx = np.clip(np.searchsorted(self._offsets, s, side="right") - 1, 0, nseg - 1)
        cg, sg = math.cos(self.gamma), math.sin(self.gamma)
        local = (s - self._offsets[idx]) * cg

        x0 = np.array([seg.start.x for seg in self.segments])[idx]
        y0 = np.array([seg.start.y for seg in self.segments])[idx]
        z0 = np.array([seg.start.z for seg in self.segments])[idx]
        h0 = np.array([seg.start.heading for seg in self.segments])[idx]
        kappa = np.array([seg.curvature for seg in self.segments])[idx]

        heading = h0 + kappa * local
        turning = kappa != 0.0
        safe_k = np.where(turning, kappa, 1.0)
        x = np.where(turning, x0 + (np.sin(heading) - np.sin(h0)) / safe_k, x0 + local * np.cos(h0))
        y = np.where(turning, y0 - (np.cos(heading) - np.cos(h0)) / safe_k, y0 + local * np.sin(h0))
        z = z0 + local * math.tan(self.gamma)
        heading = np.mod(heading, TWO_PI)
        tangents = np.column_stack([cg * np.cos(heading), cg * np.sin(heading), np.full_like(heading, sg)])
        return s, np.column_stack([x, y, z]), heading, tangents, kappa


def sample_path(path: DubinsAirplanePath, ds: float) -> list[PathSample]:
    """Samples at ``0, ds, 2 ds, ...`` with the last one exactly at the path end."""
    s, pos, head, tan, kappa = path.sample_arrays(ds)
    return [
        PathSample(
            float(s[i]),
            State(float(pos[i, 0]), float(pos[i, 1]), float(pos[i, 2]), float(head[i])),
            (float(tan[i, 0]), float(tan[i, 1]), float(tan[i, 2])),
            float(kappa[i]),
        )
        for i in range(len(s))
    ]


def _build(start: State, planar_segments, gamma, radius, word, helix_turns=0, extra_angle=0.0):
    segments = []
    x, y, z, h = start.x, start.y, start.z, start.heading
    tan_g = math.tan(gamma)
    for kind, length in planar_segments:
        if length <= 0.0:
            continue
        curvature = 0.0 if kind == "S" else (1.0 / radius if kind == "L" else -1.0 / radius)
        segments.append(Segment(kind, length, curvature, gamma, State(x, y, z, h)))
        x, y, h = _advance(x, y, h, kind, length, radius)
        z += length * tan_g
    return DubinsAirplanePath(start, tuple(segments), gamma, word, helix_turns, extra_angle)


def _extended_length(start: State, goal: State, radius: float, direction: str, phi: float, word: str | None = None):
    """Planar length of ``phi`` extra turning on the start circle followed by a planar path.

    With ``word`` unset the tail is the shortest path; otherwise the tail is
    restricted to that word and ``(nan, None)`` signals it does not exist.
    """
    x, y, h = _advance(start.x, start.y, start.heading, direction, radius * phi, radius)
    if word is None:
        tail = _planar(x, y, h, goal.x, goal.y, goal.heading, radius)
        return radius * phi + tail.length, tail
    alpha, beta, d = _normalised(x, y, h, goal.x, goal.y, goal.heading, radius)
    best = _solve_words(alpha, beta, d, (word,))
    if best is None:
        return math.nan, None
    _, _, (t, p, q) = best
    tail = PlanarDubinsPath(word, (t * radius, p * radius, q * radius), radius)
    return radius * phi + tail.length, tail


def dubins_airplane_connect(start: State, goal: State, model: VehicleModel, bisect_tol: float = 1e-9) -> DubinsAirplanePath:
    """Connect two states with a (non-optimal) Dubins airplane path.

    Low altitude differences are flown along the planar path at the constant
    angle ``atan(dz / L)``. Otherwise the start turn is extended by whole helix
    turns plus an angle found by bisection, so that the path climbs or descends
    at exactly the maximum ground-relative flight path angle.
    """
    radius = model.turn_radius
    planar = _planar(start.x, start.y, start.heading, goal.x, goal.y, goal.heading, radius)
    dz = goal.z - start.z
    length_2d = planar.length
    tan_max = math.tan(model.gamma_ground_max)

    if abs(dz) <= length_2d * tan_max:
        gamma = math.atan2(dz, length_2d) if length_2d > 0.0 else 0.0
        return _build(start, zip(planar.word, planar.lengths), gamma, radius, planar.word)

    target = abs(dz) / tan_max
    circle = TWO_PI * radius
    turns = int(math.floor((target - length_2d) / circle))
    residual_target = target - turns * circle

    first = planar.word[0]
    other = "R" if first == "L" else "L"
    overshoots = []
    found = None
    for direction in (first, other):
        found = _solve_extra_turn(start, goal, radius, direction, residual_target, planar, bisect_tol, overshoots)
        if found is not None:
            break
    if found is None:
        # no exact root: take the least overshoot and fly a shallower angle
        overshoots.append((planar.length + circle - residual_target, first, 0.0, planar, 1))
        _, direction, phi, tail, extra = min(overshoots, key=lambda c: c[0])
        turns += extra
    else:
        direction, phi, tail = found

    extension = radius * (turns * TWO_PI + phi)
    gamma = math.atan2(dz, extension + tail.length)
    segments = [(direction, extension)] + list(zip(tail.word, tail.lengths))
    return _build(start, segments, gamma, radius, tail.word, turns, phi)



def _solve_extra_turn(start, goal, radius, direction, target, planar, tol, overshoots, grid=16):
    """Find ``phi`` in ``[0, 2 pi)`` whose extended length equals ``target``.

    The shortest planar distance jumps where the optimal word changes, so a
    bracket may close on a discontinuity. Each word's own length is tried
    next; any root yields the same total length. Brackets that close on a jump
    are appended to ``overshoots`` as ``(excess, direction, phi, tail, 0)``.
    """
    if abs(planar.length - target) <= 1e-9:
        return direction, 0.0, planar
    for word in (None,) + WORDS:
        found = _bracket_root(start, goal, radius, direction, target, word, tol, grid, overshoots)
        if found is not None:
            return direction, found[0], found[1]
    return None


def _bracket_root(start, goal, radius, direction, target, word, tol, grid, overshoots):
    def f(phi):
        length, tail = _extended_length(start, goal, radius, direction, phi, word)
        return length - target, tail

    prev_phi, (prev_val, _) = 0.0, f(0.0)
    for i in range(1, grid + 1):
        phi = TWO_PI * i / grid
        val, _ = f(phi)
        if prev_val < 0.0 <= val:
            lo, hi = prev_phi, phi
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = f(mid)[0]
                if math.isnan(fm):
                    break
                if fm < 0.0:
                    lo = mid
                else:
                    hi = mid
            val_hi, tail = f(hi)
            if tail is not None:
                if abs(val_hi) < 1e-7:
                    return hi, tail
                overshoots.append((val_hi, direction, hi, tail, 0))
        prev_phi, prev_val = phi, val
    return None
