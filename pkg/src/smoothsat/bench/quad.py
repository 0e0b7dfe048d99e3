"""Planar quadcopter with two rotors and a three-mode PD controller.

Every step the controller picks a mode from two switch conditions on the
current position (first switch wins, then the second, else the last mode)
and applies that mode's PD laws:

    lift = (y - y_set) * y_gain + dy * y_damp
    bias = (ang - tilt_set) * tilt_gain + dang * tilt_damp
           + (x - x_set) * x_gain + dx * x_damp

The left rotor produces ``lift + bias`` and the right one ``lift``. The body
angle must stay within a fixed bound at every step. Two tasks are
provided: flying past a box to a goal line, and landing softly on a pad
after starting with a spin.
"""

from dataclasses import dataclass
import math

from ..ir import ProgramBuilder, ite
from .config import physics
from .pointcar import gen_switch, switch_names

TASKS = ("obstacle", "landing")
PD_TERMS = ("y_set", "y_gain", "y_damp", "tilt_set", "tilt_gain", "tilt_damp",
            "x_set", "x_gain", "x_damp")
NUM_MODES = 3


@dataclass(frozen=True)
class QuadModel:
    mass: float
    gravity: float
    inertia: float
    arm: float
    gain_bound: float
    setpoint_bounds: tuple
    max_tilt: float
    task: str
    params: dict

    @classmethod
    def make(cls, task, consts=None):
        if task not in TASKS:
            raise ValueError(f"unknown quad task {task!r}")
        c = consts or physics()["quad"]
        return cls(c["mass"], c["gravity"], c["inertia"], c["arm"], c["gain_bound"],
                   tuple(c["setpoint_bounds"]), c["max_path_tilt"], task, dict(c[task]))

    def accel(self, left, right, ang, sin=math.sin, cos=math.cos):
        thrust = left + right
        ddx = -thrust * sin(ang) / self.mass
        ddy = thrust * cos(ang) / self.mass - self.gravity
        ddang = (left - right) * self.arm / self.inertia
        return ddx, ddy, ddang


def pd_names(mode):
    return [f"{t}{mode}" for t in PD_TERMS]


def unknown_counts():
    """(Boolean, real) unknown counts of a generated quad program."""
    return 2 * len(switch_names(1)), NUM_MODES * len(PD_TERMS) + 2


def _pd(state, g):
    x, y, ang, dx, dy, dang = state
    lift = (y - g["y_set"]) * g["y_gain"] + dy * g["y_damp"]
    bias = ((ang - g["tilt_set"]) * g["tilt_gain"] + dang * g["tilt_damp"]
            + (x - g["x_set"]) * g["x_gain"] + dx * g["x_damp"])
    return lift, bias


def _step(m, state, lift, bias, dt, sin, cos):
    x, y, ang, dx, dy, dang = state
    ddx, ddy, ddang = m.accel(lift + bias, lift, ang, sin, cos)
    # semi-implicit Euler: velocities first, positions from the new velocities
    dx = dx + dt * ddx
    dy = dy + dt * ddy
    dang = dang + dt * ddang
    return x + dt * dx, y + dt * dy, ang + dt * dang, dx, dy, dang


def gen_quad1d(steps=70, dt=0.05, task="obstacle", consts=None):
    if steps < 1:
        raise ValueError("steps must be at least 1")
    m = QuadModel.make(task, consts)
    b = ProgramBuilder()
    gb = m.gain_bound
    lo, hi = m.setpoint_bounds
    thr = [b.term(b.real(f"c{k}", lo, hi)) for k in (1, 2)]
    for k in (1, 2):
        for name in switch_names(k):
            b.bool(name)
    gains = []
    for mode in range(1, NUM_MODES + 1):
        g = {}
        for term, name in zip(PD_TERMS, pd_names(mode)):
            bounds = (lo, hi) if term.endswith("_set") else (-gb, gb)
            g[term] = b.term(b.real(name, *bounds))
        gains.append(g)

    sin = lambda t: t.apply("sin")
    cos = lambda t: t.apply("cos")
    p = m.params
    x0, y0 = p["start"]
    state = tuple(b.term(b.const(v)) for v in (x0, y0, 0.0, 0.0, 0.0, p["start_rate"]))
    for _ in range(steps):
        x, y = state[0], state[1]
        sw1 = gen_switch(x, y, 1, thr[0])
        sw2 = gen_switch(x, y, 2, thr[1])
        laws = [_pd(state, g) for g in gains]
        lift = ite(sw1, laws[0][0], ite(sw2, laws[1][0], laws[2][0]))
        bias = ite(sw1, laws[0][1], ite(sw2, laws[1][1], laws[2][1]))
        state = _step(m, state, lift, bias, dt, sin, cos)
        x, y, ang = state[0], state[1], state[2]
        b.assert_((y >= 0).id)
        b.assert_((ang <= m.max_tilt).id)
        b.assert_((ang >= -m.max_tilt).id)
        if task == "obstacle":
            x0b, x1b, y0b, y1b = p["box"]
            b.assert_((~((x >= x0b) & (x <= x1b) & (y >= y0b) & (y <= y1b))).id)
            b.assert_((y <= p["max_height"]).id)
    x, y, ang, dx, dy, dang = state
    if task == "obstacle":
        b.assert_((x >= p["goal_x"]).id)
    else:
        b.assert_((y <= p["land_height"]).id)
        b.assert_((x >= -p["pad_half_width"]).id)
        b.assert_((x <= p["pad_half_width"]).id)
        b.assert_((dy >= -p["landing_speed"]).id)
        b.assert_((dy <= p["landing_speed"]).id)
        b.assert_((ang >= -p["touchdown_tilt"]).id)
        b.assert_((ang <= p["touchdown_tilt"]).id)
    return b.build()


def simulate_quad(params, steps=70, dt=0.05, task="obstacle", consts=None):
    """Forward simulation from unknown values.

    Returns rows ``(t, x, y, ang, dx, dy, dang, mode)`` including the start;
    ``mode`` is the mode applied during the step that ends at ``t``.
    """
    m = QuadModel.make(task, consts)
    p = m.params
    x0, y0 = p["start"]
    state = (x0, y0, 0.0, 0.0, 0.0, p["start_rate"])
    gains = [{t: params[n] for t, n in zip(PD_TERMS, pd_names(k))}
             for k in range(1, NUM_MODES + 1)]

    def fires(k, x, y):
        axis, direction = switch_names(k)
        pos = x if params[axis] else y
        c = params[f"c{k}"]
        return (pos - c if params[direction] else c - pos) >= 0

    rows = [(0.0, *state, 0)]
    for i in range(steps):
        x, y = state[0], state[1]
        mode = 0 if fires(1, x, y) else 1 if fires(2, x, y) else 2
        lift, bias = _pd(state, gains[mode])
        state = _step(m, state, lift, bias, dt, math.sin, math.cos)
        rows.append(((i + 1) * dt, *state, mode))
    return rows


def quad_ok(params, steps=70, dt=0.05, task="obstacle", consts=None):
    m = QuadModel.make(task, consts)
    p = m.params
    rows = simulate_quad(params, steps, dt, task, consts)
    body = rows[1:]
    if any(r[2] < 0 or abs(r[3]) > m.max_tilt for r in body):
        return False
    x, y, ang, dx, dy, dang = rows[-1][1:7]
    if task == "obstacle":
        x0b, x1b, y0b, y1b = p["box"]
        hit = any(x0b <= r[1] <= x1b and y0b <= r[2] <= y1b for r in body)
        high = any(r[2] > p["max_height"] for r in body)
        return not hit and not high and x >= p["goal_x"]
    return (y <= p["land_height"] and abs(x) <= p["pad_half_width"]
            and abs(dy) <= p["landing_speed"] and abs(ang) <= p["touchdown_tilt"])
