"""Point car that moves along one axis at a time around a rectangular obstacle.

The controller has three modes driven in order: move along x, move along
y, move along x again. Each mode has an unknown velocity; each of the two
mode switches fires on an unknown inequality whose axis and direction are
chosen by two Boolean unknowns.
"""

from dataclasses import dataclass

from ..ir import ProgramBuilder, ite, iteh
from .config import physics

MODE_AXES = ("x", "y", "x")
MODE_GAP = 10.0


@dataclass(frozen=True)
class PointCarTask:
    start: tuple
    obstacles: tuple
    goal_x: float
    goal_y: tuple
    vmax: float
    threshold_bounds: tuple

    @classmethod
    def make(cls, num_obstacles=1, consts=None):
        c = consts or physics()["pointcar"]
        x0, x1, y0, y1 = c["obstacle"]
        # extra obstacles are stacked further along x
        obs = tuple((x0 + 8.0 * i, x1 + 8.0 * i, y0, y1) for i in range(num_obstacles))
        goal_x = c["goal_x"] + 8.0 * (num_obstacles - 1)
        return cls(tuple(c["start"]), obs, goal_x, tuple(c["goal_y"]), c["vmax"],
                   tuple(c["threshold_bounds"]))


def switch_names(k):
    return f"axis{k}", f"dir{k}"


def gen_switch(px, py, k, threshold):
    """``iteh(axis, iteh(dir, px - c, c - px), iteh(dir, py - c, c - py)) >= 0``."""
    axis, direction = switch_names(k)
    along_x = iteh(direction, px - threshold, threshold - px)
    along_y = iteh(direction, py - threshold, threshold - py)
    return iteh(axis, along_x, along_y) >= 0


def gen_pointcar_lanechange(steps=30, dt=0.1, num_obstacles=1, consts=None):
    if steps < 1:
        raise ValueError("steps must be at least 1")
    task = PointCarTask.make(num_obstacles, consts)
    b = ProgramBuilder()
    lo, hi = task.threshold_bounds
    vel = [b.term(b.real(f"v{i}", -task.vmax, task.vmax)) for i in range(3)]
    thr = [b.term(b.real(f"c{k}", lo, hi)) for k in (1, 2)]
    for k in (1, 2):
        for name in switch_names(k):
            b.bool(name)
    px = b.term(b.const(task.start[0]))
    py = b.term(b.const(task.start[1]))
    mode = b.term(b.const(0.0))
    for _ in range(steps):
        sw1 = gen_switch(px, py, 1, thr[0])
        sw2 = gen_switch(px, py, 2, thr[1])
        in0 = mode <= 0.5 * MODE_GAP
        in1 = mode <= 1.5 * MODE_GAP
        mode = ite(in0, ite(sw1, MODE_GAP, 0.0), ite(in1, ite(sw2, 2 * MODE_GAP, MODE_GAP), 2 * MODE_GAP))
        m0 = mode <= 0.5 * MODE_GAP
        m1 = mode <= 1.5 * MODE_GAP
        px = px + dt * ite(m0, vel[0], ite(m1, 0.0, vel[2]))
        py = py + dt * ite(m0, 0.0, ite(m1, vel[1], 0.0))
        for (x0, x1, y0, y1) in task.obstacles:
            b.assert_((~((px >= x0) & (px <= x1) & (py >= y0) & (py <= y1))).id)
    b.assert_((px >= task.goal_x).id)
    b.assert_((py >= task.goal_y[0]).id)
    b.assert_((py <= task.goal_y[1]).id)
    return b.build()


def simulate_pointcar(params, steps=30, dt=0.1, num_obstacles=1, consts=None):
    """Forward simulation; ``params`` maps unknown names to values.

    Returns rows ``(t, px, py, mode)`` including the start.
    """
    task = PointCarTask.make(num_obstacles, consts)
    px, py = task.start
    mode = 0
    rows = [(0.0, px, py, mode)]

    def fires(k):
        axis, direction = switch_names(k)
        pos = px if params[axis] else py
        c = params[f"c{k}"]
        return (pos - c if params[direction] else c - pos) >= 0

    for i in range(steps):
        if mode == 0 and fires(1):
            mode = 1
        elif mode == 1 and fires(2):
            mode = 2
        if MODE_AXES[mode] == "x":
            px += dt * params[f"v{mode}"]
        else:
            py += dt * params[f"v{mode}"]
        rows.append(((i + 1) * dt, px, py, mode))
    return rows


def collides(rows, obstacles):
    return any(x0 <= px <= x1 and y0 <= py <= y1
               for _, px, py, _ in rows[1:] for (x0, x1, y0, y1) in obstacles)


def pointcar_ok(params, steps=30, dt=0.1, num_obstacles=1, consts=None):
    task = PointCarTask.make(num_obstacles, consts)
    rows = simulate_pointcar(params, steps, dt, num_obstacles, consts)
    _, px, py, _ = rows[-1]
    reached = px >= task.goal_x and task.goal_y[0] <= py <= task.goal_y[1]
    return reached and not collides(rows, task.obstacles)
