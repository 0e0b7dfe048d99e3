"""Four-mode thermostat with unknown switching temperatures.

Modes cycle OFF -> HEATING -> ON -> COOLING -> OFF. OFF switches to
HEATING once the room is at or below ``t_on``; ON switches to COOLING once
it is at or above ``t_off``; the two transitional modes last a fixed time.
Each step also asserts that the temperature stays in the comfort band and
that OFF and ON are never left before the minimum dwell time.
"""

from dataclasses import dataclass

from ..ir import ProgramBuilder, ite
from .config import physics

OFF, HEATING, ON, COOLING = range(4)
MODE_NAMES = ("OFF", "HEATING", "ON", "COOLING")


@dataclass(frozen=True)
class ThermostatModel:
    dt: float
    dwell: float
    outside: float
    initial: float
    loss: float
    heat: float
    transition: float
    partial: float
    low: float
    high: float

    @classmethod
    def make(cls, dt, dwell, consts=None):
        c = consts or physics()["thermostat"]
        return cls(dt=dt, dwell=dwell, outside=c["outside_temp"], initial=c["initial_temp"],
                   loss=c["loss_per_dwell"] / dwell, heat=c["heat_per_dwell"] / dwell,
                   transition=c["transition_fraction"] * dwell, partial=c["partial_heat"],
                   low=c["low"], high=c["high"])

    def power(self, mode):
        return (0.0, self.partial, 1.0, self.partial)[mode]


def gen_thermostat(steps, dt=2.0, dwell=20.0, warmup=0, consts=None):
    """Unrolled thermostat program with real unknowns ``t_on`` and ``t_off``."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    m = ThermostatModel.make(dt, dwell, consts)
    lo, hi = (consts or physics()["thermostat"])["threshold_bounds"]
    b = ProgramBuilder()
    t_on = b.term(b.real("t_on", lo, hi))
    t_off = b.term(b.real("t_off", lo, hi))
    half = dt / 2  # timers move on a dt grid; compare half a step early

    T = b.term(b.const(m.initial))
    mode = b.term(b.const(OFF))
    timer = b.term(b.const(dwell))
    for k in range(steps):
        is_off = mode <= 0.5
        is_heat = mode <= 1.5
        is_on = mode <= 2.5
        go_heat = T <= t_on
        go_on = timer >= m.transition - half
        go_cool = T >= t_off
        go_off = timer >= m.transition - half
        dwelt = timer >= dwell - half
        b.assert_((~(is_off & go_heat & ~dwelt)).id)
        b.assert_((~(~is_heat & is_on & go_cool & ~dwelt)).id)

        nxt = ite(is_off, ite(go_heat, HEATING, OFF),
                  ite(is_heat, ite(go_on, ON, HEATING),
                      ite(is_on, ite(go_cool, COOLING, ON), ite(go_off, OFF, COOLING))))
        stay = timer + dt
        timer = ite(is_off, ite(go_heat, dt, stay),
                    ite(is_heat, ite(go_on, dt, stay),
                        ite(is_on, ite(go_cool, dt, stay), ite(go_off, dt, stay))))
        power = ite(nxt <= 0.5, 0.0, ite(nxt <= 1.5, m.partial, ite(nxt <= 2.5, 1.0, m.partial)))
        T = T + dt * (m.heat * power - m.loss * (T - m.outside))
        mode = nxt
        if k + 1 >= warmup:
            b.assert_((T >= m.low).id)
            b.assert_((T <= m.high).id)
    return b.build()


def simulate_thermostat(t_on, t_off, steps, dt=2.0, dwell=20.0, consts=None):
    """Plain forward simulation; returns rows ``(t, T, mode, timer)`` including t=0.

    Also returns whether a dwell violation occurred.
    """
    m = ThermostatModel.make(dt, dwell, consts)
    T, mode, timer = m.initial, OFF, dwell
    rows = [(0.0, T, mode, timer)]
    violated = False
    for k in range(steps):
        dwelt = timer >= dwell - dt / 2
        switch = False
        if mode == OFF:
            switch = T <= t_on
            violated |= switch and not dwelt
        elif mode == ON:
            switch = T >= t_off
            violated |= switch and not dwelt
        else:
            switch = timer >= m.transition - dt / 2
        if switch:
            mode = (mode + 1) % 4
            timer = dt
        else:
            timer += dt
        T = T + dt * (m.heat * m.power(mode) - m.loss * (T - m.outside))
        rows.append(((k + 1) * dt, T, mode, timer))
    return rows, violated


def thermostat_ok(t_on, t_off, steps, dt=2.0, dwell=20.0, warmup=0, consts=None):
    m = ThermostatModel.make(dt, dwell, consts)
    rows, violated = simulate_thermostat(t_on, t_off, steps, dt, dwell, consts)
    band = all(m.low <= T <= m.high for _, T, _, _ in rows[max(1, warmup):])
    return band and not violated
