"""Named benchmark instances with their simulators and trajectory tables."""

from dataclasses import dataclass, field
from typing import Callable

from .pointcar import gen_pointcar_lanechange, pointcar_ok, simulate_pointcar
from .quad import gen_quad1d, quad_ok, simulate_quad, unknown_counts as quad_counts
from .thermostat import MODE_NAMES, gen_thermostat, simulate_thermostat, thermostat_ok


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    steps: int
    dt: float
    num_bools: int
    num_reals: int
    make: Callable
    check: Callable
    table: Callable
    columns: tuple
    extra: dict = field(default_factory=dict)

    def generate(self, steps=None, dt=None):
        return self.make(steps or self.steps, dt or self.dt, **self.extra)

    def simulate_ok(self, sigma, steps=None, dt=None):
        """Independent forward-simulation check of a synthesized assignment."""
        return self.check(_params(sigma), steps or self.steps, dt or self.dt, **self.extra)

    def trajectory(self, sigma, steps=None, dt=None):
        return self.table(_params(sigma), steps or self.steps, dt or self.dt, **self.extra)


def _params(sigma):
    return {**sigma.reals, **sigma.bools}


def _thermo_make(steps, dt, dwell):
    return gen_thermostat(steps, dt, dwell)


def _thermo_check(prm, steps, dt, dwell):
    return thermostat_ok(prm["t_on"], prm["t_off"], steps, dt, dwell)


def _thermo_table(prm, steps, dt, dwell):
    rows, _ = simulate_thermostat(prm["t_on"], prm["t_off"], steps, dt, dwell)
    return [(t, T, timer, MODE_NAMES[mode]) for t, T, mode, timer in rows]


def _car_make(steps, dt, num_obstacles):
    return gen_pointcar_lanechange(steps, dt, num_obstacles)


def _car_check(prm, steps, dt, num_obstacles):
    return pointcar_ok(prm, steps, dt, num_obstacles)


def _car_table(prm, steps, dt, num_obstacles):
    return simulate_pointcar(prm, steps, dt, num_obstacles)


def _quad_make(steps, dt, task):
    return gen_quad1d(steps, dt, task)


def _quad_check(prm, steps, dt, task):
    return quad_ok(prm, steps, dt, task)


def _quad_table(prm, steps, dt, task):
    return simulate_quad(prm, steps, dt, task)


_QB, _QR = quad_counts()
_QUAD_COLUMNS = ("t", "x", "y", "angle", "dx", "dy", "dangle", "mode")

BENCHMARKS = {
    b.name: b for b in (
        BenchmarkSpec("thermostat", 50, 2.0, 0, 2, _thermo_make, _thermo_check, _thermo_table,
                      ("t", "temperature", "timer", "mode"), {"dwell": 20.0}),
        BenchmarkSpec("pointcar", 30, 0.1, 4, 5, _car_make, _car_check, _car_table,
                      ("t", "x", "y", "mode"), {"num_obstacles": 1}),
        BenchmarkSpec("quad-obstacle", 70, 0.05, _QB, _QR, _quad_make, _quad_check, _quad_table,
                      _QUAD_COLUMNS, {"task": "obstacle"}),
        BenchmarkSpec("quad-landing", 40, 0.05, _QB, _QR, _quad_make, _quad_check, _quad_table,
                      _QUAD_COLUMNS, {"task": "landing"}),
    )
}


def get_benchmark(name):
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; choose from {', '.join(BENCHMARKS)}") from None
