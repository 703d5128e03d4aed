"""A traveling wave in a periodic bar: dynamics, energy, convergence.

Launches a one-period sine pulse down a periodic 1D bar, checks the pulse
against the classical traveling-wave solution, watches the energy ledger,
and then shrinks the horizon to show the nonlocal solution converging to
the classical one at second order.

Run it directly:  python3 demos/03_wave_in_a_bar.py
"""

import numpy as np

from peribond import run
from peribond.diagnostics import delta_convergence, energy
from peribond.scenarios import build_bar_wave


def sparkline(values, width=48):
    """Crude terminal plot: one row of block characters."""
    blocks = " .:-=+*#%@"
    v = np.asarray(values, dtype=float)
    idx = np.linspace(0, len(v) - 1, width).astype(int)
    v = v[idx]
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else 1.0
    return "".join(blocks[int((x - lo) / span * (len(blocks) - 1))] for x in v)


setup = build_bar_wave(delta=0.05, m=4, periods=1.0)
print(f"bar: {setup.cloud.n_points} points, horizon {setup.horizon.delta}, "
      f"dt {setup.dt:.5f}, {setup.n_steps} steps for one period")

print()
print("initial displacement  ", sparkline(setup.state.u[:, 0]))

result = run(setup.cloud, setup.bonds, setup.model, setup.state,
             setup.dt, setup.n_steps // 2, record_every=setup.n_steps)
print("after half a period   ", sparkline(result.state.u[:, 0]))

oracle_half = setup.oracle(setup.cloud.positions[:, 0], result.state.t)
print("classical prediction  ", sparkline(oracle_half))
err = np.sqrt(np.mean((result.state.u[:, 0] - oracle_half) ** 2)
              / np.mean(oracle_half ** 2))
print(f"relative L2 mismatch after half a period: {err:.3%}")

print()
print("Energy ledger over one full period")
setup = build_bar_wave(delta=0.05, m=4, periods=1.0)
rep0 = energy(setup.cloud, setup.bonds, setup.model, setup.state)
result = run(setup.cloud, setup.bonds, setup.model, setup.state,
             setup.dt, setup.n_steps, record_every=max(1, setup.n_steps // 8))
for k, t in enumerate(result.series["t"]):
    kin = result.series["kinetic"][k]
    pot = result.series["potential"][k]
    tot = result.series["total"][k]
    print(f"  t = {t:7.4f}   kinetic {kin:.3e}   stored {pot:.3e}   "
          f"total {tot:.10e}")
drift = abs(result.series["total"][-1] - rep0.total) / rep0.total
print(f"total energy drifts by {drift:.2e} of itself: the exchange between")
print("kinetic and stored energy is lossless to integrator accuracy.")

print()
print("Shrinking the horizon toward the classical limit")
study = delta_convergence(deltas=(0.2, 0.1, 0.05), m=4)
print(study.table())
print("halving the horizon quarters the error: the nonlocal model")
print("converges to the classical wave at second order in delta.")
