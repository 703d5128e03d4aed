"""Preset builders and the config-to-objects bridge."""

import math

import numpy as np
import pytest

from peribond.config import default_config, parse_config
from peribond.errors import ConfigError
from peribond.kernels import KERNEL_FAMILIES
from peribond.scenarios import (
    build_bar_wave,
    build_fluid_shear,
    build_plate_precrack,
    linearized_modulus,
    materialize,
    model_from_config,
)


def test_bar_wave_setup():
    setup = build_bar_wave(delta=0.1, m=4)
    assert setup.cloud.n_points == 40
    assert setup.cloud.periodic.all()
    # the oracle reproduces the initial condition exactly at t = 0
    x = setup.cloud.positions[:, 0]
    assert np.allclose(setup.oracle(x, 0.0), setup.state.u[:, 0])
    # dt divides one traversal period exactly
    e = linearized_modulus(setup.cloud, setup.bonds, setup.model)
    period = 1.0 / math.sqrt(e)
    n_per = round(period / setup.dt)
    assert n_per * setup.dt == pytest.approx(period, rel=1e-12)
    assert setup.n_steps == n_per


def test_bar_wave_travels_toward_oracle():
    setup = build_bar_wave(delta=0.1, m=4, periods=0.25)
    from peribond import dynamics

    dynamics.run(setup.cloud, setup.bonds, setup.model, setup.state,
                 setup.dt, setup.n_steps, record_every=setup.n_steps)
    x = setup.cloud.positions[:, 0]
    predicted = setup.oracle(x, setup.state.t)
    err = np.linalg.norm(setup.state.u[:, 0] - predicted)
    err /= np.linalg.norm(predicted)
    assert err < 0.06  # delta = 0.1 dispersion level, well under failure


def test_plate_precrack_seeds_a_clean_crack():
    setup = build_plate_precrack(n=16, n_steps=10)
    cloud, bonds = setup.cloud, setup.bonds
    broken = bonds.mu == 0.0
    assert broken.any()
    # every cut bond straddles the seam y = 0.5 inside x in [0.25, 0.75]
    pos_i = cloud.positions[bonds.source[broken]]
    pos_j = pos_i + bonds.xi[broken]
    assert np.all((pos_i[:, 1] - 0.5) * (pos_j[:, 1] - 0.5) < 0.0)
    # damage is confined to a horizon-wide band around the seam
    dmg = bonds.damage()
    far = np.abs(cloud.positions[:, 1] - 0.5) > 2.0 * setup.horizon.delta
    assert np.allclose(dmg[far], 0.0)
    assert dmg.max() > 0.0
    # opening velocities point away from the seam on both sides
    v_y = setup.state.v[:, 1]
    y = cloud.positions[:, 1]
    assert np.all(v_y[y > 0.5] > 0.0) and np.all(v_y[y < 0.5] < 0.0)


def test_fluid_shear_setup():
    setup = build_fluid_shear(n=8)
    assert setup.bonds is None and setup.model is None
    assert setup.memory.mode == "zero"
    assert setup.cloud.periodic.all()
    ke = float(np.sum(setup.state.v ** 2))
    assert ke > 0.0


def test_model_from_config_all_families():
    for family in KERNEL_FAMILIES:
        cfg = default_config()
        cfg.set("kernel", "family", family)
        model = model_from_config(cfg, delta=0.5, dim=1)
        assert model.family == family


def test_breaker_restricted_to_brittle_families():
    cfg = default_config()
    cfg.set("kernel", "family", "quadratic")
    cfg.set("breaker", "mode", "critical-stretch")
    cfg.set("breaker", "s0", 0.1)
    with pytest.raises(ConfigError, match="does not take a breaker"):
        model_from_config(cfg, delta=0.5, dim=1)


def test_materialize_generic_path():
    cfg = parse_config("""
        [domain]
        h = 0.125
        [horizon]
        delta = 0.375
        [time]
        steps = 7
        [output]
        snapshot_every = 3
    """)
    setup = materialize(cfg)
    assert setup.cloud.n_points == 8
    assert setup.n_steps == 7
    assert setup.snapshot_every == 3
    assert setup.dt > 0.0  # auto-derived from the bond stiffness


def test_materialize_zero_memory_requires_explicit_dt():
    cfg = parse_config("[memory]\nmode = zero\n[time]\ndt = auto\n")
    with pytest.raises(ConfigError, match="dt explicitly"):
        materialize(cfg)
    cfg = parse_config("[memory]\nmode = zero\n[time]\ndt = 0.01\n")
    setup = materialize(cfg)
    assert setup.bonds is None
    assert setup.dt == 0.01


def test_materialize_preset_respects_overrides():
    cfg = parse_config("[scenario]\npreset = bar1d-wave\n[time]\nsteps = 9\n")
    setup = materialize(cfg)
    assert setup.n_steps == 9
    cfg = parse_config("[scenario]\npreset = fluid-shear\n[time]\nsteps = 4\n")
    setup = materialize(cfg)
    assert setup.n_steps == 4 and setup.memory.mode == "zero"
