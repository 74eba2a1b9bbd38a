"""Backend parity: the compiled kernel must match the pure-Python one bitwise."""

import math

import numpy as np
import pytest

import mgems._kernel as pykernel

cykernel = pytest.importorskip(
    "mgems._speedups", reason="compiled kernel not built")


def random_case(rng, n):
    demand = rng.uniform(0, 400, n)
    pv = rng.uniform(0, 300, n)
    wind = rng.uniform(0, 200, n)
    grid = (rng.random(n) > 0.25).astype(np.uint8)
    price = rng.uniform(0, 0.6, n)
    cap = float(rng.uniform(0, 900))
    soc_min = float(rng.uniform(0, 0.4))
    soc_max = float(rng.uniform(soc_min + 0.1, 1.0))
    params = dict(
        threshold=float(rng.uniform(0, 0.6)),
        dt=float(rng.choice([0.25, 0.5, 1.0])),
        cap=cap,
        energy0=soc_min * cap,
        e_min=soc_min * cap,
        e_max=soc_max * cap,
        sqrt_eta=math.sqrt(float(rng.uniform(0.5, 1.0))),
        max_chg=float(rng.uniform(0, 200)),
        max_dis=float(rng.uniform(0, 300)),
        imp_lim=float(rng.uniform(0, 400)),
        exp_lim=float(rng.uniform(0, 300)),
        dg_cap=float(rng.uniform(0, 120)),
        dg_min_frac=float(rng.choice([0.0, 0.0, 0.3])),
        soc_fallback=soc_min,
    )
    return demand, pv, wind, grid, price, params


def run_backend(kernel, case):
    demand, pv, wind, grid, price, params = case
    out = np.empty((len(demand), pykernel.N_COLUMNS), dtype=np.float64)
    final = kernel.run_kernel(demand, pv, wind, grid, price,
                              *params.values(), out)
    return final, out


def test_backends_are_bit_identical_on_random_horizons():
    rng = np.random.default_rng(42)
    for _ in range(100):
        case = random_case(rng, int(rng.integers(1, 200)))
        final_py, out_py = run_backend(pykernel, case)
        final_cy, out_cy = run_backend(cykernel, case)
        assert final_py == final_cy
        assert np.array_equal(out_py, out_cy)  # exact, no tolerance


def test_backends_agree_on_zero_capacity_battery():
    rng = np.random.default_rng(5)
    demand, pv, wind, grid, price, params = random_case(rng, 50)
    params.update(cap=0.0, energy0=0.0, e_min=0.0, e_max=0.0,
                  soc_fallback=0.2)
    case = (demand, pv, wind, grid, price, params)
    _, out_py = run_backend(pykernel, case)
    _, out_cy = run_backend(cykernel, case)
    assert np.array_equal(out_py, out_cy)
    assert np.all(out_py[:, pykernel.SOC] == 0.2)


def test_dispatch_module_selects_compiled_backend():
    import os
    if os.environ.get("MGEMS_BACKEND"):
        pytest.skip("backend forced by environment")
    from mgems import dispatch
    assert dispatch.BACKEND == "compiled"
