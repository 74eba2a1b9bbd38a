"""Pure-Python dispatch kernel.

This is the reference implementation of the per-step allocation rule. The
compiled twin in _speedups.pyx transliterates the same arithmetic in the
same order so both backends produce bit-identical traces; any change here
must be mirrored there (test_kernel enforces parity).

Step rule, in priority order:
  grid available, charge regime (price <= threshold):
      surplus -> battery charge, then export, then curtail;
      deficit -> battery discharge, then import, residual unserved.
  grid available, discharge regime (price > threshold):
      surplus -> export then curtail (never charges);
      deficit -> battery discharge, then import, residual unserved.
  grid unavailable (islanded):
      surplus -> battery charge, then curtail;
      deficit -> battery discharge, then diesel, residual unserved.

The charge/discharge decision evaluates surplus with zero battery
contribution, and the battery only ever charges from renewable surplus.
Renewable attribution is PV-first: wind absorbs the curtailment.
"""

from __future__ import annotations

# column order of the kernel output matrix
PV_USED, WIND_USED, CURTAILED, CHARGE, DISCHARGE, DG, IMPORT, EXPORT, \
    UNSERVED, SOC, ENERGY = range(11)
N_COLUMNS = 11


def step_scalar(demand, pv, wind, grid_ok, discharge_regime, energy,
                dt, cap, e_min, e_max, sqrt_eta,
                max_chg, max_dis, imp_lim, exp_lim, dg_cap, dg_min_frac,
                soc_fallback):
    """Allocate one step. Returns the 11 output fields as a tuple.

    energy/e_min/e_max are stored kWh; power fields are terminal kW.
    soc_fallback is reported when the battery has zero capacity.
    """
    ren = pv + wind
    sur = ren - demand
    chg = 0.0
    dis = 0.0
    dg = 0.0
    imp = 0.0
    exp = 0.0
    uns = 0.0
    curt = 0.0

    # terminal-power limits from the SOC headroom and the rate caps
    head = (e_max - energy) / (sqrt_eta * dt)
    if head < 0.0:
        head = 0.0
    eff_chg = max_chg if max_chg < head else head
    head = (energy - e_min) * sqrt_eta / dt
    if head < 0.0:
        head = 0.0
    eff_dis = max_dis if max_dis < head else head

    if grid_ok:
        if sur > 0.0:
            if not discharge_regime:
                chg = sur if sur < eff_chg else eff_chg
            rem = sur - chg
            exp = rem if rem < exp_lim else exp_lim
            curt = rem - exp
        else:
            deficit = -sur
            dis = deficit if deficit < eff_dis else eff_dis
            rem = deficit - dis
            imp = rem if rem < imp_lim else imp_lim
            uns = rem - imp
    else:
        if sur > 0.0:
            chg = sur if sur < eff_chg else eff_chg
            curt = sur - chg
        else:
            deficit = -sur
            dis = deficit if deficit < eff_dis else eff_dis
            rem = deficit - dis
            dg = rem if rem < dg_cap else dg_cap
            if dg > 0.0 and dg < dg_min_frac * dg_cap:
                dg = 0.0  # the unit cannot run below its minimum loading
            uns = rem - dg

    used = ren - curt
    pv_used = pv if pv < used else used
    wind_used = used - pv_used
    energy = energy + chg * sqrt_eta * dt - (dis / sqrt_eta) * dt
    soc = energy / cap if cap > 0.0 else soc_fallback

    return (pv_used, wind_used, curt, chg, dis, dg, imp, exp, uns, soc, energy)


def run_kernel(demand, pv, wind, grid_ok, compare, threshold,
               dt, cap, energy0, e_min, e_max, sqrt_eta,
               max_chg, max_dis, imp_lim, exp_lim, dg_cap, dg_min_frac,
               soc_fallback, out):
    """Run the step rule over a horizon, filling the (n, 11) output matrix.

    compare is the per-step value tested against the threshold (price in the
    price modes, demand in load-threshold mode). Returns final stored kWh.
    """
    n = demand.shape[0]
    d = demand.tolist()
    p = pv.tolist()
    w = wind.tolist()
    g = grid_ok.tolist()
    cmp_vals = compare.tolist()
    rows = []
    energy = energy0
    for i in range(n):
        row = step_scalar(d[i], p[i], w[i], g[i] != 0, cmp_vals[i] > threshold,
                          energy, dt, cap, e_min, e_max, sqrt_eta,
                          max_chg, max_dis, imp_lim, exp_lim, dg_cap,
                          dg_min_frac, soc_fallback)
        energy = row[ENERGY]
        rows.append(row)
    if n:
        out[:, :] = rows
    return energy
