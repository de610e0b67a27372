"""Equal pilot budgets, very different accuracy.

Every scheme here trains 2M+2 coefficients. The time-switching protocol
spends 2M+2 slots (M+1 per user), and the three simultaneous or benchmark
schemes spend 2M+2 as well, so differences in NMSE are purely about how
well each observation matrix conditions the estimate, not about overhead.
The table also shows how the gap scales with the surface size.
"""

from starce import (
    SCHEMES,
    SystemConfig,
    es_coupled_design,
    es_ideal_design,
    onoff_schedule,
    run_trials,
    scheme_theory_mse,
    sweep_subsurfaces,
    ts_pattern,
    two_phase_design,
)

cfg = SystemConfig()
m = cfg.num_subsurfaces
designs = {
    "ts": ts_pattern(m),
    "es-ideal": es_ideal_design(m),
    "es-coupled": es_coupled_design(m),
    "onoff": onoff_schedule(m),
    "two-phase": two_phase_design(m),
}

print(f"=== pilot budget at M = {m} ===\n")
print(f"{'scheme':<12} {'slots':>6} {'theory mse':>13} {'vs ts':>7}")
ts_theory = scheme_theory_mse("ts", cfg)
for scheme in SCHEMES:
    theory = scheme_theory_mse(scheme, cfg)
    print(f"{scheme:<12} {designs[scheme].total_slots:>6} {theory:>13.4e} "
          f"{theory / ts_theory:>7.2f}x")

print("\nSame budget, up to a 41x spread: the on/off benchmark observes each"
      "\ncascaded coefficient in a single slot, so nothing averages down, while"
      "\nthe orthogonal designs spread every coefficient across all slots.\n")

print(f"=== Monte Carlo confirmation (2000 trials) ===\n")
print(f"{'scheme':<12} {'empirical nmse':>15} {'theory/empirical':>17}")
for scheme in SCHEMES:
    report = run_trials(scheme, cfg, trials=2_000, seed=5)
    ratio = report.theoretical_mse / report.empirical_mse
    print(f"{scheme:<12} {report.empirical_nmse:>15.3e} {ratio:>17.3f}")

print("\n=== scaling with the surface size (500 trials/point) ===\n")
grid = [5, 10, 20, 40]
result = sweep_subsurfaces(cfg, grid, trials=500, seed=9)
print(f"{'M':>4} " + " ".join(f"{s:>12}" for s in SCHEMES))
for value in grid:
    cells = []
    for scheme in SCHEMES:
        row = next(r for r in result.rows if r.scheme == scheme and r.value == value)
        cells.append(f"{row.nmse:>12.3e}")
    print(f"{value:>4} " + " ".join(cells))

print("\nThe two orthogonal schemes stay flat (their per-coefficient error is"
      "\nsize-independent), the staged benchmark stays flat but pays its fixed"
      "\nerror-propagation premium, and the on/off benchmark grows linearly.")
