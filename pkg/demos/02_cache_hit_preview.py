"""Preview cache hit ratios for candidate durations without any training.

Reproduces the duration trade-off curve: short durations refresh often
(low hit ratio, fresh labels), long durations saturate toward full hits
(stale labels, rounds that move nothing but signals).
"""
from fdsim.cache_sim import HitSimConfig, simulate_hit_ratio

POOL, PER_ROUND, ROUNDS, SEED = 10_000, 1_000, 2_000, 0

print(f"pool={POOL} per_round={PER_ROUND} rounds={ROUNDS}")
print(f"{'duration':>9} {'mean hit (r100+)':>17} {'max hit':>8} {'rounds at >=0.99':>17}")
for duration in (0, 25, 50, 100, 200, 400, 800):
    trace = simulate_hit_ratio(HitSimConfig(POOL, PER_ROUND, duration, ROUNDS, SEED))
    steady = trace[99:].mean()
    saturated = int((trace >= 0.99).sum())
    print(f"{duration:>9} {steady:>17.3f} {trace.max():>8.3f} {saturated:>17}")

print("\nfirst 12 rounds at duration 50 (cold start, then the cache fills):")
trace = simulate_hit_ratio(HitSimConfig(POOL, PER_ROUND, 50, 12, SEED))
print("  " + " ".join(f"{r:.2f}" for r in trace))
