"""
Synthetic listings in two minutes
=================================

Generate a seeded used-equipment dataset, look at its schema, and check
that the price generator actually behaves like depreciation: newer
machines and lower working hours should fetch more.
"""

import collections
import statistics

from mesbench.synth import SynthConfig, synth_generate

# A clean dataset first: no duplicates, no outliers, no missing hours.
cfg = SynthConfig(n_rows=1000, n_models=6, seed=7)
dataset = synth_generate(cfg)
rows = dataset.rows

print(f"generated {len(rows)} listings, seed {cfg.seed}")
print("first row:", rows[0])

# Every listing carries the same fields the CSV reader expects.
print("\nfields:", sorted(vars(rows[0])))

# Average price by construction year. The generator applies a yearly
# depreciation factor, so the means should rise toward recent years.
by_year = collections.defaultdict(list)
for r in rows:
    by_year[r.construction_year].append(r.price)

print("\nmean price by construction year")
for year in sorted(by_year)[-8:]:
    mean = statistics.mean(by_year[year])
    print(f"  {year}: {mean:>9.0f}  {'#' * int(mean / 5000)}")

# Same exercise against working hours, bucketed into quartiles: heavier
# use should mean cheaper machines within the same fleet.
hours = sorted(r.working_hours for r in rows)
cuts = [hours[len(hours) * q // 4] for q in (1, 2, 3)]
buckets = collections.defaultdict(list)
for r in rows:
    b = sum(r.working_hours >= c for c in cuts)
    buckets[b].append(r.price)

print("\nmean price by working-hours quartile (low use -> high use)")
for b in range(4):
    print(f"  q{b + 1}: {statistics.mean(buckets[b]):>9.0f}")

# Seeds are the whole story: the same config reproduces the same data,
# a different seed gives a different sample of the same market.
again = synth_generate(cfg)
other = synth_generate(SynthConfig(n_rows=1000, n_models=6, seed=8))
print("\nsame seed identical:", rows == again.rows)
print("other seed identical:", rows == other.rows)

# Dirty-data knobs exist for testing the cleaning stage; injected rows
# are tagged through their source_id so recall can be measured later.
dirty = synth_generate(SynthConfig(n_rows=1000, n_models=6, seed=7,
                                   duplicate_frac=0.1, outlier_frac=0.05,
                                   missing_hours_frac=0.05))
n_dup = sum(r.source_id.startswith("synth:dup:") for r in dirty.rows)
n_out = sum(r.source_id.startswith("synth:outlier:") for r in dirty.rows)
n_missing = sum(r.working_hours is None for r in dirty.rows)
print(f"\ndirty variant: {len(dirty.rows)} rows, "
      f"{n_dup} injected duplicates, {n_out} injected outliers, "
      f"{n_missing} missing working_hours")
