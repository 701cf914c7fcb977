"""
Reciprocal sums over primes with very short gaps
================================================

Sum of 1/p over primes (and survivors) whose successor gap is at most
``lambda(p) log p`` for the threshold families, tracked at checkpoints.
"""
from gaplab import ThresholdSpec, reciprocal_sum
from gaplab.gapstats import population_label
from gaplab.survivors import SurvivorConfig
from gaplab.thresholds import iter_log

checkpoints = [10**4, 10**5, 10**6, 10**7]
x = 10**8
families = [ThresholdSpec.divergent(2), ThresholdSpec.convergent(2, 1), ThresholdSpec.divergent(3)]

for pop in ("primes", SurvivorConfig.variable(x, 10)):
    print(population_label(pop))
    for spec in families:
        acc = reciprocal_sum(x, spec, pop, checkpoints)
        row = "  ".join(f"{c.sum:8.4f}" for c in acc.checkpoint_log)
        print(f"  {str(spec):>16}  {row}")

# The divergent family grows like log_{k+1} x, which barely moves at this scale
print("log_3 x at checkpoints:", [round(iter_log(3, c), 4) for c in checkpoints + [x]])

# The adaptive family raises k once the running sum passes 1 and log_{k+1} is defined
acc = reciprocal_sum(x, ThresholdSpec.adaptive(2))
print("adaptive:", acc.sum, acc.count, acc.adaptive.switch_points)
