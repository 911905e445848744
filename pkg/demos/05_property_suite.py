"""
Self-checking: brute-force oracles, properties, and planted faults
==================================================================

The harness cross-validates the production checkers against small
exhaustive oracles over seeded random instances, shrinks any
disagreement to a small serialized counterexample, and proves its
own teeth by flipping documented fault switches and watching the
properties fail.
"""

from wsq.harness import (
    MUTATIONS,
    brute_force_weak_sufficiency,
    bundled_example_checks,
    run_property_suite,
)
from wsq.fileio import load_bundled_instance
from wsq.sufficiency import check_weak_sufficiency

# ---------------------------------------------------------------- oracle
# The brute-force route recomputes ranks with numpy and scans a phase
# grid exhaustively; it shares no code with the production checker.
statistic, family = load_bundled_instance()
fast = check_weak_sufficiency(statistic, family).sufficient
slow = brute_force_weak_sufficiency(statistic, family)
print("checker:", fast, " brute force:", slow, " agree:", fast == slow)

failures = bundled_example_checks()
print("bundled worked-example checks:", "all pass" if not failures else failures)

# ---------------------------------------------------------------- properties
report = run_property_suite(seed=0, count=24)
print("\nclean run of", len(report.results), "properties:",
      "OK" if report.ok else "FAILED")

# ---------------------------------------------------------------- mutations
# Each documented fault flag must make at least one property fail;
# failures carry a shrunk counterexample instance as JSON.
for name in sorted(MUTATIONS):
    mutated = run_property_suite(seed=0, count=24, mutation=name)
    caught = [r.name for r in mutated.failures()]
    print(f"\nmutation {name}: {len(caught)} failing properties")
    for prop in caught:
        print("   ", prop)
    for r in mutated.failures():
        if r.counterexample:
            print("  sample counterexample:", r.counterexample[:72], "...")
            break
