"""Workload driver, stress windows, and version-history reclamation.

Equivalent to the chronocas-bench CLI, called as a library.  The epoch
manager's counters show retired version records being freed once every
thread has moved past their epoch; the stress mode replays short recorded
windows through the linearizability checker.
"""

import json

from chronocas.bench import WorkloadConfig, run, run_with_baseline, stress

# A short update-heavy run on the versioned BST.
report = run(WorkloadConfig(structure="bst", prefill=500, ins=30, delete=20,
                            find=49, rq=1, rqsize=64, threads=4,
                            seconds=1.0, seed=7))
print(json.dumps(report.to_dict(), indent=2)[:600], "...\n")

# Paired against the plain-CAS baseline: the ratio is the cost of keeping
# every update's history.
paired = run_with_baseline(WorkloadConfig(structure="bst", prefill=500,
                                          ins=30, delete=20, find=50, rq=0,
                                          threads=4, seconds=1.0, seed=7))
print(f"throughput vs plain-CAS baseline: "
      f"{paired.overhead_ratio_vs_plain:.2f}x\n")

# Stress: quiesce, checkpoint, record a concurrent burst, check.
verdicts = stress(WorkloadConfig(structure="list", prefill=3, threads=4,
                                 seed=7), windows=200)
print("stress verdicts:", verdicts.to_dict())
