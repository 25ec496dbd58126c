#!/usr/bin/env python3
"""Sweep staging overhead on the virtual grid and print the speedup curve.

Packs identical jobs onto a single cluster and compares the makespan with
the sequential estimate: with no staging the speedup equals the worker
count whenever jobs divide evenly into waves; staging overhead erodes it.
"""

import argparse

from gridarena.grid.engine import GridEngine
from gridarena.grid.jobs import ArtifactRef, JobSpec
from gridarena.grid.topology import single_cluster
from gridarena.orchestrator import speedup_ratio


def run(jobs: int, workers: int, compute: float, staging_fraction: float) -> tuple[float, float]:
    bandwidth = 1_000_000.0
    engine = GridEngine(single_cluster(workers, local_se_bandwidth=bandwidth))
    refs = ()
    if staging_fraction > 0:
        blob = b"x" * int(staging_fraction * compute * bandwidth)
        ref = engine.central_se.put(blob)
        refs = (ArtifactRef("in", ref, len(blob)),)
    for i in range(jobs):
        engine.submit(JobSpec(f"job-{i:04d}", refs, (), compute))
    engine.run_until_idle()
    makespan = engine.usage_stats().makespan
    return makespan, speedup_ratio(jobs * compute, makespan)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--jobs", type=int, default=500)
    parser.add_argument("--workers", type=int, default=50)
    parser.add_argument("--compute", type=float, default=60.0)
    args = parser.parse_args()

    sequential = args.jobs * args.compute
    print(f"{args.jobs} jobs x {args.compute:.0f} s on {args.workers} workers "
          f"(sequential estimate {sequential:.0f} s)")
    print(f"{'staging':>8} {'makespan':>10} {'speedup':>8}")
    for fraction in (0.0, 0.01, 0.02, 0.05, 0.10, 0.20, 0.50):
        makespan, boost = run(args.jobs, args.workers, args.compute, fraction)
        print(f"{fraction:>7.0%} {makespan:>10.1f} {boost:>8.2f}")


if __name__ == "__main__":
    main()
