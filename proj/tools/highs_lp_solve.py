#!/usr/bin/env python3
"""Solve an LP/MILP file with HiGHS and print the result in name-value form.

Output: a "status <word>" line (optimal, infeasible, unknown, error), then
"<column name> <value>" for every column when a solution is available.
"""
import argparse
import sys

import highspy


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("model")
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", args.threads)
    if args.time_limit is not None:
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.model) != highspy.HighsStatus.kOk:
        print("status error")
        print(f"cannot read {args.model}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    ms = highspy.HighsModelStatus
    if status == ms.kOptimal:
        word = "optimal"
    elif status in (ms.kInfeasible, ms.kUnboundedOrInfeasible):
        word = "infeasible"
    elif status in (ms.kTimeLimit, ms.kIterationLimit, ms.kSolutionLimit, ms.kInterrupt):
        word = "unknown"
    else:
        word = "error"
    print(f"status {word}")
    if word == "optimal":
        names = h.getLp().col_names_
        values = h.getSolution().col_value
        for name, value in zip(names, values):
            print(f"{name} {value!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
