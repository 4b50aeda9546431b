"""Solve an LP-format file with HiGHS and print `Objective: <v>` and `Bound: <v>`.

    python3 scripts/highs_solve.py model.lp [time_limit_seconds]
"""

import sys

import highspy


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    if len(sys.argv) > 2 and sys.argv[2]:
        h.setOptionValue("time_limit", float(sys.argv[2]))
    if h.readModel(sys.argv[1]) != highspy.HighsStatus.kOk:
        print(f"cannot read {sys.argv[1]}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    print(f"Status: {h.modelStatusToString(status)}")
    if h.getInfo().primal_solution_status == 2:
        print(f"Objective: {h.getInfo().objective_function_value!r}")
    print(f"Bound: {h.getInfo().mip_dual_bound!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
