#!/usr/bin/env python3
"""Regenerate the frozen LP/MILP reference fixture.

Solves a deterministic family of small random models with an independent
solver (HiGHS via scipy) and freezes the expected statuses/objectives into
crates/optforge/tests/fixtures/lp_reference.json. The Rust test suite checks
the built-in simplex and branch-and-bound against these values, so this
script only needs to run when the fixture family itself changes.
"""

import json
import os
import numpy as np
from scipy.optimize import linprog, milp, LinearConstraint, Bounds

OUT = os.path.join(
    os.path.dirname(__file__), "..", "crates", "optforge", "tests", "fixtures", "lp_reference.json"
)

rng = np.random.default_rng(987654321)


def model_json(sense, c, A, row_sense, b, lb, ub, vartype):
    trip = []
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            if A[i, j] != 0.0:
                trip.append([i, j, float(A[i, j])])
    return {
        "sense": sense,
        "c": [float(v) for v in c],
        "A": trip,
        "row_sense": row_sense,
        "b": [float(v) for v in b],
        "lb": [None if v == -np.inf else float(v) for v in lb],
        "ub": [None if v == np.inf else float(v) for v in ub],
        "vartype": vartype,
    }


def solve_reference_lp(sense, c, A, row_sense, b, lb, ub):
    sign = 1.0 if sense == "MIN" else -1.0
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i, rs in enumerate(row_sense):
        if rs == "LE":
            A_ub.append(A[i])
            b_ub.append(b[i])
        elif rs == "GE":
            A_ub.append(-A[i])
            b_ub.append(-b[i])
        else:
            A_eq.append(A[i])
            b_eq.append(b[i])
    res = linprog(
        sign * c,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=list(zip([None if v == -np.inf else v for v in lb],
                        [None if v == np.inf else v for v in ub])),
        method="highs",
    )
    if res.status == 0:
        return "OPTIMAL", sign * res.fun
    if res.status == 2:
        return "INFEASIBLE", None
    if res.status == 3:
        return "UNBOUNDED", None
    return "OTHER", None


def solve_reference_milp(sense, c, A, row_sense, b, lb, ub, vartype):
    sign = 1.0 if sense == "MIN" else -1.0
    lo, hi = [], []
    for i, rs in enumerate(row_sense):
        if rs == "LE":
            lo.append(-np.inf)
            hi.append(b[i])
        elif rs == "GE":
            lo.append(b[i])
            hi.append(np.inf)
        else:
            lo.append(b[i])
            hi.append(b[i])
    integrality = np.array([0 if t == "CONTINUOUS" else 1 for t in vartype])
    res = milp(
        c=sign * c,
        constraints=LinearConstraint(A, lo, hi),
        bounds=Bounds(lb, ub),
        integrality=integrality,
        options={"mip_rel_gap": 0.0},
    )
    if res.status == 0:
        return "OPTIMAL", sign * res.fun
    if res.status == 2:
        return "INFEASIBLE", None
    return "OTHER", None


def random_lp():
    n = int(rng.integers(2, 9))
    m = int(rng.integers(1, 9))
    kind = rng.integers(0, 3)
    A = rng.uniform(-5, 5, size=(m, n))
    c = rng.uniform(-10, 10, size=n)
    sense = "MIN" if rng.random() < 0.5 else "MAX"
    if kind == 0:
        # boxed: always bounded
        lb = np.zeros(n)
        ub = rng.uniform(1, 10, size=n)
        row_sense = [["LE", "GE", "EQ"][rng.integers(0, 3)] if rng.random() < 0.3 else "LE" for _ in range(m)]
        x0 = rng.uniform(0, 1, size=n) * ub
        b = A @ x0 + rng.uniform(-2, 2, size=m)
        for i, rs in enumerate(row_sense):
            if rs == "EQ":
                b[i] = (A @ x0)[i]
    elif kind == 1:
        # anchored inequalities, nonnegative orthant, some free ubs
        lb = np.zeros(n)
        ub = np.where(rng.random(n) < 0.5, np.inf, rng.uniform(2, 12, size=n))
        A = rng.uniform(0.1, 4, size=(m, n))
        x0 = rng.uniform(0, 5, size=n)
        slack = rng.uniform(0.5, 3, size=m)
        row_sense = ["LE" if rng.random() < 0.7 else "GE" for _ in range(m)]
        b = np.array([(A @ x0)[i] + (slack[i] if rs == "LE" else -slack[i]) for i, rs in enumerate(row_sense)])
        if sense == "MIN":
            c = rng.uniform(0.5, 10, size=n)  # bounded below on the orthant
        else:
            ub = rng.uniform(2, 12, size=n)  # boxed so max is bounded
    else:
        # mixed bounds incl. negative lbs and free vars
        lb = np.where(rng.random(n) < 0.3, -np.inf, rng.uniform(-5, 0, size=n))
        ub = np.where(rng.random(n) < 0.4, np.inf, rng.uniform(1, 8, size=n))
        ub = np.maximum(ub, lb + 0.5)
        row_sense = [["LE", "GE", "EQ"][rng.integers(0, 3)] for _ in range(m)]
        b = rng.uniform(-10, 10, size=m)
    return sense, c, A, row_sense, b, lb, ub


def random_milp():
    n = int(rng.integers(2, 8))
    m = int(rng.integers(1, 6))
    A = rng.uniform(-4, 4, size=(m, n))
    c = rng.uniform(-10, 10, size=n)
    sense = "MIN" if rng.random() < 0.5 else "MAX"
    lb = np.zeros(n)
    ub = rng.uniform(1, 6, size=n)
    vartype = []
    for j in range(n):
        r = rng.random()
        if r < 0.45:
            vartype.append("INTEGER")
            ub[j] = float(int(ub[j]) + 1)
        elif r < 0.65:
            vartype.append("BINARY")
            ub[j] = 1.0
        else:
            vartype.append("CONTINUOUS")
    row_sense = ["LE" if rng.random() < 0.8 else "GE" for _ in range(m)]
    x0 = rng.uniform(0, 1, size=n) * ub
    slack = rng.uniform(0.5, 2, size=m)
    b = np.array([(A @ x0)[i] + (slack[i] if rs == "LE" else -slack[i]) for i, rs in enumerate(row_sense)])
    return sense, c, A, row_sense, b, lb, ub, vartype


def main():
    cases = []
    n_opt = n_inf = n_unb = 0
    while n_opt < 200 or n_inf < 15 or n_unb < 8:
        sense, c, A, row_sense, b, lb, ub = random_lp()
        status, obj = solve_reference_lp(sense, c, A, row_sense, b, lb, ub)
        if status == "OPTIMAL" and n_opt < 200:
            n_opt += 1
        elif status == "INFEASIBLE" and n_inf < 15:
            n_inf += 1
        elif status == "UNBOUNDED" and n_unb < 8:
            n_unb += 1
        else:
            continue
        cases.append({
            "kind": "lp",
            "model": model_json(sense, c, A, row_sense, b, lb, ub, ["CONTINUOUS"] * len(c)),
            "status": status,
            "objective": obj,
        })

    n_milp = 0
    while n_milp < 60:
        sense, c, A, row_sense, b, lb, ub, vartype = random_milp()
        status, obj = solve_reference_milp(sense, c, A, row_sense, b, np.array(lb), np.array(ub), vartype)
        if status not in ("OPTIMAL", "INFEASIBLE"):
            continue
        n_milp += 1
        cases.append({
            "kind": "milp",
            "model": model_json(sense, c, A, row_sense, b, lb, ub, vartype),
            "status": status,
            "objective": obj,
        })

    # 7x6 transportation case: per-source LE supply rows, per-destination EQ
    # demand rows, minimize total freight.
    supplies = [94, 47, 50, 55, 67, 37, 69]
    demands = [14, 47, 21, 70, 72, 58]
    case_rng = np.random.default_rng(70601)
    costs = np.round(case_rng.uniform(5, 30, size=(7, 6)), 2)
    s, d = len(supplies), len(demands)
    n = s * d
    A = np.zeros((s + d, n))
    b = np.zeros(s + d)
    row_sense = []
    for i in range(s):
        for j in range(d):
            A[i, i * d + j] = 1.0
        b[i] = supplies[i]
        row_sense.append("LE")
    for j in range(d):
        for i in range(s):
            A[s + j, i * d + j] = 1.0
        b[s + j] = demands[j]
        row_sense.append("EQ")
    c = costs.reshape(-1)
    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    status, obj = solve_reference_lp("MIN", c, A, row_sense, b, lb, ub)
    assert status == "OPTIMAL"
    transportation_case = {
        "supplies": supplies,
        "demands": demands,
        "costs": [[float(v) for v in row] for row in costs],
        "objective": obj,
    }

    payload = {
        "note": "frozen reference values from an independent LP/MILP solver (HiGHS via scipy)",
        "cases": cases,
        "transportation_case": transportation_case,
    }
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w") as f:
        json.dump(payload, f)
    counts = {}
    for case in cases:
        key = (case["kind"], case["status"])
        counts[key] = counts.get(key, 0) + 1
    print("wrote", OUT)
    print("counts:", counts)
    print("transportation objective:", obj)


if __name__ == "__main__":
    main()
