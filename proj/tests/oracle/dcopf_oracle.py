#!/usr/bin/env python3
"""Reference DC OPF oracle (cvxopt QP), run once to freeze expected values.

Usage:
    dcopf_oracle.py case <case.m>                 -> prints the objective
    dcopf_oracle.py batch <instances.json> <out>  -> expected objectives JSON
"""

import json
import math
import sys

import numpy as np
from cvxopt import matrix, solvers

from mp_case import parse_case, parse_case_json

solvers.options["show_progress"] = False
solvers.options["abstol"] = 1e-10
solvers.options["reltol"] = 1e-10
solvers.options["feastol"] = 1e-10


def dcopf_objective(case):
    base = case["base_mva"]
    bus = case["bus"]
    gen = [g for g in case["gen"] if g[7] == 1]
    cost = [c for g, c in zip(case["gen"], case["gencost"]) if g[7] == 1]
    branch = [b for b in case["branch"] if b[10] == 1]
    nb, ng, nl = len(bus), len(gen), len(branch)
    bus_index = {int(b[0]): i for i, b in enumerate(bus)}
    ref = next(i for i, b in enumerate(bus) if int(b[1]) == 3)

    bf = np.zeros((nl, nb))
    pfinj = np.zeros(nl)
    limits = np.zeros(nl)
    for k, br in enumerate(branch):
        tap = br[8] if br[8] != 0 else 1.0
        b = 1.0 / (br[3] * tap)
        f, t = bus_index[int(br[0])], bus_index[int(br[1])]
        bf[k, f] = b
        bf[k, t] = -b
        pfinj[k] = -b * br[9] * math.pi / 180.0
        limits[k] = br[5] / base
    cft = np.zeros((nl, nb))
    for k, br in enumerate(branch):
        cft[k, bus_index[int(br[0])]] = 1
        cft[k, bus_index[int(br[1])]] = -1
    bbus = cft.T @ bf
    pbusinj = cft.T @ pfinj

    cg = np.zeros((nb, ng))
    for k, g in enumerate(gen):
        cg[bus_index[int(g[0])], k] = 1

    # variables x = [theta (nb), pg (ng)]
    nx = nb + ng
    P = np.zeros((nx, nx))
    q = np.zeros(nx)
    k0 = 0.0
    for k, c in enumerate(cost):
        n = int(c[3])
        coeffs = c[4:4 + n]
        c2 = coeffs[-3] if n >= 3 else 0.0
        c1 = coeffs[-2] if n >= 2 else 0.0
        c0 = coeffs[-1] if n >= 1 else 0.0
        P[nb + k, nb + k] = 2.0 * c2 * base * base
        q[nb + k] = c1 * base
        k0 += c0

    # equalities: balance rows + reference angle
    a_eq = np.zeros((nb + 1, nx))
    b_eq = np.zeros(nb + 1)
    a_eq[:nb, :nb] = bbus
    a_eq[:nb, nb:] = -cg
    for i, b in enumerate(bus):
        b_eq[i] = -pbusinj[i] - (b[2] + b[4]) / base
    a_eq[nb, ref] = 1.0

    # inequalities: rated flows both directions plus pg bounds
    rows = []
    rhs = []
    for k in range(nl):
        if limits[k] <= 0:
            continue
        row = np.zeros(nx)
        row[:nb] = bf[k]
        rows.append(row.copy())
        rhs.append(limits[k] - pfinj[k])
        rows.append(-row)
        rhs.append(limits[k] + pfinj[k])
    for k, g in enumerate(gen):
        row = np.zeros(nx)
        row[nb + k] = 1
        rows.append(row.copy())
        rhs.append(g[8] / base)
        rows.append(-row)
        rhs.append(-g[9] / base)
    G = np.array(rows)
    h = np.array(rhs)

    sol = solvers.qp(matrix(P), matrix(q), matrix(G), matrix(h), matrix(a_eq), matrix(b_eq),
                     kktsolver="ldl")
    if sol["status"] != "optimal":
        return None
    x = np.array(sol["x"]).flatten()
    return 0.5 * x @ P @ x + q @ x + k0


def main():
    if sys.argv[1] == "case":
        case = parse_case(sys.argv[2])
        print(repr(dcopf_objective(case)))
    elif sys.argv[1] == "batch":
        docs = json.load(open(sys.argv[2]))
        out = []
        for doc in docs["instances"]:
            case = parse_case_json(doc)
            f = dcopf_objective(case)
            out.append({"name": doc["name"], "objective": f})
        json.dump({"expected": out}, open(sys.argv[3], "w"), indent=1)
        print("wrote", sys.argv[3], len(out), "objectives")


if __name__ == "__main__":
    main()
