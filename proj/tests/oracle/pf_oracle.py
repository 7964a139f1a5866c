#!/usr/bin/env python3
"""Reference Newton power flow, run once to freeze the case9 solved state."""

import json
import math
import sys

import numpy as np

from mp_case import parse_case


def ybus_of(case):
    bus = case["bus"]
    nb = len(bus)
    bus_index = {int(b[0]): i for i, b in enumerate(bus)}
    y = np.zeros((nb, nb), dtype=complex)
    for br in case["branch"]:
        if br[10] != 1:
            continue
        f, t = bus_index[int(br[0])], bus_index[int(br[1])]
        ys = 1.0 / complex(br[2], br[3])
        bc = 1j * br[4] / 2.0
        tap = br[8] if br[8] != 0 else 1.0
        shift = np.exp(1j * br[9] * math.pi / 180.0)
        y[f, f] += (ys + bc) / (tap * tap)
        y[f, t] += -ys / (tap * np.conj(shift))
        y[t, f] += -ys / (tap * shift)
        y[t, t] += ys + bc
    for i, b in enumerate(bus):
        y[i, i] += complex(b[4], b[5]) / case["base_mva"]
    return y, bus_index


def newton_pf(case, tol=1e-10, max_iter=30):
    base = case["base_mva"]
    bus = case["bus"]
    nb = len(bus)
    y, bus_index = ybus_of(case)

    s_spec = np.array([complex(-b[2], -b[3]) / base for b in bus])
    vm = np.array([b[7] for b in bus])
    va = np.array([b[8] * math.pi / 180.0 for b in bus])
    for g in case["gen"]:
        if g[7] != 1:
            continue
        i = bus_index[int(g[0])]
        s_spec[i] += complex(g[1], g[2]) / base
        vm[i] = g[5]

    types = [int(b[1]) for b in bus]
    pv = [i for i in range(nb) if types[i] == 2]
    pq = [i for i in range(nb) if types[i] == 1]
    ang = pv + pq

    for _ in range(max_iter):
        v = vm * np.exp(1j * va)
        mis = v * np.conj(y @ v) - s_spec
        f = np.concatenate([mis[ang].real, mis[pq].imag])
        if np.abs(f).max() < tol:
            break
        ibus = y @ v
        dV = np.diag(v)
        dE = np.diag(v / np.abs(v))
        ds_dva = 1j * dV @ np.conj(np.diag(ibus) - y @ dV)
        ds_dvm = dV @ np.conj(y @ dE) + np.conj(np.diag(ibus)) @ dE
        na, nm = len(ang), len(pq)
        jac = np.zeros((na + nm, na + nm))
        jac[:na, :na] = ds_dva[np.ix_(ang, ang)].real
        jac[:na, na:] = ds_dvm[np.ix_(ang, pq)].real
        jac[na:, :na] = ds_dva[np.ix_(pq, ang)].imag
        jac[na:, na:] = ds_dvm[np.ix_(pq, pq)].imag
        step = np.linalg.solve(jac, -f)
        va[ang] += step[:na]
        vm[pq] += step[na:]

    return vm, va * 180.0 / math.pi, np.abs(f).max()


def main():
    case = parse_case(sys.argv[1])
    vm, va_deg, mis = newton_pf(case)
    doc = {"vm": [round(v, 12) for v in vm.tolist()],
           "va_deg": [round(v, 12) for v in va_deg.tolist()],
           "max_mismatch": float(mis)}
    json.dump(doc, open(sys.argv[2], "w"), indent=1)
    print("mismatch", mis)


if __name__ == "__main__":
    main()
