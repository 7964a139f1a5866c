"""Minimal MATPOWER case-file reader used by the oracle scripts.

Deliberately independent of the C++ implementation: a regex pull of the
matrices is enough for the well-formed files under data/cases/.
"""

import re


def parse_case(path):
    text = open(path).read()
    text = re.sub(r"%.*", "", text)
    text = text.replace("...", " ")

    def matrix(name):
        m = re.search(r"mpc\.%s\s*=\s*\[(.*?)\];" % name, text, re.S)
        if not m:
            return []
        rows = []
        for row in m.group(1).split(";"):
            row = row.strip()
            if not row:
                continue
            rows.append([float(v) for v in row.split()])
        return rows

    base = float(re.search(r"mpc\.baseMVA\s*=\s*([0-9.eE+-]+)", text).group(1))
    return {
        "base_mva": base,
        "bus": matrix("bus"),
        "gen": matrix("gen"),
        "branch": matrix("branch"),
        "gencost": matrix("gencost"),
    }


def parse_case_json(doc):
    """Same dict shape from a native case/1 JSON document."""
    bus = [[b["id"], {"PQ": 1, "PV": 2, "REF": 3, "ISOLATED": 4}[b["btype"]], b["pd"],
            b["qd"], b["gs"], b["bs"], 1, b["vm"], b["va"], b["base_kv"], 1, b["vmax"],
            b["vmin"]] for b in doc["buses"]]
    gen = [[g["bus"], g["pg"], g["qg"], g["qmax"], g["qmin"], g["vg"], doc["base_mva"],
            g["status"], g["pmax"], g["pmin"]] for g in doc["gens"]]
    branch = [[br["fbus"], br["tbus"], br["r"], br["x"], br["b"], br["rate_a"], 0, 0,
               br["tap"], br["shift"], br["status"], br.get("angmin", -360),
               br.get("angmax", 360)] for br in doc["branches"]]
    gencost = [[gc["model"], gc["startup"], gc["shutdown"], gc["ncost"]] + list(gc["coeffs"])
               for gc in doc["gencosts"]]
    return {"base_mva": doc["base_mva"], "bus": bus, "gen": gen, "branch": branch,
            "gencost": gencost}
