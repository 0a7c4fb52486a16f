#!/usr/bin/env python3
"""Writes the model files under models/. Run from the repository root.

Values that the source tables leave out are documented in
models/FIXTURE-NOTES.md.
"""

import itertools
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "models"

NO_YES = ["no", "yes"]
LMH = ["low", "medium", "high"]


def var(name, domain, temporality="indexed", **extra):
    d = {"name": name, "domain": domain, "temporality": temporality}
    d.update(extra)
    return d


def mech(cause, effect, constancy="constant-active"):
    return {"cause": cause, "effect": effect, "constancy": constancy}


def mname(cause, effect):
    return f"[{cause}->{effect}]"


def lag(mechanism, constant=None, domain=None):
    if domain is not None:
        return {"mechanism": mechanism, "domain": domain}
    return {"mechanism": mechanism, "constant": constant}


def ctx(*entries):
    """entries: (parent, lag, value) or (parent, ("at", t), value)."""
    out = []
    for parent, where, value in entries:
        e = {"parent": parent}
        if isinstance(where, tuple):
            e["at"] = where[1]
        else:
            e["lag"] = where
        e["value"] = value
        out.append(e)
    return out


def row(context, probabilities):
    return {"context": context, "probabilities": probabilities}


def boundary(probabilities):
    return row("boundary", probabilities)


def model(t1, tn, unit, variables, mechanisms, lags, cpds, noncausal=None):
    m = {
        "range": {"t1": t1, "tn": tn},
        "granularity": unit,
        "variables": variables,
        "mechanisms": mechanisms,
        "lags": lags,
        "cpds": cpds,
    }
    if noncausal:
        m["noncausal"] = noncausal
    return m


def write(name, m):
    (OUT / name).write_text(json.dumps(m, indent=2) + "\n")


# --- glucose / insulin / diabetes -------------------------------------------

# I_t | G_{t-1}=g, I_{t-1}=i, indexed [g][i]
I_GIVEN_GI = {
    ("low", "low"): [0.80, 0.15, 0.05],
    ("low", "medium"): [0.60, 0.30, 0.10],
    ("low", "high"): [0.40, 0.35, 0.25],
    ("medium", "low"): [0.40, 0.45, 0.15],
    ("medium", "medium"): [0.20, 0.60, 0.20],
    ("medium", "high"): [0.15, 0.45, 0.40],
    ("high", "low"): [0.25, 0.35, 0.40],
    ("high", "medium"): [0.10, 0.30, 0.60],
    ("high", "high"): [0.05, 0.15, 0.80],
}

# G_t | I_{t-L}=i, G_{t-1}=g, indexed [i][g]
G_GIVEN_IG = {
    ("low", "low"): [0.075, 0.075, 0.85],
    ("low", "medium"): [0.05, 0.25, 0.70],
    ("low", "high"): [0.05, 0.15, 0.80],
    ("medium", "low"): [0.30, 0.50, 0.20],
    ("medium", "medium"): [0.15, 0.70, 0.15],
    ("medium", "high"): [0.10, 0.50, 0.40],
    ("high", "low"): [0.80, 0.15, 0.05],
    ("high", "medium"): [0.70, 0.25, 0.05],
    ("high", "high"): [0.65, 0.25, 0.10],
}

# G_t | G_{t-1}=g with no insulin parent active
G_GIVEN_G = {"low": [0.70, 0.25, 0.05], "medium": [0.10, 0.80, 0.10], "high": [0.05, 0.25, 0.70]}


def glucose(t1, tn):
    variables = [var("G", LMH), var("I", LMH), var("DM", ["yes", "no"])]
    pairs = [("G", "I"), ("I", "G"), ("DM", "LAG[I->G]"), ("G", "G"), ("I", "I"), ("DM", "DM")]
    mechanisms = [mech(c, e) for c, e in pairs]
    lags = [lag(mname(c, e), domain=[1, 2]) if (c, e) == ("I", "G") else lag(mname(c, e), constant=1) for c, e in pairs]

    dm_rows = [
        boundary([0.1, 0.9]),
        row(ctx(("DM", 1, "yes")), [1.0, 0.0]),
        row(ctx(("DM", 1, "no")), [0.001, 0.999]),
    ]
    i_rows = [boundary([0.24, 0.52, 0.24])]
    for (g, i), p in I_GIVEN_GI.items():
        i_rows.append(row(ctx(("G", 1, g), ("I", 1, i)), p))
    g_rows = [boundary([0.1, 0.8, 0.1])]
    for g, p in G_GIVEN_G.items():
        g_rows.append(row(ctx(("G", 1, g)), p))
    for lag_value in (1, 2):
        for (i, g), p in G_GIVEN_IG.items():
            g_rows.append(row(ctx(("G", 1, g), ("I", lag_value, i)), p))
    for g in LMH:
        for i1 in LMH:
            for i2 in LMH:
                a, b = G_GIVEN_IG[(i1, g)], G_GIVEN_IG[(i2, g)]
                g_rows.append(row(ctx(("G", 1, g), ("I", 1, i1), ("I", 2, i2)), [(x + y) / 2 for x, y in zip(a, b)]))
    lag_rows = [
        boundary([0.9, 0.1]),
        row(ctx(("DM", 1, "yes")), [0.2, 0.8]),
        row(ctx(("DM", 1, "no")), [0.99, 0.01]),
    ]
    cpds = [
        {"variable": "DM", "rows": dm_rows},
        {"variable": "I", "rows": i_rows},
        {"variable": "G", "rows": g_rows},
        {"variable": "LAG[I->G]", "rows": lag_rows},
    ]
    return model(t1, tn, "10 min", variables, mechanisms, lags, cpds)


# --- small structural examples ----------------------------------------------

def two_slice():
    return model(
        1, 2, "1 day",
        [var("A", NO_YES), var("B", NO_YES)],
        [mech("A", "B", "dynamic")],
        [lag("[A->B]", constant=0)],
        [
            {"variable": "A", "rows": [boundary([0.3, 0.7])]},
            {"variable": "[A->B]", "rows": [boundary([0.6, 0.4])]},
            {"variable": "B", "rows": [
                boundary([0.5, 0.5]),
                row(ctx(("A", 0, "no")), [0.9, 0.1]),
                row(ctx(("A", 0, "yes")), [0.2, 0.8]),
            ]},
        ],
    )


def chain_abc():
    return model(
        1, 1, "1 day",
        [var("A", NO_YES), var("B", NO_YES), var("C", NO_YES)],
        [mech("A", "B"), mech("B", "C", "dynamic")],
        [lag("[A->B]", constant=0), lag("[B->C]", constant=0)],
        [
            {"variable": "A", "rows": [boundary([0.3, 0.7])]},
            {"variable": "B", "rows": [
                row(ctx(("A", 0, "no")), [0.7, 0.3]),
                row(ctx(("A", 0, "yes")), [0.25, 0.75]),
            ]},
            {"variable": "[B->C]", "rows": [boundary([0.4, 0.6])]},
            {"variable": "C", "rows": [
                boundary([0.5, 0.5]),
                row(ctx(("B", 0, "no")), [0.8, 0.2]),
                row(ctx(("B", 0, "yes")), [0.1, 0.9]),
            ]},
        ],
    )


def reciprocal_cyclic():
    return model(
        1, 1, "1 day",
        [var("A", NO_YES), var("B", NO_YES)],
        [mech("A", "B"), mech("B", "A")],
        [lag("[A->B]", constant=0), lag("[B->A]", constant=0)],
        [
            {"variable": "A", "rows": [
                row(ctx(("B", 0, "no")), [0.7, 0.3]),
                row(ctx(("B", 0, "yes")), [0.4, 0.6]),
            ]},
            {"variable": "B", "rows": [
                row(ctx(("A", 0, "no")), [0.8, 0.2]),
                row(ctx(("A", 0, "yes")), [0.3, 0.7]),
            ]},
        ],
    )


def age_cancer():
    ac, ca = mname("AGE", "CANCER"), mname("CANCER", "AGE")
    meta = mname(ac, ca)
    return model(
        1, 1, "1 year",
        [var("AGE", ["young", "old"], "abstract"), var("CANCER", NO_YES, "abstract")],
        [mech("AGE", "CANCER", "dynamic"), mech("CANCER", "AGE", "dynamic"), mech(ac, ca)],
        [lag(ac, constant=0), lag(ca, constant=0), lag(meta, constant=0)],
        [
            {"variable": ac, "rows": [boundary([0.7, 0.3])]},
            {"variable": ca, "rows": [
                row(ctx((ac, 0, "active")), [0.0, 1.0]),
                row(ctx((ac, 0, "inactive")), [0.5, 0.5]),
            ]},
            {"variable": "AGE", "rows": [
                boundary([0.6, 0.4]),
                row(ctx(("CANCER", 0, "no")), [0.65, 0.35]),
                row(ctx(("CANCER", 0, "yes")), [0.3, 0.7]),
            ]},
            {"variable": "CANCER", "rows": [
                boundary([0.9, 0.1]),
                row(ctx(("AGE", 0, "young")), [0.95, 0.05]),
                row(ctx(("AGE", 0, "old")), [0.8, 0.2]),
            ]},
        ],
    )


# --- vasodilator / blood pressure / cataract --------------------------------

V_PRIOR = [0.6, 0.4]
BP_GIVEN_V = {"no": [0.3, 0.7], "yes": [0.8, 0.2]}
BP_C_JOINT = [[0.35, 0.05], [0.35, 0.25]]


def vasodilator_base():
    return model(
        1, 1, "1 visit",
        [var("V", NO_YES, "abstract"), var("BP", ["low", "high"], "abstract"), var("C", NO_YES, "abstract")],
        [mech("V", "BP")],
        [lag("[V->BP]", constant=0)],
        [
            {"variable": "V", "rows": [boundary(V_PRIOR)]},
            {"variable": "BP", "rows": [row(ctx(("V", 0, v)), p) for v, p in BP_GIVEN_V.items()]},
            {"variable": "C", "rows": [boundary([0.7, 0.3])]},
        ],
        [{"a": "BP", "b": "C", "joint_table": BP_C_JOINT, "strength_a": 0.7}],
    )


def with_manipulation(m, target, domain):
    """Same construction as make_manipulation, for a target with known rows."""
    dummy = f"{target}_MANIP"
    opts = domain + ["unset"]
    target_var = next(v for v in m["variables"] if v["name"] == target)
    m["variables"].append(var(dummy, opts, target_var["temporality"], manipulates=target))
    m["mechanisms"].append(mech(dummy, target))
    m["lags"].append(lag(mname(dummy, target), constant=0))
    m["cpds"].append({"variable": dummy, "rows": [boundary([0.0] * len(domain) + [1.0])]})
    cpd = next(c for c in m["cpds"] if c["variable"] == target)
    rows = []
    for r in cpd["rows"]:
        base = [] if r["context"] == "boundary" else list(r["context"])
        rows.append(row(sorted(base + ctx((dummy, 0, "unset")), key=lambda e: e["parent"]), r["probabilities"]))
        for k, value in enumerate(domain):
            point = [0.0] * len(domain)
            point[k] = 1.0
            rows.append(row(sorted(base + ctx((dummy, 0, value)), key=lambda e: e["parent"]), point))
    cpd["rows"] = rows
    return m


def vasodilator():
    m = vasodilator_base()
    m = with_manipulation(m, "BP", ["low", "high"])
    m = with_manipulation(m, "C", NO_YES)
    return m


# --- documentation examples -------------------------------------------------

def facts_events():
    """FEVER over four hours; FEVER_FACT holds when fever is present at every
    point, FEVER_EVENT when it is present at some but not all points."""
    stamps = [1, 2, 3, 4]
    variables = [
        var("INFECTION", NO_YES, "abstract"),
        var("FEVER", NO_YES),
        var("FEVER_FACT", NO_YES, "abstract"),
        var("FEVER_EVENT", NO_YES, "abstract"),
    ]
    mechanisms = [mech("INFECTION", "FEVER"), mech("FEVER", "FEVER"), mech("FEVER", "FEVER_FACT"),
                  mech("FEVER", "FEVER_EVENT")]
    lags = [lag("[INFECTION->FEVER]", constant=0), lag("[FEVER->FEVER]", constant=1),
            lag("[FEVER->FEVER_FACT]", constant=0), lag("[FEVER->FEVER_EVENT]", constant=0)]
    fever_rows = []
    for inf, p0 in (("no", [0.95, 0.05]), ("yes", [0.4, 0.6])):
        fever_rows.append(row(ctx(("INFECTION", 0, inf)), p0))
        for prev, p in (("no", {"no": [0.9, 0.1], "yes": [0.3, 0.7]}), ("yes", {"no": [0.6, 0.4], "yes": [0.1, 0.9]})):
            fever_rows.append(row(ctx(("FEVER", 1, prev), ("INFECTION", 0, inf)), p[inf]))
    fact_rows, event_rows = [], []
    for combo in itertools.product(NO_YES, repeat=len(stamps)):
        key = ctx(*[("FEVER", ("at", t), v) for t, v in zip(stamps, combo)])
        present = sum(v == "yes" for v in combo)
        fact_rows.append(row(key, [0.0, 1.0] if present == len(stamps) else [1.0, 0.0]))
        event_rows.append(row(key, [0.0, 1.0] if 0 < present < len(stamps) else [1.0, 0.0]))
    cpds = [
        {"variable": "INFECTION", "rows": [boundary([0.8, 0.2])]},
        {"variable": "FEVER", "rows": fever_rows},
        {"variable": "FEVER_FACT", "rows": fact_rows},
        {"variable": "FEVER_EVENT", "rows": event_rows},
    ]
    return model(1, 4, "1 hour", variables, mechanisms, lags, cpds)


def appendicitis():
    """Pain starting in the right hypochondrium and moving to the right iliac
    region one or two hours later, with nausea alongside."""
    variables = [
        var("APPENDICITIS", NO_YES, "abstract"),
        var("RUQ_PAIN", NO_YES),
        var("RLQ_PAIN", NO_YES),
        var("NAUSEA_VOMIT", NO_YES),
    ]
    mechanisms = [mech("APPENDICITIS", "RUQ_PAIN"), mech("APPENDICITIS", "NAUSEA_VOMIT"),
                  mech("RUQ_PAIN", "RLQ_PAIN")]
    lags = [lag("[APPENDICITIS->RUQ_PAIN]", constant=0), lag("[APPENDICITIS->NAUSEA_VOMIT]", constant=0),
            lag("[RUQ_PAIN->RLQ_PAIN]", domain=[1, 2])]
    rlq = [boundary([0.97, 0.03])]
    for lag_value in (1, 2):
        rlq.append(row(ctx(("RUQ_PAIN", lag_value, "no")), [0.95, 0.05]))
        rlq.append(row(ctx(("RUQ_PAIN", lag_value, "yes")), [0.3, 0.7]))
    for a in NO_YES:
        for b in NO_YES:
            both = [0.95, 0.05] if (a, b) == ("no", "no") else [0.2, 0.8] if (a, b) == ("yes", "yes") else [0.4, 0.6]
            rlq.append(row(ctx(("RUQ_PAIN", 1, a), ("RUQ_PAIN", 2, b)), both))
    cpds = [
        {"variable": "APPENDICITIS", "rows": [boundary([0.95, 0.05])]},
        {"variable": "RUQ_PAIN", "rows": [
            row(ctx(("APPENDICITIS", 0, "no")), [0.9, 0.1]),
            row(ctx(("APPENDICITIS", 0, "yes")), [0.3, 0.7]),
        ]},
        {"variable": "NAUSEA_VOMIT", "rows": [
            row(ctx(("APPENDICITIS", 0, "no")), [0.9, 0.1]),
            row(ctx(("APPENDICITIS", 0, "yes")), [0.4, 0.6]),
        ]},
        {"variable": "RLQ_PAIN", "rows": rlq},
        {"variable": "LAG[RUQ_PAIN->RLQ_PAIN]", "rows": [boundary([0.6, 0.4])]},
    ]
    return model(1, 4, "1 hour", variables, mechanisms, lags, cpds)


def same_year():
    years = ["2021", "2022", "2023"]
    variables = [
        var("YEAR_OF_GI_BLEEDING", years, "abstract"),
        var("YEAR_OF_WEIGHT_LOSS", years, "abstract"),
        var("SAME_YEAR", NO_YES, "abstract"),
    ]
    mechanisms = [mech("YEAR_OF_GI_BLEEDING", "YEAR_OF_WEIGHT_LOSS"), mech("YEAR_OF_GI_BLEEDING", "SAME_YEAR"),
                  mech("YEAR_OF_WEIGHT_LOSS", "SAME_YEAR")]
    lags = [lag(mname(m["cause"], m["effect"]), constant=0) for m in mechanisms]
    weight_loss = []
    for i, y in enumerate(years):
        p = [0.15] * len(years)
        p[i] = 0.7
        weight_loss.append(row(ctx(("YEAR_OF_GI_BLEEDING", 0, y)), p))
    same = []
    for a in years:
        for b in years:
            same.append(row(ctx(("YEAR_OF_GI_BLEEDING", 0, a), ("YEAR_OF_WEIGHT_LOSS", 0, b)),
                            [0.0, 1.0] if a == b else [1.0, 0.0]))
    cpds = [
        {"variable": "YEAR_OF_GI_BLEEDING", "rows": [boundary([0.2, 0.3, 0.5])]},
        {"variable": "YEAR_OF_WEIGHT_LOSS", "rows": weight_loss},
        {"variable": "SAME_YEAR", "rows": same},
    ]
    return model(1, 1, "1 year", variables, mechanisms, lags, cpds)


def main():
    OUT.mkdir(exist_ok=True)
    write("glucose.json", glucose(1, 10))
    write("glucose_tr2.json", glucose(1, 2))
    write("glucose_tr3.json", glucose(1, 3))
    write("two_slice.json", two_slice())
    write("chain_abc.json", chain_abc())
    write("reciprocal_cyclic.json", reciprocal_cyclic())
    write("age_cancer.json", age_cancer())
    write("vasodilator_base.json", vasodilator_base())
    write("vasodilator.json", vasodilator())
    write("facts_events.json", facts_events())
    write("appendicitis.json", appendicitis())
    write("same_year.json", same_year())


if __name__ == "__main__":
    main()
