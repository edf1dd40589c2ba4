#!/usr/bin/env python3
"""Regenerates the JSON case fixtures under data/cases.

IEEE 14 and 30 bus data follow the usual MATPOWER tables (line charging and
transformer taps dropped; the branch model has neither). The hybrid case
attaches two wind farms to the 30-bus grid through a five-terminal MTDC
system, with STATCOMs at buses 4 and 18 and SVCs at buses 14 and 21.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parents[2] / "data" / "cases"


def bus(id, kind="AC", kv=135.0, vmin=0.94, vmax=1.06, pd=0.0, qd=0.0, gs=0.0, bs=0.0):
    return {"id": str(id), "kind": kind, "base_kv": kv, "v_min_sq": round(vmin * vmin, 6),
            "v_max_sq": round(vmax * vmax, 6), "shunt_g": gs, "shunt_b": bs, "p_load": pd, "q_load": qd}


def line(id, f, t, r, x, mva, kind="AC", **extra):
    d = {"id": str(id), "kind": kind, "from_bus": str(f), "to_bus": str(t), "r": r, "x": x,
         "capacity_sq": float(mva * mva)}
    d.update(extra)
    return d


def gen(id, b, pmax, qmin, qmax, c2, c1, c0=0.0, pmin=0.0):
    return {"id": str(id), "bus": str(b), "p_min": pmin, "p_max": pmax, "q_min": qmin, "q_max": qmax,
            "cost_c0": c0, "cost_c1": c1, "cost_c2": c2}


def case(name, buses, lines, gens, converters=(), farms=(), voll=None, s_base=100.0):
    d = {"format": "windflow-case/1", "name": name, "s_base_mva": s_base}
    if voll is not None:
        d["voll"] = voll
    d.update({"buses": buses, "lines": lines, "converters": list(converters), "generators": gens,
              "wind_farms": list(farms)})
    return d


def write(name, doc):
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


def two_bus():
    return case("two_bus", [bus(1), bus(2, pd=100.0)], [line("L1", 1, 2, 0.0, 0.1, 300.0)],
                [gen("G1", 1, 300.0, -100.0, 100.0, 0.0, 10.0)])


def three_bus():
    return case("three_bus_ring", [bus(1), bus(2, pd=100.0), bus(3)],
                [line("L12", 1, 2, 0.01, 0.1, 300.0), line("L23", 2, 3, 0.01, 0.1, 300.0),
                 line("L13", 1, 3, 0.01, 0.1, 300.0)],
                [gen("G1", 1, 300.0, -100.0, 100.0, 0.0, 10.0)])


def three_bus_star():
    return case("three_bus_star", [bus(1), bus(2, pd=80.0, qd=20.0), bus(3, pd=50.0, qd=15.0)],
                [line("L12", 1, 2, 0.02, 0.08, 200.0), line("L13", 1, 3, 0.03, 0.1, 200.0)],
                [gen("G1", 1, 300.0, -150.0, 150.0, 0.01, 20.0)])


IEEE14_BUS = [  # id, pd, qd, bs
    (1, 0, 0, 0), (2, 21.7, 12.7, 0), (3, 94.2, 19.0, 0), (4, 47.8, -3.9, 0), (5, 7.6, 1.6, 0),
    (6, 11.2, 7.5, 0), (7, 0, 0, 0), (8, 0, 0, 0), (9, 29.5, 16.6, 19.0), (10, 9.0, 5.8, 0),
    (11, 3.5, 1.8, 0), (12, 6.1, 1.6, 0), (13, 13.5, 5.8, 0), (14, 14.9, 5.0, 0)]
IEEE14_BRANCH = [
    (1, 2, 0.01938, 0.05917), (1, 5, 0.05403, 0.22304), (2, 3, 0.04699, 0.19797), (2, 4, 0.05811, 0.17632),
    (2, 5, 0.05695, 0.17388), (3, 4, 0.06701, 0.17103), (4, 5, 0.01335, 0.04211), (4, 7, 0.0, 0.20912),
    (4, 9, 0.0, 0.55618), (5, 6, 0.0, 0.25202), (6, 11, 0.09498, 0.1989), (6, 12, 0.12291, 0.25581),
    (6, 13, 0.06615, 0.13027), (7, 8, 0.0, 0.17615), (7, 9, 0.0, 0.11001), (9, 10, 0.03181, 0.0845),
    (9, 14, 0.12711, 0.27038), (10, 11, 0.08205, 0.19207), (12, 13, 0.22092, 0.19988), (13, 14, 0.17093, 0.34802)]
IEEE14_GEN = [  # bus, pmax, qmin, qmax, c2, c1
    (1, 332.4, 0.0, 10.0, 0.0430293, 20.0), (2, 140.0, -40.0, 50.0, 0.25, 20.0), (3, 100.0, 0.0, 40.0, 0.01, 40.0),
    (6, 100.0, -6.0, 24.0, 0.01, 40.0), (8, 100.0, -6.0, 24.0, 0.01, 40.0)]


def ieee14():
    buses = [bus(i, pd=pd, qd=qd, bs=bs) for i, pd, qd, bs in IEEE14_BUS]
    # The source table leaves ratings unset; 250 MVA is above every base-case flow.
    lines = [line(f"L{k + 1}", f, t, r, x, 250.0) for k, (f, t, r, x) in enumerate(IEEE14_BRANCH)]
    gens = [gen(f"G{b}", b, pmax, qmin, qmax, c2, c1) for b, pmax, qmin, qmax, c2, c1 in IEEE14_GEN]
    return case("ieee14", buses, lines, gens)


IEEE30_BUS = [  # id, pd, qd, bs
    (1, 0, 0, 0), (2, 21.7, 12.7, 0), (3, 2.4, 1.2, 0), (4, 7.6, 1.6, 0), (5, 0, 0, 0.19), (6, 0, 0, 0),
    (7, 22.8, 10.9, 0), (8, 30.0, 30.0, 0), (9, 0, 0, 0), (10, 5.8, 2.0, 0), (11, 0, 0, 0), (12, 11.2, 7.5, 0),
    (13, 0, 0, 0), (14, 6.2, 1.6, 0), (15, 8.2, 2.5, 0), (16, 3.5, 1.8, 0), (17, 9.0, 5.8, 0), (18, 3.2, 0.9, 0),
    (19, 9.5, 3.4, 0), (20, 2.2, 0.7, 0), (21, 17.5, 11.2, 0), (22, 0, 0, 0), (23, 3.2, 1.6, 0),
    (24, 8.7, 6.7, 0.04), (25, 0, 0, 0), (26, 3.5, 2.3, 0), (27, 0, 0, 0), (28, 0, 0, 0), (29, 2.4, 0.9, 0),
    (30, 10.6, 1.9, 0)]
IEEE30_BRANCH = [  # from, to, r, x, rating MVA
    (1, 2, 0.02, 0.06, 130), (1, 3, 0.05, 0.19, 130), (2, 4, 0.06, 0.17, 65), (3, 4, 0.01, 0.04, 130),
    (2, 5, 0.05, 0.2, 130), (2, 6, 0.06, 0.18, 65), (4, 6, 0.01, 0.04, 90), (5, 7, 0.05, 0.12, 70),
    (6, 7, 0.03, 0.08, 130), (6, 8, 0.01, 0.04, 32), (6, 9, 0.0, 0.21, 65), (6, 10, 0.0, 0.56, 32),
    (9, 11, 0.0, 0.21, 65), (9, 10, 0.0, 0.11, 65), (4, 12, 0.0, 0.26, 65), (12, 13, 0.0, 0.14, 65),
    (12, 14, 0.12, 0.26, 32), (12, 15, 0.07, 0.13, 32), (12, 16, 0.09, 0.2, 32), (14, 15, 0.22, 0.2, 16),
    (16, 17, 0.08, 0.19, 16), (15, 18, 0.11, 0.22, 16), (18, 19, 0.06, 0.13, 16), (19, 20, 0.03, 0.07, 32),
    (10, 20, 0.09, 0.21, 32), (10, 17, 0.03, 0.08, 32), (10, 21, 0.03, 0.07, 32), (10, 22, 0.07, 0.15, 32),
    (21, 22, 0.01, 0.02, 32), (15, 23, 0.1, 0.2, 16), (22, 24, 0.12, 0.18, 16), (23, 24, 0.13, 0.27, 16),
    (24, 25, 0.19, 0.33, 16), (25, 26, 0.25, 0.38, 16), (25, 27, 0.11, 0.21, 16), (28, 27, 0.0, 0.4, 65),
    (27, 29, 0.22, 0.42, 16), (27, 30, 0.32, 0.6, 16), (29, 30, 0.24, 0.45, 16), (8, 28, 0.06, 0.2, 32),
    (6, 28, 0.02, 0.06, 32)]
IEEE30_GEN = [  # bus, pmax, qmin, qmax, c2, c1
    (1, 80.0, -20.0, 150.0, 0.02, 2.0), (2, 80.0, -20.0, 60.0, 0.0175, 1.75), (22, 50.0, -15.0, 62.5, 0.0625, 1.0),
    (27, 55.0, -15.0, 48.7, 0.00834, 3.25), (23, 30.0, -10.0, 40.0, 0.025, 3.0), (13, 40.0, -15.0, 44.7, 0.025, 3.0)]


def ieee30_parts(rating_scale=1.0):
    buses = [bus(i, vmin=0.95, vmax=1.1, pd=pd, qd=qd, bs=bs) for i, pd, qd, bs in IEEE30_BUS]
    lines = [line(f"L{k + 1}", f, t, r, x, mva * rating_scale) for k, (f, t, r, x, mva) in enumerate(IEEE30_BRANCH)]
    gens = [gen(f"G{b}", b, pmax, qmin, qmax, c2, c1) for b, pmax, qmin, qmax, c2, c1 in IEEE30_GEN]
    return buses, lines, gens


def ieee30():
    buses, lines, gens = ieee30_parts()
    return case("ieee30", buses, lines, gens)


def converter_station(name, ac_bus, dc_bus, mva, r_sw=None):
    """PC bus, coupling transformer, converter line and converter for one VSC station."""
    pc = f"P{name}"
    buses = [bus(pc, kind="PC", vmin=0.9, vmax=1.1)]
    lines = [line(f"T{name}", pc, ac_bus, 0.0015, 0.12, mva, kind="PC_TRANSFORMER"),
             line(f"V{name}", dc_bus, pc, 0.001, 0.0, mva, kind="VSC_CONVERTER")]
    conv = {"id": f"C{name}", "pc_bus": pc, "dc_bus": dc_bus, "r_shunt": 800.0, "m_sq_min": 0.25, "m_sq_max": 1.0}
    if r_sw is not None:
        conv["r_sw"] = r_sw
    return buses, lines, conv


def dc_bus(id):
    # Squared DC voltage sits near 8x the squared PC voltage (modulation index near 1).
    return {"id": id, "kind": "DC", "base_kv": 150.0, "v_min_sq": 6.5, "v_max_sq": 10.5, "shunt_g": 0.0,
            "shunt_b": 0.0, "p_load": 0.0, "q_load": 0.0}


def hybrid30(name="hybrid30", rating_scale=1.0, dc_rating=120.0, voll=None, wind_cost=0.5):
    buses, lines, gens = ieee30_parts(rating_scale)
    convs = []
    for d in ("D1", "D2", "D3", "D4", "D5"):
        buses.append(dc_bus(d))
    buses += [bus("W1", kv=33.0, vmin=0.95, vmax=1.1), bus("W2", kv=33.0, vmin=0.95, vmax=1.1)]
    for st, ac, dc, mva in (("1", "1", "D1", 150.0), ("15", "15", "D2", 150.0), ("30", "30", "D3", 150.0),
                            ("W1", "W1", "D4", 120.0), ("W2", "W2", "D5", 150.0)):
        b, l, c = converter_station(st, ac, dc, mva)
        buses += b
        lines += l
        convs.append(c)
    lines += [line("DC14", "D4", "D1", 0.02, 0.0, dc_rating, kind="DC_BI"),
              line("DC42", "D4", "D2", 0.03, 0.0, dc_rating, kind="DC_MONO"),
              line("DC52", "D5", "D2", 0.02, 0.0, dc_rating, kind="DC_BI"),
              line("DC53", "D5", "D3", 0.03, 0.0, dc_rating, kind="DC_MONO"),
              line("DC12", "D1", "D2", 0.025, 0.0, dc_rating, kind="DC_MONO")]
    for ac in ("4", "18"):
        dcb = f"S{ac}dc"
        buses.append(dc_bus(dcb))
        b, l, c = converter_station(f"S{ac}", ac, dcb, 50.0, r_sw=1600.0)
        buses += b
        lines += l
        convs.append(c)
    for ac in ("14", "21"):
        buses.append(bus(f"SVC{ac}", vmin=0.95, vmax=1.1))
        lines.append(line(f"SVC{ac}", ac, f"SVC{ac}", 0.0, 0.0, 60.0, kind="SVC", b_min=-20.0, b_max=40.0))
    farms = [
        {"id": "WF1", "bus": "W1", "turbines": [{"model": "VESTAS-V90-3.0", "count": 20, "rated_mw": 3.0}],
         "power_factor_min": 0.95, "wake_loss": 0.15, "cost_c1": wind_cost},
        {"id": "WF2", "bus": "W2", "turbines": [{"model": "MERVENTO-3.6-118", "count": 30, "rated_mw": 3.6}],
         "power_factor_min": 0.95, "wake_loss": 0.15, "cost_c1": wind_cost},
    ]
    return case(name, buses, lines, gens, convs, farms, voll=voll)


def small_wind():
    """Five-bus grid with two directly connected wind farms, for large scenario counts."""
    buses = [bus(1), bus(2, pd=60.0, qd=15.0), bus(3, pd=50.0, qd=10.0), bus(4, pd=40.0, qd=10.0), bus(5)]
    lines = [line("L12", 1, 2, 0.01, 0.08, 150.0), line("L23", 2, 3, 0.015, 0.10, 150.0),
             line("L34", 3, 4, 0.01, 0.09, 150.0), line("L45", 4, 5, 0.012, 0.08, 150.0),
             line("L51", 5, 1, 0.01, 0.07, 150.0)]
    gens = [gen("G1", 1, 150.0, -60.0, 80.0, 0.02, 2.0), gen("G4", 4, 80.0, -40.0, 50.0, 0.04, 3.0)]
    farms = [
        {"id": "WF1", "bus": "3", "turbines": [{"model": "VESTAS-V90-3.0", "count": 10, "rated_mw": 3.0}],
         "power_factor_min": 0.95, "wake_loss": 0.15, "cost_c1": 0.5},
        {"id": "WF2", "bus": "5", "turbines": [{"model": "MERVENTO-3.6-118", "count": 10, "rated_mw": 3.6}],
         "power_factor_min": 0.95, "wake_loss": 0.15, "cost_c1": 0.5},
    ]
    return case("small_wind", buses, lines, gens, farms=farms)


def main():
    write("two_bus", two_bus())
    write("three_bus_ring", three_bus())
    write("three_bus_star", three_bus_star())
    write("ieee14", ieee14())
    write("ieee30", ieee30())
    write("hybrid30", hybrid30())
    # Tight variant: AC ratings at 90%, a thinner DC corridor and a high VoLL, so the dispatch
    # chosen for the expected wind is costly to correct in extreme scenarios.
    write("hybrid30_tight", hybrid30("hybrid30_tight", rating_scale=0.9, dc_rating=80.0, voll=2000.0))
    write("small_wind", small_wind())


if __name__ == "__main__":
    main()
