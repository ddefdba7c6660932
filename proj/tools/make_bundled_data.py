#!/usr/bin/env python3
"""Generate the bundled illustrative dataset under data/bundled/.

The numbers are synthetic. Annual flows run 2000-2017, monthly flows run
2000-2017 plus January-October 2018. The 2018 months are solved so that
the partial-year regressions fitted on 2001-2017 project fixed full-year
growth rates on both a ten-month and a nine-month basis, and 2017 emission
shares are chosen so both share-weighted totals come out at set values.

Usage: python3 tools/make_bundled_data.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np

SEED = 20181231
YEARS = list(range(2000, 2018))
TARGET = 2018

SOURCES = ["coal", "oil", "natural_gas", "cement"]
FLOWS = ["production", "import", "export"]

# Emission per file unit (MtCO2 per Mt, or per 1e9 m3), matching scenarios.ini.
CO2_PER_UNIT = {
    "coal": 20.95 * 26.59 * 0.92 * 44 / 12 / 1000,
    "oil": 41.8 * 20.0 * 0.98 * 44 / 12 / 1000,
    "natural_gas": 38.9 * 15.3 * 0.99 * 44 / 12 / 1000,
    "cement": 0.0855 * 44 / 12,
}

# Projected full-year growth, percent, by basis months.
GROWTH = {
    10: {"coal": 4.8, "oil": 5.6, "natural_gas": 17.4, "cement": 2.6},
    9: {"coal": 4.5, "oil": 3.6, "natural_gas": 17.7, "cement": 1.0},
}
TOTAL = {10: 5.5, 9: 4.8}
TOTAL_2017_MT = 9000.0
CEMENT_SHARE = 0.08

# 2017 flow structure per unit of apparent consumption.
STRUCTURE = {
    "coal": {"production": 0.935, "import": 0.080, "export": 0.0025, "neu": 0.0125},
    "oil": {"production": 0.330, "import": 0.720, "export": 0.090, "neu": 0.040},
    "natural_gas": {"production": 0.620, "import": 0.400, "export": 0.014, "neu": 0.006},
}

# Base annual growth, percent, for 2001..2017.
BASE_GROWTH = {
    "coal": [8, 10, 15, 15, 10, 8, 8, 3, 6, 6, 8, 4, 3, -2, -3, -2, 1],
    "oil": [3, 7, 10, 12, 4, 6, 5, 2, 6, 10, 5, 5, 4, 5, 4, 5, 5],
    "natural_gas": [10, 13, 12, 18, 20, 20, 20, 12, 14, 20, 18, 13, 14, 9, 6, 8, 15],
    "cement": [8, 11, 15, 12, 10, 16, 11, 5, 18, 15, 16, 7, 9, 3, -5, 2, -1],
}
FLOW_NOISE = {"production": 1.5, "import": 6.0, "export": 8.0}
# Year-to-year spread of the January-October share of a flow.
SHARE_NOISE = {
    ("coal", "production"): 0.025, ("coal", "import"): 0.04, ("coal", "export"): 0.05,
    ("oil", "production"): 0.017, ("oil", "import"): 0.034, ("oil", "export"): 0.05,
    ("natural_gas", "production"): 0.019, ("natural_gas", "import"): 0.031,
    ("natural_gas", "export"): 0.05, ("cement", "production"): 0.005,
}
STOCK_SD = {"coal": 30.0, "oil": 5.0, "natural_gas": 1.5}
SEASON = np.array([0.080, 0.072, 0.083, 0.082, 0.085, 0.086, 0.085, 0.085, 0.084, 0.083, 0.086, 0.089])


def shares_2017():
    # Four shares: sum to 1, fixed cement share, and both totals exact.
    a = np.array([
        [1.0, 1.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 1.0],
        [GROWTH[10][s] for s in SOURCES],
        [GROWTH[9][s] for s in SOURCES],
    ])
    b = np.array([1.0, CEMENT_SHARE, TOTAL[10], TOTAL[9]])
    return dict(zip(SOURCES, np.linalg.solve(a, b)))


def round3(x):
    return float(f"{x:.3f}")


def ols(x, y):
    x, y = np.asarray(x), np.asarray(y)
    slope = np.sum((x - x.mean()) * (y - y.mean())) / np.sum((x - x.mean()) ** 2)
    return y.mean() - slope * x.mean(), slope


def main(outdir):
    rng = np.random.default_rng(SEED)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    w = shares_2017()
    apparent_2017 = {s: TOTAL_2017_MT * w[s] / CO2_PER_UNIT[s] for s in SOURCES}

    annual = {}   # (source, year) -> dict of flows
    monthly = {}  # (source, flow, year) -> 12 values
    for s in SOURCES:
        kinds = ["production"] if s == "cement" else FLOWS
        level_2017 = (
            {"production": apparent_2017[s]}
            if s == "cement"
            else {k: apparent_2017[s] * STRUCTURE[s][k] for k in kinds}
        )
        for k in kinds:
            g = np.array(BASE_GROWTH[s], float) + rng.normal(0.0, FLOW_NOISE[k], len(BASE_GROWTH[s]))
            levels = [level_2017[k]]
            for gy in g[::-1]:
                levels.append(levels[-1] / (1 + gy / 100))
            levels = levels[::-1]
            for y, total in zip(YEARS, levels):
                f10 = SEASON[:10].sum() + rng.normal(0.0, SHARE_NOISE[(s, k)])
                head = SEASON[:10] / SEASON[:10].sum() * f10
                tail = SEASON[10:] / SEASON[10:].sum() * (1 - f10)
                months = [round3(v) for v in np.concatenate([head, tail]) * total]
                monthly[(s, k, y)] = months
                annual.setdefault((s, y), {})[k] = round3(sum(months))
        for y in YEARS:
            rec = annual[(s, y)]
            rec.setdefault("import", 0.0)
            rec.setdefault("export", 0.0)
            if s == "cement":
                rec["stock"] = 0.0
                rec["neu"] = 0.0
            else:
                rec["stock"] = 0.0 if y == 2017 else round3(rng.normal(0.0, STOCK_SD[s]))
                supply = rec["production"] + rec["import"] - rec["export"]
                frac = STRUCTURE[s]["neu"] / (
                    STRUCTURE[s]["production"] + STRUCTURE[s]["import"] - STRUCTURE[s]["export"])
                rec["neu"] = round3(supply * frac * (1 + rng.normal(0.0, 0.03)))

    # Solve January-October 2018 so each regression lands on its target.
    for s in SOURCES:
        kinds = ["production"] if s == "cement" else FLOWS
        for k in kinds:
            x_at = {}
            for n in (9, 10):
                xs, ys = [], []
                for y in YEARS[1:]:
                    c0, c1 = sum(monthly[(s, k, y - 1)][:n]), sum(monthly[(s, k, y)][:n])
                    f0, f1 = annual[(s, y - 1)][k], annual[(s, y)][k]
                    xs.append(100 * (c1 - c0) / c0)
                    ys.append(100 * (f1 - f0) / f0)
                a, b = ols(xs, ys)
                x_at[n] = (GROWTH[n][s] - a) / b
            prev = monthly[(s, k, 2017)]
            head = [round3(v * (1 + x_at[9] / 100)) for v in prev[:9]]
            m10 = (1 + x_at[10] / 100) * sum(prev[:10]) - sum(head)
            if m10 <= 0:
                raise SystemExit(f"{s} {k}: October 2018 would be negative")
            monthly[(s, k, TARGET)] = head + [round3(m10)]

    def num(v):
        return f"{v:.3f}"

    header = "year,month,source,production,import,export,stock_change,non_energy_use\n"
    with open(out / "flows_annual.csv", "w") as f:
        f.write("# Illustrative synthetic data; coal, oil, cement in 1e6 t, natural_gas in 1e9 m3\n")
        f.write(header)
        for y in YEARS:
            for s in SOURCES:
                r = annual[(s, y)]
                f.write(f"{y},,{s},{num(r['production'])},{num(r['import'])},{num(r['export'])},"
                        f"{num(r['stock'])},{num(r['neu'])}\n")

    with open(out / "flows_monthly.csv", "w") as f:
        f.write("# Illustrative synthetic data; monthly flows, same units as flows_annual.csv\n")
        f.write(header)
        for y in YEARS + [TARGET]:
            for m in range(12 if y < TARGET else 10):
                for s in SOURCES:
                    vals = [monthly[(s, k, y)][m] if (s, k, y) in monthly else 0.0 for k in FLOWS]
                    f.write(f"{y},{m + 1},{s},{num(vals[0])},{num(vals[1])},{num(vals[2])},0,0\n")

    with open(out / "gdp.csv", "w") as f:
        f.write("year,gdp_index,secondary_share\n")
        gdp, share = 100.0, 0.455
        for y in YEARS + [TARGET]:
            f.write(f"{y},{gdp:.2f},{share:.3f}\n")
            gdp *= 1 + max(0.06, rng.normal(0.09, 0.015))
            share = min(0.48, max(0.39, share + rng.normal(-0.002, 0.004)))

    with open(out / "products.csv", "w") as f:
        f.write("year,month,product,output\n")
        for product, level, growth in (("crude_steel", 129.0, 0.09), ("thermal_power", 1110.0, 0.08)):
            for y in YEARS:
                f.write(f"{y},,{product},{level:.1f}\n")
                level *= 1 + rng.normal(growth, 0.03)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "bundled")
