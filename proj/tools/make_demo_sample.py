#!/usr/bin/env python3
"""Regenerates data/demo_sample.csv: 50 synthetic station-day rows labelled
with CPCB sub-index breakpoints (AQI = max sub-index)."""
import random
import sys

# (lo, hi) concentration per bucket, CPCB national AQI breakpoints.
BREAKS = {
    "PM2.5": [0, 30, 60, 90, 120, 250, 380],
    "PM10": [0, 50, 100, 250, 350, 430, 510],
    "NO2": [0, 40, 80, 180, 280, 400, 520],
    "NH3": [0, 200, 400, 800, 1200, 1800, 2400],
    "CO": [0, 1.0, 2.0, 10, 17, 34, 51],
    "SO2": [0, 40, 80, 380, 800, 1600, 2400],
    "O3": [0, 50, 100, 168, 208, 748, 1000],
}
AQI = [0, 50, 100, 200, 300, 400, 500]
BUCKETS = ["Good", "Satisfactory", "Moderate", "Poor", "Very Poor", "Severe"]
COLUMNS = ["PM2.5", "PM10", "NO2", "NH3", "CO", "SO2", "O3"]
STATIONS = ["CH001", "AP001", "BR006", "DL007", "MH005"]


def sub_index(name, x):
    b = BREAKS[name]
    for k in range(6):
        if x <= b[k + 1] or k == 5:
            return AQI[k] + (x - b[k]) * (AQI[k + 1] - AQI[k]) / (b[k + 1] - b[k])


def bucket(aqi):
    for k in range(6):
        if aqi <= AQI[k + 1]:
            return BUCKETS[k]
    return BUCKETS[5]


def sample(rng, name, level):
    b = BREAKS[name]
    lo, hi = b[level], b[level + 1]
    v = lo + (hi - lo) * rng.uniform(0.15, 0.85)
    return round(v, 2)


def main():
    rng = random.Random(20240611)
    rows = []
    # Fixed rows: PM10 severe with PM2.5 moderate and the rest good.
    rows.append(["BR006", {"PM2.5": 60.0, "PM10": 480.0, "NO2": 12.0, "NH3": 20.0,
                           "CO": 0.4, "SO2": 8.0, "O3": 18.0}])
    for i in range(49):
        # Particulates drive the level; gases mostly stay low.
        level = rng.choices(range(6), weights=[8, 12, 12, 7, 6, 4])[0]
        vals = {}
        for name in COLUMNS:
            if name in ("PM2.5", "PM10"):
                lvl = max(0, min(5, level + rng.choice([-1, 0, 0, 0])))
            else:
                lvl = min(level, rng.choice([0, 0, 0, 1, 1, 2]))
            vals[name] = sample(rng, name, lvl)
        rows.append([STATIONS[i % len(STATIONS)], vals])

    out = ["StationId,Date,PM2.5,PM10,NO2,NH3,CO,SO2,O3,AQI,AQI_Bucket"]
    for n, (station, vals) in enumerate(rows):
        aqi = max(sub_index(k, v) for k, v in vals.items())
        label = bucket(aqi)
        cells = [f"{vals[c]:g}" for c in COLUMNS]
        # A few gaps and unlabelled rows exercise preprocessing.
        if n in (7, 19, 33):
            cells[rng.randrange(len(cells))] = ""
        aqi_text, label_text = f"{round(aqi)}", label
        if n in (12, 41):
            aqi_text, label_text = "", ""
        date = f"2020-{1 + n // 28:02d}-{1 + n % 28:02d}"
        out.append(",".join([station, date] + cells + [aqi_text, label_text]))
    sys.stdout.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
