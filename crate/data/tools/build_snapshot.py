"""Rebuild the bundled case/death snapshot from two archived PyPI sdists.

  epidemia==0.0.3        data/csse_confirmed.csv, data/csse_deaths.csv
                         (JHU CSSE global time series, through 2020-04-22)
  django-covid19==0.4rc1 django_covid19/fixtures/province.json
                         (DXY-aggregated US state series, through 2020-06-08)

Usage: python build_snapshot.py <epidemia-src-dir> <django-covid19-src-dir> <out-dir>
"""
import csv
import datetime as dt
import json
import re
import shutil
import sys
from pathlib import Path

US_START = dt.date(2020, 1, 22)
US_END = dt.date(2020, 5, 13)

# DXY writes state names without spaces ("NewYork").
def split_camel(name):
    return re.sub(r"(?<=[a-z])(?=[A-Z])", " ", name)

SPECIAL = {"DistrictOfColumbia": "District of Columbia"}


def jhu_header(d):
    return f"{d.month}/{d.day}/{d.year % 100}"


def main(epi, dj, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    shutil.copy(Path(epi) / "data/csse_confirmed.csv", out / "jhu_global_confirmed.csv")
    shutil.copy(Path(epi) / "data/csse_deaths.csv", out / "jhu_global_deaths.csv")

    rows = json.load(open(Path(dj) / "django_covid19/fixtures/province.json"))
    days = [US_START + dt.timedelta(days=i) for i in range((US_END - US_START).days + 1)]
    series = {}
    for r in rows:
        f = r["fields"]
        if f["countryCode"] != "USA":
            continue
        name = SPECIAL.get(f["provinceName"], split_camel(f["provinceName"]))
        by_day = {}
        for rec in json.loads(f["dailyData"]):
            d = dt.datetime.strptime(str(rec["dateId"]), "%Y%m%d").date()
            by_day[d] = (rec["confirmedCount"], rec["deadCount"])
        conf, dead, last = [], [], (0, 0)
        for d in days:
            rec = by_day.get(d, last)
            # Missing counts in a record keep the previous value.
            last = tuple(prev if v is None else v for v, prev in zip(rec, last))
            conf.append(last[0])
            dead.append(last[1])
        series[name] = (None, conf, dead)

    hdr = ["UID", "iso2", "iso3", "code3", "FIPS", "Admin2", "Province_State",
           "Country_Region", "Lat", "Long_", "Combined_Key"]
    dates = [jhu_header(d) for d in days]
    for measure, idx in (("confirmed", 1), ("deaths", 2)):
        with open(out / f"jhu_us_{measure}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(hdr + dates)
            for name in sorted(series):
                w.writerow(["", "US", "USA", "840", "", "", name, "US", "", "",
                            f"{name}, US"] + series[name][idx])


if __name__ == "__main__":
    main(*sys.argv[1:4])
