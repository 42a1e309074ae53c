#!/usr/bin/env python3
"""Convert a utility's day-ahead hourly price export into the wide CSV read by `peakpause ingest`.

The bundled data/sample_prices.csv is synthetic. To work with real prices,
download a historical hourly price table from your utility or market operator
(Ameren Illinois publishes its real-time and day-ahead hourly prices as
spreadsheets, for example). Then convert it:

    scripts/fetch_prices.py --source export.csv --out data/real_prices_wide.csv --cents
    build/tools/peakpause ingest --prices data/real_prices_wide.csv --format wide \
        --out data/real_prices.csv

--source may also be an http(s) URL. The export needs one row per day with a
date column and 24 hourly columns. Columns are matched in order, so both
hour-ending (HE1..HE24) and hour-beginning (0..23) headings work. Missing
cells are left empty, and ingest then rejects or imputes them per --gap-policy.
"""

import argparse
import csv
import io
import re
import sys
import urllib.request
from datetime import datetime

DATE_FORMATS = ("%Y-%m-%d", "%m/%d/%Y", "%m/%d/%y", "%d.%m.%Y")


def read_source(source):
    if re.match(r"https?://", source):
        with urllib.request.urlopen(source, timeout=60) as resp:
            return resp.read().decode("utf-8-sig")
    with open(source, encoding="utf-8-sig") as f:
        return f.read()


def parse_date(text):
    for fmt in DATE_FORMATS:
        try:
            return datetime.strptime(text.strip(), fmt).date()
        except ValueError:
            pass
    raise ValueError(f"unrecognised date {text!r}")


def hour_columns(header, pattern):
    cols = [i for i, name in enumerate(header) if re.fullmatch(pattern, name.strip(), re.IGNORECASE)]
    if len(cols) != 24:
        sys.exit(f"expected 24 hour columns matching {pattern!r}, found {len(cols)}: {header}")
    return cols


def convert(text, date_column, pattern, scale):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    try:
        date_idx = [h.strip().lower() for h in header].index(date_column.lower())
    except ValueError:
        sys.exit(f"no {date_column!r} column in header: {header}")
    cols = hour_columns(header, pattern)

    rows = {}
    for line_no, row in enumerate(reader, start=2):
        if not row or not row[date_idx].strip():
            continue
        day = parse_date(row[date_idx])
        if day in rows:
            sys.exit(f"line {line_no}: duplicate date {day}")
        cells = []
        for c in cols:
            raw = row[c].strip() if c < len(row) else ""
            cells.append("" if raw == "" else f"{float(raw) * scale:.6g}")
        rows[day] = cells
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--source", required=True, help="path or http(s) URL of the utility export")
    ap.add_argument("--out", required=True)
    ap.add_argument("--date-column", default="date")
    ap.add_argument("--hour-pattern", default=r"(HE|h|hour)?\s*\d{1,2}",
                    help="regex matching the 24 hourly column headings")
    ap.add_argument("--cents", action="store_true", help="source prices are in cents/kWh")
    ap.add_argument("--per-mwh", action="store_true", help="source prices are in $/MWh")
    args = ap.parse_args()

    scale = 0.01 if args.cents else 0.001 if args.per_mwh else 1.0
    rows = convert(read_source(args.source), args.date_column, args.hour_pattern, scale)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["date"] + [f"h{h:02d}" for h in range(24)])
        for day in sorted(rows):
            w.writerow([day.isoformat()] + rows[day])
    print(f"wrote {len(rows)} days to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
