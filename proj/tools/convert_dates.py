#!/usr/bin/env python3
"""Turn calendar timestamps into event times for the ppinfer CLI.

Input: one ISO date or datetime per line (blank lines and '#' comments skipped).
Output: one event time per line.

  years   fractional years since --origin (a year, default: first event's year)
  days    days since the first event's midnight
  hours   hour of the day in [0, 24), for folding many days onto one
"""

import argparse
import datetime as dt
import sys


def parse(line):
    text = line.strip()
    return dt.datetime.fromisoformat(text) if "T" in text or " " in text else dt.datetime.combine(
        dt.date.fromisoformat(text), dt.time())


def fractional_year(t):
    start = dt.datetime(t.year, 1, 1)
    length = (dt.datetime(t.year + 1, 1, 1) - start).total_seconds()
    return t.year + (t - start).total_seconds() / length


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("input", nargs="?", type=argparse.FileType("r"), default=sys.stdin)
    ap.add_argument("--unit", choices=["years", "days", "hours"], default="years")
    ap.add_argument("--origin", type=int, help="origin year for --unit years")
    args = ap.parse_args(argv)

    times = sorted(parse(l) for l in args.input if l.strip() and not l.lstrip().startswith("#"))
    if not times:
        return 0
    if args.unit == "years":
        origin = args.origin if args.origin is not None else times[0].year
        values = [fractional_year(t) - origin for t in times]
    elif args.unit == "days":
        first = dt.datetime.combine(times[0].date(), dt.time())
        values = [(t - first).total_seconds() / 86400.0 for t in times]
    else:
        values = [t.hour + t.minute / 60.0 + t.second / 3600.0 for t in times]
    if any(v < 0 for v in values):
        ap.error("an event falls before the origin")
    for v in values:
        print(repr(v))
    return 0


if __name__ == "__main__":
    sys.exit(main())
