#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc.

Case-fold table: Unicode simple case folding (one codepoint to one
codepoint). Derived from Python's unicodedata: casefold() where the full
folding is a single codepoint, falling back to the simple lowercase
mapping where the full folding expands (sharp s, Turkish dotted I, ...).

Alnum ranges: codepoints whose general category is L* or Nd.
"""

import sys
import unicodedata

MAX_CP = 0x110000


def fold(cp: int) -> int:
    ch = chr(cp)
    cf = ch.casefold()
    if len(cf) == 1:
        return ord(cf)
    lc = ch.lower()
    if len(lc) == 1:
        return ord(lc)
    return cp


def is_alnum(cp: int) -> bool:
    cat = unicodedata.category(chr(cp))
    return cat.startswith("L") or cat == "Nd"


def main() -> None:
    folds = []
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        f = fold(cp)
        if f != cp:
            folds.append((cp, f))

    ranges = []
    start = None
    for cp in range(MAX_CP + 1):
        alnum = cp < MAX_CP and not (0xD800 <= cp <= 0xDFFF) and is_alnum(cp)
        if alnum and start is None:
            start = cp
        elif not alnum and start is not None:
            ranges.append((start, cp - 1))
            start = None

    out = sys.stdout
    out.write("// Generated by scripts/gen_unicode_tables.py (Unicode data from\n")
    out.write("// Python %s unicodedata, UCD %s). Do not edit by hand.\n" %
              (".".join(map(str, sys.version_info[:3])), unicodedata.unidata_version))
    out.write("\n")
    out.write("static constexpr CaseFoldEntry kCaseFolds[] = {\n")
    for i in range(0, len(folds), 6):
        chunk = ", ".join("{0x%X, 0x%X}" % p for p in folds[i:i + 6])
        out.write("    %s,\n" % chunk)
    out.write("};\n\n")
    out.write("static constexpr CpRange kAlnumRanges[] = {\n")
    for i in range(0, len(ranges), 6):
        chunk = ", ".join("{0x%X, 0x%X}" % p for p in ranges[i:i + 6])
        out.write("    %s,\n" % chunk)
    out.write("};\n")


if __name__ == "__main__":
    main()
