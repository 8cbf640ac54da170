#!/usr/bin/env python3
"""Regenerate src/unicode_tables.inc.

The classes mirror what the `regex` module matches for \\p{L}, \\p{N} and \\s,
so the hand-written pre-tokenizer splits text the same way the GPT-2 pattern
does under that engine.
"""
import sys

import regex

CLASSES = [
    ("kLetterRanges", regex.compile(r"\p{L}")),
    ("kNumberRanges", regex.compile(r"\p{N}")),
    ("kSpaceRanges", regex.compile(r"\s")),
]


def ranges(pattern):
    out = []
    start = None
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            hit = False
        else:
            hit = pattern.match(chr(cp)) is not None
        if hit and start is None:
            start = cp
        elif not hit and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, 0x10FFFF))
    return out


def main(path):
    lines = [
        "// Generated by tools/gen_unicode_tables.py (regex " + regex.__version__ + "). Do not edit.",
        "",
    ]
    for name, pattern in CLASSES:
        rs = ranges(pattern)
        lines.append(f"inline constexpr CodepointRange {name}[] = {{")
        for lo, hi in rs:
            lines.append(f"    {{0x{lo:04X}, 0x{hi:04X}}},")
        lines.append("};")
        lines.append("")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.inc")
