#!/usr/bin/env python3
"""Normalize plain-text books into a training corpus.

Lowercases, keeps alphabetic runs (with inner apostrophes), and writes one
paragraph per line so context windows never span paragraph breaks.
"""
import argparse
import re
import sys
from pathlib import Path

WORD = re.compile(r"[a-z]+(?:'[a-z]+)*")


def paragraphs(text):
    block = []
    for line in text.splitlines():
        if line.strip():
            block.append(line)
        elif block:
            yield " ".join(block)
            block = []
    if block:
        yield " ".join(block)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("inputs", nargs="+", type=Path)
    ap.add_argument("-o", "--output", type=Path, required=True)
    ap.add_argument("--max-bytes", type=int, default=0,
                    help="stop after this many output bytes (0 = no limit)")
    args = ap.parse_args()

    written = 0
    with args.output.open("w", encoding="utf-8") as out:
        for path in args.inputs:
            text = path.read_text(encoding="utf-8", errors="replace").lower()
            for para in paragraphs(text):
                tokens = WORD.findall(para)
                if not tokens:
                    continue
                line = " ".join(tokens) + "\n"
                if args.max_bytes and written + len(line) > args.max_bytes:
                    print(f"wrote {written} bytes", file=sys.stderr)
                    return
                out.write(line)
                written += len(line)
    print(f"wrote {written} bytes", file=sys.stderr)


if __name__ == "__main__":
    main()
