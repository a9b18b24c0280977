#!/usr/bin/env python3
"""Convert sentence-classification sources into `label<TAB>text` TSV.

Two source layouts are supported:

  pair   one file of positive sentences and one of negative sentences,
         one sentence per line (MR, CR, SUBJ, MPQA)
  column one file with a sentence and an integer label per line, separated
         by a tab (binary SST splits)

Examples:

  convert.py pair --positive rt-polarity.pos --negative rt-polarity.neg --out mr.tsv
  convert.py column --input sentiment-train --text-field 0 --label-field 1 --out sst-train.tsv
"""

import argparse
import sys


def read_lines(path, encoding):
    with open(path, encoding=encoding, errors="replace") as handle:
        for line in handle:
            text = " ".join(line.split())
            if text:
                yield text


def convert_pair(args):
    rows = [(1, t) for t in read_lines(args.positive, args.encoding)]
    rows += [(0, t) for t in read_lines(args.negative, args.encoding)]
    return rows


def convert_column(args):
    rows = []
    for number, line in enumerate(read_lines(args.input, args.encoding), start=1):
        fields = line.split("\t") if "\t" in line else line.rsplit(" ", 1)
        try:
            text = fields[args.text_field]
            label = int(fields[args.label_field])
        except (IndexError, ValueError):
            sys.exit(f"{args.input}:{number}: cannot read text and label from {line!r}")
        if label not in (0, 1):
            sys.exit(f"{args.input}:{number}: label {label} is not 0 or 1")
        rows.append((label, " ".join(text.split())))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--encoding", default="latin-1")
    sub = parser.add_subparsers(dest="layout", required=True)

    pair = sub.add_parser("pair")
    pair.add_argument("--positive", required=True, help="sentences labeled 1")
    pair.add_argument("--negative", required=True, help="sentences labeled 0")
    pair.add_argument("--out", required=True)

    column = sub.add_parser("column")
    column.add_argument("--input", required=True)
    column.add_argument("--text-field", type=int, default=0)
    column.add_argument("--label-field", type=int, default=1)
    column.add_argument("--out", required=True)

    args = parser.parse_args()
    rows = convert_pair(args) if args.layout == "pair" else convert_column(args)
    with open(args.out, "w", encoding="utf-8") as out:
        for label, text in rows:
            out.write(f"{label}\t{text.replace(chr(9), ' ')}\n")
    print(f"{args.out}: {len(rows)} examples", file=sys.stderr)


if __name__ == "__main__":
    main()
