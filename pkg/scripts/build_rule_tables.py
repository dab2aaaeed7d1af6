"""Rebuild the coset derivation tables shipped in src/hecke3/data/.

    python scripts/build_rule_tables.py            # all k
    python scripts/build_rule_tables.py 4 5        # selected k

k=5 takes a minute or two and ~3 GB of memory.
"""

import argparse
import logging
import time

from hecke3.cosetsearch import build_table, write_table


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("ks", nargs="*", type=int, default=[2, 3, 4, 5])
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    for k in args.ks:
        t = time.time()
        res = build_table(k)
        path = write_table(res)
        print(f"k={k}: {len(res.entries)} entries, missing={len(res.missing)}, "
              f"denominators={res.denominators}, {time.time() - t:.1f}s -> {path}")


if __name__ == "__main__":
    main()
