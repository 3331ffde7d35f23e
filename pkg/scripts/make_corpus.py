"""Regenerate the generated part of the fixture corpus.

    python scripts/make_corpus.py [--seed N]

Handwritten fixtures live next to the generated ones and are left alone;
generated files are named ``gen_*``.
"""

import argparse
import random
from pathlib import Path

from plcsem.demo import interlock
from plcsem.generate import random_ld, random_sfc
from plcsem.il import format_il
from plcsem.ld import format_ld
from plcsem.ld2il import compile_ld
from plcsem.sfc import format_sfc

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--count", type=int, default=16)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    for old in CORPUS.glob("*/gen_*"):
        old.unlink()
    for i in range(args.count):
        (CORPUS / "ld" / f"gen_{i:02d}.ld.json").write_text(format_ld(random_ld(rng)))
        (CORPUS / "il" / f"gen_{i:02d}.il").write_text(format_il(compile_ld(random_ld(rng))))
    for i in range(args.count * 3 // 4):
        (CORPUS / "sfc" / f"gen_{i:02d}.sfc.json").write_text(format_sfc(random_sfc(rng)))
    (CORPUS / "sfc" / "interlock.sfc.json").write_text(format_sfc(interlock()))
    (CORPUS / "sfc" / "interlock_buggy.sfc.json").write_text(format_sfc(interlock(buggy=True)))


if __name__ == "__main__":
    main()
