#!/usr/bin/env python3
"""Generate a large synthetic case from copies of a base case.

Writes a MatPower case and a matching area map, for example:

    uv run python scripts/make-synthetic-grid.py case118.m big.m big.areas --copies 90 --areas 4
"""

import argparse
import logging
import sys
from pathlib import Path

# Add packages to path for direct execution
sys.path.insert(0, str(Path(__file__).parent.parent / "packages" / "gridflow-core" / "src"))

from gridflow.exceptions import GridflowError  # noqa: E402
from gridflow.grid.io import load_case, save_case  # noqa: E402
from gridflow.partition.areas import format_area_map  # noqa: E402
from gridflow.synthetic import build_synthetic_grid  # noqa: E402


def main() -> None:
    """Build the grid and write both files."""
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("base", type=Path, help="Base case file")
    parser.add_argument("case_out", type=Path, help="Output case file (.m or .json)")
    parser.add_argument("areas_out", type=Path, help="Output area map")
    parser.add_argument("--copies", type=int, default=90)
    parser.add_argument("--areas", type=int, default=4)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    try:
        base = load_case(args.base)
        net, area_map = build_synthetic_grid(base, args.copies, args.areas, args.seed)
    except GridflowError as e:
        print(f"[!] {e}")
        sys.exit(1)

    save_case(net, args.case_out)
    header = (
        f"{args.copies} copies of {args.base.name} in {args.areas} areas, seed {args.seed}\n"
        "bus_id area_id"
    )
    args.areas_out.write_text(format_area_map(area_map, header), encoding="utf-8")
    print(f"[OK] {net.n_bus} buses, {len(net.branches)} branches -> {args.case_out}")
    print(f"[OK] area map -> {args.areas_out}")


if __name__ == "__main__":
    main()
