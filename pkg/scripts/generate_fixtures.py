"""Generate the H4 / H8 STO-3G FCIDUMP fixtures with PySCF.

    python scripts/generate_fixtures.py fixtures/
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from services.molecules import build_hydrogen_fixtures  # noqa: E402
from utils.debug import log_info  # noqa: E402


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Write hydrogen-cluster FCIDUMP fixtures.")
    parser.add_argument("out_dir", nargs="?", default="fixtures")
    args = parser.parse_args(argv)

    for name, fixture in build_hydrogen_fixtures(args.out_dir).items():
        log_info("Reference energies", name=name, e_hf=f"{fixture.hf_energy:.10f}", e_fci=f"{fixture.fci_energy:.10f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
