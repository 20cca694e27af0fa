#!/usr/bin/env python3
"""Regenerate the bundled 100-step wellstream profile.

The profile blends an oil-rich anchor toward a gas-rich one and back
(half-sine weight) under a constant 30-bar choke drop at 66 C inlet,
giving the canonical rise-and-fall GOR history. Deterministic: rerunning
this script must reproduce data/fixture_profile.csv byte for byte.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from chokegor.fluids import normalize
from chokegor.process import synthesize_profile, write_profile_csv
from chokegor.fluids import load_fluid_system

REPO = Path(__file__).resolve().parents[1]

OIL_ANCHOR = [0.50, 0.03, 0.07, 0.20, 0.15, 0.05]
GAS_ANCHOR = [0.85, 0.05, 0.04, 0.035, 0.02, 0.005]


def main() -> None:
    fluid = load_fluid_system(REPO / "data" / "spe5_fluid.json")
    profile = synthesize_profile(
        normalize(OIL_ANCHOR),
        normalize(GAS_ANCHOR),
        steps=100,
        day_step=28.0,
        p_in_bara=96.0,
        t_in_c=66.0,
        dp_bara=30.0,
    )
    for target in (
        REPO / "data" / "fixture_profile.csv",
        REPO / "src" / "chokegor" / "data" / "fixture_profile.csv",
    ):
        write_profile_csv(target, fluid, profile)
        print(f"wrote {target}")


if __name__ == "__main__":
    main()
