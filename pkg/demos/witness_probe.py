"""Build witness families and show how their target norms separate or collapse.

Run: python3 demos/witness_probe.py
"""

from __future__ import annotations

import math

from morreyemb import (
    Power,
    Scale,
    SpaceSpec,
    WitnessUnavailable,
    build_family_single_cube,
    decide,
    probe_compactness,
    select_witness,
)

INF = math.inf


def show(label: str, src: SpaceSpec, tgt: SpaceSpec) -> None:
    v = decide(src, tgt)
    print(f"{label}: continuous={v.continuous.value} compact={v.compact.value}")
    try:
        fam = select_witness(src, tgt, J=40, K=6)
    except WitnessUnavailable as exc:
        print(f"  no witness: {exc}")
        return
    rep = probe_compactness(fam, src, tgt)
    print(f"  construction={rep.construction_id} levels={list(fam.levels)}")
    print(f"  max source norm {rep.max_source_norm:.3g}, min pairwise gap {rep.min_pairwise_target_gap:.3g}")
    print("  target norms " + " ".join(f"{t:.3g}" for t in rep.target_norms))
    unit = probe_compactness(build_family_single_cube(src, fam.levels, J=40), src, tgt)
    print("  unit source norm, target norms " + " ".join(f"{t:.3g}" for t in unit.target_norms))


def main() -> None:
    show("identity", SpaceSpec(Scale.N, 0.0, 2.0, 2.0, Power(2)), SpaceSpec(Scale.N, 0.0, 2.0, 2.0, Power(2)))
    show("smoothness drop", SpaceSpec(Scale.N, 1.0, 2.0, 2.0, Power(2)), SpaceSpec(Scale.N, 0.0, 2.0, 2.0, Power(2)))
    show("at threshold", SpaceSpec(Scale.N, 0.5, 1.0, INF, Power(1)), SpaceSpec(Scale.N, 0.0, 2.0, INF, Power(2)))


if __name__ == "__main__":
    main()
