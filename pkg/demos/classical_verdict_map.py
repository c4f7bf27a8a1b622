"""Print the continuity/compactness map for power weights as the target smoothness varies.

Run: python3 demos/classical_verdict_map.py
"""

from __future__ import annotations

import math

import numpy as np

from morreyemb import Power, Scale, SpaceSpec, decide

INF = math.inf


def main() -> None:
    src = SpaceSpec(Scale.N, 1.0, 1.0, INF, Power(1))
    print("source: N, s=1, p=1, q=inf, phi=t")
    print("target: N, p=2, q=inf, phi=t**(1/2)")
    print(f"{'s2':>6}  continuous  compact")
    for s2 in np.round(np.arange(-0.5, 1.51, 0.25), 12):
        v = decide(src, SpaceSpec(Scale.N, float(s2), 2.0, INF, Power(2)))
        print(f"{s2:6.2f}  {v.continuous.value:>10}  {v.compact.value:>7}")


if __name__ == "__main__":
    main()
