"""Compare closed-form smoothness indices with slope fits on dyadic samples.

Run: python3 demos/weight_indices.py
"""

from __future__ import annotations

from morreyemb import InvLog, LogBlend, Power, PowerLog, PsiCritical, sigma, sigma_inf, sigma_inf_numeric, sigma_numeric

WEIGHTS = {
    "t**(1/2)": Power(2),
    "t/log": PsiCritical(1),
    "1/log": InvLog(a=10),
    "log blend": LogBlend(),
    "t*log**-1 (u=1)": PowerLog(1, -1, 3),
}


def main() -> None:
    s1, rho = 0.0, 0.5
    print(f"s1={s1}, rho={rho}")
    print(f"{'weight':>16} {'sigma':>8} {'fit':>8} {'sigma_inf':>10} {'fit':>8}")
    for name, phi in WEIGHTS.items():
        a, b = sigma(s1, phi, rho), sigma_numeric(s1, phi, rho)
        c, e = sigma_inf(s1, phi), sigma_inf_numeric(s1, phi)
        print(f"{name:>16} {a:8.4f} {b.mid:8.4f} {c:10.4f} {e.mid:8.4f}")


if __name__ == "__main__":
    main()
