#!/usr/bin/env python3
"""Reference values for the posterior-complexity failure constants and the
high-probability bound evaluator."""
import math

import mpmath as mp

mp.mp.dps = 40


def classical_prob_lower(n):
    n = mp.mpf(n)
    num = mp.mpf("0.6") * n**3 - mp.mpf("0.5") - 3 * n**3 * 2**n * mp.exp(-(n**2) / 18)
    den = mp.mpf("4.4") * n**3 + mp.mpf("1.5")
    return num / den


def main():
    for n in (8, 15, 16, 20, 32):
        print(f"n={n:2d}: classical branch prob lower = "
              f"{mp.nstr(classical_prob_lower(n), 10)}")
    print("first n with value >= 0.1:",
          min(k for k in range(2, 64) if classical_prob_lower(k) >= mp.mpf("0.1")))
    for n in (8, 16):
        print(f"n={n}: classical threshold 0.6n^3-0.5 = {0.6 * n**3 - 0.5}")
        print(f"n={n}: good-event complexity 5/2 nT + 1 = {5 * n**3 + 1}")
    # bound evaluator example: L=R=1, n=100, delta=0.05, complexity 0
    print("bound(1,1,100,0.05,0) =", math.sqrt(math.log(100 / 0.05) / 100))
    # vacuity at n=8, L=4, R=1, delta=0.05, complexity 5n^3+1
    c = 5 * 8**3 + 1
    print("bound(4,1,8,0.05,2561) =", 4 * math.sqrt((c + math.log(8 / 0.05)) / 8))
    # p_error(n)*(nd+1)/(1-p_error) <= 1 check for n >= 8
    for n in (4, 8, 10):
        p = n**2 * 2**n * math.exp(-(2**n) / n)
        d = (3 * 2 * n * n * 2**n) // 4
        lhs = p * (n * d + 1) / (1 - p) if p < 1 else float("inf")
        print(f"n={n:2d}: p_err={p:.3e}, p(nd+1)/(1-p) = {lhs:.3e}")


if __name__ == "__main__":
    main()
