#!/usr/bin/env python3
"""Reference values for the two-point (sign) construction: exact E|sum of n
Rademacher|, the induced generalization gap, and the exact output entropy in
bits. Exact rational arithmetic via integers."""
import math
from fractions import Fraction


def e_abs_sum(n):
    tot = Fraction(0)
    for k in range(n + 1):
        s = 2 * k - n
        tot += Fraction(math.comb(n, k), 2**n) * abs(s)
    return tot


def p_nonneg(n):
    num = sum(math.comb(n, k) for k in range(n + 1) if 2 * k - n >= 0)
    return Fraction(num, 2**n)


def hb_bits(p):
    p = float(p)
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def main():
    for n in (1, 2, 4, 16, 64):
        ea = e_abs_sum(n)
        gap = ea / n
        lower = 1 / math.sqrt(2 * n)
        # SE of the per-dataset gap |S|/n over 10^4 datasets
        es2 = Fraction(1, n)  # E[(|S|/n)^2] = E[S^2]/n^2 = 1/n
        sd = math.sqrt(float(es2) - float(gap) ** 2)
        print(
            f"n={n:3d}: E|S|={float(ea):.10f} gap={float(gap):.10f} "
            f"1/sqrt(2n)={lower:.10f} margin={float(gap)-lower:+.6f} "
            f"3SE(1e4)={3*sd/100:.6f}"
        )
    print("# output entropy in bits (exact Pr(sum>=0), ties positive)")
    for n in range(1, 9):
        p = p_nonneg(n)
        print(f"n={n}: Pr={p} = {float(p):.6f}  H={hb_bits(p):.10f} bits")


if __name__ == "__main__":
    main()
