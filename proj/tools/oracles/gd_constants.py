#!/usr/bin/env python3
"""Reference values for the GD engine tests: last-iterate bound example,
closed-form spot values, norm-interval endpoints, and the exact analysis of
how often the norm interval's lower edge can be violated under the
bad-coordinate event at the default schedule."""
import math

from scipy.stats import binom


def params(n):
    T = 2 * n * n
    d = (3 * T * (2**n)) // 4  # 1.5 n^2 2^n, integer for all n
    eta = 1.0 / (n * math.sqrt(5 * n))
    lam = 1.0 / (n * math.sqrt(d))
    return T, d, eta, lam


def good_value(k, n, eta, lam, T):
    return (lam / 2.0) * (-1.0 + (1.0 - 2.0 * eta * k / n) ** T)


def main():
    # opt-error example: R^2/(2 eta T) + (ln T + 2) eta L^2 / 2 at (0.1, 10, 1, 1)
    v = 1.0 / (2 * 0.1 * 10) + (math.log(10) + 2) * 0.1 * 1.0 / 2
    print(f"opt_error(0.1,10,1,1)      = {v:.15f}")

    # closed-form spot: mu=1, eta=0.1, lam=0.01, T=2
    print(f"closed-form spot           = {good_value(1, 1, 0.1, 0.01, 2):.15f}")

    for n in (8, 10, 12):
        T, d, eta, lam = params(n)
        lo, hi = 1.0 / (2 * math.sqrt(n)), 1.0 / math.sqrt(n)
        # mean good-coordinate contribution to ||W_T||^2 (per-coordinate expectation
        # over the column-sum K ~ Bin(n, 1/2), k=0 columns handled separately)
        g2 = d * sum(
            math.comb(n, k) * 2.0**-n * good_value(k, n, eta, lam, T) ** 2
            for k in range(1, n + 1)
        )
        # norm^2 = min(B0, T-1)*eta^2 + good-sum; threshold on B0 for norm >= lo
        b_star = math.ceil((lo * lo - g2) / (eta * eta) - 1e-12)
        rv = binom(d, 2.0**-n)
        ev = rv.cdf(T) - rv.cdf(T / 2 - 1)
        viol = (rv.cdf(b_star - 1) - rv.cdf(T / 2 - 1)) / ev
        typ = math.sqrt(1.5 * n * n * eta * eta + g2)
        print(
            f"n={n:2d}: interval=[{lo:.6f},{hi:.6f}] typical_norm={typ:.6f} "
            f"good_sum={g2:.6e} B0_threshold={b_star} "
            f"P(event)={ev:.6f} P(norm<lo | event)={viol:.6e}"
        )
        # upper edge worst case: B0 = T all activated? activation cap T-1
        up = math.sqrt((T - 1) * eta * eta + g2)
        print(f"       worst-case norm (B0>=T-1) = {up:.6f} (must be <= {hi:.6f})")


if __name__ == "__main__":
    main()
