#!/usr/bin/env python3
"""Full-dimension Monte-Carlo certification of the residual-separation
thresholds at n=10 (d = 153600): delta_pop at sigma*sqrt(d) = 2 vs at
sigma = 0.1/sqrt(d), the 10x ratio, and the Lipschitz cap. Pure numpy;
this is the independent oracle the C++ tests are frozen against."""
import math

import numpy as np


def build_w(n, rng):
    T = 2 * n * n
    d = (3 * T * (2**n)) // 4
    eta = 1.0 / (n * math.sqrt(5 * n))
    lam = 1.0 / (n * math.sqrt(d))
    while True:
        k = rng.binomial(n, 0.5, size=d)
        b0 = int((k == 0).sum())
        if T / 2 <= b0 <= T:
            break
    w = (lam / 2.0) * (-1.0 + (1.0 - 2.0 * eta * k / n) ** T)
    bad_idx = np.flatnonzero(k == 0)
    w[bad_idx] = 0.0
    w[bad_idx[: min(b0, T - 1)]] = -eta
    mu = k / n
    return w, mu, lam, d, b0


def F_pop(w, lam):
    return 0.5 * np.dot(w, w) + 0.5 * lam * w.sum() + max(w.max(), 0.0)


def F_emp(w, mu, lam):
    return np.dot(mu, w * w) + lam * np.dot(mu, w) + max(w.max(), 0.0)


def mc(w, mu, lam, sigma, trials, rng):
    f0, fe0 = F_pop(w, lam), F_emp(w, mu, lam)
    dp, de, worst = [], [], 0.0
    for _ in range(trials):
        v = w + sigma * rng.standard_normal(w.shape[0])
        nv = math.sqrt(np.dot(v, v))
        if nv > 1.0:
            v /= nv
        dp.append(abs(F_pop(v, lam) - f0))
        de.append(abs(F_emp(v, mu, lam) - fe0))
        worst = max(worst, dp[-1], de[-1])
    dp, de = np.array(dp), np.array(de)
    return (dp.mean(), dp.std(ddof=1) / math.sqrt(trials),
            de.mean(), de.std(ddof=1) / math.sqrt(trials), worst)


def main():
    rng = np.random.default_rng(42)
    n = 10
    w, mu, lam, d, b0 = build_w(n, rng)
    print(f"n={n}, d={d}, B0={b0}, ||W||={math.sqrt(np.dot(w,w)):.6f}")
    lo_sigma = 0.1 / math.sqrt(d)
    hi_sigma = 2.0 / math.sqrt(d)
    trials = 2000
    lo = mc(w, mu, lam, lo_sigma, trials, rng)
    hi = mc(w, mu, lam, hi_sigma, trials, rng)
    cap = 4 * (3 + lam * math.sqrt(d)) * 1.0
    print(f"sigma=0.1/sqrt(d): delta_pop={lo[0]:.6f} (se {lo[1]:.2e}), "
          f"delta_emp={lo[2]:.6f} (se {lo[3]:.2e}), worst={lo[4]:.4f}")
    print(f"sigma=2/sqrt(d):   delta_pop={hi[0]:.6f} (se {hi[1]:.2e}), "
          f"delta_emp={hi[2]:.6f} (se {hi[3]:.2e}), worst={hi[4]:.4f}")
    print(f"ratio delta_pop = {hi[0] / lo[0]:.2f}  (need >= 10)")
    print(f"delta_pop(large sigma) = {hi[0]:.4f}   (need >= 0.3)")
    print(f"Lipschitz cap 4*L_eff*R = {cap:.4f}  (all samples must be below)")


if __name__ == "__main__":
    main()
