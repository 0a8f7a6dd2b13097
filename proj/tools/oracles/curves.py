#!/usr/bin/env python3
"""Reference values for the analytic curve evaluators: the decoder error bound
n^2 2^n exp(-2^n/n) + 6 exp(-n^2/18), the information lower bounds, and the
mask-information gap curve. mpmath at 40 digits."""
import mpmath as mp

mp.mp.dps = 40


def proberr(n):
    n = mp.mpf(n)
    return n**2 * 2**n * mp.exp(-(2**n) / n) + 6 * mp.exp(-(n**2) / 18)


def cmi_gap(n):
    n = mp.mpf(n)
    return (
        n * mp.mpf(2) ** (-(n**2))
        + n * mp.exp(-(n**2) / 18)
        + 2 * n**5 * 2**n * mp.exp(-(2**n) / n)
        + 12 * n**3 * mp.exp(-(n**2) / 18)
        + 1
    )


def main():
    print("# decoder error bound curve")
    for n in (1, 4, 8, 9, 10, 11, 12, 16, 20, 40):
        print(f"n={n:2d}: {mp.nstr(proberr(n), 12)}")
    print("decreasing on 10..40:",
          all(proberr(k + 1) < proberr(k) for k in range(10, 40)))
    print("all < 0.1 on 10..40:", all(proberr(k) < mp.mpf('0.1') for k in range(10, 41)))

    print("# mask-information gap curve (bits)")
    for n in (4, 8, 12, 15, 16, 17, 20, 40):
        print(f"n={n:2d}: {mp.nstr(cmi_gap(n), 12)}")
    print("gap <= 1.1 for 16..40:", all(cmi_gap(k) <= mp.mpf('1.1') for k in range(16, 41)))

    # iomi lower at n=10 with analytic p
    p = proberr(10)
    print("iomi_lower(10, p_analytic) =", mp.nstr(1.5 * 10**3 * (1 - 2 * p) - 1, 12))
    print("sharper variant            =",
          mp.nstr(1.5 * 10**3 * (1 - mp.mpf(11) / 10 * p) - 1, 12))
    print("1.2n^3-1 at n=10           =", 1.2 * 1000 - 1)

    # excess-risk constant on the default schedule, L=R=1 and L=4
    print("# sqrt(n) * (gen+opt) at schedule T=2n^2, eta=1/(n sqrt(5n))")
    for L in (1, 4):
        worst = mp.mpf(0)
        for n in range(4, 201):
            nn = mp.mpf(n)
            eta = 1 / (nn * mp.sqrt(5 * nn))
            T = 2 * nn**2
            gen = 4 * L**2 * mp.sqrt(T) * eta + 4 * L**2 * T * eta / nn
            opt = 1 / (2 * eta * T) + (mp.log(T) + 2) * eta * L**2 / 2
            worst = max(worst, mp.sqrt(nn) * (gen + opt))
        print(f"L={L}: max over n in 4..200 = {mp.nstr(worst, 8)}")


if __name__ == "__main__":
    main()
