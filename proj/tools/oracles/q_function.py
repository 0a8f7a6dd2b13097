#!/usr/bin/env python3
"""Reference values for the Gaussian tail function and the normal quantile
(mpmath, 30 digits). The C++ tests freeze these numbers."""
import mpmath as mp

mp.mp.dps = 30


def Q(x):
    return mp.erfc(mp.mpf(x) / mp.sqrt(2)) / 2


def main():
    print("# Q(x) grid (20 digits)")
    for x in ["0", "0.5", "1", "1.5", "2", "3", "4", "5", "6", "7", "8"]:
        print(f"Q({x:>4}) = {mp.nstr(Q(x), 20)}")
    print("# upper-tail bound sanity: Q(x) <= 0.5*exp(-x^2/2) margins")
    for x in ["0.5", "2", "5", "8"]:
        b = mp.exp(-mp.mpf(x) ** 2 / 2) / 2
        print(f"x={x:>4}: bound-Q = {mp.nstr(b - Q(x), 10)}")
    print("# normal quantile reference (Phi^-1(p), 20 digits)")
    for p in ["0.5", "0.975", "0.999", "0.0001", "1e-10", "1e-100", "0.3"]:
        pv = mp.mpf(p)
        if pv < mp.mpf("1e-30"):
            # solve Q(-x) = p in the deep tail where erfinv loses precision
            x0 = -mp.sqrt(-2 * mp.log(pv))
            root = mp.findroot(lambda t: mp.erfc(-t / mp.sqrt(2)) / 2 - pv, x0)
            print(f"ppf({p:>7}) = {mp.nstr(root, 20)}")
        else:
            print(f"ppf({p:>7}) = {mp.nstr(mp.sqrt(2) * mp.erfinv(2 * pv - 1), 20)}")


if __name__ == "__main__":
    main()
