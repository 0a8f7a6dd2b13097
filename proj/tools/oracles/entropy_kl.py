#!/usr/bin/env python3
"""Reference values for the entropy/KL/Fano unit tests (mpmath, 30 digits)."""
import mpmath as mp

mp.mp.dps = 30


def hb(p):
    p = mp.mpf(p)
    if p == 0 or p == 1:
        return mp.mpf(0)
    return -p * mp.log(p) - (1 - p) * mp.log(1 - p)


def main():
    print("h_b(0.25) nats        =", mp.nstr(hb("0.25"), 20))
    print("h_b(0.75) bits        =", mp.nstr(hb("0.75") / mp.log(2), 20))
    print("h_b(0.5)  nats        =", mp.nstr(hb("0.5"), 20))
    print("h_b(0.02) nats        =", mp.nstr(hb("0.02"), 20))

    p, q = [mp.mpf("0.9"), mp.mpf("0.1")], [mp.mpf("0.5"), mp.mpf("0.5")]
    kl = sum(a * mp.log(a / b) for a, b in zip(p, q))
    print("KL((.9,.1)||(.5,.5))  =", mp.nstr(kl, 20))

    # fano upper form: min(h_b(p) + p*H, ln2 + p*H) at H = 10 nats, p = 0.02
    H = mp.mpf(10)
    pe = mp.mpf("0.02")
    v = min(hb(pe) + pe * H, mp.log(2) + pe * H)
    print("fano(H=10, p=0.02)    =", mp.nstr(v, 20))

    # mixture example: min(0.2 + ln2, 1.0 + ln2)
    print("0.2 + ln2             =", mp.nstr(mp.mpf("0.2") + mp.log(2), 20))
    print("ln(2)                 =", mp.nstr(mp.log(2), 20))
    print("ln(4)                 =", mp.nstr(mp.log(4), 20))


if __name__ == "__main__":
    main()
