"""Independent reference values for the C++ unit tests (mpmath / scipy / fractions)."""
from fractions import Fraction
from math import comb

import mpmath as mp
from scipy import integrate

mp.mp.dps = 30


def rho(ball, qdens, lo, hi, breaks):
    pts = sorted({lo, hi, *[b for b in breaks if lo < b < hi]})
    return mp.quad(lambda x: qdens(x) / ball(x), pts)


def power_ball(kappa, h):
    def f(x):
        a = max(x - h, 0)
        b = min(x + h, 1)
        return mp.mpf(b) ** (kappa + 1) - mp.mpf(a) ** (kappa + 1)
    return f


def hard(alpha, C, M):
    if C > 6:
        eps, S = mp.mpf(6) / C, mp.mpf(1) / 4
    else:
        eps, S = mp.mpf(1), mp.mpf(1) / 4 * (mp.mpf(C) / 6) ** (1 / mp.mpf(alpha))
    r = S / (6 * M)
    outer = (1 - eps / 3 * (r / S) ** (alpha - 1)) / (4 * M * r)
    mid = eps / (6 * M * r) * (r / S) ** (alpha - 1)
    edges = [S * k / (3 * M) for k in range(3 * M + 1)]
    pd = [outer if k % 3 != 1 else mid for k in range(3 * M)]
    qd = [0 if k % 3 != 1 else 1 / (2 * M * r) for k in range(3 * M)]

    def mass(dens, a, b):
        tot = mp.mpf(0)
        for k in range(3 * M):
            lo, hi = max(a, edges[k]), min(b, edges[k + 1])
            if hi > lo:
                tot += dens[k] * (hi - lo)
        return tot

    return edges, pd, qd, mass, S, r, eps


def main():
    print("power kappa=1 rho:")
    for h in [0.1, 0.02]:
        v = rho(power_ball(1, h), lambda x: 1, 0, 1, [h, 1 - h])
        print(f"  h={h}: {mp.nstr(v, 17)}")
    print("power kappa=2 rho h=0.05:", mp.nstr(rho(power_ball(2, 0.05), lambda x: 1, 0, 1, [0.05, 0.95]), 17))

    M = 8
    edges, pd, qd, mass, S, r, eps = hard(2, 3, M)
    print(f"hard(2,3,8): S={mp.nstr(S,17)} r={mp.nstr(r,17)} eps={eps}")
    for h in [0.003, 0.01, 0.05]:
        brk = [e + s * h for e in edges for s in (-1, 0, 1)]
        qpts = sorted({*[b for b in brk if 0 <= b <= S]})
        tot = mp.mpf(0)
        for a, b in zip(qpts[:-1], qpts[1:]):
            m = (a + b) / 2
            k = min(int(m / (S / (3 * M))), 3 * M - 1)
            if qd[k] == 0:
                continue
            tot += mp.quad(lambda x: qd[k] / mass(pd, x - h, x + h), [a, b])
        print(f"  h={h}: rho={mp.nstr(tot, 17)}")

    # mixture 0.5 U + 0.5 Power(1) against U
    def mix_ball(h):
        pb = power_ball(1, h)
        return lambda x: 0.5 * (min(x + h, 1) - max(x - h, 0)) + 0.5 * pb(x)
    print("mix b=2 rho h=0.1:", mp.nstr(rho(mix_ball(0.1), lambda x: 1, 0, 1, [0.1, 0.9]), 17))

    cpsi, _ = integrate.quad(lambda x: float(mp.exp(-2 / (1 - x * x))), -1, 1, epsabs=1e-14)
    print("C_psi^2:", repr(cpsi))
    print("C_psi^2 mpmath:", mp.nstr(mp.quad(lambda x: mp.exp(-2 / (1 - x * x)), [-1, 0, 1]), 20))

    def einv(n, p, m, q):
        p, q = Fraction(p), Fraction(q)
        tot = Fraction(0)
        for u in range(n + 1):
            for v in range(m + 1):
                if u + v == 0:
                    continue
                pr = comb(n, u) * p**u * (1 - p) ** (n - u) * comb(m, v) * q**v * (1 - q) ** (m - v)
                tot += pr / (u + v)
        return tot
    for args in [(1, "1/2", 1, "1/2"), (3, "3/10", 2, "3/5"), (12, "1/10", 0, "1/2"), (5, "9/10", 7, "1/10")]:
        v = einv(*args)
        print(f"E[1/(U+V)] {args}: {v} = {float(v)!r}")

    # two-point KL pieces, P = ReversePower(alpha), f_t = L (x - t)_+^beta
    for alpha, beta, t in [(2, 1, 0.8), (0.5, 0.5, 0.9)]:
        pn = mp.quad(lambda x: (x - t) ** (2 * beta) * alpha * (1 - x) ** (alpha - 1), [t, 1])
        print(f"two-point alpha={alpha} beta={beta} t={t}: ||f||_P^2={mp.nstr(pn, 17)} ||f||_Q^2={mp.nstr((1 - t) ** (2 * beta), 17)}")


if __name__ == "__main__":
    main()
