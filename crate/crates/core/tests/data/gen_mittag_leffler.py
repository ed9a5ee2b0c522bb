"""Reference values of E_beta(-y) for the Mittag-Leffler accuracy tests.

Where the power series is affordable (y^(1/beta) <= 400) it is summed at
working precision well above the size of its largest term. Elsewhere the
value comes from the spectral representation
    E_beta(-t^beta) = int_0^inf exp(-r t) K(r) dr,
    K(r) = sin(beta pi) r^(beta-1) / (pi (r^(2 beta) + 2 r^beta cos(beta pi) + 1)),
integrated with mpmath's tanh-sinh rule on a partition graded around 1/t.
"""
import mpmath
from mpmath import mp

BETAS = ["0.3", "0.5", "0.7", "0.9", "1.0"]


def grid():
    ys = [mp.mpf(0)]
    for i in range(199):
        ys.append(mp.mpf(10) ** (mp.mpf(-3) + mp.mpf(9) * i / 198))
    return ys


def series(beta, y):
    t = y ** (1 / beta)
    mp.dps = int(t / mp.log(10)) + 40
    total, n = mp.mpf(0), 0
    while True:
        term = (-y) ** n / mp.gamma(beta * n + 1)
        total += term
        if n > 10 and abs(term) < mp.mpf(10) ** (-mp.dps + 5) * max(abs(total), mp.mpf(10) ** -300):
            break
        n += 1
    return total


def spectral(beta, y):
    mp.dps = 40
    t = y ** (1 / beta)
    s, c = mp.sinpi(beta), mp.cospi(beta)

    def k(r):
        rb = r ** beta
        return s * r ** (beta - 1) / (mp.pi * (rb * rb + 2 * rb * c + 1)) * mp.exp(-r * t)

    pts = [mp.mpf(0)] + [mp.mpf(10) ** e / t for e in range(-6, 4)] + [mp.inf]
    pts = sorted(set(pts))
    return mp.quad(k, pts)


def value(beta, y):
    if y == 0:
        return mp.mpf(1)
    if beta == 1:
        mp.dps = 40
        return mp.exp(-y)
    if y ** (1 / beta) <= 400:
        return series(beta, y)
    return spectral(beta, y)


def main():
    with open("mittag_leffler.csv", "w") as out:
        out.write("beta,y,value\n")
        for b in BETAS:
            beta = mp.mpf(b)
            for y in grid():
                v = value(beta, y)
                mp.dps = 40
                out.write(f"{b},{mp.nstr(y, 20)},{mp.nstr(v, 20)}\n")


if __name__ == "__main__":
    main()
