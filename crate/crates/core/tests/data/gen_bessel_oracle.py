"""Reference values for J0 and Y0 from their power series, summed in mpmath.

Regenerate with:  python3 gen_bessel_oracle.py > bessel_oracle.csv
"""
import mpmath as mp


def series_j0_y0(x):
    # precision must absorb the cancellation of terms of size ~exp(x)
    mp.mp.dps = int(x / 2.3) + 40
    x = mp.mpf(x)
    q = x * x / 4
    term = mp.mpf(1)
    j0 = mp.mpf(1)
    harm = mp.mpf(0)
    ysum = mp.mpf(0)
    m = 0
    while True:
        m += 1
        term = -term * q / (m * m)
        harm += mp.mpf(1) / m
        j0 += term
        ysum -= term * harm
        if abs(term) * (harm + 1) < mp.mpf(10) ** (-(mp.mp.dps - 5)) and m > q:
            break
    y0 = 2 / mp.pi * ((mp.log(x / 2) + mp.euler) * j0 + ysum)
    return j0, y0


def main():
    n = 200
    lo, hi = mp.log10(mp.mpf("1e-4")), mp.log10(mp.mpf(500))
    print("x,j0,y0")
    for i in range(n):
        mp.mp.dps = 30
        x = float(mp.mpf(10) ** (lo + (hi - lo) * i / (n - 1)))
        j0, y0 = series_j0_y0(x)
        print(f"{x!r},{mp.nstr(j0, 20)},{mp.nstr(y0, 20)}")
    for x in [0.5, 1.0, 2.404825557695773, 5.0, 8.0, 12.0, 20.0, 25.0, 30.0, 100.0]:
        j0, y0 = series_j0_y0(x)
        print(f"{x!r},{mp.nstr(j0, 20)},{mp.nstr(y0, 20)}")


if __name__ == "__main__":
    main()
