#!/usr/bin/env python3
"""Regenerate the shipped zero-ordinate files by an argument-principle scan.

Lambda(E, 1 + i t) is real for real t (real coefficients, even functional
equation), so its zeros on the central line are sign changes.  The completed
value decays like exp(-pi t / 2) while the terms of its defining sum stay
O(1), so double precision runs out of signal near t ~ 22; the scan therefore
works in mpmath with generous precision.

Usage:  python3 tools/scan_zeros.py [curve_label] [count] [out_path]
Writes one ordinate per line (1e-9 accuracy) with a provenance header.
"""

import sys
import pathlib

import mpmath as mp

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from zetabound.arith import get_curve, l_coefficients  # noqa: E402


def make_lambda_real(curve, nterms=220, dps=50):
    """Real-valued t -> Lambda(E, 1 + i t) via the incomplete-gamma sums."""
    mp.mp.dps = dps
    A = mp.mpf(curve.conductor)
    coeffs = l_coefficients(curve, nterms)
    a = [mp.mpf(coeffs[n]) for n in range(1, nterms + 1)]
    root = mp.sqrt(A)
    xs = [2 * mp.pi * n / root for n in range(1, nterms + 1)]
    scale = [root / (2 * mp.pi * n) for n in range(1, nterms + 1)]

    def lam(t):
        s = mp.mpc(1, t)
        total = mp.mpc(0)
        for n in range(nterms):
            if a[n] == 0:
                continue
            total += a[n] * (
                scale[n] ** s * mp.gammainc(s, xs[n], mp.inf)
                + scale[n] ** (2 - s) * mp.gammainc(2 - s, xs[n], mp.inf)
            )
        total *= 2
        assert abs(mp.im(total)) < mp.mpf(10) ** (-dps // 2), "Lambda not real?"
        return mp.re(total)

    return lam


def scan(curve_label="32a", count=50, step=0.05, t_max=80.0):
    curve = get_curve(curve_label)
    lam = make_lambda_real(curve)
    zeros = []
    t_prev = mp.mpf(step)
    f_prev = lam(t_prev)
    t = t_prev + step
    while len(zeros) < count and t <= t_max:
        f = lam(t)
        if mp.sign(f) != mp.sign(f_prev) and f_prev != 0:
            lo, hi = t_prev, t
            flo = f_prev
            for _ in range(60):
                mid = (lo + hi) / 2
                fm = lam(mid)
                if mp.sign(fm) == mp.sign(flo):
                    lo, flo = mid, fm
                else:
                    hi = mid
                if hi - lo < mp.mpf(10) ** -11:
                    break
            zeros.append((lo + hi) / 2)
            print(f"zero {len(zeros)}: {mp.nstr(zeros[-1], 12)}", flush=True)
        t_prev, f_prev = t, f
        t += step
    return zeros


def main():
    label = sys.argv[1] if len(sys.argv) > 1 else "32a"
    count = int(sys.argv[2]) if len(sys.argv) > 2 else 50
    out = (
        pathlib.Path(sys.argv[3])
        if len(sys.argv) > 3
        else pathlib.Path(__file__).resolve().parent.parent
        / "src"
        / "zetabound"
        / "data"
        / f"zeros_{label}.txt"
    )
    zeros = scan(label, count)
    with open(out, "w") as fh:
        fh.write(
            f"# source: argument-principle sign scan of Lambda(E,1+it), "
            f"curve {label}, mpmath dps=50\n"
        )
        for z in zeros:
            fh.write(mp.nstr(z, 12) + "\n")
    print(f"wrote {len(zeros)} ordinates to {out}")


if __name__ == "__main__":
    main()
