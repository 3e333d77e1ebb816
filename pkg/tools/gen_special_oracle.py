"""Regenerate tests/special_oracle.py from mpmath at 50 digits."""
import mpmath as mp

mp.mp.dps = 50

LGAMMA_X = [1e-8, 0.1, 0.5, 0.876, 1.0, 1.5, 2.0, 2.5, 3.7, 10.0, 33.3, 171.5, 1e4, 1e8, 1.4616321449683622]
DIGAMMA_X = [1e-6, 0.25, 0.5, 0.847, 1.0, 1.4616321449683622, 2.0, 3.3, 9.99, 10.0, 150.0, 1e6]
GAMMA_INC = [
    (0.5, 0.1), (0.5, 2.0), (0.876, 0.3), (0.876, 5.0), (1.0, 1.0), (1.0, 30.0),
    (2.0, 0.01), (2.5, 2.5), (3.0, 4.0), (5.5, 1.0), (10.0, 9.0), (10.0, 20.0),
    (30.0, 25.0), (50.0, 60.0), (100.0, 90.0), (250.0, 260.0), (0.3, 1e-3), (0.01, 0.5),
    (7.0, 7.0), (1e3, 1.01e3), (12.0, 3.0), (4.0, 40.0), (0.2, 8.0),
]


def lines():
    out = ['"""Reference values computed with mpmath at 50 significant digits (tools/gen_special_oracle.py)."""', ""]
    out.append("LGAMMA = [")
    for x in LGAMMA_X:
        out.append(f"    ({x!r}, {float(mp.loggamma(mp.mpf(x)))!r}),")
    out.append("]")
    out.append("DIGAMMA = [")
    for x in DIGAMMA_X:
        out.append(f"    ({x!r}, {float(mp.digamma(mp.mpf(x)))!r}),")
    out.append("]")
    out.append("# (a, x, P(a, x), Q(a, x))")
    out.append("GAMMA_INC = [")
    for a, x in GAMMA_INC:
        p = mp.gammainc(mp.mpf(a), 0, mp.mpf(x), regularized=True)
        q = mp.gammainc(mp.mpf(a), mp.mpf(x), mp.inf, regularized=True)
        out.append(f"    ({a!r}, {x!r}, {float(p)!r}, {float(q)!r}),")
    out.append("]")
    return "\n".join(out) + "\n"


if __name__ == "__main__":
    import pathlib
    path = pathlib.Path(__file__).resolve().parent.parent / "tests" / "special_oracle.py"
    path.write_text(lines())
    print(path)
