"""Independent reference values computed with sympy.

Prints the canonical (graded-lex descending) form of each closed-form
equation so the Rust tests can compare strings character for character.
Run: python3 oracle/golden.py
"""
from sympy import Poly, Rational, cancel, expand, symbols


def canonical(expr, gens):
    poly = Poly(expand(expr), *gens)
    terms = sorted(poly.terms(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
    out = []
    for exps, c in terms:
        c = Rational(c)
        mono = "*".join(
            (str(g) if e == 1 else f"{g}^{e}") for g, e in zip(gens, exps) if e > 0
        )
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        sign = "-" if c < 0 else "+"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out) if out else "0"


x, y, z, t = symbols("x y z t")

cases = []
# Russell cubic from the (-x^2, x + z^2 + t^3) modification: x^2*y + x + z^2 + t^3 = 0, equation f*y - b
cases.append(("russell", -(x + x**2 * y + z**2 + t**3), (x, y, z, t)))
for k, l in [(2, 3), (2, 5), (3, 4)]:
    cases.append(
        (f"tdp_{k}_{l}", cancel(((x * z + 1) ** k - (y * z + 1) ** l - z) / z), (x, y, z))
    )
k, l, s, m = 2, 3, 5, 5
cases.append(
    (
        "tdp_general_2_3_5_5",
        cancel(((x * z**m + 1) ** k - (y * z**m + 1) ** l - z**s) / z**m),
        (x, y, z),
    )
)
cases.append(
    (
        "russell_strict_transform",
        cancel((-x + x**3 * y + (x * z + 1) ** 2 - (x * t + 1) ** 3) / x),
        (x, y, z, t),
    )
)

# The three-step rectifier applied to the strict transform.
st = cancel((-x + x**3 * y + (x * z + 1) ** 2 - (x * t + 1) ** 3) / x)
u = z - x * t**2 * (x * t + 3) / 2
v = y + u * t**2 * (x * t + 3) + x * t**4 * (x * t + 3) ** 2 / 4
w = -3 * t + x**2 * v + x * u**2 + 2 * u - 1
cases.append(("rectifier_w_minus_st", expand(w - st), (x, y, z, t)))

for name, expr, gens in cases:
    print(f"{name}: {canonical(expr, gens)}")
