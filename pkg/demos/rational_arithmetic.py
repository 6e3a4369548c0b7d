"""Tour of the exact arithmetic layer: sparse polynomials and reduced quotients.

Everything is computed over Q with fractions.Fraction coefficients; equality
of rational functions is literal equality of canonical forms.
"""

from fractions import Fraction as Q

from jetcalc import Chart, Polynomial, RationalFunction, parse_expression, poly_gcd

chart = Chart(("x", "y"))
x = Polynomial.variable(chart.variables, "x")
y = Polynomial.variable(chart.variables, "y")

print("== polynomials ==")
p = (x + y) ** 3
print("(x + y)^3            =", p)
print("leading term (grlex) =", p.leading())

print("\n== gcd and canonical quotients ==")
f = x**2 * (x - 1) * (x + 2)
g = x * (x - 1) ** 3
print("gcd(x^2(x-1)(x+2), x(x-1)^3) =", poly_gcd(f, g))
r = RationalFunction(x**2 - 1, (x + 1) * Q(-3, 2))
print("(x^2-1) / (-3/2 (x+1))       =", r, "   (denominator kept primitive, positive)")

print("\n== calculus ==")
h = parse_expression("(x*y + y)/(x*y)", chart)
print("h            =", h)
print("dh/dx        =", h.diff("x"))
print("h with y->1/x =", h.substitute({"y": 1 / chart.rf("x")}))
print("h at (2, 3)  =", h.eval_at({"x": Q(2), "y": Q(3)}))

print("\n== parser round trip ==")
text = "1/(x*(x-1))"
parsed = parse_expression(text, chart)
print(f"parse({text!r}) = {parsed!r}")
print("parse(repr(.)) equal:", parse_expression(repr(parsed), chart) == parsed)
