"""Vector fields and differential forms on a chart, all residuals exact.

A planar Hamiltonian field illustrates the interplay of the operations:
its divergence vanishes by equality of mixed partials, and the Lie
derivative agrees with the Cartan identity route.
"""

from jetcalc import (
    Chart,
    DifferentialForm,
    QuotientContext,
    VectorField,
    divergence,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
    reduce_mod,
    wedge,
)

chart = Chart(("p", "q"))
p, q = chart.rf("p"), chart.rf("q")
dp = DifferentialForm.d_coordinate(chart, "p")
dq = DifferentialForm.d_coordinate(chart, "q")
volume = wedge(dp, dq)

h = p**3 * q**2 - p * q + q / (p - 1)
ham = VectorField(chart, [h.diff("q"), -h.diff("p")])

print("H =", h)
print("Hamiltonian field:", ham)
print("div wrt dp^dq:", divergence(ham, volume), " (zero: mixed partials agree)")

print("\nLie derivative two ways:")
direct = lie_derivative(ham, volume)
via_cartan = interior_product(ham, exterior_derivative(volume)) + exterior_derivative(
    interior_product(ham, volume)
)
print("  component formula:", direct)
print("  cartan identity:  ", via_cartan)
print("  agree:", direct == via_cartan)

print("\nBrackets:")
e = VectorField(chart, [p, q])
print("[Hamiltonian, Euler] =", lie_bracket(ham, e))

print("\nQuotient by coordinate differentials:")
ctx = QuotientContext(chart, ("p",))
omega = wedge(dp * q, dq)
print("reduce(q dp^dq mod dp) =", reduce_mod(omega, ctx))
