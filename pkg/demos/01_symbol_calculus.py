"""Symbol calculus walkthrough: building blocks for everything else.

A constant-coefficient operator is represented by its polynomial symbol
Q(xi), stored as a sparse multi-index -> coefficient map.  The convention is
D_j = -i d/dx_j, so Q(D) applied to exp(i<xi, x>) multiplies by Q(xi).
"""

import numpy as np

from hypoel import BoxDomain, SymbolPolynomial, VariableOperator

# The Laplacian symbol xi1^2 + xi2^2, assembled from coordinate monomials.
xi1 = SymbolPolynomial.variable(2, 0)
xi2 = SymbolPolynomial.variable(2, 1)
laplacian = xi1**2 + xi2**2
print("Laplacian symbol:", laplacian)
print("order:", laplacian.order)

# Exact differentiation with falling-factorial factors.
print("\nd/dxi1 of the symbol:", laplacian.derive((1, 0)))
print("second xi1-derivative:", laplacian.derive((2, 0)))
print("third derivative vanishes:", laplacian.derive((3, 0)).is_zero)

# Evaluation is vectorized over arrays of points.
pts = np.array([[3.0, 4.0], [1.0, 0.0], [0.0, 0.0]])
print("\nvalues at", pts.tolist(), "->", laplacian(pts).real.tolist())

# The strength function aggregates all derivative magnitudes; it never
# vanishes for a nonzero symbol, even where Q itself has zeros.
print("\nstrength at the origin:", laplacian.strength((0.0, 0.0)))
print("(the symbol itself vanishes there:", abs(laplacian((0.0, 0.0))), ")")

# Powers give symbols of operator iterates.
print("\nsymbol of the squared operator:", laplacian**2)

# Variable coefficients: P(x, D) = D1^2 + D2^2 + x1 D1 over a box.
x1 = SymbolPolynomial.variable(2, 0)
drift = VariableOperator(
    2,
    {(2, 0): 1.0, (0, 2): 1.0, (1, 0): x1},
    BoxDomain((-1.0, -1.0), (1.0, 1.0)),
)
print("\nfreezing the drift operator at x = (0.5, 0):", drift.freeze((0.5, 0.0)))
print("freezing at the center:", drift.freeze((0.0, 0.0)))
