"""Constant strength and the frozen-iterate domination inequality.

A variable-coefficient operator has constant strength when its frozen
versions at any two points dominate each other's strength functions.  For
such operators, iterates of the frozen operator are controlled by iterates
of the full operator: ||P0^l u|| <= A^l ||P^l u||.
"""

import hypoel as H

x1 = H.SymbolPolynomial.variable(2, 0)
domain = H.BoxDomain((-1.0, -1.0), (1.0, 1.0))
drift = H.VariableOperator(2, {(2, 0): 1.0, (0, 2): 1.0, (1, 0): x1}, domain)

rep = H.check_constant_strength(drift)
print("drift operator D1^2 + D2^2 + x1 D1:", rep.verdict)
print("  strength ratio range over freeze points:", rep.ratio_bounds)

# A degenerate example: x1 D1^2 loses all strength at x1 = 0.
degenerate = H.VariableOperator(
    1, {(2,): H.SymbolPolynomial.variable(1, 0)}, H.BoxDomain((-1.0,), (1.0,))
)
rep = H.check_constant_strength(degenerate)
print("\nx1 D1^2 on (-1, 1):", rep.verdict)
print("  witness:", rep.witness)

# Pairwise comparison of constant-coefficient symbols.
lap = H.SymbolPolynomial(2, {(2, 0): 1.0, (0, 2): 1.0})
d1 = H.SymbolPolynomial(2, {(1, 0): 1.0})
print("\nfirst-order vs Laplacian:", H.equally_strong(d1, lap).verdict)
print("perturbed vs plain Laplacian:", H.equally_strong(lap + d1, lap).verdict)

# Domination of frozen iterates by variable iterates on a bump fixture.
spec = H.GridSpec(domain, 128)
bump = H.gaussian_bump(spec, 0.15, support=H.BoxDomain((-0.9, -0.9), (0.9, 0.9)))
report = H.verify_domination(drift, x0=(0.0, 0.0), u=bump, lmax=3, region=domain)
print("\nfrozen-iterate domination:", report.verdict)
print("  fitted A =", round(report.fitted_constant, 6))
for case in report.cases:
    tag = " (unresolved)" if case.flagged else ""
    print(f"  l={case.params['l']}: lhs={case.lhs:.4e} rhs={case.rhs:.4e}{tag}")
