"""Walk through the Hilbert-space layer: kets, projectors, Born probabilities.

Run from the repository root after installing the package:

    python3 demos/01_hilbert_basics.py
"""

import numpy as np

from bornchoice import hilbert

# A state is a complex amplitude vector. Unit norm is only enforced where
# probabilities are computed, so intermediate algebra is unconstrained.
v = hilbert.ket([1 / np.sqrt(3), 1j / np.sqrt(3), -1 / np.sqrt(3)])
print("state amplitudes:", np.round(v.amplitudes, 4))
print("norm:", v.norm())

# The canonical family projects onto the coordinate axes: one projector per
# elementary outcome, mutually orthogonal, summing to the identity.
family = hilbert.canonical_family(3)
report = hilbert.validate_spectral_family(family)
print("\nspectral family checks:")
for line in report.checks:
    print(f"  {line.name}: deviation {line.deviation:.3g} (tol {line.tolerance:g})")

# Born rule: the probability of an outcome is the squared length of the
# projection of the state onto that outcome's subspace.
print("\nBorn probabilities of the three outcomes:")
probs = [hilbert.born_probability(p, v) for p in family.projectors]
for k, p in enumerate(probs):
    print(f"  outcome {k}: {p:.6f}")
print("  total:", sum(probs))

# check_generalized_measure packages exactly that invariant: the outcome
# probabilities of a unit state form a probability distribution.
measure = hilbert.check_generalized_measure(v, family)
print("generalized measure valid:", measure.passed)

# Projectors need not be rank one. A coarse event {1, 2} gets the sum of
# the axis projectors, and its probability is additive.
coarse = hilbert.Projector(family.projectors[1].entries + family.projectors[2].entries)
print("\nP({1,2}) =", hilbert.born_probability(coarse, v), "= p1 + p2 =", probs[1] + probs[2])

# Observing the coarse event collapses the state onto its subspace and
# renormalizes; a second collapse then changes nothing.
after = hilbert.collapse(coarse, v)
print("collapsed amplitudes:", np.round(after.amplitudes, 4))
print("collapse is idempotent:",
      np.allclose(hilbert.collapse(coarse, after).amplitudes, after.amplitudes))

# Expectation values work for any Hermitian operator, here a diagonal
# payoff observable.
payoff = hilbert.HermitianOp(np.diag([0.0, 1.0, 4.0]))
print("\nexpected payoff in v:", hilbert.expectation(payoff, v))
