"""Gallery of the eight bond-force families.

Every family maps a bond (reference vector xi, relative displacement eta)
to a force density and a scalar potential. This script pulls one bond
through a sweep of elongations and tabulates how each family responds,
then runs the consistency checker that every family must pass:

  * antisymmetry   swapping the bond's endpoints flips the force
  * collinearity   the force acts along the deformed bond direction
  * gradient       the force is the derivative of the potential

Run it directly:  python3 demos/02_kernel_gallery.py
"""

import numpy as np

from peribond.kernels import check_kernel_axioms, default_models

DELTA = 1.0
models = default_models(delta=DELTA, dim=3)

# one bond of length delta, stretched along its own axis; that length is
# the nano-fiber's van der Waals equilibrium, so every family rests at
# zero force in the undeformed column
xi = np.array([[DELTA, 0.0, 0.0]])
stretches = (-0.3, -0.1, 0.0, 0.1, 0.3)

print("Axial force density on a bond of length delta, by stretch")
print()
header = f"{'family':>18} |" + "".join(f"    s={s:+.1f}" for s in stretches)
print(header)
print("-" * len(header))
for name, model in models.items():
    row = f"{name:>18} |"
    for s in stretches:
        eta = xi * s  # elongation = s * |xi| along the bond
        f = model.force(xi, eta)[0, 0]
        row += f" {f:9.3g}"
    print(row)
print()
print("Reading the table: pmb responds proportionally to stretch;")
print("rod reads zero here because its triangular profile tapers to")
print("nothing at the horizon edge, exactly where this bond sits;")
print("nonlinear-p and nano-membrane stiffen sharply under compression")
print("(impenetrability); nano-fiber's van der Waals wall dwarfs its")
print("elastic term once the bond shortens past equilibrium.")

print()
print("Stored potential per bond at the same stretches")
print()
print(header)
print("-" * len(header))
for name, model in models.items():
    row = f"{name:>18} |"
    for s in stretches:
        eta = xi * s
        phi = model.potential(xi, eta)[0]
        row += f" {phi:9.3g}"
    print(row)

print()
print("Consistency sweep (1000 random bonds per family)")
print()
for name, model in models.items():
    rep = check_kernel_axioms(model, dim=3, n_samples=1000, seed=3)
    print(rep.summary())
print()
print("Every family satisfies all three axioms to tight tolerance;")
print("the gradient check is finite-difference, so it tops out near 1e-9.")
