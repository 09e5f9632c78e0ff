"""Build the two finite-window cascades and verify their exact identities.

The truncated bilateral shift is the minimal model: one basis vector per
age, the step operator moves each up by one and truncates at the top.
The baker model realizes the same structure on functions over the unit
square, with Walsh products as the age-graded basis.  Both carry an
internal-time operator T whose covariance under the step is exact in
floating point, because everything is permutation and small-integer
arithmetic.
"""

import numpy as np

from timeop import (
    AgeWindow,
    build_baker_cascade,
    build_shift_cascade,
    koopman_power,
    system_from_json,
    system_to_json,
    verify_covariance,
    verify_imprimitivity,
)

print("=== the truncated shift ===")
shift = build_shift_cascade(AgeWindow(-4, 4))
print(f"window [-4, 4], dimension {shift.dim}")
print("time operator diagonal:", shift.T.diag)

print("\nstep action on e_0 and on the top label e_4 (open boundary):")
print("U e_0 =", shift.U.apply(shift.basis_vector(0)).coeffs)
print("U e_4 =", shift.U.apply(shift.basis_vector(4)).coeffs)

print("\ncovariance deviation max_e ||(U^t)' T U^t e - (T + t) e|| on margin labels:")
for t in range(4):
    print(f"  t={t}: {verify_covariance(shift, t)}")

print("\n=== the baker model ===")
baker = build_baker_cascade(2)
print(f"m=2: coordinates -2..2, fluctuation dimension {baker.dim} (= 2^5 - 1)")
for n in range(-2, 3):
    count = int(np.sum(baker.ages == n))
    print(f"  age {n:+d} eigenspace dimension {count} (= 2^(n+m))")

print("\nindex-set shift: U chi{-1,0} lands on chi{0,1}:")
moved = koopman_power(baker, baker.basis_vector(frozenset({-1, 0})), 1)
print("  coefficient at chi{0,1} =", moved.coeffs[baker.index_of(frozenset({0, 1}))])

print("\ncovariance deviation on the baker window:")
for t in range(3):
    print(f"  t={t}: {verify_covariance(baker, t)}")

print("\nage-projector transport: conjugating the age-(n+t) projector by")
print("t forward steps recovers the age-n projector, exactly:")
for system, name in ((shift, "shift"), (baker, "baker")):
    dev = max(
        verify_imprimitivity(system, (n,), 1)
        for n in range(system.window.lo, system.window.hi)
    )
    print(f"  {name}: max deviation over singletons at t=1: {dev}")

print("\nmixing surrogate: once t exceeds the age-support diameter, evolved")
print("fluctuations are exactly orthogonal to any fixed observable:")
u = shift.basis_vector(-1) + shift.basis_vector(0)
v = shift.basis_vector(-2)
for t in range(1, 5):
    overlap = float(np.dot(u.coeffs, koopman_power(shift, v, t).coeffs))
    print(f"  t={t}: <u, U^t v> = {overlap}")

print("\nsystems serialize to JSON for fixture reuse; loading re-verifies:")
doc = system_to_json(baker)
print(f"  baker m=2 document: {len(doc)} bytes; reload matches:",
      system_from_json(doc).labels == baker.labels)
