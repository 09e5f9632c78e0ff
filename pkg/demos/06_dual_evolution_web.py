"""The six conjugated evolutions and their verified relations.

One forward step, conjugated through the decay map, its antitranspose,
and the Riesz map, yields six evolutions.  Two pairs coincide in this
real-pairing realization (v with x, y with w); the others separate with
explicit basis-vector witnesses; and the Riesz twist of the extended
step is spectrally equivalent to the step itself.
"""

from timeop import (
    AgeWindow,
    antitranspose,
    build_decay_operator,
    build_operator_web,
    build_shift_cascade,
    gumbel,
    riesz_map,
    verify_web,
)

shift = build_shift_cascade(AgeWindow(-5, 5))
decay = build_decay_operator(gumbel(1.0), shift)

print("=== the maps the rigging defines ===")
anti = antitranspose(decay.operator)
print("antitransposed decay map equals the decay map (real symmetric diagonal):",
      (anti.matrix == decay.operator.matrix).all())
maps = riesz_map(decay)
print("Riesz diagonal = squared decay diagonal; entries at ages -1, 0, 1:")
for age in (-1, 0, 1):
    print(f"  age {age:+d}: {maps.riesz.diag[shift.index_of(age)]:.9f}")

print("\n=== the web at t = 1 ===")
web = build_operator_web(decay, 1)
print("weights carried by the age-0 basis vector:")
for name in web.NAMES:
    print(f"  {name:5s}: {web.weight(name, 0):.9f}")
print("(v inverts the contraction w; x reproduces v through the Riesz route;")
print(" y reproduces w; z squares the contraction ratio)")

print("\n=== verified relations ===")
report = verify_web(web)
print(f"v = x (antidual operator metric):     deviation {report.v_equals_x_deviation:.3e}")
print(f"transported traces decay monotonically: {report.dual_markov_monotone}")
print(f"  traces: {[f'{x:.6f}' for x in report.dual_markov_traces]}")
print(f"v != u_ext witness {report.v_vs_u_witness.label}: "
      f"difference {report.v_vs_u_witness.deviation:.6g}")
print(f"y != plain step witness {report.y_vs_u_witness.label}: "
      f"difference {report.y_vs_u_witness.deviation:.6g}")
print(f"w != z witness {report.w_vs_z_witness.label}: "
      f"difference {report.w_vs_z_witness.deviation:.6g}")
print(f"z ~ u_ext: spectrum multiset deviation {report.z_spectrum_deviation:.3e}, "
      f"conjugation-route deviation {report.z_conjugacy_deviation:.3e}")
print("all relations verified:", report.all_passed)
