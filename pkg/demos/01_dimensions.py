"""Compare the combinatorial dimensions of a few small classes.

The blow-up class is the interesting one: its threshold dimension is small,
yet every representation flip leaves a deep intersection closure, so the
closure learner's guarantee (the extended dimension) is larger. Reverse
singletons go the other way: the plain closure is deep, a good flip makes it
shallow.
"""

from replaylearn import class_from_spec, dimension_report, extended_threshold_dimension
from replaylearn.dimensions import closure_threshold_dimension

for spec in ("thresholds:8", "singletons:6", "reverse_singletons:6", "blowup:4", "two_intervals:6"):
    H = class_from_spec(spec)
    report = dimension_report(H).to_json()
    values = {k: v["value"] if isinstance(v, dict) else v for k, v in report.items()}
    dims = ", ".join(f"{k}={values[k]}" for k in ("vc", "ldim", "tdim", "depth", "extdim"))
    closure = closure_threshold_dimension(H)[0]
    print(f"{spec:22s} |H|={len(H):3d}  {dims}, closure depth={closure}")

ext = extended_threshold_dimension(class_from_spec("reverse_singletons:6"))
print("\nbest flip for reverse_singletons:6:", ext.representation, "depth", ext.value)
print("witness points:", ext.witness.points)
