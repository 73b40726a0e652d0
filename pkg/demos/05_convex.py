"""Convex bodies with uniform points: the hull learner's mistake growth.

On an interval the count grows like log T, and a log fit beats a linear
one. In the disk the growth is polynomial and the fitted log-log slope is
compared against a band.
Set REPLAYLEARN_WORKERS to spread trials over processes.
"""

from replaylearn.experiments import convex_scaling

for d in (1, 2):
    for row in convex_scaling(d, trials=60):
        print(row.summary())
