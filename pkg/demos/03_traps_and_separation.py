"""Why proper learners get trapped and the closure learner does not.

On two intervals the greedy proper learner eventually emits hypotheses that
disagree at a point the reliable version space has not settled. From then
on every label there can cite one of its own past predictions, and it errs
each round. The closure learner only ever grows its hypothesis, so its past
predictions never split the undecided region.
"""

from replaylearn.experiments import separation_demo

for row in separation_demo(n=12, T=200):
    print(row.summary())
