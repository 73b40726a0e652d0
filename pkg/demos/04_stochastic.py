"""Stochastic replay: points drawn i.i.d., labels true or replayed.

Uniform points on 1024 thresholds cost the conservative learner about ln T
mistakes. A geometric distribution over a threshold witness forces a
constant fraction of the dimension on any learner, even when T is small.
"""

from replaylearn.experiments import thresholds_stochastic_lower, thresholds_stochastic_upper

print(thresholds_stochastic_upper(1024, 1024, trials=200).summary())
print(thresholds_stochastic_lower(3, 128, trials=200).summary())
