"""Play the replay game on thresholds and look at the transcript.

The descending adversary walks the threshold down one point at a time; the
conservative learner pays exactly one mistake per step. A replay adversary
that mixes truthful and replayed labels cannot do better against the
closure learner than the closure depth.
"""

import numpy as np

from replaylearn import class_from_spec, make_adversary, make_learner, run_game
from replaylearn.dimensions import chain_depth

H = class_from_spec("thresholds:8")
tr = run_game(make_learner("conservative_threshold", H), make_adversary("descending", H), H, 12)
print("descending vs conservative:", tr.mistakes, "mistakes in", tr.T, "rounds")
for r in tr.rounds[:4]:
    print(f"  t={r.t} x={r.x} y={r.y} prediction={r.prediction} source={'truth' if r.source == 0 else r.source}")

H = class_from_spec("intervals:6")
rng = np.random.default_rng(1)
worst = 0
for trial in range(200):
    adv = make_adversary("random_replay", H, target=H.masks[trial % len(H)], rng=rng)
    tr = run_game(make_learner("closure", H), adv, H, 40)
    worst = max(worst, tr.mistakes)
print(f"\nintervals:6, 200 random replay games: worst mistakes {worst}, closure depth {chain_depth(H)[0]}")
tr.save("/tmp/replay_transcript.json")
print("last transcript written to /tmp/replay_transcript.json")
