"""The three refutation probes against planted fakes and honest maps.

Each fake is built to break one property the probes target; the identity
maps are the control group and must never be refuted.
"""

from pcalab import planted, probes
from pcalab.embeddings import identity_embedding

pool = planted.truncation_pool()
print(probes.probe_sigma_collision(planted.truncating_fake(), pool))
print(probes.probe_sigma_collision(identity_embedding("B"), pool))

print()
for F in (planted.parity_fake(), planted.prefix_code_fake(), identity_embedding("E")):
    print(probes.probe_monotone_split(F))

print()
leak = probes.probe_decision_leak(planted.decision_fake())
print(leak.result)
print("decisions:", dict(leak.decisions))
print("all decisions match the certified halting table:", leak.correct)
print(probes.probe_decision_leak(planted.graph_identity_by_images()).result)
