"""Candidate embeddings, and what a refutation witness looks like.

A witness is a frozen transcript of evaluations.  Replaying it recomputes
every line, so a forged or stale log is caught.
"""

import dataclasses

from pcalab.embeddings import (check_embedding, embed_K2_to_K201, identity_embedding,
                               planted_collapse, planted_homomorphism_defect)

for F in (identity_embedding("K2"), embed_K2_to_K201()):
    print(check_embedding(F, samples=30, seed=0))

print()
for F in (planted_homomorphism_defect(), planted_collapse()):
    report = check_embedding(F, samples=60, seed=0)
    w = report.witness
    print(report)
    print("  " + "\n  ".join(w.log_lines()[:6]), "\n  ...")
    print("  replays:", w.replay())

forged = dataclasses.replace(w, transcript=w.transcript[:-1] + ("step 0 nothing to see",))
print("\na tampered transcript replays:", forged.replay())
