import dataclasses

import pytest

from pcalab import planted, probes
from pcalab.embeddings import (Family, check_embedding, curated_family, embed_K2_to_K201,
                               embed_least_representative, family_jump, identity_embedding,
                               inclusion_K2_to_B, planted_collapse, planted_homomorphism_defect,
                               tot_gadget, tot_jump, tot_query, EmbeddingCandidate)
from pcalab.machine import Budget


@pytest.mark.parametrize("model", ["K1", "K2", "K201", "B", "E"])
def test_identities_are_consistent(model):
    report = check_embedding(identity_embedding(model), samples=20, seed=1)
    assert report.witness is None and report.status == "consistent"


def test_inclusion_is_consistent():
    assert check_embedding(inclusion_K2_to_B(), samples=20).witness is None


@pytest.mark.parametrize("make,kind", [(planted_homomorphism_defect, "HomomorphismClash"),
                                       (planted_collapse, "InjectivityClash")])
def test_planted_fakes_are_refuted(make, kind):
    report = check_embedding(make(), samples=60, seed=0)
    assert report.status == "refuted"
    assert report.witness.kind == kind
    assert report.witness.replay()


def test_tampered_witness_fails_replay():
    w = check_embedding(planted_homomorphism_defect(), samples=60).witness
    forged = dataclasses.replace(w, transcript=w.transcript[:-1] + ("step forged",))
    assert not forged.replay()


def test_witness_log_is_deterministic():
    a = check_embedding(planted_collapse(), samples=60, seed=2).witness.log()
    b = check_embedding(planted_collapse(), samples=60, seed=2).witness.log()
    assert a == b and a.startswith("witness InjectivityClash\ncandidate ")


def test_unknown_claims_are_rejected():
    with pytest.raises(ValueError):
        EmbeddingCandidate("x", None, None, lambda a: a, claims=frozenset({"surjective"}))


def test_graph_embedding_preserves_undefined():
    report = check_embedding(embed_K2_to_K201(), samples=40, seed=0)
    assert report.witness is None and report.undefined_pairs >= report.engineered > 0


def test_least_representative_family():
    family = Family(curated_family(), 16)
    jump = family_jump(family)
    assert jump.verify() == []
    emb = embed_least_representative(family, jump)
    assert emb is not None


def test_tot_gadget_matches_certified_answers():
    jump = tot_jump()
    budget = Budget(steps=10**5, window=32)
    for n in sorted(jump.entries):
        assert tot_query(n, budget).defined == (jump.answer(n) == 1)


def test_tot_numerals_carry_the_oracle():
    g = tot_gadget()
    assert g.numeral(3).values(4)[0] == 3


# --- probes

def test_sigma_probe_refutes_truncation():
    r = probes.probe_sigma_collision(planted.truncating_fake(), planted.truncation_pool())
    assert r.status == "refuted" and r.witness.replay()


def test_sigma_probe_leaves_identity_standing():
    r = probes.probe_sigma_collision(identity_embedding("B"), planted.truncation_pool())
    assert r.status in ("consistent", "undetermined")


@pytest.mark.parametrize("make", [planted.parity_fake, planted.prefix_code_fake])
def test_monotone_probe_refutes_fakes(make):
    r = probes.probe_monotone_split(make())
    assert r.status == "refuted" and r.witness.replay()


def test_monotone_probe_needs_graph_source():
    with pytest.raises(TypeError):
        probes.probe_monotone_split(identity_embedding("K2"))


def test_decision_probe():
    report = probes.probe_decision_leak(planted.decision_fake())
    assert report.correct and report.result.status == "refuted"
    assert all(w.replay() for w in report.witnesses)
    honest = probes.probe_decision_leak(planted.graph_identity_by_images())
    assert honest.result.status in ("consistent", "undetermined")


def test_probe_result_lines():
    r = probes.probe_monotone_split(planted.parity_fake())
    lines = r.lines()
    assert lines[0] == "probe monotone candidate parity-fake status refuted"
    assert "witness MonotonicityExploit" in lines
