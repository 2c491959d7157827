"""Scoring candidates of different lengths on one scale.

The raw quality signal for a generated fill is the product of its
per-step probabilities. Products shrink with length, so a three-token
candidate can never beat a one-token candidate on the product alone.
Ranking therefore uses a length-normalized average of the step
probabilities: the r-th root of the product (geometric mean), or
alternatively the harmonic mean.
"""

from clozegen import Candidate, rank_candidates, rank_score, score_candidate


def candidate(text, probs):
    return Candidate(
        token_strings=text.split(),
        text=text,
        step_probabilities=list(probs),
        product_score=score_candidate(probs),
        rank_score=rank_score(probs),
        source_mask_count=len(probs),
    )


print("products collapse with length:")
for probs in ([0.8], [0.8, 0.8], [0.8, 0.8, 0.8]):
    print(f"  probs={probs}: product={score_candidate(probs):.4f} "
          f"geometric rank={rank_score(probs, 'geometric'):.4f}")
print()

print("the two averages can disagree when probabilities are uneven:")
probs = [1.0, 0.25]
print(f"  probs={probs}: geometric={rank_score(probs, 'geometric'):.3f} "
      f"harmonic={rank_score(probs, 'harmonic'):.3f}")
print()

pool = [
    candidate("steady", [0.45]),
    candidate("spiky pair", [1.0, 0.25]),
    candidate("long good fill", [0.9, 0.9, 0.9]),
    candidate("Echo", [0.7]),
    candidate("echo", [0.6]),
]
for avg in ("geometric", "harmonic"):
    ranked = rank_candidates(pool, avg)
    print(f"{avg} ranking:")
    for c in ranked:
        print(f"  {c.rank_score:.4f}  {c.text!r}  (from {c.source_mask_count} masks)")
    print()

print("notes: the duplicate 'echo' collapsed onto its better-scored copy,")
print("and the three-token candidate outranks shorter ones because every")
print("step was confident. Order moved between the averages; the set did not.")
