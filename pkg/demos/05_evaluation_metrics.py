"""The four ranking metrics, on small worked examples.

Generated distractors are compared with the dataset's gold distractors
by normalized exact match; ranks matter. P@1 only looks at the top
candidate, F1@3 balances precision and recall over the top three, MRR@10
rewards an early first hit, and NDCG@10 credits every hit with a
log-discounted gain.
"""

from clozegen import compute_item, evaluate_dataset
from clozegen.metrics import format_report_table

GOLD = ["make", "stand", "take"]

cases = {
    "hit at rank 1": ["make", "blue", "seven"],
    "hit at rank 2": ["blue", "make", "seven"],
    "all three gold on top": ["stand", "take", "make"],
    "hit at rank 9": ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "take"],
    "no hits": ["blue", "seven", "cloud"],
}

print(f"gold set: {GOLD}")
print()
print(f"{'case':<24} {'P@1':>5} {'F1@3':>6} {'MRR@10':>7} {'NDCG@10':>8}")
for name, generated in cases.items():
    r = compute_item(generated, GOLD)
    print(f"{name:<24} {r.p_at_1:>5.2f} {r.f1_at_3:>6.3f} {r.mrr_at_10:>7.3f} "
          f"{r.ndcg_at_10:>8.3f}")
print()

print("matching is case- and whitespace-insensitive, nothing fancier:")
r = compute_item(["MAKE", "stand  by"], GOLD)
print(f"  ['MAKE', 'stand  by'] -> P@1={r.p_at_1:.0f}, matched ranks {r.matched_ranks}")
print()

report = evaluate_dataset(
    [(generated, GOLD) for generated in cases.values()],
    ids=list(cases),
)
print("dataset-level report (averages are percentages):")
print(format_report_table(report))
