"""Lambda terms compiled to k and s, then run in several models.

The compiler only knows two combinators; every model here supplies its own
k and s, so the same compiled term evaluates everywhere.
"""

import random

from pcalab.bmodel import BPca
from pcalab.embeddings import sample_b
from pcalab.k2 import K2Pca, random_k2
from pcalab.machine import Budget
from pcalab.terms import Const, abstract_all, ap, eval_term, normalize, parse, show

first = abstract_all(["x", "y"], parse("x"))
swap = abstract_all(["x", "y", "z"], parse("x z y"))
print("lambda x y. x        ->", show(first))
print("lambda x y z. x z y  ->", show(swap)[:70], "...")

print("\nIn the term algebra, weak reduction recovers the bodies:")
a, b, c = parse("a", {"a"}), parse("b", {"b"}), parse("c", {"c"})
print("  first a b  ->", show(normalize(ap(first, a, b), 100)))
print("  swap a b c ->", show(normalize(ap(swap, a, b, c), 1000)))

budget = Budget(steps=10**5, window=12)
rng = random.Random(7)
for pca, draw in ((K2Pca(), random_k2), (BPca(), sample_b)):
    f, g = draw(rng), draw(rng)
    env = {"f": f, "g": g, "first": eval_term(first, pca, budget)}
    compiled = eval_term(ap(Const("first"), Const("f"), Const("g")), pca, budget, env)
    same = pca.equal(compiled, f, budget)
    print(f"\n{pca.name}: first . f . g equals f on the first {budget.window} points: {same}")
