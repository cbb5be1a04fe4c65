"""A tour of the five models, one application each.

Run with: python walkthroughs/01_models.py
"""

from pcalab import graph as G
from pcalab import streams as S
from pcalab.bmodel import BPca, from_table, nowhere
from pcalab.k1 import K1Element, K1Pca, k1_generator
from pcalab.k2 import K2_CATALOG, Certified, K201Element, K201Pca, K2Pca, certified
from pcalab.machine import Budget, pair, show_index

budget = Budget(steps=10**5, window=8)

print("K1: numbers act on numbers through the machine numbering.")
k1 = K1Pca()
e = k1_generator()
succ = k1.apply(e, K1Element(0))
print(f"  e.0 is the successor at index {show_index(succ.index)}; e.0.41 =",
      k1.apply(succ, K1Element(41)).index)
print("  the index 1 loops forever:", k1.apply(K1Element(1), K1Element(0), budget))

print("\nK2: total functions, where the head value picks the program.")
k2 = K2Pca()
plus_one = certified(S.head_then_zeros(K2_CATALOG["succ"]), "succ")
g = certified(S.table_program([3, 1, 4, 1, 5], 9), "digits")
print("  succ . [3 1 4 1 5 9 ...] =", k2.apply(plus_one, g, budget).values(8))
ka = k2.apply(k2.k, g, budget)
print("  k . g . anything =", k2.apply(ka, plus_one, budget).values(8))

print("\nK201: the binary variant, where an all-zero function is not applicable.")
k201 = K201Pca()
zeros = K201Element(S.constant_program(0), Certified("zeros"))
print("  0^w . k ->", k201.apply(zeros, k201.k, budget))

print("\nB: partial functions; application always succeeds, evaluation may not.")
b = BPca()
f = from_table({0: 7, 2: 1})
r = b.apply(b.apply(b.k, f), nowhere())
print("  (k . f) . nowhere =", r.values(4, budget), "(holes shown as None)")

print("\nE: sets of axioms <n, D>; X.Y collects n whenever D lies inside Y.")
X = G.FiniteSet([pair(5, 0), pair(3, 0b110)])
for Y in (G.EMPTY, G.FiniteSet([1, 2])):
    print(f"  X . {sorted(Y.approx(1))} =", sorted(G.g_apply(X, Y).approx(1)))
