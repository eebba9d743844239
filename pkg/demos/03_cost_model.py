"""The analytical cost model agrees with the instrumented kernels exactly.

Formulas are evaluated in exact integer arithmetic, so flop counts can be
compared with ==, not a tolerance.  The crossover table shows why block
dimension matters: smaller blocks shave flops but inflate permutation
traffic.
"""

from blocksym import (
    OpCounter,
    approx_costs,
    bcss_costs,
    compress,
    crossover_table,
    dense_costs,
    random_matrix,
    random_symmetric,
    sttsm_bcss,
    sttsm_dense_ttm,
)

m, n, b = 3, 8, 2
a = random_symmetric(m, n, seed=1)
x = random_matrix(n, n, seed=2)

c = OpCounter()
sttsm_dense_ttm(a, x, c)
rep = dense_costs(m, n, n)
print(f"dense chain:   counted {c.flops} flops, formula {rep.flops}, "
      f"equal: {c.flops == rep.flops}")

packed = compress(a, b)
for reuse in (True, False):
    c = OpCounter()
    sttsm_bcss(packed, x, b, c, reuse=reuse)
    rep = bcss_costs(m, n, n, b, b, meta_k=0, reuse=reuse)
    label = "with reuse " if reuse else "plain tiles"
    print(f"blocked {label}: counted {c.flops} flops, formula {rep.flops}, "
          f"equal: {c.flops == rep.flops}; memops {c.memops} vs model {rep.memops}")

print("\nflop/memop crossover at m = 5, n = p = 64:")
print(f"{'b':>4}  {'flops':>16}  {'memops':>16}")
for b_, flops, memops in crossover_table(5, 64, 64):
    print(f"{b_:>4}  {flops:>16}  {memops:>16}")

print("\nlimit-regime speedup constants (dense flops / blocked flops):")
for m_ in range(2, 7):
    est = approx_costs(m_, 64)
    print(f"  m={m_}: (m+1)!/2^m = {float(est.speedup_limit):.2f}, "
          f"m*m!/2^m = {float(est.speedup_limit_exact):.2f}")
