"""Why the slope must stay away from zero at infinity.

The 1/y^2 profile satisfies the pointwise non-degeneracy condition on
(1, inf) but its slope dies at infinity.  Growing the truncation length L
shows the spectral gap sinking toward zero like 1/L^2 (no uniform gap),
while the linear control profile on the same windows plateaus immediately.
"""
from sheardecay import PsiSearch, counterexample_scan, couette, taylor_couette
from sheardecay.reporting import write_csv

nu, k = 1e-3, 1.0
Ls = [10.0, 20.0, 40.0, 80.0]
search = PsiSearch(coarse_points=257, doubling_check=False)

print(f"decaying-slope profile 1/y^2 on (1, L), nu={nu:g}, k={k:g}:")
scan = counterexample_scan(taylor_couette(), nu, k, Ls, search=search)
prev = None
for L, psi in scan.rows:
    note = "" if prev is None else f"   ({prev / psi:.1f}x smaller)"
    print(f"  L={L:5.0f}  psi={psi:.4e}{note}")
    prev = psi

print()
print("control: linear profile on the same windows:")
control = counterexample_scan(couette(), nu, k, Ls, search=search)
for L, psi in control.rows:
    print(f"  L={L:5.0f}  psi={psi:.4e}")

write_csv("out/demo_counterexample.csv", ["L", "psi_decaying_slope", "psi_control"],
          [(L, a, b) for (L, a), (_, b) in zip(scan.rows, control.rows)])
print()
print("wrote out/demo_counterexample.csv")
