"""Print the normality bound for the two reference templates and a small sweep over (a, b)."""
from fractions import Fraction

from starlike_tiling import compute_K_bound, make_template
from starlike_tiling.errors import Infeasible

for variant, a, b in (("A", "1.3", "0.9"), ("B", "1.8", "0.8")):
    c = make_template(variant, Fraction(a), Fraction(b))
    d = compute_K_bound(c)
    print(f"variant {variant}: a={a} b={b} r={c.r} delta={c.delta}  R={d.R}  K={d.Kbound} ({float(d.Kbound):g})")

print("\nvariant A, K bound over a grid of (a, b)  (x: a+b<=2, -: no positive r):")
print("   a \\ b " + "".join(f"{b:>8}" for b in ("0.75", "0.8", "0.85", "0.9", "0.95")))
for a in ("1.1", "1.2", "1.3", "1.4", "1.5"):
    row = []
    for b in ("0.75", "0.8", "0.85", "0.9", "0.95"):
        try:
            row.append(f"{float(compute_K_bound(make_template('A', Fraction(a), Fraction(b))).Kbound):8.1f}")
        except Infeasible:
            row.append(f"{'-':>8}")
        except ValueError:
            row.append(f"{'x':>8}")
    print(f"{a:>8} " + "".join(row))
