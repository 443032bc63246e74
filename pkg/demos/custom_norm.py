"""A polytope norm on R^3: quotient norms, a tiling and its normality ratio."""
import numpy as np

from starlike_tiling import SpaceDescriptor, StarlikeTiling, make_template

# ||x|| = max_i |<f_i, x>|; the rows must span R^3
F = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0.5, -0.5, 1], [0.3, 0.8, -0.6]]
space = SpaceDescriptor.polytope(F)

x = np.array([1.0, -2.0, 0.5])
for k in range(3):
    print(f"||x|| in Z_{k} = {space.quotient_norm(x, k):.6f}")

T = StarlikeTiling.build(space, make_template("A", 1.3, 0.9), epsilon=0.2, trials=2000)
X = np.random.default_rng(0).uniform(-10, 10, (2000, 3))
ids = T.locate_full_many(X)
ratios = [space.norm(x - T.full_center(t)) / T.r for x, t in zip(X, ids)]
print(f"{len(set(ids))} tiles hit by 2000 samples, max |x - center|/r = {max(ratios):.2f}"
      f" (bound {float(T.derived().Kbound):.1f})")
