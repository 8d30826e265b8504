"""Cross-check the closed-form Lambda-curves with two stochastic oracles.

Neither oracle diagonalizes a Hamiltonian:

* a random walk of a unit vector on the N-sphere, whose reshaped state
  matrix yields Schmidt-spectrum samples, and
* a Langevin simulation of the Schmidt eigenvalues themselves, with
  level-repulsion drift and multiplicative noise.

Both are compared against the closed-form mean purity <S2>(Lambda) at
n_a = n_b = 4 (N = 16); the table reports z-scores of the Monte Carlo
estimates against the formula.

Run:  python3 demos/oracle_crosscheck.py
"""

import numpy as np

from entdyn import oracle, theory

dims = theory.BipartiteDims(4, 4)
grid = tuple(np.linspace(0.05, 0.4, 8))
garr = np.array(grid)
theory_s2 = theory.avg_s2(dims, garr)

print("sphere walk (2000 trajectories) ...")
walk = oracle.sphere_walk(
    oracle.SphereWalkConfig(n_traj=2000, record_grid=grid, seed=3, n_a=4, n_b=4)
)
walk_rows = oracle.moment_check(grid, walk["s2"], theory_s2, "s2")

print("eigenvalue Langevin (400 trajectories) ...")
lang = oracle.eig_langevin(
    oracle.EigLangevinConfig(n_a=4, n_b=4, n_traj=400, record_grid=grid, seed=5)
)
lang_rows = oracle.moment_check(grid, lang["s2"], theory_s2, "s2")

print(f"\n{'Lambda':>8} {'closed form':>12} {'walk':>18} {'z':>6} "
      f"{'langevin':>18} {'z':>6}")
for th, w, l in zip(theory_s2, walk_rows, lang_rows):
    print(f"{w['lambda']:>8.3f} {th:>12.5f} "
          f"{w['estimate']:>10.5f} ± {w['stderr']:.5f} {w['z']:>6.2f} "
          f"{l['estimate']:>10.5f} ± {l['stderr']:.5f} {l['z']:>6.2f}")

flagged = sum(r["flagged"] for r in walk_rows + lang_rows)
print(f"\n{flagged} of {len(walk_rows) + len(lang_rows)} checks beyond 3 standard errors")

report = oracle.w_moment_step_check(4, 4, 100000, 1e-4, seed=7)
print("\nsingle-step moment check of the walk (N = 16):")
for name, r in report.items():
    print(f"  {name}: {r['estimate']:.3f} ± {r['stderr']:.3f} "
          f"(target {r['target']:.0f}, z = {r['z']:+.2f})")
