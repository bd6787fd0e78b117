"""Constrained lower bounds for G''(Phi) and the penalty M that restores positivity."""

from f4nls import make_grid, profile
from f4nls.coercivity import CoercivityProblem, calibrate_M, crossover_M, gamma_and_deltas, subspace_bound
from f4nls.linops import build_operator, garding_certify

grid = make_grid(96.0, 512)
pb = CoercivityProblem(grid)

for k, v in gamma_and_deltas(pb).items():
    print(f"{k:8s} {v: .9f}")

z = subspace_bound(pb, pb.z_constraints(), label="Z")
print(f"H2 bound on Z: {z.lambda_min:.6f}")
sym = subspace_bound(pb, pb.symmetry_constraints(), M=0.0)
print(f"H2 bound on the symmetry complement, M = 0: {sym.lambda_min:.4f}")

print(f"crossover M: {crossover_M(pb):.5f}")
M = calibrate_M(pb, z.lambda_min)
aug = subspace_bound(pb, pb.symmetry_constraints(), M=M)
print(f"calibrated M = {M:.4f}, augmented bound {aug.lambda_min:.6f} >= {z.lambda_min / 2:.6f}")

cert = garding_certify(build_operator("L1", grid, profile(grid)), 0.5)
print(f"Garding: (L1 v, v) >= 0.5 ||v||_H2^2 - {cert.C:.6f} ||v||^2")
