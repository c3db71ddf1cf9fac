"""Interpolation-error proxy against degrees of freedom on graded meshes."""

import argparse

from qnll.bench import fit_slope
from qnll.coarse import build_mesh, decaying_curvature, interpolation_error_proxy

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphas", default="1.0,1.2")
    ap.add_argument("--k-list", default="4,8,16,32,64,128")
    a = ap.parse_args()
    ks = [int(k) for k in a.k_list.split(",")]
    for alpha in (float(s) for s in a.alphas.split(",")):
        dof, err = [], []
        print(f"alpha={alpha:g}")
        for K in ks:
            Kbar = K + 2
            mesh, N = build_mesh(K, Kbar, alpha)
            dof.append(mesh.dof)
            err.append(interpolation_error_proxy(mesh, decaying_curvature(alpha), Kbar))
            print(f"  K={K:4d} N={N:9d} dof={mesh.dof:6d} proxy={err[-1]:.4e}")
        print(f"  slope {fit_slope(dof, err):.3f} (reference {-0.5 - alpha:.2f})")
