"""Spectral certificates for well-posedness.

For any interior composition the flux-force matrix has a simple zero
eigenvalue and the rest of its (real) spectrum below -delta with
delta = min 1/D_ij; the induced diffusion operator on the zero-sum
subspace has strictly positive eigenvalues as long as the Gibbs energy
stays strongly convex.  Pushing the binary interaction parameter past
the spinodal flips the certificate.

Run:  python3 demos/spectral_certificates.py
"""
import numpy as np

import msdiff as md

rng = np.random.default_rng(7)
dmat = np.array([[0.0, 2.0, 0.5], [2.0, 0.0, 1.5], [0.5, 1.5, 0.0]])
x = rng.dirichlet(np.ones(3))
rep = md.spectrum(x, dmat)
print(f"composition        : {np.round(x, 4)}")
print(f"eigenvalues of A   : {np.round(rep.eigenvalues, 6)}")
print(f"gap bound -delta   : {-rep.delta:.6f}   certified: {rep.gap_ok}")

for a12 in (0.0, 1.9, 2.1):
    model = md.IDEAL if a12 == 0 else md.ThermoModel.margules([[0, a12], [a12, 0]])
    dm2 = [[0.0, 1.0], [1.0, 0.0]]
    try:
        w = md.diffusion_operator_spectrum(np.array([0.5, 0.5]), dm2, model)
        print(f"binary A12={a12:>3}: diffusion eigenvalue {w[0]:+.4f} (parabolic)")
    except md.errors.NotConvex:
        print(f"binary A12={a12:>3}: NotConvex - phase-splitting regime")
