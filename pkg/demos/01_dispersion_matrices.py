"""Build the two structured DM sets and look at what the product map gives.

Run with ``python3 demos/01_dispersion_matrices.py``.
"""
import numpy as np

from stskdm import cda_dm_set, expand, fec_dm_set, make_psk, verify_decomposition
from stskdm.codebook import ldc_code
from stskdm.dispersion import CdaParams, FecParams, companion_matrix

np.set_printoptions(precision=3, suppress=True)

qpsk = make_psk(4)

# field-extension DMs: powers of the companion matrix of x^2 - j,
# with the coefficient of the second power pinned to 1
fec = fec_dm_set(qpsk, FecParams(M=2, pivot=1))
for p, A in enumerate(fec.matrices):
    print(f"A_{p} * sqrt(2) =\n{A * np.sqrt(2)}")

# every codeword of the rate-one code is s * A_p for exactly one (s, p)
basis = np.stack([np.eye(2), companion_matrix([-1j, 0])]) / np.sqrt(2)
full = ldc_code(qpsk.points, basis)
print(verify_decomposition(qpsk.points, fec.matrices, full, "FEC QPSK"))

# CDA DMs over BPSK: 8 matrices, one coefficient pinned
bpsk = make_psk(2)
cda = cda_dm_set(bpsk, CdaParams(M=2, t_phase=0.5, delta_phase=3 / 8))
print(f"\nCDA set: Q = {cda.Q}, power per matrix =",
      np.round(np.sum(np.abs(cda.matrices) ** 2, axis=(1, 2)), 12))

cb = expand(bpsk, cda)
print(f"codebook: {cb.size} codewords, rate {cb.rate} bpcu, chi is {cb.chi.shape}")
