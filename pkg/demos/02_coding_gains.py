"""Coding gain and diversity of the structured and searched DM sets.

The gain printed is min |det(D D^H)| over codeword pairs; pass ``root=True``
to ``coding_gain`` for the M-th-root form.
"""
from stskdm import coding_gain, expand, make_psk
from stskdm.dispersion import co_dm_search
from stskdm.harness import run_gain_table

for row in run_gain_table():
    print(row.line())

# a fresh random search for CSTSK(2,2,2,4) QPSK, kept small so this runs quickly
qpsk = make_psk(4)
co = co_dm_search(2, 2, 4, qpsk, candidates=50, mi_samples=2000, rng_seed=1)
cb = expand(qpsk, co)
print(f"\nrandom search: MI at 10 dB = {co.params['mi']:.3f} bpcu, "
      f"G = {coding_gain(cb):.4f} (root form {coding_gain(cb, root=True):.4f})")
