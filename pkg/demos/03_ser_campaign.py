"""Paired SER curves: FEC DMs vs the published CO set at rate 2.

Both campaigns use the same seed, so channel, noise and transmitted indices
match block for block. Takes about a minute.
"""
from stskdm.harness import SimConfig, build_codebook, run_ser_campaign, ser_csv

base = SimConfig(M=2, N=2, T=2, snr_grid_db=[0, 4, 8, 12, 16], min_errors=200,
                 max_trials=2 * 10**6, master_seed=11)
schemes = {
    "FEC, QPSK, Q=4": base.replace(dm_family="fec", constellation="psk:4"),
    "CDA, BPSK, Q=8": base.replace(dm_family="cda", constellation="psk:2"),
    "CO,  BPSK, Q=8": base.replace(dm_family="fixture", constellation="psk:2"),
}
for name, cfg in schemes.items():
    pts = run_ser_campaign(cfg, codebook=build_codebook(cfg))
    print(name)
    for p in pts:
        print(f"  {p.snr_db:5.1f} dB  SER {p.ser:.3e}  ({p.errors} errors / {p.trials} blocks)")

# the same numbers as CSV, with provenance comments
print(ser_csv(pts, cfg))
