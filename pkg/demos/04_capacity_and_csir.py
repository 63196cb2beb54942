"""DCMC capacity, imperfect CSIR and the semi-blind receiver."""
from stskdm.harness import SimConfig, build_codebook, run_capacity_campaign, run_ser_campaign

cda = SimConfig(dm_family="cda", constellation="psk:2", snr_grid_db=[0, 5, 10, 15, 20],
                capacity_samples=5000)
co = cda.replace(dm_family="fixture")
for name, cfg in (("CDA", cda), ("CO ", co)):
    caps = run_capacity_campaign(cfg)
    print(name, " ".join(f"{c.capacity_bpcu:.3f}" for c in caps))

# channel estimate H + E with E ~ CN(0, sigma); the draws of E are shared
# between sigma values, so the curves are directly comparable
fec = SimConfig(snr_grid_db=[15.0], min_errors=100, max_trials=10**6)
for s in (0.0, 0.01, 0.1):
    p = run_ser_campaign(fec.replace(csir_sigma=s))[0]
    print(f"sigma={s:<5} SER {p.ser:.3e}")

# 2 training blocks + 100 data blocks per frame, LS refit on decisions
cb = build_codebook(fec)
for it in (0, 1, 3):
    p = run_ser_campaign(fec.replace(detector=f"semiblind:{it}"), codebook=cb)[0]
    print(f"semi-blind, {it} refits: SER {p.ser:.3e}")
