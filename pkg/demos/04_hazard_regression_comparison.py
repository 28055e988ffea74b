"""
Entropy screening versus proportional-hazards p-values
======================================================

The partial-likelihood fit scores each covariate through a linear additive
exponent, so a non-product interaction (here: sin of a sum) is invisible to
it, while the entropy ranking picks the pair up directly.  The two outputs
are shown side by side the way comparison tables usually arrange them.
"""


from survent import SimConfig, equal_width_bins, fit, generate, run_mfs

ds = generate(SimConfig(n=6000, censor_target=0.1, seed=2))
scheme = equal_width_bins(ds.y, 10)
reports = run_mfs(ds, scheme, max_order=2, n_bins=10)
cox = fit(ds)

print(f"{'feature':8s} {'CE':>8s} {'drop':>8s} {'PH p-value':>12s}")
for rec in reports[1].records:
    p = cox.p_for(rec.features[0])
    print(f"{rec.label:8s} {rec.ce:8.4f} {rec.ce_drop:8.4f} {p:12.2e}")

v23 = reports[2].record_for(("V2", "V3"))
print(f"\npair V2_V3: CE={v23.ce:.4f}, successive drop={v23.sce_drop:.4f}, "
      f"interacting={v23.interacting}")
print(f"individual p-values: V2={cox.p_for('V2'):.3f}, "
      f"V3={cox.p_for('V3'):.3f}")
print("\nthe additive-exponent fit sees V1 and V7 but not the V2/V3 pair;")
print("the pair dominates the order-2 entropy ranking.")
