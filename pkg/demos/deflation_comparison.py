"""Head-to-head of the two deflation pipelines on crowded 20-link networks:
the multistart lq variant (lqmd) versus the convex single-start one (nlpd).

Both admit a similar number of links, but when they admit equally many the
lq variant tends to find a cheaper power allocation.

Run:  python3 demos/deflation_comparison.py   (a few seconds)
"""

from jpac.harness import ExperimentConfig, run_experiment

config = ExperimentConfig(
    experiment="deflate-compare",
    K_list=[20],
    runs=50,
    q_list=[0.5],
    n_starts=5,
    seed=0,
)
rows, summary = run_experiment(config)

value = {(r["algorithm"], r["metric"]): r["value"] for r in summary}
print("mean admitted links:")
print(f"  lqmd {value[('lqmd', 'mean_supported')]:.2f}   "
      f"nlpd {value[('nlpd', 'mean_supported')]:.2f}")
print("head-to-head (strictly more links admitted):")
print(f"  lqmd wins {value[(None, 'lqmd_wins')]:.0f}, "
      f"nlpd wins {value[(None, 'nlpd_wins')]:.0f}, "
      f"equal {value[(None, 'equal_count')]:.0f}")
if ("lqmd", "mean_power_mw_equal") in value:
    print("mean total power when both admit the same count:")
    print(f"  lqmd {value[('lqmd', 'mean_power_mw_equal')]:.1f} mW   "
          f"nlpd {value[('nlpd', 'mean_power_mw_equal')]:.1f} mW")
