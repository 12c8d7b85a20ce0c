"""Multilevel QMC pricing of a discretely monitored Asian call.

Compares the sampling constructions at a small finest-level sample size, then
puts multilevel and single-level QMC with the regression transform side by side.
"""

from mlqmc.harness import ExperimentConfig, emit, emit_table2, run_experiment, run_table2, table2_configs

runs = 30
stats = [run_experiment(ExperimentConfig(method=m, L=10, m=2, N_L=16, runs=runs))
         for m in ("mc", "forward", "pca", "haar", "regression")]
print(emit(stats, "md"))

ml, sl = table2_configs(runs=runs, N_L=64, N=4096)
print(emit_table2(run_table2(ml, sl)))
