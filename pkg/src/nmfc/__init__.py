"""Nonnegative matrix factorization and completion.

The package recovers a nonnegative matrix from a subset of its entries
by fitting a low-inner-dimension product X @ Y with X, Y >= 0.  The main
solver is an alternating-direction augmented-Lagrangian scheme with
closed-form block updates; alongside it live classic baselines
(projected alternating least squares, multiplicative updates, an
over-relaxed unconstrained fitting scheme, and singular-value shrinkage
iteration), first-order optimality auditing, synthetic instance
generators, recovery metrics, and file formats for observations,
matrices, images, and result records.

Quick start::

    import nmfc

    observed, prob = nmfc.make_problem(m=100, n=100, r=5, sr=0.5, seed=0)
    sol = nmfc.solve(observed, nmfc.default_params(observed, q=5))
    print(nmfc.evaluate(sol.X @ sol.Y, prob.M, max_i=prob.M.max()))
"""

from .admm import (
    Solution,
    SolverParams,
    SolverState,
    default_params,
    export_blocks,
    init_state,
    relative_residual,
    solve,
    step,
    stopping_met,
)
from .baselines import (
    BASELINE_KINDS,
    BaselineParams,
    als_step,
    fpca_step,
    lmafit_sor_step,
    mult_step,
    run_baseline,
    svd_shrink,
)
from .io import (
    ResultRecord,
    cube_to_matrix,
    matrix_to_cube,
    read_dense_csv,
    read_observed,
    read_pgm,
    read_results,
    results_table,
    write_dense_csv,
    write_observed,
    write_pgm,
    write_results,
)
from .kkt import KktReport, kkt_residuals
from .masking import (
    ObservedMatrix,
    SampleMask,
    embed,
    frob_norm,
    gather,
    masked_product,
    overwrite_observed,
    project_mask,
    project_mask_complement,
    project_nonneg,
)
from .metrics import EvalReport, evaluate
from .synth import SyntheticProblem, gen_ldr, make_problem, sample_mask

__version__ = "0.1.0"

__all__ = [
    "BASELINE_KINDS",
    "BaselineParams",
    "EvalReport",
    "KktReport",
    "ObservedMatrix",
    "ResultRecord",
    "SampleMask",
    "Solution",
    "SolverParams",
    "SolverState",
    "SyntheticProblem",
    "als_step",
    "cube_to_matrix",
    "default_params",
    "embed",
    "evaluate",
    "export_blocks",
    "fpca_step",
    "frob_norm",
    "gather",
    "gen_ldr",
    "init_state",
    "kkt_residuals",
    "lmafit_sor_step",
    "make_problem",
    "masked_product",
    "matrix_to_cube",
    "mult_step",
    "overwrite_observed",
    "project_mask",
    "project_mask_complement",
    "project_nonneg",
    "read_dense_csv",
    "read_observed",
    "read_pgm",
    "read_results",
    "relative_residual",
    "results_table",
    "run_baseline",
    "sample_mask",
    "solve",
    "step",
    "stopping_met",
    "svd_shrink",
    "write_dense_csv",
    "write_observed",
    "write_pgm",
    "write_results",
]
