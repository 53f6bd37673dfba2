"""Spectral Galerkin correction step and a plane-layer magnetoconvection simulator."""

from ._scgk import (
    CheckpointError,
    ConfigError,
    CorrectionBasis,
    NumericalError,
    Params,
    Simulator,
    SingularOperatorError,
    SpectralState,
    boundary_row,
    complement_basis,
    constraints_for,
    differentiate,
    eval_at,
    galerkin_solve_dense,
    prepare_correction,
    project_dirichlet,
    read_checkpoint,
    run,
    solve_constrained,
    solve_helmholtz,
    weights,
    write_checkpoint,
)

__all__ = [
    "CheckpointError",
    "ConfigError",
    "CorrectionBasis",
    "NumericalError",
    "Params",
    "Simulator",
    "SingularOperatorError",
    "SpectralState",
    "boundary_row",
    "complement_basis",
    "constraints_for",
    "differentiate",
    "eval_at",
    "galerkin_solve_dense",
    "prepare_correction",
    "project_dirichlet",
    "read_checkpoint",
    "run",
    "solve_constrained",
    "solve_helmholtz",
    "weights",
    "write_checkpoint",
]
