"""Adaptive phase-field topology optimization for Stokes-Brinkman flow."""

from ._core import (
    AfemConfig,
    Error,
    Mesh,
    OptParams,
    PhysParams,
    ProblemSpec,
    RunConfig,
    RunReport,
    afem_drive,
    bisect,
    compare,
    doerfler_mark,
    eta1,
    eta2,
    initial_mesh,
    initial_phase,
    load_config,
    manufactured_study,
    objective,
    optimize,
    parse_config,
    preset,
    preset_names,
    prolongate,
    solve_state,
    uniform_refine,
    unit_square,
    volume_gap,
    vtk_string,
)

__all__ = [
    "AfemConfig",
    "Error",
    "Mesh",
    "OptParams",
    "PhysParams",
    "ProblemSpec",
    "RunConfig",
    "RunReport",
    "afem_drive",
    "bisect",
    "compare",
    "doerfler_mark",
    "eta1",
    "eta2",
    "initial_mesh",
    "initial_phase",
    "load_config",
    "manufactured_study",
    "objective",
    "optimize",
    "parse_config",
    "preset",
    "preset_names",
    "prolongate",
    "solve_state",
    "uniform_refine",
    "unit_square",
    "volume_gap",
    "vtk_string",
]
