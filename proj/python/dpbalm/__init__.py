from dpbalm._core import (
    CertifyReport,
    HistoryRecord,
    Problem,
    SolveReport,
    SolverConfig,
    certify,
    generate_basis_pursuit,
    load_instance,
    save_instance,
    solve,
    spectral_radius_gram,
    tiny_bp_oracle,
)

__all__ = [
    "CertifyReport",
    "HistoryRecord",
    "Problem",
    "SolveReport",
    "SolverConfig",
    "certify",
    "generate_basis_pursuit",
    "load_instance",
    "save_instance",
    "solve",
    "spectral_radius_gram",
    "tiny_bp_oracle",
]
