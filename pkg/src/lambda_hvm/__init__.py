"""Hidden-variable simulation of qudit magic-state circuits.

The model expands quantum states as probability distributions over the
vertices of the polytope dual to the stabilizer polytope, updates vertices
deterministically under Clifford gates and stochastically under Pauli
measurements, and reproduces the Born rule exactly; everything is backed by
exact cyclotomic arithmetic and cross-validated against a dense
quantum-mechanical oracle.
"""

from .cyclotomic import CycNumber, sqrt_int, zeta
from .linalg import CycMatrix, exact_rank, exact_solve
from .pauli import (CliffordElement, NotCliffordError, PhasePoint, beta,
                    beta_mod_d, clifford_from_matrix, clifford_generators,
                    compose_check, pauli_matrix, pauli_mono, phase_space,
                    symplectic_product)
from .stabilizer import (IsotropicSubgroup, StabilizerProjector,
                         ValueAssignment, closure_and_cnc, coarse_grain,
                         clifford_transport, enumerate_isotropics, projector,
                         projector_product, value_assignments)
from .polytope import (LambdaHRep, VertexCertificate, VertexSet,
                       certify_vertex, cnc_phase_point, duality_dilation_check,
                       enumerate_vertices, lambda_hrep, load_vertex_file,
                       pauli_bound, save_vertex_file, stabilizer_states)
from .hvm import (Circuit, CliffordOp, DecompositionInfeasible,
                  HiddenVariableModel, MeasureOp, PhiMapSpec, ShotRecord,
                  StateDistribution, TransitionKernel, VertexSetIncomplete,
                  chi_square, oracle_distribution, oracle_simulate, phi_apply,
                  random_circuit, run_shots, simulate_run, verify_circuit_born)
from .presets import preset_names, preset_state

__version__ = "0.1.0"
