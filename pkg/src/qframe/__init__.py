"""Rational numbers as qubit-string states, SU(2) gauges, Cauchy checks and frame fields."""
from .arithmetic import (DomainError, abs_A, accuracy_state, add_A, add_registers, div_A, eq_A,
                         le_A, lt_A, mul_A, neg_A, prob_eq, prob_le, prob_rel, sub_A)
from .cauchy import (CAUCHY, INCONCLUSIVE, NOT_CAUCHY, CauchyOperator, CauchyReport,
                     InternalConsistencyError, StateSequence, check_cauchy_basis,
                     check_cauchy_gauged, check_u_cauchy, equivalent, prob_cauchy, prob_pair)
from .dfs import DecodeError, LogicalEncoding, PreconditionError, check_invariance, decode, encode, logical_probs
from .dyadic import DyadicValue
from .frames import Frame, FrameField, PathError, Topology, TopologyError, VisibilityError
from .gauge import (HADAMARD, IDENTITY, GaugeTransform, NotSU2, ProductState, SupportCapExceeded,
                    apply_gauge, compose, conjugated_op, conjugated_rel, inverse, overlap_after_gauge,
                    random_su2)
from .states import (MINUS, PLUS, ZERO, ParseError, RawStringState, StringRational, canonicalize,
                     format_state, from_value, nat_state, parse, value)
from .superpose import ContractViolation, Superposition, inner_product, lift

__version__ = "0.1.0"
