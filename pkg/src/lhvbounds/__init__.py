"""Tight LHV bounds for Bell-type functionals by exact enumeration."""
from .errors import CapExceeded, SignalingError, ValidationError
from .scenario import (AffineMap, CorrelationFunctional, Document,
                       EventFunctional, EventTerm, FiniteReal,
                       IntervalExtremes, ProbabilityFunctional, Scenario,
                       dump_document, load_document, load_scenario,
                       normalize_outcomes, parse_document)
from .forms import (BoundReport, evaluate_correlation_form, face_count,
                    lemma1_audit, lhv_bounds, lhv_bounds_correlation,
                    lhv_bounds_events, lhv_bounds_full_correlation,
                    lhv_bounds_probability)
from .generators import (NamedInequality, ch, chsh, collins_gisin_2233,
                         collins_gisin_4422, mk_coefficients, zohren_gill)
from .behaviors import (Behavior, LhvModel, behavior_from_lhv,
                        check_no_signaling, correlation, evaluate_functional,
                        is_lhv)
from .quantum import bell_operator, expectation, mk_violation_report

__version__ = "0.1.0"
