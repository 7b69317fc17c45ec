"""Exact conformally equivariant quantization of symbols of degree <= 2."""

from .scalar import ExactScalar, format_rational, parse_rational
from .poly import FlatMetric, Poly
from .coefficients import CoefficientSet, Weights, coefficients, resonance_report, solve_equivariance_system
from .flat import QuantizationParams, Symbol2, quantize_ansatz, quantize_components
from .geometry import ConformalFactorJet, MetricJet2, curvature_from_jets
from .curved import PointOperator, SymbolJet2, quantize_point

__version__ = "0.1.0"
