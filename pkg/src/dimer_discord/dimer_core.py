"""Correlation measures of a thermalized spin-1/2 exchange dimer.

The system is a pair of spins 1/2 coupled by the isotropic Heisenberg
interaction

    H = -(J/2) * (sigma_1 . sigma_2),

written with Pauli matrices, so the coupling is quoted throughout as
``J/k_B`` in kelvin: negative for antiferromagnetic dimers (singlet ground
state), positive for ferromagnetic ones (triplet ground state).

At temperature T every property of the Gibbs state is a function of the
single spin-spin correlator

    G(T) = <sigma_1^u sigma_2^u>  (any axis u)
         = -1 + 4 / (3 + exp(-2J/(k_B T))),

which runs over [-1, 0) for J < 0 and (0, 1/3] for J > 0.  The thermal
state itself is the X-form matrix ``rho = (1 + G sigma_1 . sigma_2)/4`` in
the standard product basis.

All information measures are reported in bits per dimer:

* total (mutual) information
  ``I = [ (1-3G) log2(1-3G) + 3 (1+G) log2(1+G) ] / 4``,
* classical correlation
  ``C = [ (1+|G|) log2(1+|G|) + (1-|G|) log2(1-|G|) ] / 2``,
* quantum discord ``Q = I - C``,
* concurrence ``max(0, -(1+3G)/2)`` and the entanglement of formation it
  generates through the binary-entropy formula.

Entanglement dies at ``k_B T_e = 2|J|/ln 3`` for antiferromagnetic coupling
and is absent at every temperature for ferromagnetic coupling; discord
survives at all finite temperatures.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "G_MIN",
    "G_MAX",
    "DEATH_TEMPERATURE_SCALE",
    "DimerParameters",
    "CorrelationSet",
    "validate_correlator",
    "correlator_from_temperature",
    "temperature_from_correlator",
    "mutual_information",
    "classical_correlation",
    "discord",
    "concurrence",
    "entanglement_of_formation",
    "entanglement_death_temperature",
    "density_matrix",
    "ppt_eigenvalues",
    "measures_from_correlator",
    "correlation_set",
]

G_MIN = -1.0
G_MAX = 1.0 / 3.0

# k_B T_e / |J|: the dimensionless entanglement-death temperature, 2/ln 3.
DEATH_TEMPERATURE_SCALE = 2.0 / math.log(3.0)

_G_TOL = 1e-9  # float fuzz allowed on direct correlator inputs before we refuse
_XLOG_CUTOFF = 1e-30  # below this, x*log2(x) is 0 to double precision anyway
_EXP_ARG_MAX = 700.0  # exp() overflows near 709; beyond this use the T=0 limit


@dataclass(frozen=True)
class DimerParameters:
    """Exchange coupling and, when needed, the spectroscopic g factor.

    Parameters
    ----------
    j_over_kb : float
        J/k_B in kelvin.  Negative = antiferromagnetic, positive =
        ferromagnetic; zero is rejected (no dimer left).
    g_factor : float, 3-tuple or None
        Scalar g factor, or the principal values ``(gx, gy, gz)`` to be
        powder-averaged, or None when no magnetometric work is planned.
    """

    j_over_kb: float
    g_factor: float | tuple[float, float, float] | None = None

    def __post_init__(self):
        j = self.j_over_kb
        if not isinstance(j, (int, float)) or not math.isfinite(j) or j == 0.0:
            raise DomainError(f"j_over_kb must be finite and nonzero, got {j!r}")
        gf = self.g_factor
        if gf is None:
            return
        if isinstance(gf, (list, tuple)):
            if len(gf) != 3:
                raise DomainError("g tensor needs exactly three principal values")
            comps = tuple(float(c) for c in gf)
            if any(not math.isfinite(c) or c <= 0.0 for c in comps):
                raise DomainError(f"g tensor components must be positive, got {gf!r}")
            object.__setattr__(self, "g_factor", comps)
        else:
            g = float(gf)
            if not math.isfinite(g) or g <= 0.0:
                raise DomainError(f"g factor must be positive, got {gf!r}")

    @property
    def antiferro(self) -> bool:
        return self.j_over_kb < 0.0


@dataclass(frozen=True)
class CorrelationSet:
    """All five correlation measures of one thermal state, in bits per dimer."""

    mutual_information: float
    classical: float
    discord: float
    concurrence: float
    entanglement: float


def validate_correlator(g: float) -> float:
    """Check that ``g`` is a physical correlator, absorbing float fuzz.

    Values inside ``[-1, 1/3]`` pass through; values within 1e-9 of the
    endpoints are clamped onto them; anything further out raises
    :class:`DomainError`.
    """
    g = float(g)
    if not math.isfinite(g):
        raise DomainError(f"correlator must be finite, got {g!r}")
    if g < G_MIN - _G_TOL or g > G_MAX + _G_TOL:
        raise DomainError(f"correlator {g!r} lies outside the physical range [-1, 1/3]")
    return min(max(g, G_MIN), G_MAX)


def _xlog2(x: float) -> float:
    # the entropy convention 0*log(0) = 0, with a guard well below double noise
    if x < _XLOG_CUTOFF:
        return 0.0
    return x * math.log2(x)


def correlator_from_temperature(params: DimerParameters, t: float) -> float:
    """Thermal spin-spin correlator G(T) of the dimer at temperature ``t`` (K)."""
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"temperature must be positive, got {t!r}")
    a = -2.0 * params.j_over_kb / t
    if abs(a) > _EXP_ARG_MAX:
        # T -> 0 limit: pure singlet (G=-1) or thermal triplet (G=1/3)
        return G_MIN if params.j_over_kb < 0.0 else G_MAX
    return -1.0 + 4.0 / (3.0 + math.exp(a))


def temperature_from_correlator(params: DimerParameters, g: float) -> float:
    """Temperature (K) at which the dimer shows correlator ``g``.

    Inverse of :func:`correlator_from_temperature`; ``g`` must lie strictly
    inside the branch reachable with the sign of ``params.j_over_kb``
    (``(-1, 0)`` antiferromagnetic, ``(0, 1/3)`` ferromagnetic).
    """
    g = validate_correlator(g)
    j = params.j_over_kb
    if j < 0.0 and not G_MIN < g < 0.0:
        raise DomainError(
            f"correlator {g!r} not reachable at finite T with antiferromagnetic coupling"
        )
    if j > 0.0 and not 0.0 < g < G_MAX:
        raise DomainError(
            f"correlator {g!r} not reachable at finite T with ferromagnetic coupling"
        )
    return -2.0 * j / math.log(4.0 / (1.0 + g) - 3.0)


def mutual_information(g: float) -> float:
    """Total correlation I(G) in bits between the two spins."""
    g = validate_correlator(g)
    return 0.25 * (_xlog2(1.0 - 3.0 * g) + 3.0 * _xlog2(1.0 + g))


def classical_correlation(g: float) -> float:
    """Classical part C(G) of the total correlation, in bits."""
    a = abs(validate_correlator(g))
    return 0.5 * (_xlog2(1.0 + a) + _xlog2(1.0 - a))


def discord(g: float) -> float:
    """Quantum discord Q(G) = I(G) - C(G) in bits."""
    g = validate_correlator(g)
    return mutual_information(g) - classical_correlation(g)


def concurrence(g: float, antiferro: bool) -> float:
    """Concurrence of the thermal state with correlator ``g``.

    ``max(0, -(1+3G)/2)`` on the antiferromagnetic branch; identically zero
    on the ferromagnetic one.  The flag cross-checks that ``g`` sits on the
    branch it claims to come from.
    """
    g = validate_correlator(g)
    if antiferro and g > _G_TOL:
        raise DomainError(f"correlator {g!r} is positive; not an antiferromagnetic state")
    if not antiferro and g < -_G_TOL:
        raise DomainError(f"correlator {g!r} is negative; not a ferromagnetic state")
    if not antiferro:
        return 0.0
    return max(0.0, -(1.0 + 3.0 * g) / 2.0)


def entanglement_of_formation(c_tilde: float) -> float:
    """Entanglement of formation (bits) for a state of concurrence ``c_tilde``."""
    c = float(c_tilde)
    if not math.isfinite(c) or c < -_G_TOL or c > 1.0 + _G_TOL:
        raise DomainError(f"concurrence must lie in [0, 1], got {c_tilde!r}")
    c = min(max(c, 0.0), 1.0)
    if c == 0.0:
        return 0.0
    p = 0.5 * (1.0 + math.sqrt(1.0 - c * c))
    return -(_xlog2(p) + _xlog2(1.0 - p))


def entanglement_death_temperature(params: DimerParameters) -> float:
    """Sudden-death temperature T_e = (2/ln 3) |J|/k_B in kelvin.

    Only antiferromagnetic dimers are ever entangled, so ferromagnetic
    parameters are rejected.
    """
    if params.j_over_kb > 0.0:
        raise DomainError("ferromagnetic dimers are separable at every temperature")
    return DEATH_TEMPERATURE_SCALE * abs(params.j_over_kb)


def density_matrix(g: float) -> np.ndarray:
    """4x4 thermal density matrix ``(1 + G sigma_1 . sigma_2)/4``.

    Basis order ``|00>, |01>, |10>, |11>``.  Real, symmetric, unit trace;
    positive semidefinite exactly on the physical range of ``g``.
    """
    g = validate_correlator(g)
    d = 0.25 * (1.0 + g)
    m = 0.25 * (1.0 - g)
    o = 0.5 * g
    return np.array(
        [
            [d, 0.0, 0.0, 0.0],
            [0.0, m, o, 0.0],
            [0.0, o, m, 0.0],
            [0.0, 0.0, 0.0, d],
        ]
    )


def ppt_eigenvalues(g: float) -> np.ndarray:
    """Eigenvalues (ascending) of the partial transpose of the thermal state.

    The spectrum is ``{(1+3G)/4, (1-G)/4 (x3)}``; its minimum is negative
    exactly when the state is entangled (G < -1/3), which is also exactly
    when the concurrence is positive.
    """
    g = validate_correlator(g)
    lam = np.array([0.25 * (1.0 + 3.0 * g)] + [0.25 * (1.0 - g)] * 3)
    lam.sort()
    return lam


def measures_from_correlator(g: float) -> CorrelationSet:
    """Bundle all five correlation measures for a given correlator.

    The coupling branch is implied by the sign of ``g`` (the concurrence
    formula returns zero on the whole ferromagnetic range by itself).
    """
    g = validate_correlator(g)
    i = mutual_information(g)
    c = classical_correlation(g)
    ct = max(0.0, -(1.0 + 3.0 * g) / 2.0)
    return CorrelationSet(
        mutual_information=i,
        classical=c,
        discord=i - c,
        concurrence=ct,
        entanglement=entanglement_of_formation(ct),
    )


def correlation_set(params: DimerParameters, t: float) -> CorrelationSet:
    """All five correlation measures of the dimer at temperature ``t`` (K)."""
    return measures_from_correlator(correlator_from_temperature(params, t))
