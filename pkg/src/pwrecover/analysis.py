"""Hypothesis certification, error certificates, and convergence diagnostics.

A family is admissible for recovery when, for every parameter alpha:

* integrability        -- the transform has finite integral (core quadrature
                          plus certified tail mass),
* positivity           -- the transform is nonnegative with a positive band
                          floor ``m_alpha = inf_{|xi| <= pi} transform``,
* tail_summability     -- the certified aliasing-band ceilings are summable,

and, across the parameter ladder:

* tail_domination      -- ``sum_{j != 0} tail_bound(j) <= C m_alpha`` with one
                          constant ``C`` for the whole ladder,
* band_concentration   -- ``m_alpha / transform(xi)`` decreases to 0 along the
                          ladder for interior band frequencies.

Certifier verdicts are sound by construction: tail bounds over-estimate the
true band suprema (the certified-upper-bound contract of ``kernels``), so a
PASS can only under-claim.  Any evaluation failure yields INDETERMINATE,
never PASS.

The quantitative side computes the recovery error certificate
``|| (m_alpha / transform) * spectrum ||_{L^2 band}``, which dominates the
uniform recovery error up to one parameter-free constant; sweeps fit that
constant at the first ladder rung and flag any rung that leaves a factor-3
stability band (the signature of the finite-window truncation floor) or whose
solve degraded.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NumericalError
from .interpolation import fit_interpolant
from .quadrature import integrate
from .signals import sample

__all__ = [
    "VERDICT_PASS", "VERDICT_FAIL", "VERDICT_INDETERMINATE",
    "TailSum", "certified_tail_sum", "gram_eigenvalue_bracket",
    "ParameterRecord", "HypothesisReport", "certify_family",
    "recovery_error_bound", "sup_error", "interior_probe_grid",
    "default_periodization_grid", "periodization_check",
    "ConvergenceRecord", "SweepResult", "convergence_sweep",
    "TruncationResult", "truncation_floor",
]

VERDICT_PASS = "PASS"
VERDICT_FAIL = "FAIL"
VERDICT_INDETERMINATE = "INDETERMINATE"

HYPOTHESIS_NAMES = ("integrability", "positivity", "tail_summability",
                    "tail_domination", "band_concentration")

_TAIL_REL_FLOOR = 1e-14
_H3_SLACK = 1e-9


def _combine(verdicts):
    if any(v == VERDICT_FAIL for v in verdicts):
        return VERDICT_FAIL
    if any(v == VERDICT_INDETERMINATE for v in verdicts):
        return VERDICT_INDETERMINATE
    return VERDICT_PASS


@dataclass(frozen=True)
class TailSum:
    """One-sided certified tail mass ``sum_{j >= 1} tail_bound(j, alpha)``."""

    total: float
    terms: int
    converged: bool


def certified_tail_sum(kernel, alpha, *, rel_floor=_TAIL_REL_FLOOR,
                       max_terms=400):
    """Accumulate certified band ceilings until the next term is negligible.

    Stops once a term falls below ``rel_floor`` times the partial sum (so the
    omitted remainder cannot influence any verdict at reporting precision) and
    reports whether that Cauchy criterion was reached within ``max_terms``.
    """
    total = 0.0
    terms = 0
    converged = False
    for j in range(1, max_terms + 1):
        term = float(kernel.tail_bound(j, alpha))
        if term < 0.0 or not np.isfinite(term):
            raise NumericalError(
                f"{kernel.name}: tail bound at band {j} is {term!r}")
        total += term
        terms = j
        if j >= 2 and term <= rel_floor * total:
            converged = True
            break
    return TailSum(total=total, terms=terms, converged=converged)


def gram_eigenvalue_bracket(kernel, alpha, riesz):
    """Analytic (floor, ceiling) for the kernel Gram eigenvalues on a window.

    Writing the quadratic form through the transform,
    ``a* G a = (2 pi)^(-1/2) int |sum a_j e^(-i x_j xi)|^2 transform(xi) dxi``,
    the band-0 portion alone is at least ``m_alpha`` times the window frame
    floor ``2 pi * riesz.lower`` of the exponential system, and each aliasing
    band contributes at most its certified ceiling times the frame ceiling
    ``2 pi * riesz.upper``.  Hence

        floor   = sqrt(2 pi) * m_alpha * riesz.lower
        ceiling = sqrt(2 pi) * (tail_bound(0) + 2 * tail_sum) * riesz.upper

    Both are one-sided bounds with no tolerance.
    """
    floor = math.sqrt(2.0 * math.pi) * kernel.lower_bound(alpha) * riesz.lower
    tail = certified_tail_sum(kernel, alpha)
    mass = float(kernel.tail_bound(0, alpha)) + 2.0 * tail.total
    ceiling = math.sqrt(2.0 * math.pi) * mass * riesz.upper
    return floor, ceiling


@dataclass(frozen=True)
class ParameterRecord:
    """Per-parameter certification data."""

    parameter: float
    band_floor: float
    core_integral: float
    tail_sum: float
    tail_terms: int
    h2_ratio: float
    h3_max_ratio: float
    integrability: str
    positivity: str
    tail_summability: str


@dataclass(frozen=True)
class HypothesisReport:
    """Certification outcome for a family over a parameter ladder."""

    family: str
    parameters: tuple
    records: tuple
    h2_constant: float
    h3_grid: np.ndarray
    h3_final_ratios: np.ndarray
    h3_threshold: float
    verdicts: dict
    notes: tuple

    @property
    def passed(self):
        return all(v == VERDICT_PASS for v in self.verdicts.values())

    @property
    def failed(self):
        return any(v == VERDICT_FAIL for v in self.verdicts.values())

    def to_json_dict(self):
        return {
            "family": self.family,
            "parameters": list(self.parameters),
            "records": [{
                "parameter": r.parameter,
                "band_floor": r.band_floor,
                "core_integral": r.core_integral,
                "tail_sum": r.tail_sum,
                "tail_terms": r.tail_terms,
                "h2_ratio": r.h2_ratio,
                "h3_max_ratio": r.h3_max_ratio,
                "integrability": r.integrability,
                "positivity": r.positivity,
                "tail_summability": r.tail_summability,
            } for r in self.records],
            "h2_constant": self.h2_constant,
            "band_concentration": {
                "grid": [float(t) for t in self.h3_grid],
                "final_ratios": [float(t) for t in self.h3_final_ratios],
                "threshold": self.h3_threshold,
            },
            "verdicts": dict(self.verdicts),
            "notes": list(self.notes),
            "passed": self.passed,
        }

    def csv_rows(self):
        """Long-format rows ``(family, parameter, metric, value)``."""
        rows = []
        for r in self.records:
            for metric in ("band_floor", "core_integral", "tail_sum",
                           "tail_terms", "h2_ratio", "h3_max_ratio",
                           "integrability", "positivity", "tail_summability"):
                rows.append((self.family, r.parameter, metric,
                             getattr(r, metric)))
        rows.append((self.family, "", "h2_constant", self.h2_constant))
        for name in HYPOTHESIS_NAMES + ("overall",):
            rows.append((self.family, "", f"verdict_{name}", self.verdicts[name]))
        return rows


def certify_family(kernel, parameters, *, band_scan_limit=40, xi_points=1001,
                   h3_points=41, h3_threshold=0.9):
    """Certify a family against the admissibility hypotheses on a ladder.

    Parameters
    ----------
    kernel : KernelFamily
    parameters : increasing sequence within the family domain
    band_scan_limit : int
        How many aliasing bands the positivity scan samples.
    xi_points : int
        Band grid resolution (endpoints included, so the floor equality at
        ``|xi| = pi`` is exercised exactly).
    h3_points : int
        Resolution of the concentration grid; its endpoints ``+-pi`` are
        dropped because the floor ratio equals 1 there for every family and
        carries no information.
    h3_threshold : float
        The final ladder rung must push every interior concentration ratio
        below this value.
    """
    params = [kernel.validate_parameter(p) for p in parameters]
    if not params:
        raise DomainError("certification needs a non-empty parameter ladder")
    if any(b <= a for a, b in zip(params, params[1:])):
        raise DomainError("certification ladder must be strictly increasing")

    xi_core = np.linspace(-math.pi, math.pi, int(xi_points))
    h3_grid = np.linspace(-math.pi, math.pi, int(h3_points))[1:-1]
    notes = []
    records = []
    ratio_rows = []

    for p in params:
        band_floor = math.nan
        core_integral = math.nan
        tail_total = math.nan
        tail_terms = 0
        h2_ratio = math.nan
        h3_max = math.nan
        a1 = a2 = a3 = VERDICT_INDETERMINATE
        ratios = np.full(h3_grid.shape, math.nan)
        try:
            band_floor = kernel.lower_bound(p)
            core_values = np.asarray(kernel.transform(xi_core, p), dtype=float)

            a2 = VERDICT_PASS
            if not band_floor > 0.0:
                a2 = VERDICT_FAIL
                notes.append(f"parameter {p:g}: band floor {band_floor:.3e} "
                             f"is not positive")
            elif float(np.min(core_values)) < band_floor:
                a2 = VERDICT_FAIL
                notes.append(f"parameter {p:g}: transform dips below its "
                             f"declared band floor")
            for j in range(1, band_scan_limit + 1):
                band_values = np.asarray(
                    kernel.transform(xi_core + 2.0 * math.pi * j, p), dtype=float)
                if float(np.min(band_values)) < 0.0:
                    a2 = VERDICT_FAIL
                    notes.append(f"parameter {p:g}: transform negative in "
                                 f"band {j}")
                    break

            tail = certified_tail_sum(kernel, p)
            tail_total, tail_terms = tail.total, tail.terms
            a3 = VERDICT_PASS if tail.converged else VERDICT_FAIL
            if not tail.converged:
                notes.append(f"parameter {p:g}: tail sum not Cauchy within "
                             f"{tail.terms} bands")

            core_integral = integrate(
                lambda t: np.abs(np.asarray(kernel.transform(t, p), dtype=float)),
                -math.pi, math.pi, breakpoints=(0.0,))
            total_mass = core_integral + 2.0 * math.pi * 2.0 * tail_total
            a1 = (VERDICT_PASS
                  if np.isfinite(total_mass) and tail.converged else VERDICT_FAIL)

            if band_floor > 0.0:
                h2_ratio = 2.0 * tail_total / band_floor
                with np.errstate(divide="ignore", over="ignore"):
                    ratios = band_floor / np.asarray(
                        kernel.transform(h3_grid, p), dtype=float)
                h3_max = float(np.max(ratios))
        except Exception as failure:  # evaluation failure: never PASS
            notes.append(f"parameter {p:g}: evaluation failed: {failure}")
        records.append(ParameterRecord(
            parameter=p, band_floor=band_floor, core_integral=core_integral,
            tail_sum=tail_total, tail_terms=tail_terms, h2_ratio=h2_ratio,
            h3_max_ratio=h3_max, integrability=a1, positivity=a2,
            tail_summability=a3))
        ratio_rows.append(ratios)

    verdicts = {
        "integrability": _combine([r.integrability for r in records]),
        "positivity": _combine([r.positivity for r in records]),
        "tail_summability": _combine([r.tail_summability for r in records]),
    }

    h2_values = [r.h2_ratio for r in records]
    if any(math.isnan(v) for v in h2_values):
        verdicts["tail_domination"] = VERDICT_INDETERMINATE
        h2_constant = math.nan
    elif all(np.isfinite(v) for v in h2_values):
        verdicts["tail_domination"] = VERDICT_PASS
        h2_constant = max(h2_values)
    else:
        verdicts["tail_domination"] = VERDICT_FAIL
        h2_constant = math.inf

    ratio_matrix = np.vstack(ratio_rows)
    if np.isnan(ratio_matrix).any():
        verdicts["band_concentration"] = VERDICT_INDETERMINATE
    else:
        decreasing = bool(np.all(
            ratio_matrix[1:] <= ratio_matrix[:-1] * (1.0 + _H3_SLACK)))
        settled = bool(np.all(ratio_matrix[-1] <= h3_threshold))
        if decreasing and settled:
            verdicts["band_concentration"] = VERDICT_PASS
        else:
            verdicts["band_concentration"] = VERDICT_FAIL
            if not decreasing:
                notes.append("concentration ratios not non-increasing along "
                             "the ladder")
            if not settled:
                notes.append(f"final concentration ratios above the threshold "
                             f"{h3_threshold:g}")
    verdicts["overall"] = _combine(
        [verdicts[name] for name in HYPOTHESIS_NAMES])

    return HypothesisReport(
        family=kernel.name, parameters=tuple(params), records=tuple(records),
        h2_constant=h2_constant, h3_grid=h3_grid,
        h3_final_ratios=ratio_matrix[-1], h3_threshold=float(h3_threshold),
        verdicts=verdicts, notes=tuple(notes))


def recovery_error_bound(signal, kernel, alpha, *, rel_tol=1e-9):
    """Error certificate ``|| (m_alpha / transform) spectrum ||_{L^2([-pi,pi])}``.

    The uniform recovery error of the solved interpolant is dominated by a
    parameter-free constant times this quantity, so its decay along a ladder
    certifies convergence.  Computed by panel-doubling quadrature split at the
    transform kink (0) and the signal's spectral breakpoints.
    """
    alpha = kernel.validate_parameter(alpha)
    floor = kernel.lower_bound(alpha)

    def integrand(t):
        weight = floor / np.asarray(kernel.transform(t, alpha), dtype=float)
        return (weight ** 2) * np.abs(signal.spectrum(t)) ** 2

    cuts = set(signal.breakpoints) | {0.0}
    value = integrate(integrand, -math.pi, math.pi,
                      breakpoints=sorted(cuts), rel_tol=rel_tol)
    return math.sqrt(max(value, 0.0))


def interior_probe_grid(nodes, points=513, interior_fraction=0.75):
    """Uniform probes over the interior of the node window.

    The outer ``1 - interior_fraction`` of the window is excluded so that the
    finite-window boundary error does not masquerade as approximation error.
    """
    frac = float(interior_fraction)
    if not 0.0 < frac <= 1.0:
        raise DomainError(f"interior_fraction {interior_fraction!r} outside (0, 1]")
    lo = frac * float(nodes.nodes[0])
    hi = frac * float(nodes.nodes[-1])
    return np.linspace(lo, hi, int(points))


def sup_error(signal, model, probe_grid):
    """``max |f(x) - I f(x)|`` over the probe grid."""
    probes = np.asarray(probe_grid, dtype=float)
    return float(np.max(np.abs(signal.spatial(probes) - model.evaluate(probes))))


def default_periodization_grid(points=48, inner_margin=0.15,
                               outer_fraction=0.75):
    """Interior band grid for the periodization diagnostic.

    Frequencies beyond ``outer_fraction * pi`` are dropped for the same
    reason spatial probes avoid the window edge.  A symmetric margin around 0
    is dropped as well: transforms with a slope break at the origin (the
    Poisson family) concentrate the windowed identity's Fourier-truncation
    ripple in an O(1/N) neighborhood of 0, and inside that shrinking spike
    the diagnostic measures the break's local ringing rather than the window
    truncation it is meant to track.
    """
    inner = float(inner_margin)
    outer = float(outer_fraction) * math.pi
    if not 0.0 < inner < outer:
        raise DomainError("need 0 < inner_margin < outer_fraction * pi")
    half = max(int(points) // 2, 2)
    right = np.linspace(inner, outer, half)
    return np.concatenate([-right[::-1], right])


def periodization_check(model, signal, xi_grid=None, *, tail_floor=1e-16,
                        max_bands=200):
    """Max defect of the integer-grid reconstruction identity.

    On an integer window the interpolant's coefficient symbol must satisfy
    ``spectrum(xi) = psi(xi) * sum_j transform(xi + 2 pi j)`` inside the band;
    the defect measures how far the finite window is from that bi-infinite
    identity and shrinks as the window grows.  The periodization is truncated
    once the certified band ceiling drops below ``tail_floor``, so truncation
    cannot influence the reported defect.

    Only integer windows are admissible: on perturbed windows the identity
    involves reindexing operators and no longer collapses to a product.
    """
    if not model.nodes.is_integer_grid:
        raise DomainError("periodization_check requires an integer node window")
    grid = (np.asarray(xi_grid, dtype=float) if xi_grid is not None
            else default_periodization_grid())
    if np.any(np.abs(grid) >= math.pi):
        raise DomainError("periodization grid must lie inside (-pi, pi)")
    kernel = model._kernel()
    alpha = model.parameter

    periodized = np.asarray(kernel.transform(grid, alpha), dtype=float).copy()
    for j in range(1, max_bands + 1):
        if float(kernel.tail_bound(j, alpha)) < tail_floor:
            break
        periodized += np.asarray(
            kernel.transform(grid + 2.0 * math.pi * j, alpha), dtype=float)
        periodized += np.asarray(
            kernel.transform(grid - 2.0 * math.pi * j, alpha), dtype=float)

    psi = model.symbol(grid)
    defect = np.abs(np.asarray(signal.spectrum(grid), dtype=complex)
                    - psi * periodized)
    return float(np.max(defect))


@dataclass(frozen=True)
class ConvergenceRecord:
    """One ladder rung of a convergence sweep."""

    parameter: float
    sup_error: float
    l2_error: float
    bound: float
    c_fit_ratio: float
    flags: tuple


@dataclass(frozen=True)
class SweepResult:
    """Sweep records in ladder order plus the fitted front constant."""

    records: tuple
    c_fit: float

    def unflagged(self):
        return tuple(r for r in self.records if not r.flags)

    def to_json_dict(self):
        return {
            "c_fit": self.c_fit,
            "records": [{
                "parameter": r.parameter,
                "sup_error": r.sup_error,
                "l2_error": r.l2_error,
                "bound": r.bound,
                "c_fit_ratio": r.c_fit_ratio,
                "flags": list(r.flags),
            } for r in self.records],
        }


def _rung(signal, kernel, nodes, parameter, samples, probes):
    """Solve one rung and measure its errors; numerical failures become flags."""
    bound = recovery_error_bound(signal, kernel, parameter)
    try:
        model = fit_interpolant(nodes, kernel, parameter, samples)
    except NumericalError as failure:
        return (parameter, math.nan, math.nan, bound, math.nan,
                ("solve_failed",), str(failure))
    values = model.evaluate(probes)
    targets = signal.spatial(probes)
    sup = float(np.max(np.abs(targets - values)))
    l2 = float(np.sqrt(np.trapezoid(np.abs(targets - values) ** 2, probes)))
    return parameter, sup, l2, bound, math.nan, model.flags, None


def convergence_sweep(signal, kernel, nodes, parameters, *, probe_points=513,
                      interior_fraction=0.75, stability_factor=3.0,
                      executor=None):
    """Run the recovery pipeline along a parameter ladder.

    Each rung assembles and solves the interpolation system, measures the
    interior sup and l2 errors, and computes the error certificate.  The
    front constant ``c_fit`` is fitted at the first clean rung; later rungs
    whose sup error leaves the ``stability_factor`` band are flagged
    ``stability_band_exceeded`` (for well-conditioned solves this marks the
    finite-window truncation floor).  Solver failures and conditioning flags
    are recorded per rung, never raised.

    ``executor``: optional ``concurrent.futures`` executor; rungs are
    independent and results are assembled in ladder order regardless of
    scheduling.
    """
    params = [kernel.validate_parameter(p) for p in parameters]
    if not params:
        raise DomainError("sweep needs a non-empty parameter ladder")
    if not signal.is_real:
        raise DomainError("interpolation sweeps need a real-valued signal")
    samples = sample(signal, nodes).values
    probes = interior_probe_grid(nodes, points=probe_points,
                                 interior_fraction=interior_fraction)

    if executor is None:
        raw = [_rung(signal, kernel, nodes, p, samples, probes) for p in params]
    else:
        futures = [executor.submit(_rung, signal, kernel, nodes, p, samples,
                                   probes) for p in params]
        raw = [f.result() for f in futures]

    c_fit = math.nan
    for parameter, sup, _l2, bound, _ratio, flags, _note in raw:
        if not flags and np.isfinite(sup) and bound > 0.0:
            c_fit = sup / bound
            break
    if math.isnan(c_fit):
        zeroish = all(bound == 0.0 and (not flags and sup <= 1e-15)
                      for _p, sup, _l, bound, _r, flags, _n in raw)
        if zeroish:
            c_fit = 0.0

    records = []
    for parameter, sup, l2, bound, _ratio, flags, _note in raw:
        flags = tuple(flags)
        ratio = math.nan
        if np.isfinite(sup) and bound > 0.0 and c_fit and np.isfinite(c_fit):
            ratio = sup / (c_fit * bound)
            if ratio > stability_factor:
                flags = flags + ("stability_band_exceeded",)
        records.append(ConvergenceRecord(
            parameter=parameter, sup_error=sup, l2_error=l2, bound=bound,
            c_fit_ratio=ratio, flags=flags))
    return SweepResult(records=tuple(records), c_fit=c_fit)


@dataclass(frozen=True)
class TruncationResult:
    """Outcome of the window-doubling truncation probe."""

    half_widths: tuple
    changes: tuple
    converged: bool

    @property
    def floor(self):
        return self.changes[-1] if self.changes else math.nan


def truncation_floor(signal, kernel, alpha, start_half_width, *, tol=1e-8,
                     max_doublings=3, probe_points=257, interior_fraction=0.75,
                     sequence_factory=None):
    """Double the window until interpolant values stop moving at the probes.

    Probes are fixed to the interior of the *starting* window so every larger
    window covers them; the last observed change is the truncation floor at
    the final width.  ``sequence_factory(half_width)`` defaults to integer
    windows.
    """
    from .sequences import integer_sequence
    factory = sequence_factory or integer_sequence
    width = int(start_half_width)
    nodes = factory(width)
    probes = interior_probe_grid(nodes, points=probe_points,
                                 interior_fraction=interior_fraction)
    model = fit_interpolant(nodes, kernel, alpha, sample(signal, nodes).values)
    values = model.evaluate(probes)
    widths = [width]
    changes = []
    converged = False
    for _ in range(max_doublings):
        width *= 2
        nodes = factory(width)
        model = fit_interpolant(nodes, kernel, alpha,
                                sample(signal, nodes).values)
        refined = model.evaluate(probes)
        changes.append(float(np.max(np.abs(refined - values))))
        widths.append(width)
        values = refined
        if changes[-1] < tol:
            converged = True
            break
    return TruncationResult(half_widths=tuple(widths), changes=tuple(changes),
                            converged=converged)
