"""Ray-sampling analysis of symbols: hypoellipticity, minimal exponent, strength.

The frequency limit in the symbol characterization of hypoellipticity is
replaced by tail-slope regression of log-ratios along geometric ray grids.
A ray whose ratio grows at a polynomial rate shows up as a positive slope;
bounded ratios saturate with slope ~ 0 and a certifiably small tail increase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import HypoelError
from .symbols import MultiIndex, SymbolPolynomial, VariableOperator, multi_indices_up_to

#: per-ray tail slopes above this count as divergence
SLOPE_TOL = 0.05

#: total tail increase of a log-ratio below this certifies boundedness on the ray
BOUNDED_GROWTH_TOL = 0.1

#: exponent boosts used when testing that a non-decaying ratio really diverges
EPS_TEST_LIST = (0.1, 0.2, 0.5)

#: fraction of ambiguous rays above which a verdict becomes "inconclusive"
AMBIGUOUS_RAY_FRACTION = 0.05


@dataclass(frozen=True)
class RayConfig:
    """Sampling scheme for ray sweeps toward frequency infinity."""

    directions: int = 256
    r0: float = 1.0
    rho: float = 2.0
    radii: int = 40
    include_characteristic_search: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.radii < 8:
            raise ValueError("need at least 8 radii (J >= 8)")
        if self.rho <= 1:
            raise ValueError("radial growth factor must be > 1")

    def validate_for_dimension(self, n: int) -> None:
        if self.directions < 2 * n:
            raise ValueError(f"need at least {2 * n} directions for dimension {n}")

    def radius_grid(self) -> np.ndarray:
        return self.r0 * self.rho ** np.arange(self.radii + 1, dtype=float)

    def to_dict(self) -> dict:
        return {
            "directions": self.directions,
            "r0": self.r0,
            "rho": self.rho,
            "radii": self.radii,
            "include_characteristic_search": self.include_characteristic_search,
            "seed": self.seed,
        }


def unit_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Quasi-uniform unit directions plus all coordinate axes and sign diagonals."""
    base: list[np.ndarray] = []
    if n == 1:
        base.append(np.array([1.0]))
        base.append(np.array([-1.0]))
    elif n == 2:
        angles = 2 * np.pi * (np.arange(count) + 0.5) / count
        base.extend(np.stack([np.cos(angles), np.sin(angles)], axis=1))
    elif n == 3:
        # Fibonacci sphere
        golden = (1 + math.sqrt(5)) / 2
        i = np.arange(count, dtype=float)
        z = 1 - 2 * (i + 0.5) / count
        r = np.sqrt(np.maximum(0.0, 1 - z * z))
        phi = 2 * np.pi * i / golden
        base.extend(np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1))
    else:
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((count, n))
        norms = np.linalg.norm(pts, axis=1)
        base.extend(pts[norms > 1e-12] / norms[norms > 1e-12, None])

    for j in range(n):
        for sign in (1.0, -1.0):
            e = np.zeros(n)
            e[j] = sign
            base.append(e)
    if n > 1:
        for signs in np.ndindex(*(2,) * n):
            d = np.array([1.0 if s == 0 else -1.0 for s in signs]) / math.sqrt(n)
            base.append(d)

    seen: set[tuple] = set()
    out: list[np.ndarray] = []
    for d in base:
        key = tuple(np.round(d, 12))
        if key not in seen:
            seen.add(key)
            out.append(d)
    return np.array(out)


def _characteristic_refinement(q: SymbolPolynomial, dirs: np.ndarray) -> np.ndarray:
    """Extra directions found by descending |principal part|^2 on the sphere."""
    pm = q.principal_part()
    if pm.is_zero or q.order == 0:
        return np.zeros((0, q.dimension))
    vals = np.abs(pm(dirs))
    vmax = float(vals.max())
    if vmax == 0.0:
        return np.zeros((0, q.dimension))
    order = np.argsort(vals, kind="stable")
    starts = dirs[order[: min(32, len(dirs))]]
    grads = [pm.derive(tuple(1 if j == k else 0 for j in range(q.dimension))) for k in range(q.dimension)]

    pts = starts.copy()
    f = np.abs(pm(pts)) ** 2
    step = np.full(len(pts), 0.1)
    for _ in range(40):
        p_vals = pm(pts)
        grad = np.stack([2 * np.real(np.conj(p_vals) * g(pts)) for g in grads], axis=1)
        gn = np.linalg.norm(grad, axis=1)
        gn[gn == 0] = 1.0
        cand = pts - step[:, None] * grad / gn[:, None]
        cn = np.linalg.norm(cand, axis=1)
        cn[cn == 0] = 1.0
        cand = cand / cn[:, None]
        f_cand = np.abs(pm(cand)) ** 2
        better = f_cand < f
        pts[better] = cand[better]
        f[better] = f_cand[better]
        step = np.where(better, step, step * 0.5)

    keep = f < (1e-6 * vmax) ** 2
    pts = pts[keep]
    # snap components that converged to machine-level zeros
    pts[np.abs(pts) < 1e-10] = 0.0
    norms = np.linalg.norm(pts, axis=1)
    return pts[norms > 0] / norms[norms > 0, None]


def _ray_values(q: SymbolPolynomial, dirs: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """|Q| at dirs x radii, shaped (num_dirs, num_radii)."""
    xi = dirs[:, None, :] * radii[None, :, None]
    return np.abs(q(xi))


def _fit_tail_slope(log_r: np.ndarray, log_ratio: np.ndarray) -> float:
    """Least-squares slope of log ratio against log radius over the last half."""
    half = len(log_r) // 2
    x = log_r[half:]
    y = log_ratio[half:]
    xm = x - x.mean()
    return float(np.dot(xm, y - y.mean()) / np.dot(xm, xm))


@dataclass
class RaySample:
    beta: MultiIndex
    direction: np.ndarray
    radius: float
    ratio: float
    slope: float

    def to_dict(self) -> dict:
        return {
            "beta": list(self.beta),
            "direction": [float(v) for v in self.direction],
            "radius": self.radius,
            "ratio": self.ratio,
            "slope": self.slope,
        }


@dataclass
class HypoReport:
    verdict: str
    d_estimate: float | None = None
    d_snapped: tuple[int, int] | None = None
    fitted_c: float | None = None
    witness: RaySample | None = None
    per_beta_slopes: list[dict] = field(default_factory=list)
    slope_threshold: float = SLOPE_TOL
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "d_estimate": self.d_estimate,
            "d_snapped": list(self.d_snapped) if self.d_snapped else None,
            "fitted_c": self.fitted_c,
            "witness": self.witness.to_dict() if self.witness else None,
            "per_beta_slopes": self.per_beta_slopes,
            "slope_threshold": self.slope_threshold,
            "config": self.config,
        }


@dataclass
class StrengthReport:
    verdict: str
    ratio_bounds: tuple[float, float] | None = None
    witness: dict | None = None
    seed: int = 0
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "ratio_bounds": list(self.ratio_bounds) if self.ratio_bounds else None,
            "witness": self.witness,
            "seed": self.seed,
            "config": self.config,
        }


def snap_rational(value: float, max_denominator: int = 12, rel_tol: float = 0.02) -> tuple[int, int] | None:
    """Nearest fraction with bounded denominator, via Stern-Brocot descent.

    Returns (numerator, denominator) when within `rel_tol` relatively, else None.
    """
    if value <= 0:
        return None
    lo_n, lo_d = 0, 1
    hi_n, hi_d = 1, 0
    best = (round(value), 1)
    best_err = abs(value - round(value))
    for _ in range(10 * max_denominator):
        med_n, med_d = lo_n + hi_n, lo_d + hi_d
        if med_d > max_denominator:
            break
        med = med_n / med_d
        if abs(value - med) < best_err:
            best, best_err = (med_n, med_d), abs(value - med)
        if med < value:
            lo_n, lo_d = med_n, med_d
        elif med > value:
            hi_n, hi_d = med_n, med_d
        else:
            break
    frac = Fraction(*best)
    if abs(frac - value) <= rel_tol * abs(value):
        return frac.numerator, frac.denominator
    return None


def _sample_directions(q: SymbolPolynomial, cfg: RayConfig) -> tuple[np.ndarray, int]:
    """Direction set and the count of base (non-refined) directions at its head."""
    cfg.validate_for_dimension(q.dimension)
    dirs = unit_directions(q.dimension, cfg.directions, cfg.seed)
    num_base = len(dirs)
    if cfg.include_characteristic_search:
        extra = _characteristic_refinement(q, dirs)
        if len(extra):
            dirs = np.concatenate([dirs, extra], axis=0)
    return dirs, num_base


def _is_monotone_tail(values: np.ndarray, count: int = 5) -> bool:
    tail = values[-count:]
    return bool(np.all(np.diff(tail) >= -1e-12 * np.abs(tail[:-1])))


#: refined-ray violations must exceed this multiple of the base rays' typical peak
REFINED_GUARD_FACTOR = 10.0


def _refined_guard(ratios: np.ndarray, num_base: int) -> float:
    """Magnitude a refined ray must reach before its divergence is trusted.

    Refined directions sit arbitrarily close to characteristic sets, where a
    finite radius window shows transition plateaus of bounded ratios; only
    ratios well above the base grid's typical per-ray peak count as evidence.
    """
    base_maxima = ratios[:num_base].max(axis=1)
    base_maxima = base_maxima[base_maxima > 1e-250]
    if not len(base_maxima):
        return 0.0
    return REFINED_GUARD_FACTOR * float(np.median(base_maxima))


def check_hypoelliptic(q: SymbolPolynomial, d: float, cfg: RayConfig | None = None) -> HypoReport:
    """Test the symbol inequality |xi|^{|beta|/d} |Q^(beta)| <= C (1 + |Q|) on ray grids.

    Consistent when every ray's weighted ratio has tail slope within tolerance
    and certifiably bounded tail growth; violated when some ray grows
    monotonically at a rate above tolerance; inconclusive when too many rays
    are ambiguous.
    """
    if q.is_zero:
        raise HypoelError("cannot test hypoellipticity of the zero symbol")
    if d < 1:
        raise ValueError("exponent d must be >= 1")
    cfg = cfg or RayConfig()
    dirs, num_base = _sample_directions(q, cfg)
    radii = cfg.radius_grid()
    log_r = np.log(radii)
    denom = 1.0 + _ray_values(q, dirs, radii)

    fitted_c = 0.0
    best_sample: RaySample | None = None
    worst_violation: RaySample | None = None
    per_beta: list[dict] = []
    ambiguous = 0
    total_rays = 0

    for beta in multi_indices_up_to(q.dimension, q.order):
        dq = q.derive(beta)
        weight = radii ** (sum(beta) / d)
        numer = _ray_values(dq, dirs, radii) if not dq.is_zero else np.zeros_like(denom)
        ratios = weight[None, :] * numer / denom
        guard = _refined_guard(ratios, num_base)
        beta_worst_slope = -math.inf
        beta_worst_dir = None
        for i in range(len(dirs)):
            row = ratios[i]
            peak = float(row.max())
            if peak > fitted_c:
                fitted_c = peak
                j = int(row.argmax())
                best_sample = RaySample(beta, dirs[i], float(radii[j]), peak, 0.0)
            if sum(beta) == 0 or peak < 1e-250:
                continue
            refined = i >= num_base
            if not refined:
                total_rays += 1
            logs = np.log(np.maximum(row, 1e-300))
            slope = _fit_tail_slope(log_r, logs)
            tail = logs[len(logs) // 2 :]
            growth = float(tail[-1] - tail.min())
            if not refined and slope > beta_worst_slope:
                beta_worst_slope = slope
                beta_worst_dir = dirs[i]
            if slope > SLOPE_TOL and _is_monotone_tail(row):
                if refined and peak < guard:
                    continue  # transition plateau of a near-characteristic window
                sample = RaySample(beta, dirs[i], float(radii[-1]), float(row[-1]), slope)
                if worst_violation is None or slope > worst_violation.slope:
                    worst_violation = sample
            elif not refined:
                bounded = slope < -SLOPE_TOL or (
                    abs(slope) <= SLOPE_TOL and growth <= BOUNDED_GROWTH_TOL
                )
                if not bounded:
                    ambiguous += 1
        if sum(beta) >= 1 and beta_worst_dir is not None:
            per_beta.append(
                {
                    "beta": list(beta),
                    "worst_slope": beta_worst_slope,
                    "direction": [float(v) for v in beta_worst_dir],
                }
            )

    report = HypoReport(
        verdict="hypoelliptic-consistent",
        fitted_c=fitted_c,
        witness=best_sample,
        per_beta_slopes=per_beta,
        config=cfg.to_dict(),
    )
    if worst_violation is not None:
        report.verdict = "violated"
        report.witness = worst_violation
    elif total_rays and ambiguous / total_rays > AMBIGUOUS_RAY_FRACTION:
        report.verdict = "inconclusive"
    return report


def estimate_d(q: SymbolPolynomial, cfg: RayConfig | None = None) -> HypoReport:
    """Estimate the minimal exponent d from per-ray decay slopes of derivative ratios.

    For each beta the ratio |Q^(beta)|/(1 + |Q|) decays along rays at rate
    -|beta|/d when the inequality is tight, so d is the max over (beta, ray)
    of -|beta|/slope on decaying rays.  Non-decaying rays whose boosted ratio
    |xi|^eps * ratio diverges for every tested eps mean no d works.
    """
    if q.is_zero:
        raise HypoelError("cannot estimate the exponent of the zero symbol")
    if q.order < 1:
        raise HypoelError("exponent estimation needs order >= 1")
    cfg = cfg or RayConfig()
    dirs, num_base = _sample_directions(q, cfg)
    radii = cfg.radius_grid()
    log_r = np.log(radii)
    denom = 1.0 + _ray_values(q, dirs, radii)

    d_best = 0.0
    candidates = 0
    per_beta: list[dict] = []
    violation: RaySample | None = None

    for beta in multi_indices_up_to(q.dimension, q.order):
        b = sum(beta)
        if b == 0:
            continue
        dq = q.derive(beta)
        if dq.is_zero:
            continue
        ratios = _ray_values(dq, dirs, radii) / denom
        guard = _refined_guard(ratios, num_base)
        beta_worst_slope = -math.inf
        beta_worst_dir = None
        for i in range(len(dirs)):
            row = ratios[i]
            peak = float(row.max())
            if peak < 1e-250:
                continue
            refined = i >= num_base
            logs = np.log(np.maximum(row, 1e-300))
            slope = _fit_tail_slope(log_r, logs)
            if not refined and slope > beta_worst_slope:
                beta_worst_slope = slope
                beta_worst_dir = dirs[i]
            if slope < -SLOPE_TOL:
                # refined rays mix plateau and decay within the window and
                # would distort the fitted decay rate
                if not refined:
                    d_best = max(d_best, -b / slope)
                    candidates += 1
            else:
                diverges_all = all(slope + eps > SLOPE_TOL for eps in EPS_TEST_LIST)
                if diverges_all and _is_monotone_tail(row):
                    if refined and peak < guard:
                        continue
                    sample = RaySample(beta, dirs[i], float(radii[-1]), float(row[-1]), slope)
                    if violation is None or slope > violation.slope:
                        violation = sample
        if beta_worst_dir is not None:
            per_beta.append(
                {
                    "beta": list(beta),
                    "worst_slope": beta_worst_slope,
                    "direction": [float(v) for v in beta_worst_dir],
                }
            )

    if violation is not None:
        return HypoReport(
            verdict="violated",
            witness=violation,
            per_beta_slopes=per_beta,
            config=cfg.to_dict(),
        )
    if not candidates:
        return HypoReport(verdict="inconclusive", per_beta_slopes=per_beta, config=cfg.to_dict())
    d_est = max(d_best, 1.0)
    snapped = snap_rational(d_est)
    report = HypoReport(
        verdict="hypoelliptic-consistent",
        d_estimate=d_est,
        d_snapped=snapped,
        per_beta_slopes=per_beta,
        config=cfg.to_dict(),
    )
    check = check_hypoelliptic(q, d_est, cfg)
    report.fitted_c = check.fitted_c
    report.witness = check.witness
    if check.verdict == "inconclusive":
        report.verdict = "inconclusive"
    return report


def equally_strong(
    p: SymbolPolynomial, q: SymbolPolynomial, cfg: RayConfig | None = None
) -> StrengthReport:
    """Compare Hormander strengths along ray grids.

    Equally strong means both strength ratios stay bounded on every ray;
    one-sided boundedness makes the unbounded side the stronger operator.
    """
    if p.dimension != q.dimension:
        raise HypoelError(f"dimension mismatch: {p.dimension} vs {q.dimension}")
    if p.is_zero or q.is_zero:
        raise HypoelError("strength comparison requires nonzero symbols")
    cfg = cfg or RayConfig()
    cfg.validate_for_dimension(p.dimension)
    dirs = unit_directions(p.dimension, cfg.directions, cfg.seed)
    radii = cfg.radius_grid()
    log_r = np.log(radii)
    xi = dirs[:, None, :] * radii[None, :, None]
    sp = p.strength(xi)
    sq = q.strength(xi)
    t = sp / sq

    worst_fwd = (-math.inf, None)
    worst_bwd = (-math.inf, None)
    for i in range(len(dirs)):
        logs = np.log(t[i])
        slope = _fit_tail_slope(log_r, logs)
        if slope > worst_fwd[0]:
            worst_fwd = (slope, i)
        if -slope > worst_bwd[0]:
            worst_bwd = (-slope, i)

    fwd_bounded = worst_fwd[0] <= SLOPE_TOL
    bwd_bounded = worst_bwd[0] <= SLOPE_TOL
    bounds = (float(t.min()), float(t.max()))
    if fwd_bounded and bwd_bounded:
        verdict = "equally-strong"
        witness = None
    elif fwd_bounded:
        verdict = "P-weaker"
        i = worst_bwd[1]
        witness = _ratio_witness(dirs[i], radii, 1.0 / t[i], worst_bwd[0])
    elif bwd_bounded:
        verdict = "Q-weaker"
        i = worst_fwd[1]
        witness = _ratio_witness(dirs[i], radii, t[i], worst_fwd[0])
    else:
        verdict = "incomparable"
        i = worst_fwd[1]
        witness = _ratio_witness(dirs[i], radii, t[i], worst_fwd[0])
    return StrengthReport(
        verdict=verdict, ratio_bounds=bounds, witness=witness, seed=cfg.seed, config=cfg.to_dict()
    )


def _ratio_witness(direction: np.ndarray, radii: np.ndarray, row: np.ndarray, slope: float) -> dict:
    return {
        "direction": [float(v) for v in direction],
        "radius": float(radii[-1]),
        "ratio": float(row[-1]),
        "slope": float(slope),
    }


def freeze_sample_points(domain, per_axis: int = 3, corner_shrink: float = 1e-3) -> list[np.ndarray]:
    """Interior lattice points plus corners pulled inward, center always included."""
    n = domain.dimension
    axes = []
    for lo, hi in zip(domain.lo, domain.hi):
        fracs = (np.arange(per_axis) + 0.5) / per_axis
        axes.append(lo + fracs * (hi - lo))
    pts = [np.array(p) for p in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)]
    center = np.array(domain.center)
    if not any(np.allclose(p, center) for p in pts):
        pts.append(center)
    for signs in np.ndindex(*(2,) * n):
        corner = np.array(
            [
                lo + corner_shrink * (hi - lo) if s == 0 else hi - corner_shrink * (hi - lo)
                for s, lo, hi in zip(signs, domain.lo, domain.hi)
            ]
        )
        pts.append(corner)
    return pts


def check_constant_strength(
    p: VariableOperator, cfg: RayConfig | None = None, points: int | None = None
) -> StrengthReport:
    """Freeze the operator on a lattice and compare every sample with the center.

    Constant strength holds when every frozen symbol is equally strong with
    the center-frozen one; a frozen symbol that vanishes identically is an
    immediate failure witness.
    """
    cfg = cfg or RayConfig()
    n = p.dimension
    per_axis = 3 if points is None else max(2, math.ceil(points ** (1.0 / n)))
    if points is not None and points < 2:
        raise ValueError("points must be >= 2")
    xs = freeze_sample_points(p.domain, per_axis)
    center = np.array(p.domain.center)
    frozen = []
    for x in xs:
        qx = p.freeze(x)
        if qx.is_zero:
            return StrengthReport(
                verdict="not-constant-strength",
                witness={"x": [float(v) for v in x], "reason": "frozen symbol is identically zero"},
                seed=cfg.seed,
                config=cfg.to_dict(),
            )
        frozen.append((x, qx))
    q_center = p.freeze(center)
    if q_center.is_zero:
        return StrengthReport(
            verdict="not-constant-strength",
            witness={"x": [float(v) for v in center], "reason": "frozen symbol is identically zero"},
            seed=cfg.seed,
            config=cfg.to_dict(),
        )

    lo, hi = math.inf, -math.inf
    for x, qx in frozen:
        rep = equally_strong(qx, q_center, cfg)
        if rep.ratio_bounds:
            lo = min(lo, rep.ratio_bounds[0])
            hi = max(hi, rep.ratio_bounds[1])
        if rep.verdict != "equally-strong":
            witness = {"x": [float(v) for v in x], "pair_verdict": rep.verdict, "ray": rep.witness}
            return StrengthReport(
                verdict="not-constant-strength",
                ratio_bounds=(lo, hi),
                witness=witness,
                seed=cfg.seed,
                config=cfg.to_dict(),
            )
    return StrengthReport(
        verdict="constant-strength",
        ratio_bounds=(lo, hi),
        seed=cfg.seed,
        config=cfg.to_dict(),
    )
