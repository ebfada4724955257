"""Relative two-anyon motion with the statistical flux smeared over a small disc.

Inside the disc of radius ``epsilon`` the flux grows as ``2 pi alpha r^2 / eps^2``,
which is a uniform field ``B = 2 alpha / eps^2``; outside, the flux is
``2 pi alpha`` and the field vanishes. The equations of motion are integrated in
Cartesian form, ``v' = -r + B(r) (v_y, -v_x)``, which stays regular at the
origin and at turning points. Polar quantities are reconstructed afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .config import DEFAULT_TOLERANCES


@dataclass(frozen=True)
class FluxProfile:
    epsilon: float
    alpha: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("disc radius epsilon must be positive")

    def flux(self, r):
        r = np.asarray(r, dtype=float)
        return 2 * np.pi * self.alpha * np.minimum(1.0, (r / self.epsilon) ** 2)

    def r_a_theta(self, r):
        """``r A_theta(r) = flux / 2 pi``."""
        return self.flux(r) / (2 * np.pi)

    def b_field(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.epsilon, 2 * self.alpha / self.epsilon**2, 0.0)


def effective_angular_term(r, profile: FluxProfile, ell: float):
    """``r^2 theta_dot = ell - r A_theta(r)``."""
    return ell - profile.r_a_theta(r)


@dataclass(frozen=True)
class PolarOrbitState:
    r: float
    theta: float
    r_dot_sign: int
    energy: float
    ell: float

    def radicand(self, profile: FluxProfile) -> float:
        k = float(effective_angular_term(self.r, profile, self.ell))
        return 2 * self.energy - (k / self.r) ** 2 - self.r**2 if self.r > 0 else (
            2 * self.energy if k == 0 else -np.inf
        )

    def cartesian(self, profile: FluxProfile, tol: float = 1e-12) -> np.ndarray:
        rad = self.radicand(profile)
        if rad < -tol * max(1.0, self.energy):
            raise ValueError(f"initial state is not accessible (radicand {rad:.3g} < 0)")
        r_dot = self.r_dot_sign * math.sqrt(max(rad, 0.0))
        theta_dot = float(effective_angular_term(self.r, profile, self.ell)) / self.r**2
        c, s = math.cos(self.theta), math.sin(self.theta)
        x, y = self.r * c, self.r * s
        vx = r_dot * c - self.r * theta_dot * s
        vy = r_dot * s + self.r * theta_dot * c
        return np.array([x, y, vx, vy])


def exterior_turning_state(energy: float, ell: float, profile: FluxProfile, theta: float = 0.0):
    """State at the outer turning point of the exterior oscillator ellipse (``ell -> ell - alpha``)."""
    k = ell - profile.alpha
    disc = energy**2 - k**2
    if disc < 0:
        raise ValueError("|ell - alpha| exceeds the energy; no exterior orbit exists")
    r_max = math.sqrt(energy + math.sqrt(disc))
    if r_max < profile.epsilon:
        raise ValueError("outer turning radius lies inside the disc")
    return PolarOrbitState(r_max, theta, -1, energy, ell)


def crossing_window(energy: float, alpha: float, epsilon: float) -> tuple[float, float]:
    """Interval of ``ell`` for which the exterior ellipse reaches the disc.

    Entry requires ``(ell - alpha)^2 / eps^2 + eps^2 <= 2E`` so the window is
    ``alpha -/+ eps sqrt(2E - eps^2)``; it collapses onto ``ell = alpha``.
    """
    half = epsilon * math.sqrt(max(2 * energy - epsilon**2, 0.0))
    return alpha - half, alpha + half


# ---------------------------------------------------------------------------
# integration


def _rhs(b: float):
    def f(t, s):
        x, y, vx, vy = s
        return [vx, vy, -x + b * vy, -y - b * vx]

    return f


def _boundary_event(eps: float, inside: bool):
    def g(t, s):
        return s[0] ** 2 + s[1] ** 2 - eps**2

    g.terminal = True
    g.direction = 1 if inside else -1
    return g


def _turning_event(t, s):
    return s[0] * s[2] + s[1] * s[3]


def next_entry_time(state, epsilon: float) -> float | None:
    """Time until a free oscillator state first enters ``r < epsilon``, or None.

    Along the exterior flow ``r^2 = A + R cos(2 tau - phi)``, so entry is the
    decreasing root of ``r^2 = epsilon^2``. A step-based sign test can jump over
    the short dip into a small disc, hence the closed form.
    """
    x0 = np.asarray(state[:2], dtype=float)
    v0 = np.asarray(state[2:], dtype=float)
    a = 0.5 * (x0 @ x0 + v0 @ v0)
    b = 0.5 * (x0 @ x0 - v0 @ v0)
    c = float(x0 @ v0)
    amp = math.hypot(b, c)
    if amp == 0.0:
        return None
    q = (epsilon**2 - a) / amp
    if q < -1.0 or q > 1.0:
        return None
    phi = math.atan2(c, b)
    tau = (0.5 * (phi + math.acos(q))) % math.pi
    return tau if tau > 1e-14 else tau + math.pi


@dataclass
class TurningPoint:
    t: float
    r: float
    theta: float
    exterior: bool
    maximum: bool


@dataclass
class Segment:
    region: str  # "in" or "out"
    t: np.ndarray
    states: np.ndarray  # rows of (x, y, vx, vy)


@dataclass
class OrbitClassification:
    kind: str  # exterior_ellipse | reflecting_radial | interior | crossing
    period: float | None
    delta_theta_interior: float | None = None
    through_origin: bool = False


@dataclass
class OrbitResult:
    energy: float
    ell: float
    profile: FluxProfile
    segments: list[Segment]
    turning_points: list[TurningPoint]
    crossings: list[tuple[float, str]]  # (time, "enter" | "exit")
    classification: OrbitClassification
    status: str = "ok"
    message: str = ""

    def table(self) -> dict[str, np.ndarray]:
        """Trajectory columns t, r, theta, x, y, r_dot, theta_dot, region."""
        t = np.concatenate([s.t for s in self.segments])
        st = np.vstack([s.states for s in self.segments])
        region = np.concatenate([[s.region] * len(s.t) for s in self.segments])
        x, y, vx, vy = st.T
        r = np.hypot(x, y)
        theta = np.unwrap(np.arctan2(y, x))
        with np.errstate(divide="ignore", invalid="ignore"):
            r_dot = np.where(r > 0, (x * vx + y * vy) / r, 0.0)
            theta_dot = np.where(r > 0, (x * vy - y * vx) / r**2, 0.0)
        return {
            "t": t,
            "r": r,
            "theta": theta,
            "x": x,
            "y": y,
            "r_dot": r_dot,
            "theta_dot": theta_dot,
            "region": region,
        }

    def energies(self) -> np.ndarray:
        st = np.vstack([s.states for s in self.segments])
        return 0.5 * np.sum(st**2, axis=1)

    def exterior_angular_momenta(self) -> np.ndarray:
        """Canonical ``ell`` evaluated on exterior samples, ``x v_y - y v_x + alpha``."""
        out = [s.states for s in self.segments if s.region == "out"]
        if not out:
            return np.array([])
        st = np.vstack(out)
        return st[:, 0] * st[:, 3] - st[:, 1] * st[:, 2] + self.profile.alpha


def _segment_atol(rtol: float, eps: float, inside: bool) -> float:
    return rtol * 1e-3 * (min(1.0, eps) if inside else 1.0)


def integrate_orbit(
    energy: float,
    ell: float,
    profile: FluxProfile,
    initial: PolarOrbitState | None = None,
    t_max: float = 2.5 * np.pi,
    rtol: float = DEFAULT_TOLERANCES.integrator_rtol,
    max_sample_dt: float = 0.01,
    ell_tol: float = 1e-9,
) -> OrbitResult:
    """Integrate the regularised orbit with region switching at ``r = epsilon``.

    Starts at the exterior turning point when ``initial`` is omitted. Boundary
    crossings are terminal events that switch the field on or off; turning
    points (``x v_x + y v_y = 0``) are recorded without stopping.
    """
    if not energy > 0:
        raise ValueError("energy must be positive")
    if initial is None:
        initial = exterior_turning_state(energy, ell, profile)
    if abs(initial.energy - energy) > 1e-12 * energy or initial.ell != ell:
        raise ValueError("initial state carries different constants of motion")
    state = initial.cartesian(profile)
    eps = profile.epsilon
    b_in = 2 * profile.alpha / eps**2

    r0 = math.hypot(state[0], state[1])
    radial_v = state[0] * state[2] + state[1] * state[3]
    inside = r0 < eps or (r0 == eps and radial_v < 0)

    t0 = 0.0
    segments: list[Segment] = []
    turns: list[TurningPoint] = []
    crossings: list[tuple[float, str]] = []
    status, message = "ok", ""
    while t0 < t_max:
        b = b_in if inside else 0.0
        t_stop = t_max
        entry = None if inside else next_entry_time(state, eps)
        if entry is not None and t0 + entry < t_max:
            t_stop = t0 + entry
        sol = solve_ivp(
            _rhs(b),
            (t0, t_stop),
            state,
            method="DOP853",
            rtol=rtol,
            atol=_segment_atol(rtol, eps, inside),
            events=[_boundary_event(eps, inside), _turning_event],
            dense_output=True,
        )
        if sol.status == -1:
            status, message = "failed", sol.message
            break
        t_end = float(sol.t[-1])
        n_pts = max(int(math.ceil((t_end - t0) / max_sample_dt)), 1) + 1
        ts = np.linspace(t0, t_end, n_pts)
        extra = list(sol.t_events[1]) + list(sol.t_events[0])
        ts = np.unique(np.concatenate([ts, extra]))
        ys = sol.sol(ts).T
        ys[0] = state
        ys[-1] = sol.y[:, -1]
        segments.append(Segment("in" if inside else "out", ts, ys))
        for te, ye in zip(sol.t_events[1], sol.y_events[1]):
            if te <= t0:
                continue
            r = math.hypot(ye[0], ye[1])
            acc = ye[2] ** 2 + ye[3] ** 2 + ye[0] * (-ye[0] + b * ye[3]) + ye[1] * (-ye[1] - b * ye[2])
            turns.append(TurningPoint(float(te), r, math.atan2(ye[1], ye[0]), r > eps, acc < 0))
        if sol.status == 1 and len(sol.t_events[0]):
            crossings.append((float(sol.t_events[0][-1]), "exit" if inside else "enter"))
            state = sol.y_events[0][-1]
            t0 = float(sol.t_events[0][-1])
            inside = not inside
        elif not inside and t_stop < t_max:
            crossings.append((t_stop, "enter"))
            state = sol.y[:, -1]
            t0 = t_stop
            inside = True
        else:
            break

    result = OrbitResult(energy, ell, profile, segments, turns, crossings, None, status, message)  # type: ignore[arg-type]
    result.classification = _classify(result, ell_tol)
    return result


def _exterior_maxima(result: OrbitResult) -> list[TurningPoint]:
    return [tp for tp in result.turning_points if tp.exterior and tp.maximum]


def _classify(result: OrbitResult, ell_tol: float) -> OrbitClassification:
    regions = {s.region for s in result.segments}
    alpha = result.profile.alpha
    maxima = _exterior_maxima(result)
    start = result.segments[0].states[0]
    theta0 = math.atan2(start[1], start[0])

    if regions == {"in"}:
        return OrbitClassification("interior", None)

    if not result.crossings:
        # return to the same end of the ellipse
        period = next((tp.t for tp in maxima if math.cos(tp.theta - theta0) > 0.5), None)
        return OrbitClassification("exterior_ellipse", period)

    dtheta = None
    enters = [t for t, kind in result.crossings if kind == "enter"]
    exits = [t for t, kind in result.crossings if kind == "exit"]
    if enters and exits:
        tab = result.table()
        k_in = np.searchsorted(tab["t"], enters[0])
        k_out = np.searchsorted(tab["t"], exits[0])
        dtheta = float(tab["theta"][k_out] - tab["theta"][k_in])

    if abs(result.ell - alpha) <= ell_tol * max(1.0, abs(alpha)):
        # radial exterior motion; the period is the bounce time between outer turning points
        period = maxima[0].t if maxima else None
        return OrbitClassification(
            "reflecting_radial", period, dtheta, through_origin=(alpha == 0.0)
        )
    period = next((tp.t for tp in maxima if math.cos(tp.theta - theta0) > 0.5), None)
    return OrbitClassification("crossing", period, dtheta)


def exterior_ellipse_deviation(result: OrbitResult) -> float:
    """Max distance between exterior samples and the analytic oscillator ellipse.

    Each exterior segment is compared with ``x(t) = x0 cos(t - t0) + v0 sin(t - t0)``
    started from the segment's first state.
    """
    worst = 0.0
    for seg in result.segments:
        if seg.region != "out":
            continue
        x0, v0 = seg.states[0, :2], seg.states[0, 2:]
        dt = seg.t - seg.t[0]
        exact = np.outer(np.cos(dt), x0) + np.outer(np.sin(dt), v0)
        worst = max(worst, float(np.max(np.linalg.norm(seg.states[:, :2] - exact, axis=1))))
    return worst


@dataclass(frozen=True)
class InteriorCrossing:
    """Outcome of one pass through the disc.

    ``raw_angle`` is the signed angle between entry and exit positions.
    ``delta_theta`` is the change of the radial line, so a straight pass
    through the origin (raw angle pi) counts as zero deflection.
    """

    raw_angle: float
    reflected: bool
    turning_radius: float | None
    time_inside: float
    exit_state: np.ndarray = field(repr=False)

    @property
    def delta_theta(self) -> float:
        if self.reflected:
            return self.raw_angle
        return self.raw_angle - math.copysign(math.pi, self.raw_angle or 1.0)

    @property
    def outgoing_r_dot(self) -> float:
        x, y, vx, vy = self.exit_state
        return (x * vx + y * vy) / math.hypot(x, y)


def interior_deflection(
    energy: float,
    alpha: float,
    epsilon: float,
    rtol: float = 1e-12,
    theta_entry: float = 0.0,
) -> InteriorCrossing:
    """Angular change across the disc for the ``ell = alpha`` orbit.

    The orbit enters radially at ``r = epsilon``. With ``alpha = 0`` there is no
    field and the orbit passes straight through the origin; that case is
    returned exactly: raw angle pi, ``delta_theta`` zero.
    """
    if not 2 * energy > epsilon**2:
        raise ValueError("disc radius exceeds the classical turning radius")
    profile = FluxProfile(epsilon, alpha)
    v_in = math.sqrt(2 * energy - epsilon**2)
    c, s = math.cos(theta_entry), math.sin(theta_entry)
    if alpha == 0.0:
        exit_state = np.array([-epsilon * c, -epsilon * s, -v_in * c, -v_in * s])
        return InteriorCrossing(math.pi, False, None, 2 * math.asin(epsilon / math.sqrt(2 * energy)), exit_state)

    state = np.array([epsilon * c, epsilon * s, -v_in * c, -v_in * s])
    b = 2 * alpha / epsilon**2
    # gyration time scale bounds the interior crossing time
    t_span = 50 * math.pi / max(b, 1.0) + 4 * epsilon / v_in + math.pi
    event = _boundary_event(epsilon, inside=True)
    sol = solve_ivp(
        _rhs(b),
        (0.0, t_span),
        state,
        method="DOP853",
        rtol=rtol,
        atol=rtol * 1e-3 * epsilon,
        events=[event, _turning_event],
    )
    if sol.status != 1 or not len(sol.t_events[0]):
        raise RuntimeError("orbit did not leave the disc; no interior turning point reached")
    exit_state = sol.y_events[0][-1]
    turning = None
    if len(sol.t_events[1]):
        ye = sol.y_events[1][0]
        turning = math.hypot(ye[0], ye[1])
    if turning is None:
        raise RuntimeError(
            "no interior turning point; ell must lie in the 0 <= ell <= alpha window"
        )
    x_in = state[:2]
    x_out = exit_state[:2]
    dtheta = math.atan2(x_in[0] * x_out[1] - x_in[1] * x_out[0], float(x_in @ x_out))
    # a genuine reflection leaves on the entry side of the origin
    reflected = float(x_in @ x_out) > 0
    return InteriorCrossing(dtheta, reflected, turning, float(sol.t_events[0][-1]), exit_state)


def interior_deflection_exact(energy: float, alpha: float, epsilon: float) -> float:
    """Reference deflection from the exact solution of the linear interior dynamics.

    Inside the disc the motion is an oscillator in a uniform field, so the state
    is ``expm(t A) s0``; the exit time is the first root of ``r(t) = epsilon``.
    """
    from scipy.linalg import expm
    from scipy.optimize import brentq

    b = 2 * alpha / epsilon**2
    a = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, b], [0, -1, -b, 0]], dtype=float)
    v_in = math.sqrt(2 * energy - epsilon**2)
    s0 = np.array([epsilon, 0.0, -v_in, 0.0])

    def g(t):
        s = expm(t * a) @ s0
        return s[0] ** 2 + s[1] ** 2 - epsilon**2

    # bracket the first return by stepping until g turns positive again
    dt = min(epsilon / v_in, 1.0 / b) / 20
    t = dt
    while g(t) < 0:
        t += dt
    t_exit = brentq(g, t - dt, t, xtol=1e-16, rtol=1e-15)
    s = expm(t_exit * a) @ s0
    return math.atan2(s[1], s[0])


@dataclass
class LimitClassification:
    kind: str
    period: float
    epsilons: list[float]
    deflections: list[float]
    bounce_periods: list[float]
    monotone: bool
    through_origin: bool = False
    flagged: str = ""


def _extrapolate_to_zero(eps: list[float], values: list[float]) -> float:
    # polynomial through the three smallest radii, evaluated at eps = 0
    order = np.argsort(eps)[:3]
    x = np.asarray(eps)[order]
    y = np.asarray(values)[order]
    coeffs = np.polyfit(x, y, len(x) - 1)
    return float(np.polyval(coeffs, 0.0))


def classify_limit(
    energy: float,
    ell: float,
    alpha: float,
    epsilons,
    ell_tol: float = 1e-9,
    rtol: float = DEFAULT_TOLERANCES.integrator_rtol,
) -> LimitClassification:
    """Orbit type as the disc shrinks along a decreasing sequence of radii.

    For ``ell = alpha`` the deflections across the disc are computed for every
    radius and must decrease; the bounce periods are measured by event
    detection and extrapolated to zero radius. Any other ``ell`` gives the
    exterior ellipse whose period is measured on the smallest radius.
    """
    eps = [float(e) for e in epsilons]
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilon sequence must be positive and strictly decreasing")

    if abs(ell - alpha) > ell_tol * max(1.0, abs(alpha)):
        res = integrate_orbit(energy, ell, FluxProfile(eps[-1], alpha), t_max=2.2 * np.pi, rtol=rtol)
        kind = res.classification.kind
        period = res.classification.period
        flagged = "" if kind == "exterior_ellipse" else f"smallest radius still gives {kind}"
        return LimitClassification("exterior_ellipse", period, eps, [], [], True, flagged=flagged)

    deflections = [abs(interior_deflection(energy, alpha, e).delta_theta) for e in eps]
    periods = []
    for e in eps:
        res = integrate_orbit(energy, alpha, FluxProfile(e, alpha), t_max=1.2 * np.pi, rtol=rtol)
        periods.append(res.classification.period)
    if alpha == 0.0:
        monotone = all(d == 0.0 for d in deflections)
    else:
        monotone = all(b < a for a, b in zip(deflections, deflections[1:]))
    period = _extrapolate_to_zero(eps, periods)
    return LimitClassification(
        "reflecting_radial",
        period,
        eps,
        deflections,
        periods,
        monotone,
        through_origin=(alpha == 0.0),
        flagged="" if monotone else "deflections not monotone; check integrator accuracy",
    )


def deflection_exponent(epsilons, deflections) -> float:
    """Slope of ``log(deflection)`` against ``log(epsilon)``; positive means it vanishes."""
    x = np.log(np.asarray(epsilons, dtype=float))
    y = np.log(np.asarray(deflections, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def scan_crossing_window(energy: float, alpha: float, epsilon: float, ells) -> list[tuple[float, bool]]:
    """For each ``ell`` report whether the integrated exterior orbit enters the disc."""
    out = []
    profile = FluxProfile(epsilon, alpha)
    for ell in ells:
        try:
            res = integrate_orbit(energy, float(ell), profile, t_max=1.1 * np.pi)
        except ValueError:
            out.append((float(ell), False))
            continue
        out.append((float(ell), bool(res.crossings)))
    return out
