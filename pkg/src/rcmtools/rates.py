"""Closed-form asymptotics for the random cluster model on the complete graph.

Everything here is an explicit function of the mean edge weight lambda
(edge probability lambda/n) and the cluster weight q: the per-vertex growth
rate of the partition-function weight of the event that a theta-fraction of
vertices sits in macroscopic components, the critical coupling, the
mean-field giant-component fraction, and the free energy. Rates are in nats
per vertex; all logarithms are natural.

Conventions at the boundary: values at theta in {0, 1} are the continuous
limits of the interior formula, and evaluation exactly at the critical
coupling raises CriticalPointError rather than picking a phase branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CriticalPointError, DomainError
from .optimize import bisect_root, grid_golden_max
from .textio import fmt17, json_dumps

#: grid used to bracket mean-field roots before bisection
_ROOT_GRID = 10_000
#: bisection tolerance for mean-field roots
_ROOT_TOL = 1e-12
#: default resolution for numeric sup of the rate curve
SUP_GRID_SIZE = 4096
#: golden-section tolerance (in theta) for sup refinement
SUP_TOL = 1e-10


def entropy(theta):
    """theta*log(theta) + (1-theta)*log(1-theta), extended by 0 at 0 and 1."""
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta={theta} outside [0, 1]")
    if theta == 0.0 or theta == 1.0:
        return 0.0
    return theta * math.log(theta) + (1.0 - theta) * math.log(1.0 - theta)


def pi1(x):
    """Survival weight 1 - exp(-x) for x >= 0."""
    if x < 0.0:
        raise DomainError(f"x={x} negative")
    return -math.expm1(-x)


def psi(x):
    """min(log(x) - (x - 1/x)/2, 0); strictly negative exactly for x > 1."""
    if x <= 0.0:
        raise DomainError(f"x={x} not positive")
    return min(math.log(x) - 0.5 * (x - 1.0 / x), 0.0)


def connected_rate(lam):
    """Per-vertex weight rate of the all-vertices-connected event: log pi1(lam).

    Independent of the cluster weight, since a connected configuration has
    exactly one component.
    """
    if lam <= 0.0:
        raise DomainError(f"lambda={lam} not positive")
    return math.log(pi1(lam))


def acyclic_rate(lam, q):
    """Per-vertex weight rate of the no-cycles event."""
    if lam <= 0.0:
        raise DomainError(f"lambda={lam} not positive")
    if q <= 0.0:
        raise DomainError(f"q={q} not positive")
    return psi(lam / q) - (q - 1.0) / (2.0 * q) * lam + math.log(q)


def phi(theta, lam, q):
    """Rate of the event that a theta-fraction of vertices lies in
    macroscopic components, in nats per vertex.

    The interior expression combines the choice entropy of the macroscopic
    vertex set, the connection rate inside it, the cut cost between the two
    sides, and the acyclic rate of the remainder. Endpoints use the
    continuous limits: phi(1) is the connected rate, phi(0) the acyclic rate.
    """
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta={theta} outside [0, 1]")
    if lam <= 0.0:
        raise DomainError(f"lambda={lam} not positive")
    if q <= 0.0:
        raise DomainError(f"q={q} not positive")
    if theta == 0.0:
        return acyclic_rate(lam, q)
    if theta == 1.0:
        return connected_rate(lam)
    rem = 1.0 - theta
    # (1-theta)*log(1 - pi1(lam*theta)) collapses to -lam*theta*(1-theta)
    return (
        -entropy(theta)
        - lam * theta * rem
        + theta * math.log(pi1(lam * theta))
        + rem * (psi(lam * rem / q) - (q - 1.0) / (2.0 * q) * lam * rem + math.log(q))
    )


def lambda_c(q):
    """Critical coupling: q up to q=2, then 2*log(q-1)*(q-1)/(q-2)."""
    if q <= 0.0:
        raise DomainError(f"q={q} not positive")
    if q <= 2.0:
        return q
    return 2.0 * (q - 1.0) / (q - 2.0) * math.log(q - 1.0)


def _mean_field_gap(theta, lam, q):
    # exp(-lam*theta)*(1+(q-1)*theta) - (1-theta); zero at a mean-field root
    return math.exp(-lam * theta) * (1.0 + (q - 1.0) * theta) - (1.0 - theta)


def mean_field_roots(lam, q):
    """All solutions theta in [0, 1) of exp(-lam*theta) = (1-theta)/(1+(q-1)*theta).

    theta=0 always solves the equation and is always included. Further roots
    are bracketed by sign changes on a uniform grid and polished by bisection;
    the returned list is ascending, so the last entry is the largest root.
    """
    if lam <= 0.0:
        raise DomainError(f"lambda={lam} not positive")
    if q <= 0.0:
        raise DomainError(f"q={q} not positive")
    roots = [0.0]
    step = 1.0 / _ROOT_GRID
    prev_t = step
    prev_v = _mean_field_gap(prev_t, lam, q)
    for i in range(2, _ROOT_GRID + 1):
        t = i * step if i < _ROOT_GRID else 1.0 - 1e-15
        v = _mean_field_gap(t, lam, q)
        if prev_v == 0.0:
            roots.append(prev_t)
        elif (prev_v > 0) != (v > 0):
            roots.append(
                bisect_root(
                    lambda x: _mean_field_gap(x, lam, q), prev_t, t, tol=_ROOT_TOL
                )
            )
        prev_t, prev_v = t, v
    deduped = [roots[0]]
    for r in roots[1:]:
        if r - deduped[-1] > 1e-9:
            deduped.append(r)
    return deduped


def theta_star(lam, q):
    """Giant-component fraction selecting the maximising phase branch.

    0 below the critical coupling, the largest mean-field root above it.
    Exactly at the critical coupling the branch is undefined and the call
    is refused.
    """
    lc = lambda_c(q)
    if lam == lc:
        raise CriticalPointError(
            f"lambda={lam} is exactly critical for q={q}; the phase branch "
            "is undefined there"
        )
    if lam < lc:
        return 0.0
    return mean_field_roots(lam, q)[-1]


def g(theta, q):
    """Free-energy functional -(q-1)*(2-theta)*log(1-theta)
    - (2+(q-1)*theta)*log(1+(q-1)*theta), with g(0) = 0."""
    if not 0.0 <= theta < 1.0:
        raise DomainError(f"theta={theta} outside [0, 1)")
    if q <= 0.0:
        raise DomainError(f"q={q} not positive")
    if theta == 0.0:
        return 0.0
    return -(q - 1.0) * (2.0 - theta) * math.log(1.0 - theta) - (
        2.0 + (q - 1.0) * theta
    ) * math.log(1.0 + (q - 1.0) * theta)


def g_second_derivative(theta, q):
    """Closed form of g'': -q*(q-1)*(q-2-2*(q-1)*theta)*theta
    / ((1-theta)^2 * (1+(q-1)*theta)^2)."""
    if not 0.0 <= theta < 1.0:
        raise DomainError(f"theta={theta} outside [0, 1)")
    if q <= 0.0:
        raise DomainError(f"q={q} not positive")
    num = -q * (q - 1.0) * (q - 2.0 - 2.0 * (q - 1.0) * theta) * theta
    den = (1.0 - theta) ** 2 * (1.0 + (q - 1.0) * theta) ** 2
    return num / den


def free_energy(lam, q):
    """Limit of (1/n)*log Z: g(theta_star)/(2q) - (q-1)/(2q)*lam + log q.

    Refuses evaluation exactly at the critical coupling, like theta_star.
    """
    ts = theta_star(lam, q)
    return g(ts, q) / (2.0 * q) - (q - 1.0) / (2.0 * q) * lam + math.log(q)


def phi_sup(lam, q, grid_size=SUP_GRID_SIZE):
    """Numeric sup of phi over theta in [0, 1]: uniform grid scan plus
    golden-section refinement of the winning bracket.

    This is the independent route against which the closed free-energy form
    is checked; it never consults theta_star.
    """
    _, best = grid_golden_max(
        lambda t: phi(t, lam, q), 0.0, 1.0, grid_size, tol=SUP_TOL
    )
    return best


def phi_argmax(lam, q, grid_size=SUP_GRID_SIZE):
    """Grid argmax of phi(., lam, q); resolution 1/grid_size."""
    step = 1.0 / grid_size
    best_t, best_v = 0.0, phi(0.0, lam, q)
    for i in range(1, grid_size + 1):
        t = i * step if i < grid_size else 1.0
        v = phi(t, lam, q)
        if v > best_v:
            best_t, best_v = t, v
    return best_t


def xi(theta, lam):
    """Two-large-components comparison rate
    -S(theta) + theta*log pi1(lam*theta) + (1-theta)*log pi1(lam*(1-theta))
    - lam*theta*(1-theta), defined for theta strictly inside (0, 1)."""
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta={theta} outside (0, 1)")
    if lam <= 0.0:
        raise DomainError(f"lambda={lam} not positive")
    rem = 1.0 - theta
    return (
        -entropy(theta)
        + theta * math.log(pi1(lam * theta))
        + rem * math.log(pi1(lam * rem))
        - lam * theta * rem
    )


# ---------------------------------------------------------------------------
# Artifact containers


@dataclass(frozen=True)
class RatePoint:
    theta: float  # fraction in [0, 1]
    value: float  # rate in nats per vertex


@dataclass(frozen=True)
class PhasePoint:
    lam: float
    q: float
    lambda_c: float
    theta_star: float
    theta_max: float
    free_energy: float

    def to_json(self):
        doc = {
            "lambda": fmt17(self.lam),
            "q": fmt17(self.q),
            "lambda_c": fmt17(self.lambda_c),
            "theta_star": fmt17(self.theta_star),
            "theta_max": fmt17(self.theta_max),
            "free_energy": fmt17(self.free_energy),
        }
        return json_dumps(doc)


@dataclass(frozen=True)
class RateCurve:
    lam: float
    q: float
    points: tuple

    def to_csv(self):
        lines = ["theta,phi"]
        for pt in self.points:
            lines.append(f"{fmt17(pt.theta)},{fmt17(pt.value)}")
        return "\n".join(lines) + "\n"


def rate_curve(lam, q, grid_size=SUP_GRID_SIZE):
    """Evaluate phi on a uniform theta grid including both endpoints."""
    pts = []
    for i in range(grid_size + 1):
        t = i / grid_size
        pts.append(RatePoint(theta=t, value=phi(t, lam, q)))
    return RateCurve(lam=lam, q=q, points=tuple(pts))


def phase_point(lam, q):
    """Assemble the phase summary at (lam, q); refuses the critical point."""
    ts = theta_star(lam, q)
    tmax = mean_field_roots(lam, q)[-1]
    return PhasePoint(
        lam=lam,
        q=q,
        lambda_c=lambda_c(q),
        theta_star=ts,
        theta_max=tmax,
        free_energy=free_energy(lam, q),
    )
