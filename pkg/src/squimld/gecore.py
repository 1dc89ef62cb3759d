"""Closed forms for the scaled cumulant generating function and its geometry.

The central object is the two-parameter cumulant function

    c(t1, t2) = -1/2 * Int_{-1}^{1} log q(y) dy

with the quadratic kernel

    q(y) = 1 - 2*h(y) = 2*t1*y^2 - 2*t2*y + b,
    h(y) = t1*(1 - x - y^2) + t2*(y - eps),
    b    = 1 - 2*t1*(1 - x) + 2*t2*eps.

c is finite exactly on the domain D = {theta : q >= 0 on [-1, 1]}, whose
boundary is cut out by three tests (the two endpoint values of h and, when the
interior critical point of h lands in [-1, 1], its value there).  Everything
here reduces to elementary antiderivatives of 1/q, y/q, y^2/q and log q with
explicit branching on the discriminant

    disc = 4*t2^2 - 8*t1*b:

    disc > 0  -> q has two real roots outside [-1, 1]; partial fractions / log,
    disc < 0  -> (only possible for t1 > 0) completed square / arctan,
    disc ~ 0  -> double root; the common limit of both branches.

The t1 = 0 line degenerates q to an affine function and gets its own closed
forms (with short power series where the t2 -> 0 cancellation bites).

The theta2 = 0 axis supports extra structure used by the one-observable rate
function: H(t1) = -1 + 1/2 * Int 1/q, which is 0 at the origin, convex, and
blows up (logarithmically) at the left endpoint P = -1/(2x) of D.  Its second
zero Q is found by bisection in the transformed coordinate

    t = s - 1,   s = sqrt(1/(-2*t1) + 1 - x),

because Q - P shrinks like exp(-2/x), far below float spacing of theta1 for
small x, while log t resolves it exactly.

All worker formulas accept numpy arrays; the public scalar API validates and
raises, the ``*_arr`` variants return NaN masks instead (for the Monte Carlo
hot path).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, NearBoundary, NoRoot

# Strict-interior threshold on min q over [-1, 1].
QMIN_STRICT = 1e-12
# |t1| at or below this routes to the affine (t1 = 0) closed forms.
T1_AFFINE_TOL = 1e-10
# |disc| at or below this routes to the double-root limiting form.
DISC_TIE_TOL = 1e-10
# |2*t2/b| below this switches the affine branch to power series in u = 2*t2/b.
# At the crossover the u^8 truncation error is ~1e-17 while the closed forms
# already lose ~1e-11 to log cancellation, so the series side is the safe one.
AFFINE_SERIES_TOL = 1e-2


@dataclass(frozen=True)
class RateParams:
    """Model parameters: overlap level x and magnetization threshold eps.

    The ellipse condition (1 - x) - eps^2 > 0 keeps the curved piece of the
    domain boundary bounded (an ellipse rather than a hyperbola).
    """

    x: float
    eps: float

    def __post_init__(self):
        if not (0.0 < self.x <= 1.0):
            raise InvalidParams(f"x must be in (0, 1], got {self.x}")
        if not (self.eps > 0.0):
            raise InvalidParams(f"eps must be positive, got {self.eps}")
        if not ((1.0 - self.x) - self.eps**2 > 0.0):
            raise InvalidParams(
                f"(1 - x) - eps^2 must be positive, got x={self.x}, eps={self.eps}"
            )

    @property
    def p_left(self) -> float:
        """theta1 coordinate of the left-most domain point P on the axis."""
        return -1.0 / (2.0 * self.x)


@dataclass(frozen=True)
class ThetaPair:
    theta1: float
    theta2: float


@dataclass(frozen=True)
class KernelQ:
    """q(y) = 2*t1*y^2 - 2*t2*y + b = 1 - 2*h(y), with its shape data."""

    theta: ThetaPair
    b: float
    params: RateParams

    @classmethod
    def from_theta(cls, theta: ThetaPair, params: RateParams) -> "KernelQ":
        b = (
            1.0
            - 2.0 * theta.theta1 * (1.0 - params.x)
            + 2.0 * theta.theta2 * params.eps
        )
        return cls(theta, b, params)

    def evaluate(self, y):
        return 2.0 * self.theta.theta1 * y * y - 2.0 * self.theta.theta2 * y + self.b

    @property
    def q_plus1(self) -> float:
        return 2.0 * self.theta.theta1 - 2.0 * self.theta.theta2 + self.b

    @property
    def q_minus1(self) -> float:
        return 2.0 * self.theta.theta1 + 2.0 * self.theta.theta2 + self.b

    @property
    def disc(self) -> float:
        return 4.0 * self.theta.theta2**2 - 8.0 * self.theta.theta1 * self.b

    @property
    def q_min(self) -> float:
        return self._min_pair()[0]

    @property
    def y_at_min(self) -> float:
        return self._min_pair()[1]

    def _min_pair(self) -> tuple[float, float]:
        return _qmin_scalar(
            self.theta.theta1, self.theta.theta2, self.b, self.q_plus1, self.q_minus1
        )


@dataclass(frozen=True)
class DomainVerdict:
    in_domain: bool
    failed_test: str | None  # "Test1" | "Test2" | "Test3" | None
    q_min: float
    strictly_inside: bool


@dataclass(frozen=True)
class QRoot:
    """Second zero Q of H on the axis, in both coordinates."""

    theta1: float
    t: float
    h_residual: float
    fixed_point_residual: float  # |log t - log((2+t)*exp(-2(t+1)/(t^2+2t+x)))|


# ---------------------------------------------------------------------------
# elementary pieces (array-friendly)
# ---------------------------------------------------------------------------


def _qmin_scalar(t1, t2, b, q1, qm1):
    """Exact minimum of the parabola q over [-1, 1] and its location."""
    qmin = min(q1, qm1)
    ymin = 1.0 if q1 <= qm1 else -1.0
    if t1 > 0.0:
        yc = t2 / (2.0 * t1)
        if -1.0 <= yc <= 1.0:
            qvert = b - t2 * yc  # q(yc) = b - t2^2/(2 t1)
            if qvert < qmin:
                qmin, ymin = qvert, yc
    return qmin, ymin


def q_min_arr(params: RateParams, t1, t2):
    """Vector version of the exact parabola minimum over [-1, 1]."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    b = 1.0 - 2.0 * t1 * (1.0 - params.x) + 2.0 * t2 * params.eps
    q1 = 2.0 * t1 - 2.0 * t2 + b
    qm1 = 2.0 * t1 + 2.0 * t2 + b
    qmin = np.minimum(q1, qm1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        yc = np.where(t1 != 0.0, t2 / (2.0 * t1), np.inf)
        interior = (t1 > 0.0) & (np.abs(yc) <= 1.0)
        qvert = b - t2 * np.where(interior, yc, 0.0)
    return np.where(interior, np.minimum(qmin, qvert), qmin)


def h_value(y: float, theta: ThetaPair, params: RateParams) -> float:
    """h(y) = t1*(1 - x - y^2) + t2*(y - eps)."""
    t1, t2 = theta.theta1, theta.theta2
    return t1 * (1.0 - params.x - y * y) + t2 * (y - params.eps)


def domain_tests_arr(params: RateParams, t1, t2):
    """Vectorized membership tests for D.

    Returns (in_domain, failed) where failed is 0 for members and 1/2/3 for
    the first failing test:
      Test1: h(1)  <= 1/2
      Test2: h(-1) <= 1/2
      Test3: h at the interior critical point y_c = t2/(2 t1), when t1 != 0
             and y_c lands in [-1, 1].
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    one_mx = 1.0 - params.x
    h1 = t1 * (one_mx - 1.0) + t2 * (1.0 - params.eps)
    hm1 = t1 * (one_mx - 1.0) - t2 * (1.0 + params.eps)
    fail1 = h1 > 0.5
    fail2 = hm1 > 0.5
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        yc = np.where(t1 != 0.0, t2 / (2.0 * t1), np.inf)
        has_crit = (t1 != 0.0) & (np.abs(yc) <= 1.0)
        ycs = np.where(has_crit, yc, 0.0)
        hc = t1 * (one_mx - ycs * ycs) + t2 * (ycs - params.eps)
    fail3 = has_crit & (hc > 0.5)
    failed = np.zeros(np.broadcast(t1, t2).shape, dtype=np.int8)
    # assign in reverse priority so Test1 wins ties
    failed[fail3] = 3
    failed[fail2] = 2
    failed[fail1] = 1
    return failed == 0, failed


def in_domain_D(theta: ThetaPair, params: RateParams) -> DomainVerdict:
    """Three-test membership verdict plus the strict-interior guard value."""
    in_d, failed = domain_tests_arr(
        params, np.float64(theta.theta1), np.float64(theta.theta2)
    )
    tag = {0: None, 1: "Test1", 2: "Test2", 3: "Test3"}[int(failed)]
    ker = KernelQ.from_theta(theta, params)
    return DomainVerdict(
        in_domain=bool(in_d),
        failed_test=tag,
        q_min=ker.q_min,
        strictly_inside=bool(in_d) and ker.q_min >= QMIN_STRICT,
    )


def _affine_pieces(b, t2):
    """J, Jy, Y2, Lq for affine q(y) = b - 2*t2*y (requires b > 0, |2 t2| < b).

    Series in u = 2*t2/b are used below AFFINE_SERIES_TOL where the closed
    forms cancel catastrophically.
    """
    b = np.asarray(b, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    u = 2.0 * t2 / b
    q1 = b - 2.0 * t2
    qm1 = b + 2.0 * t2
    small = np.abs(u) <= AFFINE_SERIES_TOL
    u2 = u * u
    u4 = u2 * u2
    u6 = u4 * u2
    # J = Int 1/q
    with np.errstate(divide="ignore", invalid="ignore"):
        j_exact = np.where(
            small, 0.0, (np.log(np.abs(qm1)) - np.log(np.abs(q1))) / (2.0 * t2)
        )
    j_series = (2.0 / b) * (1.0 + u2 / 3.0 + u4 / 5.0 + u6 / 7.0)
    j = np.where(small, j_series, j_exact)
    # Jy = Int y/q = (b*log(qm1/q1) - 4 t2) / (4 t2^2)
    with np.errstate(divide="ignore", invalid="ignore"):
        jy_exact = np.where(
            small,
            0.0,
            (b * (np.log(np.abs(qm1)) - np.log(np.abs(q1))) - 4.0 * t2)
            / (4.0 * t2 * t2),
        )
    jy_series = (u / b) * (2.0 / 3.0 + 2.0 * u2 / 5.0 + 2.0 * u4 / 7.0 + 2.0 * u6 / 9.0)
    jy = np.where(small, jy_series, jy_exact)
    # Y2 = Int y^2/q = (b^2*log(qm1/q1) - 4 b t2) / (8 t2^3)
    with np.errstate(divide="ignore", invalid="ignore"):
        y2_exact = np.where(
            small,
            1.0,
            (b * b * (np.log(np.abs(qm1)) - np.log(np.abs(q1))) - 4.0 * b * t2)
            / (8.0 * t2**3),
        )
    y2_series = (2.0 / b) * (1.0 / 3.0 + u2 / 5.0 + u4 / 7.0 + u6 / 9.0)
    y2 = np.where(small, y2_series, y2_exact)
    # Lq = Int log q = (1/(2 t2)) * [u log u - u] from q1 to qm1
    with np.errstate(divide="ignore", invalid="ignore"):
        lq_exact = np.where(
            small,
            0.0,
            (
                (qm1 * np.log(np.abs(qm1)) - qm1)
                - (q1 * np.log(np.abs(q1)) - q1)
            )
            / (2.0 * t2),
        )
    lq_series = 2.0 * np.log(b) - 2.0 * (
        u2 / 6.0 + u4 / 20.0 + u6 / 42.0 + u4 * u4 / 72.0
    )
    lq = np.where(small, lq_series, lq_exact)
    return j, jy, y2, lq


def _pieces_arr(params: RateParams, t1, t2):
    """All integral pieces at once: J, Jy, Lq, c, grad1, grad2, k, q_min.

    Entries not strictly inside D come back NaN.  This is the single source
    of truth for the closed forms; scalar wrappers below call it with 0-d
    arrays and translate NaN into NearBoundary.
    """
    t1 = np.atleast_1d(np.asarray(t1, dtype=float))
    t2 = np.atleast_1d(np.asarray(t2, dtype=float))
    t1, t2 = np.broadcast_arrays(t1, t2)
    x, eps = params.x, params.eps
    b = 1.0 - 2.0 * t1 * (1.0 - x) + 2.0 * t2 * eps
    q1 = 2.0 * t1 - 2.0 * t2 + b
    qm1 = 2.0 * t1 + 2.0 * t2 + b
    disc = 4.0 * t2 * t2 - 8.0 * t1 * b
    qmin = q_min_arr(params, t1, t2)
    ok = qmin >= QMIN_STRICT

    j = np.full(t1.shape, np.nan)
    jy = np.full(t1.shape, np.nan)
    lq = np.full(t1.shape, np.nan)
    g1 = np.full(t1.shape, np.nan)

    affine = ok & (np.abs(t1) <= T1_AFFINE_TOL)
    general = ok & ~affine

    if np.any(affine):
        ja, jya, y2a, lqa = _affine_pieces(b[affine], t2[affine])
        j[affine] = ja
        jy[affine] = jya
        lq[affine] = lqa
        g1[affine] = (1.0 - x) * ja - y2a

    if np.any(general):
        gt1 = t1[general]
        gt2 = t2[general]
        gb = b[general]
        gq1 = q1[general]
        gqm1 = qm1[general]
        gdisc = disc[general]
        jg = np.empty(gt1.shape)

        logbranch = gdisc > DISC_TIE_TOL
        atanbranch = gdisc < -DISC_TIE_TOL
        tie = ~logbranch & ~atanbranch

        if np.any(logbranch):
            a2 = 2.0 * gt1[logbranch]
            bb = -2.0 * gt2[logbranch]  # q = a2*y^2 + bb*y + cc
            cc = gb[logbranch]
            lq1 = gq1[logbranch]
            lqm1 = gqm1[logbranch]
            sq = np.sqrt(gdisc[logbranch])
            sB = np.where(bb >= 0.0, 1.0, -1.0)
            r_stable = (-bb - sB * sq) / (2.0 * a2)
            r_other = cc / (a2 * r_stable)
            # r_plus carries +sqrt(disc)
            r_plus = np.where(sB < 0.0, r_stable, r_other)
            r_minus = np.where(sB < 0.0, r_other, r_stable)
            # J = -log[(1-r_minus)(1+r_plus) / ((1-r_plus)(1+r_minus))] / sq.
            # When a root sits within ~1e-12 of an endpoint the small factor
            # 1 -+ r loses all relative accuracy to cancellation.  The factor
            # pair at each endpoint satisfies (1 -+ r_plus)(1 -+ r_minus)
            # = q(+-1)/(2 theta1) exactly, and q(+-1) is known to full
            # absolute precision, so route each endpoint ratio through the
            # big (safe) factor squared over that product.
            d_p = 1.0 - r_plus
            d_m = 1.0 - r_minus
            e_p = 1.0 + r_plus
            e_m = 1.0 + r_minus
            w1 = lq1 / a2
            wm1 = lqm1 / a2
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                ratio1 = np.where(
                    np.abs(d_m) >= np.abs(d_p), d_m * d_m / w1, w1 / (d_p * d_p)
                )
                ratiom = np.where(
                    np.abs(e_p) >= np.abs(e_m), e_p * e_p / wm1, wm1 / (e_m * e_m)
                )
            jg[logbranch] = -np.log(np.abs(ratio1 * ratiom)) / sq

        if np.any(atanbranch):
            at1 = gt1[atanbranch]
            at2 = gt2[atanbranch]
            ab = gb[atanbranch]
            ap = 2.0 * at1
            bp = at2 / (2.0 * at1)
            cp = ab - at2 * bp  # b - t2^2/(2 t1) = -disc/(8 t1) > 0
            kk = np.sqrt(ap / cp)
            jg[atanbranch] = (
                np.arctan(kk * (1.0 - bp)) - np.arctan(kk * (-1.0 - bp))
            ) / np.sqrt(ap * cp)

        if np.any(tie):
            tt1 = gt1[tie]
            bp = gt2[tie] / (2.0 * tt1)
            jg[tie] = 1.0 / (tt1 * (bp * bp - 1.0))

        logratio = np.log(gq1) - np.log(gqm1)  # log(q(1)/q(-1))
        jyg = logratio / (4.0 * gt1) + gt2 / (2.0 * gt1) * jg
        # c closed form, then Lq = -2c
        cg = (
            2.0
            - 0.5 * (np.log(gqm1) + np.log(gq1))
            + gt2 / (4.0 * gt1) * logratio
            + (gt2 * gt2 / (2.0 * gt1) - gb) * jg
        )
        aa = -1.0 / (2.0 * gt1)
        bcoef = (1.0 - x) - aa * gb
        ccoef = 2.0 * gt2 * aa
        j[general] = jg
        jy[general] = jyg
        lq[general] = -2.0 * cg
        g1[general] = 2.0 * aa + bcoef * jg + ccoef * jyg

    c = -0.5 * lq
    g2 = jy - eps * j
    k = -1.0 + 0.5 * j + 0.5 * lq
    return {
        "j": j,
        "jy": jy,
        "lq": lq,
        "c": c,
        "grad1": g1,
        "grad2": g2,
        "k": k,
        "q_min": qmin,
        "ok": ok,
    }


def _scalar(theta: ThetaPair, params: RateParams, field: str) -> float:
    pieces = _pieces_arr(params, theta.theta1, theta.theta2)
    if not bool(pieces["ok"][0]):
        raise NearBoundary(
            f"min q = {pieces['q_min'][0]:.3e} < {QMIN_STRICT} at "
            f"theta=({theta.theta1}, {theta.theta2})"
        )
    return float(pieces[field][0])


def integral_inv_q(kq: KernelQ) -> float:
    """Int_{-1}^{1} dy / q(y), closed form with discriminant branching."""
    return _scalar(kq.theta, kq.params, "j")


def cgf_c(theta: ThetaPair, params: RateParams) -> float:
    """Scaled cumulant generating function c(theta)."""
    return _scalar(theta, params, "c")


def grad_c(theta: ThetaPair, params: RateParams) -> tuple[float, float]:
    """(dc/dtheta1, dc/dtheta2) in closed form."""
    pieces = _pieces_arr(params, theta.theta1, theta.theta2)
    if not bool(pieces["ok"][0]):
        raise NearBoundary(
            f"min q = {pieces['q_min'][0]:.3e} < {QMIN_STRICT} at "
            f"theta=({theta.theta1}, {theta.theta2})"
        )
    return float(pieces["grad1"][0]), float(pieces["grad2"][0])


def k_value(theta: ThetaPair, params: RateParams) -> float:
    """k = theta . grad c - c = -1 + 1/2 Int 1/q + 1/2 Int log q."""
    return _scalar(theta, params, "k")


# ---------------------------------------------------------------------------
# The theta2 = 0 axis: H, its second zero Q, and k along the axis.
# ---------------------------------------------------------------------------


def _t_from_theta1(theta1: float, x: float) -> float:
    s2 = 1.0 / (-2.0 * theta1) + 1.0 - x
    return np.sqrt(s2) - 1.0


def _theta1_from_t(t: float, x: float) -> float:
    return -1.0 / (2.0 * (t * t + 2.0 * t + x))


def axis_h_t(t, x):
    """H in the transformed coordinate t = s - 1 (valid for theta1 in (P, 0)).

    log(2 + t) - log(t) is written log1p(2/t): for large t the direct
    difference of two ~log(t) values loses the 2/t signal entirely, while
    H itself decays only like (x - 2/3)/t^2.
    """
    t = np.asarray(t, dtype=float)
    return (t * t + 2.0 * t + x) / (2.0 * (t + 1.0)) * np.log1p(2.0 / t) - 1.0


def axis_k_t(t, x):
    """k(theta1, 0) in the transformed coordinate.

    k = H + 1/2 Int log q with
    1/2 Int log q = -log(t^2 + 2t + x) + (2+t)log(2+t) - t log t - 2.

    The integral term is written log1p((2t + 4 - x)/w) + t log1p(2/t) - 2
    with w = t^2 + 2t + x: for large t the direct terms are each
    O(t log t) and cancel down to O(1/t^2), so the naive form is pure
    roundoff noise there (it drowns k ~ 1e-10 at t ~ 1e5), while the
    log1p form stays accurate over the whole axis.  Its small-t value is
    log(4/x) - 2 while H blows up, and for large t it cancels H to give
    k -> 0, matching k = 0 at theta = 0.
    """
    t = np.asarray(t, dtype=float)
    w = t * t + 2.0 * t + x
    half_lq = np.log1p((2.0 * t + 4.0 - x) / w) + t * np.log1p(2.0 / t) - 2.0
    return axis_h_t(t, x) + half_lq


def H_value(theta1: float, x: float) -> float:
    """H(theta1) = -1 + 1/2 Int 1/q on the axis, for theta1 in (P, 0) u (0, max).

    H(0) would be 0 by the affine limit; theta1 = 0 itself is excluded here
    (call sites use the exact limit).
    """
    if not (0.0 < x <= 1.0):
        raise InvalidParams(f"x must be in (0, 1], got {x}")
    p_left = -1.0 / (2.0 * x)
    if theta1 <= p_left:
        raise NearBoundary(f"theta1={theta1} is at or left of P={p_left}")
    if theta1 == 0.0:
        return 0.0
    if theta1 < 0.0:
        return float(axis_h_t(_t_from_theta1(theta1, x), x))
    # theta1 > 0: arctan branch with t2 = 0
    b = 1.0 - 2.0 * theta1 * (1.0 - x)
    if b <= QMIN_STRICT:
        raise NearBoundary(f"q(0) = b = {b} <= {QMIN_STRICT} at theta1={theta1}")
    j = 2.0 * np.arctan(np.sqrt(2.0 * theta1 / b)) / np.sqrt(2.0 * theta1 * b)
    return float(-1.0 + 0.5 * j)


def solve_Q_detail(x: float, h_tol: float = 1e-12) -> QRoot:
    """Second zero of H on (P, 0) by bisection in log t.

    H(t) -> +inf as t -> 0+ (the P end) and approaches 0 from below as
    t -> inf (the origin end) when x < 2/3, so a sign change brackets Q.
    """
    if not (0.0 < x <= 1.0):
        raise InvalidParams(f"x must be in (0, 1], got {x}")
    if x >= 2.0 / 3.0:
        raise NoRoot(f"H has no second zero for x={x} >= 2/3")
    lo = np.log(1e-300)
    flo = float(axis_h_t(np.exp(lo), x))
    # Expand the upper end until the (x - 2/3)/t^2 tail turns H negative.
    # Absolute evaluation error is ~1e-16, so the sign is trustworthy while
    # (2/3 - x)/t^2 stays well above that.
    t_hi = 4.0
    fhi = float(axis_h_t(t_hi, x))
    while fhi >= 0.0 and t_hi < 1e7:
        t_hi *= 4.0
        fhi = float(axis_h_t(t_hi, x))
    hi = np.log(t_hi)
    if not (flo > 0.0 > fhi):
        raise NoRoot(
            f"bisection bracket failed for x={x}: H({np.exp(lo)})={flo}, "
            f"H({t_hi})={fhi}"
        )
    fmid = np.inf
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        fmid = float(axis_h_t(np.exp(mid), x))
        if abs(fmid) < h_tol:
            break
        if fmid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    t = float(np.exp(0.5 * (lo + hi)))
    fmid = float(axis_h_t(t, x))
    w = t * t + 2.0 * t + x
    fp_res = abs(np.log(t) - (np.log(2.0 + t) - 2.0 * (t + 1.0) / w))
    return QRoot(
        theta1=_theta1_from_t(t, x),
        t=t,
        h_residual=fmid,
        fixed_point_residual=float(fp_res),
    )


def solve_Q(x: float) -> float:
    """theta1 coordinate of the second zero Q of H (raises NoRoot if x >= 2/3)."""
    return solve_Q_detail(x).theta1


def q_gap_from_p(x: float) -> float:
    """Exact Q - P computed in the t coordinate (no cancellation).

    Q - P = (t^2 + 2 t) / (2 x (t^2 + 2 t + x)) with t the transformed root.
    """
    t = solve_Q_detail(x).t
    w = t * t + 2.0 * t
    return w / (2.0 * x * (w + x))


def chebyshev_q_min(params: RateParams, theta: ThetaPair, n: int = 2049) -> float:
    """Grid cross-check of the analytic parabola minimum (test helper).

    Minimum of q over n Chebyshev-spaced points of [-1, 1] joined with the
    analytic minimum; equals KernelQ.q_min up to the grid resolution.
    """
    ys = np.cos(np.pi * np.arange(n) / (n - 1))
    ker = KernelQ.from_theta(theta, params)
    return float(min(np.min(ker.evaluate(ys)), ker.q_min))
