"""Non-radial solutions bifurcating from u_p inside the dihedral-symmetric space.

A solution invariant under rotation by 2π/k and reflection in the x-axis is
expanded as ``v(r, θ) = Σ_{q=0..Q} c_q(r) cos(kqθ)``.  In log-radius
``t = log r`` the equation ``-Δv = |v|^(p-1) v`` decouples into

    c_q'' - (kq)^2 c_q = -e^(2t) g_q,    g_q = projection of |v|^(p-1) v,

which is collocated on a Chebyshev grid over ``[t_min, 0]``.  The grid is
dense near the centre and near the boundary, and a fixed tail below the
concentration scale of u_p makes the same number of points work for every
p.  At ``t_min`` mode 0 is Neumann (v is smooth and flat there) and the
others are Dirichlet (``c_q ~ r^(kq)``).

Solutions are zeros of the fixed-point form ``F(c) = c - T(c)`` with
``T = (-Δ)^(-1)(|v|^(p-1) v)``, whose Jacobian ``I - (-Δ)^(-1) p|v|^(p-1)``
is well scaled regardless of the grid.
"""

from dataclasses import dataclass, field
from math import pi

import numpy as np
from scipy import linalg, ndimage
from scipy.interpolate import BarycentricInterpolator

from .eigen import weighted_radial_eigen
from .errors import CollapsedToRadial, StepFailure, UnresolvedNodalSet
from .radial import solve_radial
from .scan import RESIDUAL_TOL

RADIAL_POINTS = 256
MODES = 8
TAIL = 12.0
NEWTON_TOL = 1e-11
ACCEPT_TOL = 1e-8
MASS_TOL = 1e-10
NEWTON_MAXIT = 12
MAX_HALVINGS = 6
LADDER_START = 0.01
LADDER_RATIO = 1.3
WINDOW = (1.01, 12.0)
NODAL_GRID = (400, 720)
# collocation noise near the centre sits around 1e-8 of sup|v|
CONE_TOL = 1e-6


def _cheb(n):
    """Chebyshev points on [-1, 1] in ascending order with the derivative matrix."""
    i = np.arange(n + 1)
    x = np.cos(pi * i / n)
    c = np.where((i == 0) | (i == n), 2.0, 1.0) * (-1.0) ** i
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    d -= np.diag(d.sum(axis=1))
    return x[::-1].copy(), d[::-1, ::-1].copy()


def _clenshaw_curtis(n):
    """Clenshaw-Curtis weights on [-1, 1] for the ascending Chebyshev points."""
    theta = pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    inner = theta[1:-1]
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for m in range(1, n // 2):
            v -= 2.0 * np.cos(2 * m * inner) / (4 * m * m - 1)
        v -= np.cos(n * inner) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for m in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * m * inner) / (4 * m * m - 1)
    w[1:-1] = 2.0 * v / n
    return w[::-1].copy()


class Discretization:
    """Collocation operators for one symmetry order ``k`` and one radial window.

    Nodes are ascending in ``t``: index 0 sits at ``t_min`` (the centre side),
    index ``n`` at ``t = 0`` (the boundary circle).
    """

    def __init__(self, k, t_min, points=RADIAL_POINTS, modes=MODES, angles=None):
        if k < 1:
            raise ValueError("symmetry order k must be >= 1")
        if not t_min < 0.0:
            raise ValueError("t_min must be negative")
        self.k = int(k)
        self.t_min = float(t_min)
        self.n = n = int(points) - 1
        self.Q = int(modes)
        self.M = int(angles) if angles is not None else 4 * (self.Q + 1)
        x, d = _cheb(n)
        half = -0.5 * self.t_min
        self.t = self.t_min + half * (x + 1.0)
        self.t[-1] = 0.0
        self.r = np.exp(self.t)
        self.D = d / half
        self.weights = _clenshaw_curtis(n) * half
        self.e2t = np.exp(2.0 * self.t)

        d2 = self.D @ self.D
        mask = np.eye(n + 1)
        mask[0, 0] = mask[n, n] = 0.0
        solves = []
        for q in range(self.Q + 1):
            a = d2 - (self.k * q) ** 2 * np.eye(n + 1)
            a[n] = 0.0
            a[n, n] = 1.0
            if q == 0:
                a[0] = self.D[0]
            else:
                a[0] = 0.0
                a[0, 0] = 1.0
            solves.append(np.linalg.solve(a, mask))
        self.S = np.array(solves)

        # midpoint rule in phi = k theta on [0, π]; exact projection for the retained modes
        self.phi = (np.arange(self.M) + 0.5) * pi / self.M
        self.cos = np.cos(np.outer(np.arange(self.Q + 1), self.phi))
        scale = np.full(self.Q + 1, 2.0 / self.M)
        scale[0] = 1.0 / self.M
        self.proj = self.cos * scale[:, None]

    @classmethod
    def for_profile(cls, k, profile, **kw):
        """Window reaching ``TAIL`` log-units below the concentration scale of ``profile``."""
        return cls(k, -(profile.t_end + TAIL), **kw)

    @property
    def size(self):
        return (self.Q + 1) * (self.n + 1)

    def values(self, c):
        """v at (node, angle), shape (n+1, M)."""
        return c.T @ self.cos

    def nonlinearity(self, c, p):
        v = self.values(c)
        # rejected trial steps may overflow; the non-finite merit rejects them
        with np.errstate(over="ignore", invalid="ignore"):
            f = np.abs(v) ** (p - 1.0) * v
            return (f @ self.proj.T).T * self.e2t

    def F(self, c, p):
        g = self.nonlinearity(c, p)
        with np.errstate(invalid="ignore"):
            return c + np.einsum("qij,qj->qi", self.S, g)

    def residual_norm(self, c, p):
        scale = np.max(np.abs(c))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.F(c, p))) / scale)

    def jacobian(self, c, p):
        """dF/dc as a dense (size, size) matrix, blocks ordered by mode."""
        v = self.values(c)
        with np.errstate(over="ignore", invalid="ignore"):
            dv = p * np.abs(v) ** (p - 1.0)
            # gamma[q, q', i] = sum_j proj[q, j] dv[i, j] cos[q', j]
            gamma = np.einsum("qj,ij,sj->qsi", self.proj, dv, self.cos) * self.e2t
            blocks = self.S[:, None, :, :] * gamma[:, :, None, :]
        nq, npt = self.Q + 1, self.n + 1
        jac = blocks.transpose(0, 2, 1, 3).reshape(nq * npt, nq * npt)
        jac[np.diag_indices_from(jac)] += 1.0
        return jac

    def radial_blocks(self, c0, p):
        """Diagonal blocks of the Jacobian at a radial state (exact: modes decouple)."""
        dv = p * np.abs(c0) ** (p - 1.0) * self.e2t
        eye = np.eye(self.n + 1)
        return [eye + self.S[q] * dv[None, :] for q in range(self.Q + 1)]

    def dF_dp(self, c, p):
        v = self.values(c)
        av = np.abs(v)
        logv = np.log(np.where(av > 0.0, av, 1.0))
        with np.errstate(over="ignore", invalid="ignore"):
            f = av ** (p - 1.0) * v * logv
            g = (f @ self.proj.T).T * self.e2t
        return np.einsum("qij,qj->qi", self.S, g)

    def interpolate(self, c, t):
        """c_q at arbitrary log-radii in [t_min, 0], shape (Q+1, len(t))."""
        return BarycentricInterpolator(self.t, c.T)(np.asarray(t, dtype=float)).T

    def field(self, c, t, theta):
        """v(t, θ) on the tensor grid ``t × theta``."""
        cq = self.interpolate(c, t)
        modes = np.cos(self.k * np.outer(np.arange(self.Q + 1), theta))
        return cq.T @ modes


@dataclass(frozen=True)
class FourierSolution:
    """``v = Σ_q modes[q](r) cos(k q θ)`` on ``radial_grid`` (ascending radii)."""

    p: float
    k: int
    modes: np.ndarray = field(repr=False)
    radial_grid: np.ndarray = field(repr=False)
    residual: float
    disc: Discretization = field(repr=False, compare=False, default=None)

    @property
    def nonradial_mass(self):
        top = np.max(np.abs(self.modes))
        return 0.0 if top == 0.0 else float(np.max(np.abs(self.modes[1:])) / top)

    def value(self, r, theta):
        """v at radii ``r`` in (0, 1] and angles ``theta`` (tensor grid)."""
        return self.disc.field(self.modes, np.log(np.asarray(r, dtype=float)), theta)

    def rotated(self, angle):
        """Representative rotated by ``angle``; only multiples of π/k stay in the basis."""
        steps = angle * self.k / pi
        if abs(steps - round(steps)) > 1e-12:
            raise ValueError("rotation must be a multiple of π/k to stay in the basis")
        sign = (-1.0) ** (round(steps) * np.arange(self.disc.Q + 1))
        return FourierSolution(self.p, self.k, self.modes * sign[:, None], self.radial_grid,
                               self.residual, self.disc)


def _make(disc, c, p):
    return FourierSolution(float(p), disc.k, c, disc.r, disc.residual_norm(c, p), disc)


def residual(sol):
    """Relative sup norm of ``v - (-Δ)^(-1)(|v|^(p-1) v)`` over all modes and nodes."""
    return sol.disc.residual_norm(sol.modes, sol.p)


def _newton_radial(disc, c0, p):
    c = c0.copy()
    for _ in range(NEWTON_MAXIT):
        f = c + disc.S[0] @ (np.abs(c) ** (p - 1.0) * c * disc.e2t)
        if np.max(np.abs(f)) <= NEWTON_TOL * np.max(np.abs(c)):
            break
        blk = disc.radial_blocks(c, p)[0]
        c = c - np.linalg.solve(blk, f)
    return c


def interpolated_radial(disc, profile):
    """u_p sampled at the collocation nodes (no discrete correction)."""
    c = np.zeros((disc.Q + 1, disc.n + 1))
    u, _ = profile.evaluate(disc.r)
    c[0] = u
    return _make(disc, c, profile.p)


def radial_solution(disc, p, profile=None):
    """Discrete radial solution at ``p``: u_p at the nodes polished by Newton."""
    profile = profile or solve_radial(p, 2)
    start = interpolated_radial(disc, profile).modes
    c = start.copy()
    c[0] = _newton_radial(disc, start[0], p)
    return _make(disc, c, p)


def phi1_nodes(disc, eigenpair):
    """First weighted eigenfunction at the nodes (sup-normalised, positive)."""
    phi, _ = eigenpair.evaluate(disc.r)
    return phi


def _solve_bordered(jac, col, row, rhs, corner=0.0):
    n = jac.shape[0]
    big = np.empty((n + 1, n + 1))
    big[:n, :n] = jac
    big[:n, n] = col
    big[n, :n] = row
    big[n, n] = corner
    return np.linalg.solve(big, rhs)


def _pinned_newton(disc, c, p, pin, ratio):
    """Damped Newton on (c, p) with c_1(node ``pin``) = ratio * v(0).

    Pinning against the centre value keeps the constraint scale free:
    along the branch ||u_p|| = C^(1/(p-1)) changes much faster than the
    shape of the solution when p is near 1.
    """
    size = disc.size
    row = np.zeros(size)
    row[(disc.n + 1) + pin] = 1.0
    row[0] = -ratio

    def pin_gap(c):
        return c[1, pin] - ratio * c[0, 0]

    def merit(c, p):
        return max(np.max(np.abs(disc.F(c, p))), abs(pin_gap(c))) / np.max(np.abs(c))

    for _ in range(NEWTON_MAXIT):
        f = disc.F(c, p)
        g = pin_gap(c)
        if not np.all(np.isfinite(f)):
            return c, p, False
        if max(np.max(np.abs(f)), abs(g)) <= NEWTON_TOL * np.max(np.abs(c)):
            return c, p, True
        try:
            step = _solve_bordered(disc.jacobian(c, p), disc.dF_dp(c, p).ravel(), row,
                                   -np.concatenate([f.ravel(), [g]]))
        except np.linalg.LinAlgError:
            return c, p, False
        dc, dp = step[:size].reshape(c.shape), step[size]
        m0 = merit(c, p)
        lam = 1.0
        while lam > 1e-3:
            if p + lam * dp > 1.0 and merit(c + lam * dc, p + lam * dp) < m0:
                break
            lam *= 0.5
        c, p = c + lam * dc, p + lam * dp
    return c, p, disc.residual_norm(c, p) < ACCEPT_TOL


@dataclass(frozen=True)
class SwitchResult:
    """A switched solution with the data needed to read off the expansion.

    ``amplitude`` is the realised coefficient ``c_1(r_pin) / φ_1(r_pin)``.
    """

    solution: FourierSolution
    amplitude: float
    pin: int
    radial: FourierSolution = field(repr=False)
    phi1: np.ndarray = field(repr=False)
    psi_norm: float = None


def branch_switch(origin, amplitude, profile=None, disc=None, points=RADIAL_POINTS):
    """Non-radial solution near (p^k, u_{p^k}) with prescribed q=1 amplitude.

    Predictor ``u_{p^k} + a φ_1(r) cos(kθ)``; corrector Newton on (c, p)
    with the q=1 coefficient at the node where φ_1 peaks pinned to
    ``a / ||u_{p^k}||`` times the centre value ``v(0)``, so ``amplitude`` is
    measured against the solution's own sup norm.  ``psi_norm`` is
    ``sup|v - u_p - α φ_1 cos kθ|`` with u_p at the solution's own p and
    α the realised amplitude.
    """
    k = int(origin.j)
    if origin.residual >= RESIDUAL_TOL:
        raise ValueError(f"origin not verified: residual {origin.residual:.2e}")
    p0 = float(origin.p_star)
    profile = profile or solve_radial(p0, 2)
    if amplitude == 0.0 or abs(amplitude) > 0.2 * profile.alpha:
        raise ValueError("need 0 < |amplitude| <= 0.2 ||u_p||")
    disc = disc or Discretization.for_profile(k, profile, points=points)
    base = radial_solution(disc, p0, profile)
    phi = phi1_nodes(disc, weighted_radial_eigen(profile, 1))
    pin = int(np.argmax(phi))
    # amplitude ladder: the branch bends in p like a^2, so large |a| is reached
    # from a small amplitude in geometric rungs, predicting each rung from the
    # last three by quadratic extrapolation in a.  The Newton basin shrinks
    # like 1/p because |u + a φ|^p amplifies a/α p-fold.
    rungs = [amplitude]
    while abs(rungs[0]) > LADDER_START * profile.alpha / p0:
        rungs.insert(0, rungs[0] / LADDER_RATIO)
    history = []
    for a in rungs:
        if len(history) >= 2:
            nodes = history[-3:]
            c, p = 0.0, 0.0
            for n, (an, cn, pn) in enumerate(nodes):
                w = np.prod([(a - am) / (an - am) for m, (am, _, _) in enumerate(nodes) if m != n])
                c, p = c + w * cn, p + w * pn
        elif history:
            a1, c1, p = history[-1]
            c = c1 + (a - a1) * np.outer(np.eye(disc.Q + 1)[1], phi)
        else:
            c = base.modes.copy()
            c[1] += a * phi
            p = p0
        c, p, ok = _pinned_newton(disc, c, p, pin, a * phi[pin] / profile.alpha)
        if not ok:
            raise StepFailure(f"Newton did not converge at amplitude {a:g}")
        history.append((a, c, p))
    sol = _make(disc, c, p)
    if sol.nonradial_mass < MASS_TOL:
        raise CollapsedToRadial(f"q>=1 mass {sol.nonradial_mass:.2e} after correction")
    radial = radial_solution(disc, p)
    realised = float(c[1, pin] / phi[pin])
    psi = c - radial.modes
    psi[1] -= realised * phi
    psi_norm = float(np.max(np.abs(disc.values(psi))))
    return SwitchResult(sol, realised, pin, radial, phi, psi_norm)


@dataclass(frozen=True)
class BranchPoint:
    p: float
    solution: FourierSolution = field(repr=False)
    arclength: float
    amplitude: float


@dataclass(frozen=True)
class BranchSegment:
    k: int
    origin: object
    points: tuple
    termination: str
    folds: tuple = ()
    step_bounds: tuple = ()


def _weights(disc):
    return 1.0 / disc.size


def _tangent(disc, c, p, guess):
    """Unit tangent of F(c, p) = 0 oriented along ``guess``."""
    jac = disc.jacobian(c, p)
    fp = disc.dF_dp(c, p).ravel()
    w = _weights(disc)
    row = np.concatenate([guess[:-1] * w, [guess[-1]]])
    rhs = np.zeros(disc.size + 1)
    rhs[-1] = 1.0
    tau = _solve_bordered(jac, fp, row[:-1], rhs, row[-1])
    norm = np.sqrt(w * tau[:-1] @ tau[:-1] + tau[-1] ** 2)
    tau /= norm
    if tau[:-1] @ guess[:-1] * w + tau[-1] * guess[-1] < 0.0:
        tau = -tau
    return tau


def continue_branch(seed, direction=1, max_points=20, ds=None, min_step=None, max_step=None,
                    window=None, pin=None):
    """Pseudo-arclength continuation from a switched solution.

    ``direction=+1`` starts towards growing |q=1 amplitude|.  Folds (sign
    changes of dp/ds) are recorded and passed through.  Termination is one
    of window-exit, radial-return, step-failure or max-points.
    """
    if isinstance(seed, SwitchResult):
        pin = seed.pin if pin is None else pin
        origin_p = seed.radial.p
        seed = seed.solution
    else:
        origin_p = seed.p
    if seed.residual >= ACCEPT_TOL:
        raise ValueError("seed residual must be below 1e-8")
    disc = seed.disc
    if pin is None:
        pin = int(np.argmax(np.abs(seed.modes[1])))
    lo, hi = window or (WINDOW[0], max(WINDOW[1], 1.5 * origin_p))
    amp0 = abs(seed.modes[1, pin])
    ds = 0.5 * amp0 if ds is None else ds
    min_step = ds / 2 ** MAX_HALVINGS if min_step is None else min_step
    max_step = 4.0 * ds if max_step is None else max_step
    w = _weights(disc)

    c, p = seed.modes.copy(), seed.p
    guess = np.zeros(disc.size + 1)
    guess[(disc.n + 1) + pin] = np.sign(seed.modes[1, pin]) * direction
    tau = _tangent(disc, c, p, guess)
    points = [BranchPoint(p, seed, 0.0, float(c[1, pin]))]
    folds = []
    s = 0.0
    termination = "max-points"
    step = ds
    while len(points) < max_points:
        halvings = 0
        while True:
            pred = np.concatenate([c.ravel(), [p]]) + step * tau
            x = pred.copy()
            converged = False
            for it in range(NEWTON_MAXIT):
                cx = x[:-1].reshape(c.shape)
                f = disc.F(cx, x[-1])
                if not np.all(np.isfinite(f)):
                    break
                g = w * tau[:-1] @ (x[:-1] - pred[:-1]) + tau[-1] * (x[-1] - pred[-1])
                if np.max(np.abs(f)) <= NEWTON_TOL * np.max(np.abs(cx)) and abs(g) < 1e-13:
                    converged = True
                    break
                try:
                    dx = _solve_bordered(disc.jacobian(cx, x[-1]), disc.dF_dp(cx, x[-1]).ravel(),
                                         w * tau[:-1], -np.concatenate([f.ravel(), [g]]), tau[-1])
                except np.linalg.LinAlgError:
                    break
                x = x + dx
                if not x[-1] > 1.0 or not np.all(np.isfinite(x)):
                    break
            if converged or (x[-1] > 1.0 and np.all(np.isfinite(x)) and disc.residual_norm(x[:-1].reshape(c.shape), x[-1]) < ACCEPT_TOL):
                break
            halvings += 1
            step *= 0.5
            if halvings > MAX_HALVINGS or step < min_step:
                if len(points) == 1:
                    raise StepFailure("continuation could not leave the seed")
                return BranchSegment(seed.k, origin_p, tuple(points), "step-failure",
                                     tuple(folds), (min_step, max_step))
        c, p = x[:-1].reshape(c.shape), float(x[-1])
        s += step
        new_tau = _tangent(disc, c, p, tau)
        if np.sign(new_tau[-1]) != np.sign(tau[-1]) and tau[-1] != 0.0:
            folds.append(len(points))
        tau = new_tau
        sol = _make(disc, c, p)
        points.append(BranchPoint(p, sol, s, float(c[1, pin])))
        if sol.nonradial_mass < MASS_TOL:
            termination = "radial-return"
            break
        if not lo < p <= hi:
            termination = "window-exit"
            break
        if it <= 3 and halvings == 0:
            step = min(1.5 * step, max_step)
        step = max(step, min_step)
    return BranchSegment(seed.k, origin_p, tuple(points), termination, tuple(folds),
                         (min_step, max_step))


@dataclass(frozen=True)
class KernelCheck:
    singular_values: np.ndarray = field(repr=False)
    small_count: int
    relative_smallest: float
    alignment: float


def kernel_check(disc, c, p, phi, rel_tol=1e-6):
    """Near-null singular values of dF/dc and alignment of the null vector with φ_1 cos kθ."""
    jac = disc.jacobian(c, p)
    _, sv, vt = linalg.svd(jac)
    rel = sv / sv[0]
    small = int(np.sum(rel < rel_tol))
    vec = vt[-1]
    ref = np.zeros(disc.size)
    ref[disc.n + 1: 2 * (disc.n + 1)] = phi
    align = abs(vec @ ref) / (np.linalg.norm(vec) * np.linalg.norm(ref))
    return KernelCheck(sv, small, float(rel[-1]), float(align))


def negative_count(disc, c, p):
    """Eigenvalues of dF/dc with negative real part (discrete k-Morse index)."""
    if np.max(np.abs(c[1:])) == 0.0:
        blocks = disc.radial_blocks(c[0], p)
        return int(sum(np.sum(np.linalg.eigvals(b).real < 0.0) for b in blocks))
    return int(np.sum(np.linalg.eigvals(disc.jacobian(c, p)).real < 0.0))


@dataclass(frozen=True)
class NodalTopology:
    nodal_domain_count: int
    touches_boundary: bool
    quasi_radial: bool
    nodal_components: int


def _label_periodic(mask, structure):
    labels, count = ndimage.label(mask, structure=structure)
    # glue the θ = 0 and θ = 2π columns
    parent = list(range(count + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        if a and b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    first, last = labels[:, 0], labels[:, -1]
    for i in range(labels.shape[0]):
        union(first[i], last[i])
        if structure.shape == (3, 3) and structure[0, 0]:
            if i > 0:
                union(first[i], last[i - 1])
            if i + 1 < labels.shape[0]:
                union(first[i], last[i + 1])
    return labels, find


def _topology(sol, n_t, n_theta):
    disc = sol.disc
    t = np.linspace(disc.t_min, 0.0, n_t + 1)[:-1]
    theta = 2.0 * pi * np.arange(n_theta) / n_theta
    v = disc.field(sol.modes, t, theta)
    top = np.max(np.abs(v))
    sign = v > 0.0
    four = ndimage.generate_binary_structure(2, 1)
    labels = {}
    domains = []
    for s in (True, False):
        lab, find = _label_periodic(sign == s, four)
        roots = np.vectorize(find)(lab) if lab.max() else lab
        # the row at t_min is a neighbourhood of the centre: one point in the plane
        centre = set(int(x) for x in roots[0][sign[0] == s])
        ids = sorted(set(int(x) for x in np.unique(roots)) - {0})
        merged = {i: (min(centre) if i in centre else i) for i in ids}
        for i in set(merged.values()):
            domains.append((s, i))
        labels[s] = np.vectorize(lambda x: merged.get(int(x), 0))(roots)
    index = {d: n for n, d in enumerate(domains)}
    dom = np.where(sign, np.vectorize(lambda x: index.get((True, int(x)), -1))(labels[True]),
                   np.vectorize(lambda x: index.get((False, int(x)), -1))(labels[False]))

    # zero set: cells with an opposite-sign neighbour, 8-connected with wrap
    edge = np.zeros_like(sign)
    edge[:-1] |= sign[:-1] != sign[1:]
    edge[1:] |= sign[:-1] != sign[1:]
    rolled = np.roll(sign, -1, axis=1)
    edge |= sign != rolled
    edge |= np.roll(sign != rolled, 1, axis=1)
    eight = ndimage.generate_binary_structure(2, 2)
    zlab, zfind = _label_periodic(edge, eight)
    zroots = set(int(zfind(int(x))) for x in np.unique(zlab)) - {0}
    zero_count = len(zroots)

    adjacency = set()
    for a, b in ((dom[:-1], dom[1:]), (dom, np.roll(dom, -1, axis=1))):
        diff = a != b
        for x, y in zip(a[diff], b[diff]):
            adjacency.add((min(x, y), max(x, y)))

    # boundary contact: sign pattern of the normal derivative on r = 1
    dv = disc.D[-1] @ sol.modes.T
    normal = np.cos(sol.k * np.outer(theta, np.arange(disc.Q + 1))) @ dv
    floor = 1e-10 * max(np.max(np.abs(normal)), top)
    touches = bool(np.any(normal > floor) and np.any(normal < -floor))

    n_dom = len(domains)
    degree = np.zeros(n_dom, dtype=int)
    for a, b in adjacency:
        degree[a] += 1
        degree[b] += 1
    is_path = len(adjacency) == n_dom - 1 and (n_dom == 1 or (degree <= 2).all())
    nested = True
    if is_path and n_dom > 1:
        orders = set()
        for col in dom.T:
            runs = [col[0]] + [y for x, y in zip(col[:-1], col[1:]) if x != y]
            orders.add(tuple(runs))
        nested = len(orders) == 1 and len(next(iter(orders))) == n_dom
    quasi = (not touches) and is_path and nested and zero_count == n_dom - 1
    return NodalTopology(n_dom, touches, bool(quasi), zero_count)


def nodal_topology(sol, grid=NODAL_GRID):
    """Nodal domains and quasi-radiality from a polar grid in (log r, θ).

    The count is repeated on a grid refined twice in each direction; a
    mismatch raises UnresolvedNodalSet.
    """
    base = _topology(sol, *grid)
    fine = _topology(sol, 2 * grid[0], 2 * grid[1])
    if (base.nodal_domain_count, base.nodal_components) != (fine.nodal_domain_count,
                                                            fine.nodal_components):
        raise UnresolvedNodalSet(
            f"domains/components {base.nodal_domain_count}/{base.nodal_components} vs "
            f"{fine.nodal_domain_count}/{fine.nodal_components} on the refined grid")
    return fine


def cone_membership(sol, samples=(200, 200), rel_tol=CONE_TOL):
    """(member, worst violation) for the cone v_θ <= 0 on 0 <= θ <= π/k."""
    disc = sol.disc
    t = np.linspace(disc.t_min, 0.0, samples[0])
    theta = np.linspace(0.0, pi / sol.k, samples[1])
    cq = disc.interpolate(sol.modes, t)
    kq = sol.k * np.arange(disc.Q + 1)
    v_theta = cq.T @ (-kq[:, None] * np.sin(np.outer(kq, theta)))
    worst = max(0.0, float(np.max(v_theta)))
    scale = np.max(np.abs(sol.modes))
    return worst <= rel_tol * scale, worst


def _energy_parts(sol):
    disc = sol.disc
    c = sol.modes
    ct = c @ disc.D.T
    grad = 0.0
    for q in range(disc.Q + 1):
        kq = sol.k * q
        dens = ct[q] ** 2 + kq * kq * c[q] ** 2
        grad += (2.0 * pi if q == 0 else pi) * float(disc.weights @ dens)
    v = disc.values(c)
    pot = 2.0 * pi * float(disc.weights @ (disc.e2t * np.mean(np.abs(v) ** (sol.p + 1.0), axis=1)))
    return grad, pot


def energy(sol):
    """E_p(v) = ½∫|∇v|² - ∫|v|^(p+1)/(p+1) over the disk."""
    grad, pot = _energy_parts(sol)
    return 0.5 * grad - pot / (sol.p + 1.0)


def energy_identity_gap(sol):
    """|E_p(v) - (½ - 1/(p+1)) ∫|v|^(p+1)| relative to ∫|v|^(p+1)."""
    grad, pot = _energy_parts(sol)
    if pot == 0.0:
        return 0.0
    e = 0.5 * grad - pot / (sol.p + 1.0)
    return abs(e - (0.5 - 1.0 / (sol.p + 1.0)) * pot) / pot


def perturbed(disc, profile, eigenpair, amplitude):
    """u_p + a φ_1(r) cos(kθ) at the nodes, without correction."""
    base = interpolated_radial(disc, profile).modes.copy()
    base[1] += amplitude * phi1_nodes(disc, eigenpair)
    return _make(disc, base, profile.p)

