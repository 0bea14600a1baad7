"""The three bundled PDE test systems with their published setups.

Each builder returns a :class:`~exactopinf.fom.PolynomialFOM` with both
black-box and structured (multilinear) access, plus initial condition and,
where present, the input signal.  Parameters can be overridden through a
plain key-value config file for sensitivity studies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .fom import InputSignal, PolynomialFOM


@dataclass(frozen=True)
class BenchmarkSpec:
    """Grid, horizon and sweep settings of one bundled test system."""

    name: str
    N: int
    dt_pod: float
    T: float
    degree_set: tuple[int, ...]
    n_u: int
    n_sweep: tuple[int, ...]
    scheme: str = "explicit_euler"
    c1: float | None = None
    c2: float | None = None

    @property
    def K_pod(self) -> int:
        return round(self.T / self.dt_pod)


CHAFEE_INFANTE = BenchmarkSpec(
    name="chafee_infante",
    N=128,
    dt_pod=1e-5,
    T=0.1,
    degree_set=(1, 2, 3),
    n_u=1,
    n_sweep=tuple(range(1, 15)),
)

SHALLOW_ICE = BenchmarkSpec(
    name="shallow_ice",
    N=512,
    dt_pod=1e-3,
    T=2.0,
    degree_set=(3, 8),
    n_u=0,
    n_sweep=tuple(range(1, 8)),
    scheme="implicit_euler",
    c1=8.9e-13,
    c2=2.8e7,
)

BURGERS = BenchmarkSpec(
    name="burgers",
    N=128,
    dt_pod=1e-4,
    T=1.0,
    degree_set=(1, 2),
    n_u=0,
    n_sweep=tuple(range(1, 11)),
)

SPECS = {spec.name: spec for spec in (CHAFEE_INFANTE, SHALLOW_ICE, BURGERS)}


def parse_config(path) -> dict:
    """Read ``key = value`` overrides; '#' starts a comment.

    Recognized keys: N, dt, T, c1, c2 (numbers).  Unknown keys raise.
    """
    allowed = {"N": int, "dt": float, "T": float, "c1": float, "c2": float}
    overrides = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in allowed:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            overrides[key] = allowed[key](value)
    return overrides


def apply_overrides(spec: BenchmarkSpec, overrides: dict) -> BenchmarkSpec:
    mapping = {"N": "N", "dt": "dt_pod", "T": "T", "c1": "c1", "c2": "c2"}
    fields = {mapping[k]: v for k, v in overrides.items()}
    return replace(spec, **fields)


def build_chafee_infante(
    spec: BenchmarkSpec = CHAFEE_INFANTE,
    freeze_right: bool = False,
):
    """Reaction-diffusion system with cubic decay on (0, 1).

    Unknowns sit at cell centers; the left boundary value enters the first
    node's second-difference stencil through the input, the right boundary
    is homogeneous Neumann by default.  ``freeze_right`` instead pins the
    last node (zero right-hand side there), for sensitivity checks.
    Degree 2 is carried in the degree set with a zero operator.

    Returns ``(fom, signal, x0)``.
    """
    N = spec.N
    dxi = 1.0 / N
    inv2 = 1.0 / dxi**2

    A1 = np.zeros((N, N))
    idx = np.arange(N)
    A1[idx, idx] = -2.0 * inv2
    A1[idx[:-1], idx[:-1] + 1] = inv2
    A1[idx[1:], idx[1:] - 1] = inv2
    A1[N - 1, N - 1] = -inv2  # Neumann ghost mirrors the last node
    A1 += np.eye(N)  # linear growth term

    B = np.zeros((N, 1))
    B[0, 0] = inv2

    mask = np.ones(N)
    if freeze_right:
        mask[N - 1] = 0.0

    def rhs(x, u):
        return mask * (A1 @ x - x**3 + B @ u)

    multilinear = {
        1: lambda a: mask * (A1 @ a),
        2: lambda a, b: np.zeros(N),
        3: lambda a, b, c: mask * (-(a * b * c)),
    }

    fom = PolynomialFOM(
        dimension=N,
        degree_set=spec.degree_set,
        n_u=spec.n_u,
        rhs=rhs,
        multilinear=multilinear,
        input_map=lambda u: mask * (B @ u),
    )
    signal = InputSignal(evaluate=lambda t: np.array([10.0 * (math.sin(math.pi * t) + 1.0)]), n_u=1)
    x0 = np.zeros(N)
    return fom, signal, x0


def build_shallow_ice(spec: BenchmarkSpec = SHALLOW_ICE):
    """Ice-thickness transport on [0, 1000] with degree-3 and degree-8 terms.

    Spatial derivatives are central differences at cell centers with
    homogeneous-Neumann ghost values.  The degree-8 multilinear map
    symmetrizes over which three of the eight arguments take the derivative
    role; the degree-3 map over which one of three does.

    Returns ``(fom, x0)``.
    """
    N = spec.N
    dxi = 1000.0 / N
    c1 = spec.c1
    c2 = spec.c2

    def dx(v):
        out = np.empty_like(v)
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * dxi)
        out[0] = (v[1] - v[0]) / (2.0 * dxi)
        out[-1] = (v[-1] - v[-2]) / (2.0 * dxi)
        return out

    D = np.zeros((N, N))
    rows = np.arange(1, N - 1)
    D[rows, rows + 1] = 1.0 / (2.0 * dxi)
    D[rows, rows - 1] = -1.0 / (2.0 * dxi)
    D[0, 1] = 1.0 / (2.0 * dxi)
    D[0, 0] = -1.0 / (2.0 * dxi)
    D[N - 1, N - 1] = 1.0 / (2.0 * dxi)
    D[N - 1, N - 2] = -1.0 / (2.0 * dxi)

    def rhs(x, u):
        g = dx(x)
        return c1 * x**2 * g + c2 * x**5 * g**3

    def jacobian(x, u):
        g = dx(x)
        return np.diag(2.0 * c1 * x * g + 5.0 * c2 * x**4 * g**3) + (
            c1 * x**2 + 3.0 * c2 * x**5 * g**2
        )[:, None] * D

    def h3(a, b, c):
        return (c1 / 3.0) * (a * b * dx(c) + a * dx(b) * c + dx(a) * b * c)

    derivative_roles = list(itertools.combinations(range(8), 3))

    def h8(*vs):
        if len(vs) != 8:
            raise ValueError("expected 8 arguments")
        dvs = [dx(v) for v in vs]
        acc = np.zeros(N)
        for roles in derivative_roles:
            term = np.ones(N)
            for k in range(8):
                term = term * (dvs[k] if k in roles else vs[k])
            acc += term
        return (c2 / len(derivative_roles)) * acc

    fom = PolynomialFOM(
        dimension=N,
        degree_set=spec.degree_set,
        n_u=0,
        rhs=rhs,
        multilinear={3: h3, 8: h8},
        jacobian=jacobian,
    )
    xi = (np.arange(N) + 0.5) * dxi
    s = xi / 2000.0
    x0 = 1e-2 + 630.0 * (s + 0.25) ** 4 * (s - 0.75) ** 4
    return fom, x0


def build_burgers(spec: BenchmarkSpec = BURGERS):
    """Viscous Burgers flow on the periodic interval (-1, 1).

    Diffusion is the periodic central second difference (symmetric,
    negative semi-definite).  Convection uses the split form
    ``-(1/3) (D(x*x) + x*(Dx))`` with the skew-symmetric periodic central
    first difference ``D``, which annihilates the state exactly:
    ``x . C(x) = 0`` for every ``x``.

    Returns ``(fom, x0)``.
    """
    N = spec.N
    dxi = 2.0 / N
    inv2 = 1.0 / dxi**2

    def d1(v):
        return (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * dxi)

    def d2(v):
        return (np.roll(v, -1) - 2.0 * v + np.roll(v, 1)) * inv2

    def rhs(x, u):
        return d2(x) - (1.0 / 3.0) * (d1(x * x) + x * d1(x))

    def h2(a, b):
        return -(1.0 / 3.0) * (d1(a * b) + 0.5 * (a * d1(b) + b * d1(a)))

    fom = PolynomialFOM(
        dimension=N,
        degree_set=spec.degree_set,
        n_u=0,
        rhs=rhs,
        multilinear={1: d2, 2: h2},
    )
    xi = -1.0 + dxi * np.arange(N)
    x0 = -np.sin(0.5 * np.pi * xi)
    return fom, x0
