"""Linear and pushover analysis of planar frames.

Units: kN, m, rad. Members are Euler-Bernoulli elements; plastic behaviour is
lumped in rotational hinges at member ends (elastic-perfectly-plastic with a
small post-yield stiffness). Because gravity axial forces are frozen for the
P-Delta geometric stiffness, the response is piecewise linear and the
pushover advances event to event inside each displacement step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .frame import G, SizedFrame, member_length


class MechanismError(RuntimeError):
    """The structure is a mechanism (singular stiffness)."""


class ConvergenceError(RuntimeError):
    """A pushover step did not settle within its event limit."""


class TargetNotReached(LookupError):
    """Requested roof displacement lies beyond the recorded trace."""


@dataclass(frozen=True)
class Element:
    kind: str
    i: int
    j: int
    E: float  # kN/m2
    A: float  # m2
    I: float  # m4
    offset: float = 0.0  # horizontal rigid arm from both nodes (m)
    w: float = 0.0  # uniform gravity load, downward (kN/m)
    hinged: bool = True
    yield_pos: float = math.inf  # kN*m, sagging/positive internal moment
    yield_neg: float = math.inf  # kN*m, magnitude of negative capacity
    geometric: bool = False  # contributes P-Delta stiffness
    truss: bool = False  # moment-released at both ends (axial only)


@dataclass
class StructuralModel:
    """Nodes, supports and elements ready for assembly.

    ``levels`` lists the node ids on each floor (index 0 = base) used for
    lateral loads; ``control_nodes`` the node per level whose horizontal
    displacement defines story displacements (the last one is the roof).
    """

    nodes: np.ndarray
    fixed: np.ndarray  # bool per dof
    elements: list
    levels: list
    control_nodes: list
    heights: list  # story heights (m)
    sized: SizedFrame | None = None

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.fixed = np.asarray(self.fixed, dtype=bool)
        self._prepare()

    @property
    def ndof(self) -> int:
        return 3 * len(self.nodes)

    @property
    def n_stories(self) -> int:
        return len(self.heights)

    def _prepare(self) -> None:
        ne = len(self.elements)
        self.L = np.zeros(ne)
        self.EA = np.zeros(ne)
        self.EI = np.zeros(ne)
        self.Ae = np.zeros((ne, 6, 6))
        self.B = np.zeros((ne, 3, 6))
        self.dofs = np.zeros((ne, 6), dtype=int)
        self.w = np.zeros(ne)
        self.cos = np.zeros(ne)
        self.hinged = np.zeros(ne, dtype=bool)
        self.geometric = np.zeros(ne, dtype=bool)
        self.truss = np.zeros(ne, dtype=bool)
        for k, el in enumerate(self.elements):
            pi = self.nodes[el.i] + (el.offset, 0.0)
            pj = self.nodes[el.j] + (el.offset, 0.0)
            d = pj - pi
            L = float(np.hypot(*d))
            if L <= 0:
                raise ValueError(f"element {k} has zero length")
            c, s = d / L
            R = np.array([[c, s, 0], [-s, c, 0], [0, 0, 1.0]])
            off = np.array([[1, 0, 0], [0, 1, el.offset], [0, 0, 1.0]])
            blk = R @ off
            Ae = np.zeros((6, 6))
            Ae[:3, :3] = blk
            Ae[3:, 3:] = blk
            Tb = np.array([[-1, 0, 0, 1, 0, 0],
                           [0, 1 / L, 1, 0, -1 / L, 0],
                           [0, 1 / L, 0, 0, -1 / L, 1]])
            self.L[k], self.EA[k], self.EI[k] = L, el.E * el.A, el.E * el.I
            self.Ae[k] = Ae
            self.B[k] = Tb @ Ae
            self.dofs[k] = [3 * el.i, 3 * el.i + 1, 3 * el.i + 2, 3 * el.j, 3 * el.j + 1, 3 * el.j + 2]
            self.w[k] = el.w
            self.cos[k] = c
            self.hinged[k] = el.hinged
            self.geometric[k] = el.geometric
            self.truss[k] = el.truss
        self.free = np.flatnonzero(~self.fixed)

    # -- element matrices -----------------------------------------------------

    def basic_stiffness(self, soft: np.ndarray | None = None, alpha: float = 1e-3) -> np.ndarray:
        """Basic stiffness (ne, 3, 3); ``soft`` flags yielded ends (ne, 2)."""
        ne = len(self.elements)
        L, EI = self.L, self.EI
        f = np.zeros((ne, 2, 2))
        f[:, 0, 0] = f[:, 1, 1] = 2 * L / (6 * EI)
        f[:, 0, 1] = f[:, 1, 0] = -L / (6 * EI)
        if soft is not None and soft.any():
            fh = hinge_flexibility(L, EI, alpha)
            f[:, 0, 0] += np.where(soft[:, 0], fh, 0.0)
            f[:, 1, 1] += np.where(soft[:, 1], fh, 0.0)
        det = f[:, 0, 0] * f[:, 1, 1] - f[:, 0, 1] * f[:, 1, 0]
        kb = np.zeros((ne, 3, 3))
        kb[:, 0, 0] = self.EA / L
        kb[:, 1, 1] = f[:, 1, 1] / det
        kb[:, 2, 2] = f[:, 0, 0] / det
        kb[:, 1, 2] = kb[:, 2, 1] = -f[:, 0, 1] / det
        kb[self.truss, 1:, 1:] = 0.0
        return kb

    def geometric_stiffness(self, axial: np.ndarray) -> np.ndarray:
        """Global P-Delta stiffness per element (ne, 6, 6); ``axial`` tension +."""
        ne = len(self.elements)
        kg = np.zeros((ne, 6, 6))
        n = np.where(self.geometric, axial / self.L, 0.0)
        kg[:, 1, 1] = kg[:, 4, 4] = n
        kg[:, 1, 4] = kg[:, 4, 1] = -n
        return np.einsum("eai,eab,ebj->eij", self.Ae, kg, self.Ae)

    def assemble(self, kb: np.ndarray, kg_global: np.ndarray | None = None) -> np.ndarray:
        Ke = np.einsum("eai,eab,ebj->eij", self.B, kb, self.B)
        if kg_global is not None:
            Ke = Ke + kg_global
        K = np.zeros((self.ndof, self.ndof))
        np.add.at(K, (self.dofs[:, :, None], self.dofs[:, None, :]), Ke)
        return K

    def fixed_end_basic(self) -> np.ndarray:
        """Basic end moments of fully fixed members under their line loads."""
        q0 = np.zeros((len(self.elements), 3))
        qy = -self.w * self.cos  # local transverse load intensity
        q0[:, 1] = -qy * self.L**2 / 12
        q0[:, 2] = qy * self.L**2 / 12
        return q0

    def equivalent_nodal_loads(self, w: np.ndarray | None = None) -> np.ndarray:
        w = self.w if w is None else w
        qy = -w * self.cos
        L = self.L
        p0 = np.zeros((len(self.elements), 6))
        p0[:, 1] = p0[:, 4] = -qy * L / 2
        p0[:, 2] = -qy * L**2 / 12
        p0[:, 5] = qy * L**2 / 12
        F = np.zeros(self.ndof)
        np.add.at(F, self.dofs, -np.einsum("eai,ea->ei", self.Ae, p0))
        return F

    def element_displacements(self, u: np.ndarray) -> np.ndarray:
        return u[self.dofs]

    def basic_deformations(self, u: np.ndarray) -> np.ndarray:
        return np.einsum("eaj,ej->ea", self.B, u[self.dofs])

    def floor_displacements(self, u: np.ndarray) -> np.ndarray:
        """Horizontal displacement of the control node at levels 1..n."""
        return np.array([u[3 * n] for n in self.control_nodes[1:]])

    @property
    def control_dof(self) -> int:
        return 3 * self.control_nodes[-1]


def hinge_flexibility(L, EI, alpha: float):
    """Rotational flexibility of a yielded hinge.

    Chosen so a cantilever hinged at its base keeps ``alpha`` times its
    elastic lateral stiffness: ``k_h = alpha / (1 - alpha) * 3 EI / L``.
    """
    return (1 - alpha) / alpha * L / (3 * EI)


def _factor(Kff: np.ndarray):
    try:
        return cho_factor(Kff, check_finite=False)
    except LinAlgError:
        return None


# -- loads --------------------------------------------------------------------


@dataclass
class LoadCase:
    nodal: np.ndarray  # (ndof,)
    w: np.ndarray  # (ne,) uniform downward line loads

    def scaled(self, f: float) -> "LoadCase":
        return LoadCase(self.nodal * f, self.w * f)

    def __add__(self, other: "LoadCase") -> "LoadCase":
        return LoadCase(self.nodal + other.nodal, self.w + other.w)

    @classmethod
    def zeros(cls, system: StructuralModel) -> "LoadCase":
        return cls(np.zeros(system.ndof), np.zeros(len(system.elements)))


def combine(results: Sequence["LinearResult"], factors: Sequence[float]) -> "LinearResult":
    """Superpose linear results with the given factors."""
    pairs = list(zip(factors, results))
    return LinearResult(sum(f * r.u for f, r in pairs), sum(f * r.q for f, r in pairs),
                        sum(f * r.end_forces for f, r in pairs), results[0].system,
                        sum(f * r.w for f, r in pairs))


@dataclass
class LinearResult:
    u: np.ndarray  # (ndof,)
    q: np.ndarray  # basic forces (ne, 3): axial (tension +), end moments
    end_forces: np.ndarray  # local end forces (ne, 6)
    system: StructuralModel
    w: np.ndarray | None = None  # line loads the result was solved with

    def __post_init__(self):
        if self.w is None:
            self.w = np.zeros(len(self.system.elements))

    @property
    def displacements(self) -> np.ndarray:
        return self.u.reshape(-1, 3)

    @property
    def axial(self) -> np.ndarray:
        """Axial force, compression positive."""
        return -self.q[:, 0]

    @property
    def end_moments(self) -> np.ndarray:
        """Internal end moments (ne, 2), sagging positive."""
        return np.column_stack([-self.q[:, 1], self.q[:, 2]])

    @property
    def shear(self) -> np.ndarray:
        return np.maximum(np.abs(self.end_forces[:, 1]), np.abs(self.end_forces[:, 4]))

    def span_moments(self, n: int = 21) -> np.ndarray:
        """Internal moment at ``n`` points along every member (ne, n)."""
        s = self.system
        x = np.linspace(0.0, 1.0, n)
        m = self.end_moments
        wl2 = (self.w * s.cos * s.L**2)[:, None]
        return m[:, :1] * (1 - x) + m[:, 1:] * x + wl2 * x * (1 - x) / 2


def end_forces_from_basic(system: StructuralModel, q: np.ndarray, w: np.ndarray | None = None) -> np.ndarray:
    w = system.w if w is None else w
    L = system.L
    qy = -w * system.cos
    f = np.zeros((len(system.elements), 6))
    shear = (q[:, 1] + q[:, 2]) / L
    f[:, 0] = -q[:, 0]
    f[:, 1] = shear - qy * L / 2
    f[:, 2] = q[:, 1]
    f[:, 3] = q[:, 0]
    f[:, 4] = -shear - qy * L / 2
    f[:, 5] = q[:, 2]
    return f


def linear_static(system, loads: LoadCase | None = None) -> LinearResult:
    """Direct-stiffness solution with all hinges elastic and no P-Delta.

    Raises :class:`MechanismError` when the reduced stiffness is singular.
    """
    if isinstance(system, SizedFrame):
        system = build_system(system)
    loads = loads or LoadCase.zeros(system)
    kb = system.basic_stiffness()
    K = system.assemble(kb)
    F = loads.nodal + system.equivalent_nodal_loads(loads.w)
    fr = system.free
    fac = _factor(K[np.ix_(fr, fr)])
    if fac is None:
        raise MechanismError("stiffness matrix is singular")
    u = np.zeros(system.ndof)
    u[fr] = cho_solve(fac, F[fr], check_finite=False)
    q = np.einsum("eab,eb->ea", kb, system.basic_deformations(u))
    qy = -loads.w * system.cos
    q[:, 1] += -qy * system.L**2 / 12
    q[:, 2] += qy * system.L**2 / 12
    return LinearResult(u, q, end_forces_from_basic(system, q, loads.w), system, loads.w)


def solve_many(system: StructuralModel, cases: Sequence[LoadCase]) -> list[LinearResult]:
    """Several load cases against one factorization."""
    kb = system.basic_stiffness()
    K = system.assemble(kb)
    fr = system.free
    fac = _factor(K[np.ix_(fr, fr)])
    if fac is None:
        raise MechanismError("stiffness matrix is singular")
    out = []
    for lc in cases:
        F = lc.nodal + system.equivalent_nodal_loads(lc.w)
        u = np.zeros(system.ndof)
        u[fr] = cho_solve(fac, F[fr], check_finite=False)
        q = np.einsum("eab,eb->ea", kb, system.basic_deformations(u))
        qy = -lc.w * system.cos
        q[:, 1] += -qy * system.L**2 / 12
        q[:, 2] += qy * system.L**2 / 12
        out.append(LinearResult(u, q, end_forces_from_basic(system, q, lc.w), system, lc.w))
    return out


# -- building a system from a sized frame ---------------------------------------


def build_system(sized: SizedFrame, link_factor: float = 10.0, wall_arms: bool = False) -> StructuralModel:
    """Translate a sized frame into analysis elements.

    Walls act as wide columns on the bay's left column line; with
    ``wall_arms`` they sit at the bay centreline on rigid arms instead, which
    couples the frame columns into the wall's flexure. Links (the floor of a
    wall bay) are axial-only with ``link_factor`` times the largest member
    area in the frame.
    """
    model, mat = sized.model, sized.materials
    E = mat.E_c * 1e3
    props = []
    for k, m in enumerate(model.members):
        cap = sized.capacities[k]
        if cap is None:
            props.append(None)
        else:
            props.append((cap.A_g * 1e-6, cap.I_eff * 1e-12))
    a_max = max(p[0] for p in props if p)
    i_max = max(p[1] for p in props if p)
    elements = []
    for k, m in enumerate(model.members):
        if m.kind == "link":
            elements.append(Element("link", m.i, m.j, E, link_factor * a_max, i_max,
                                    hinged=False, truss=True))
        else:
            A, I = props[k]
            offset = m.offset if wall_arms else 0.0
            elements.append(Element(m.kind, m.i, m.j, E, A, I, offset=offset,
                                    geometric=m.kind in ("column", "wall")))
    fixed = np.zeros(3 * len(model.nodes), dtype=bool)
    for n in model.level_nodes(0):
        fixed[3 * n:3 * n + 3] = True
    levels = [model.level_nodes(k) for k in range(model.n_stories + 1)]
    control = [model.node_at(k, 0) for k in range(model.n_stories + 1)]
    return StructuralModel(np.array(model.nodes), fixed, elements, levels, control,
                           [s.height for s in model.stories], sized)


def gravity_cases(system: StructuralModel) -> tuple[LoadCase, LoadCase]:
    """Dead (floor load plus self weight) and live load cases."""
    sized = system.sized
    model, mat = sized.model, sized.materials
    D, L = LoadCase.zeros(system), LoadCase.zeros(system)

    def point(lc, node, P, arm):
        lc.nodal[3 * node + 1] -= P
        lc.nodal[3 * node + 2] -= P * arm

    for k, m in enumerate(model.members):
        el = system.elements[k]
        story = model.stories[m.story]
        a_c, a_s = sized.member_areas(k)
        self_w = (mat.rho_concrete * a_c + mat.rho_steel * a_s) * G / 1000.0  # kN/m
        length = member_length(model, m)
        if m.kind == "beam":
            D.w[k] = story.dead * story.tributary_width + self_w
            L.w[k] = story.live * story.tributary_width
        elif m.kind == "link":
            bay = model.bays[m.bay - 1]
            # the wall-bay floor spans onto both column lines
            for n in (m.i, m.j):
                point(D, n, story.dead * story.tributary_width * bay / 2, 0.0)
                point(L, n, story.live * story.tributary_width * bay / 2, 0.0)
        else:
            half = self_w * length / 2
            for n in (m.i, m.j):
                point(D, n, half, el.offset)
    return D, L


def level_masses(system: StructuralModel, dead: LoadCase) -> np.ndarray:
    """Seismic mass per floor (kN*s^2/m) from the dead-load case."""
    F = dead.nodal + system.equivalent_nodal_loads(dead.w)
    return np.array([-sum(F[3 * n + 1] for n in nodes) / G for nodes in system.levels[1:]])


def lateral_pattern(masses: Sequence[float], elevations: Sequence[float]) -> np.ndarray:
    """Inverted-triangular story forces proportional to ``m_k * h_k``, unit sum."""
    mh = np.asarray(masses, float) * np.asarray(elevations, float)
    total = mh.sum()
    if total == 0:
        return np.zeros_like(mh)
    return mh / total


def frame_lateral_pattern(system: StructuralModel, dead: LoadCase | None = None) -> np.ndarray:
    dead = dead or gravity_cases(system)[0]
    return lateral_pattern(level_masses(system, dead), np.cumsum(system.heights))


def lateral_case(system: StructuralModel, story_forces: Sequence[float]) -> LoadCase:
    """Story forces shared equally by the nodes of each floor."""
    lc = LoadCase.zeros(system)
    for f, nodes in zip(story_forces, system.levels[1:]):
        for n in nodes:
            lc.nodal[3 * n] += f / len(nodes)
    return lc


def yield_moments(system: StructuralModel, axial: np.ndarray) -> np.ndarray:
    """Hinge yield moments (ne, 2) for positive and negative bending.

    Columns and walls read their interaction diagram at the gravity axial
    load (compression +); beams use their two flexural strengths.
    """
    sized = system.sized
    out = np.full((len(system.elements), 2), np.inf)
    for k, el in enumerate(system.elements):
        if sized is None:
            out[k] = (el.yield_pos, el.yield_neg)
            continue
        cap = sized.capacities[k]
        if cap is None or not el.hinged:
            continue
        if el.kind == "beam":
            out[k] = (cap.M_n_pos, cap.M_n_neg)
        else:
            m = max(cap.interaction.moment_at(float(axial[k])), 0.0)
            out[k] = (m, m)
    return out


# -- pushover -----------------------------------------------------------------


@dataclass(frozen=True)
class PushoverControl:
    target: float  # roof displacement (m)
    step: float | None = None  # default target / 200
    max_steps: int = 1000
    max_events: int = 200  # hinge events per step
    alpha: float = 1e-3  # post-yield stiffness ratio
    p_delta: bool = True

    @property
    def increment(self) -> float:
        return self.step if self.step else self.target / 200.0


@dataclass
class PushoverStep:
    load_factor: float
    base_shear: float
    roof: float
    story_displacements: np.ndarray
    drifts: np.ndarray
    hinge_rotations: np.ndarray
    yielded: np.ndarray


@dataclass
class PushoverTrace:
    """Capacity curve and response history of one pushover run.

    Displacements are measured from the gravity state. ``rotations`` holds
    plastic hinge rotations (ne, 2) per step; ``moments`` the internal end
    moments, ``shear`` and ``axial`` (compression +) the member forces.
    """

    load_factor: np.ndarray
    base_shear: np.ndarray
    roof: np.ndarray
    story_disp: np.ndarray  # (n_steps, n_stories)
    drifts: np.ndarray
    rotations: np.ndarray  # (n_steps, ne, 2)
    moments: np.ndarray
    shear: np.ndarray  # (n_steps, ne)
    axial: np.ndarray
    yielded: np.ndarray  # (n_steps, ne, 2) bool
    heights: np.ndarray
    status: str = "target"
    unit_story_disp: np.ndarray | None = None  # elastic floor shape per unit base shear
    gravity_axial: np.ndarray | None = None
    yield_moments: np.ndarray | None = None

    @property
    def n_steps(self) -> int:
        return len(self.roof)

    @property
    def steps(self) -> list[PushoverStep]:
        return [self.step(k) for k in range(self.n_steps)]

    def step(self, k: int) -> PushoverStep:
        return PushoverStep(float(self.load_factor[k]), float(self.base_shear[k]), float(self.roof[k]),
                            self.story_disp[k], self.drifts[k], self.rotations[k], self.yielded[k])

    @property
    def max_roof(self) -> float:
        return float(self.roof[-1])


@dataclass
class _State:
    u: np.ndarray
    q: np.ndarray
    lam: float
    theta: np.ndarray
    soft: np.ndarray
    sign: np.ndarray


def pushover(system: StructuralModel, gravity: LoadCase | None, pattern: Sequence[float],
             control: PushoverControl, yields: np.ndarray | None = None) -> PushoverTrace:
    """Displacement-controlled pushover under a fixed story force pattern.

    Gravity is applied first as a linear elastic state and held. Hinges whose
    gravity moment already reaches yield start in the yielded state. The run
    stops at the target roof displacement, after ``max_steps``, or when the
    tangent stiffness stops being positive definite (status
    ``'instability'``).
    """
    gravity = gravity or LoadCase.zeros(system)
    pattern = np.asarray(pattern, dtype=float)
    base = linear_static(system, gravity)
    axial_g = base.axial
    if yields is None:
        yields = yield_moments(system, axial_g)
    kg = system.geometric_stiffness(-axial_g) if control.p_delta else None
    ne = len(system.elements)
    hinge_ok = system.hinged[:, None] & np.isfinite(yields)

    m0 = base.end_moments
    upper = yields[:, 0:1] * np.ones((1, 2))
    lower = -yields[:, 1:2] * np.ones((1, 2))
    soft = hinge_ok & ((m0 >= upper) | (m0 <= lower))
    sign = np.where(m0 >= 0, 1.0, -1.0)

    st = _State(base.u.copy(), base.q.copy(), 0.0, np.zeros((ne, 2)), soft, sign)
    F = lateral_case(system, pattern).nodal
    fr = system.free
    ctrl = system.control_dof
    u_g = base.u.copy()
    w = system.w

    rec: dict[str, list] = {k: [] for k in ("lam", "roof", "story", "rot", "mom", "shear", "axial", "yld")}

    def record():
        floors = system.floor_displacements(st.u - u_g)
        rec["lam"].append(st.lam)
        rec["roof"].append(st.u[ctrl] - u_g[ctrl])
        rec["story"].append(floors)
        rec["rot"].append(np.abs(st.theta))
        m = np.column_stack([-st.q[:, 1], st.q[:, 2]])
        rec["mom"].append(m)
        rec["shear"].append(np.abs(st.q[:, 1] + st.q[:, 2]) / system.L + np.abs(w * system.cos) * system.L / 2)
        rec["axial"].append(-st.q[:, 0])
        rec["yld"].append(st.soft.copy())

    record()
    status = "target"
    unit_shape = None

    def finish(status):
        story = np.array(rec["story"])
        heights = np.asarray(system.heights)
        prev = np.hstack([np.zeros((len(story), 1)), story[:, :-1]])
        drifts = (story - prev) / heights
        lam = np.array(rec["lam"])
        return PushoverTrace(lam, lam * pattern.sum(), np.array(rec["roof"]), story, drifts,
                             np.array(rec["rot"]), np.array(rec["mom"]), np.array(rec["shear"]),
                             np.array(rec["axial"]), np.array(rec["yld"]), heights, status,
                             unit_shape, axial_g, yields)

    if not np.any(pattern):
        return finish("zero_pattern")

    cache: dict = {}

    def rates():
        key = st.soft.tobytes()
        if key not in cache:
            kb = system.basic_stiffness(st.soft, control.alpha)
            K = system.assemble(kb, kg)
            fac = _factor(K[np.ix_(fr, fr)])
            if fac is None:
                cache[key] = None
            else:
                u = np.zeros(system.ndof)
                u[fr] = cho_solve(fac, F[fr], check_finite=False)
                cache[key] = (kb, u)
            if len(cache) > 64:
                cache.pop(next(iter(cache)))
        hit = cache[key]
        if hit is None:
            return None
        kb, uF = hit
        if uF[ctrl] <= 0:
            return None
        du = uF / uF[ctrl]
        dq = np.einsum("eab,eb->ea", kb, system.basic_deformations(du))
        dm = np.column_stack([-dq[:, 1], dq[:, 2]])
        return du, 1.0 / uF[ctrl], dq, dm, uF

    fh = hinge_flexibility(system.L, system.EI, control.alpha)[:, None]
    inc = control.increment
    tol = 1e-12 * max(inc, 1e-12)

    for _ in range(control.max_steps):
        done = st.u[ctrl] - u_g[ctrl]
        if done >= control.target - tol:
            break
        remaining = min(inc, control.target - done)
        events = 0
        stuck = np.zeros_like(st.soft)
        while remaining > tol:
            r = rates()
            if r is None:
                status = "instability"
                break
            du, dlam, dq, dm, uF = r
            if unit_shape is None:
                unit_shape = system.floor_displacements(uF)
            unloading = st.soft & (dm * st.sign < 0) & ~stuck
            if unloading.any():
                st.soft = st.soft & ~unloading
                r2 = rates()
                if r2 is not None:
                    back = unloading & (r2[3] * st.sign > 0)
                    if back.any():
                        st.soft = st.soft | back
                        stuck |= back
                events += 1
                if events > control.max_events:
                    raise ConvergenceError("hinge state did not settle within the event limit")
                continue
            m = np.column_stack([-st.q[:, 1], st.q[:, 2]])
            elastic = hinge_ok & ~st.soft
            with np.errstate(divide="ignore", invalid="ignore"):
                s_up = np.where(dm > 0, (upper - m) / dm, np.inf)
                s_lo = np.where(dm < 0, (lower - m) / dm, np.inf)
            s_ev = np.where(elastic, np.minimum(s_up, s_lo), np.inf)
            s_ev = np.maximum(s_ev, 0.0)
            s_min = float(s_ev.min()) if s_ev.size else np.inf
            s = min(s_min, remaining)
            if st.lam + s * dlam < 0:
                status = "instability"
                break
            st.u = st.u + s * du
            st.q = st.q + s * dq
            st.lam += s * dlam
            st.theta = st.theta + np.where(st.soft, fh * s * dm, 0.0)
            remaining -= s
            if s_min <= s + tol and np.isfinite(s_min):
                newly = elastic & (s_ev <= s_min + 1e-12 * max(1.0, s_min))
                st.soft = st.soft | newly
                st.sign = np.where(newly, np.where(dm >= 0, 1.0, -1.0), st.sign)
                events += 1
                if events > control.max_events:
                    raise ConvergenceError("too many hinge events in one step")
        record()
        if status == "instability":
            break
    else:
        if rec["roof"][-1] < control.target - tol:
            status = "max_steps"
    return finish(status)


# -- target displacement ----------------------------------------------------------


@dataclass(frozen=True)
class TargetDisplacementInputs:
    C0: float
    C1: float
    C2: float
    C3: float
    S_a: float  # g
    T_e: float  # s
    g: float = G


def effective_period(T_i: float, K_i: float, K_e: float) -> float:
    if T_i <= 0 or K_i <= 0 or K_e <= 0:
        raise ValueError("period and stiffnesses must be positive")
    if K_e > K_i * (1 + 1e-9):
        warnings.warn("effective stiffness exceeds initial stiffness", RuntimeWarning, stacklevel=2)
    return T_i * math.sqrt(K_i / K_e)


def target_displacement(inputs: TargetDisplacementInputs) -> float:
    """Roof displacement demand (m) by the displacement coefficient method."""
    c = inputs
    for name in ("C0", "C1", "C2", "C3", "S_a", "T_e", "g"):
        if getattr(c, name) < 0:
            raise ValueError(f"{name} must not be negative")
    return c.C0 * c.C1 * c.C2 * c.C3 * c.S_a * c.T_e**2 / (4 * math.pi**2) * c.g


def c0_factor(n_stories: int) -> float:
    """Roof-to-SDOF modification factor by story count (shear building)."""
    if n_stories >= 10:
        return 1.5
    if n_stories >= 5:
        return 1.4
    if n_stories >= 3:
        return 1.3
    if n_stories == 2:
        return 1.2
    return 1.0


def rayleigh_period(masses: Sequence[float], forces: Sequence[float], displacements: Sequence[float]) -> float:
    m, f, u = (np.asarray(a, float) for a in (masses, forces, displacements))
    den = float(f @ u)
    if den <= 0:
        raise ValueError("lateral work must be positive")
    return 2 * math.pi * math.sqrt(float(m @ u**2) / den)


@dataclass(frozen=True)
class CurveProperties:
    K_i: float
    K_e: float
    V_y: float


def curve_properties(trace: PushoverTrace, fraction: float = 0.6) -> CurveProperties:
    """Initial stiffness, effective secant stiffness at ``fraction * V_y``.

    ``V_y`` is the peak base shear on the trace.
    """
    if trace.n_steps < 2 or trace.roof[1] <= 0:
        raise ValueError("trace has no lateral response")
    V, d = trace.base_shear, trace.roof
    K_i = V[1] / d[1]
    V_y = float(V.max())
    target = fraction * V_y
    k = int(np.argmax(V >= target))
    if k == 0:
        return CurveProperties(K_i, K_i, V_y)
    d_t = d[k - 1] + (target - V[k - 1]) * (d[k] - d[k - 1]) / (V[k] - V[k - 1])
    K_e = target / d_t if d_t > 0 else K_i
    return CurveProperties(K_i, K_e, V_y)


@dataclass
class ResponseState:
    roof: float
    base_shear: float
    story_displacements: np.ndarray
    drifts: np.ndarray
    rotations: np.ndarray
    shear: np.ndarray
    axial: np.ndarray
    moments: np.ndarray


def state_at(trace: PushoverTrace, roof_displacement: float) -> ResponseState:
    """Response at a roof displacement, interpolating between bracketing steps."""
    d = trace.roof
    if roof_displacement < d[0] - 1e-12 or roof_displacement > d[-1] + 1e-12 * max(1.0, abs(d[-1])):
        raise TargetNotReached(f"roof displacement {roof_displacement:.6g} m outside the trace "
                               f"(max {d[-1]:.6g} m)")
    exact = np.flatnonzero(np.isclose(d, roof_displacement, rtol=0, atol=1e-15))
    if exact.size:
        k = int(exact[0])
        return ResponseState(float(d[k]), float(trace.base_shear[k]), trace.story_disp[k], trace.drifts[k],
                             trace.rotations[k], trace.shear[k], trace.axial[k], trace.moments[k])
    k = int(np.searchsorted(d, roof_displacement))
    k = min(max(k, 1), len(d) - 1)
    t = (roof_displacement - d[k - 1]) / (d[k] - d[k - 1])

    def lerp(a):
        return a[k - 1] + t * (a[k] - a[k - 1])

    return ResponseState(float(roof_displacement), float(lerp(trace.base_shear)), lerp(trace.story_disp),
                         lerp(trace.drifts), lerp(trace.rotations), lerp(trace.shear), lerp(trace.axial),
                         lerp(trace.moments))


def drifts_from_displacements(displacements: Sequence[float], heights: Sequence[float]) -> np.ndarray:
    u = np.asarray(displacements, float)
    prev = np.concatenate([[0.0], u[:-1]])
    return (u - prev) / np.asarray(heights, float)
