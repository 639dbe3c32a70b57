"""Surfaces of revolution realizing embeddable profile metrics in 3-space.

An embeddable profile (``|f'| <= 2`` everywhere) becomes the surface

    (a(s) cos theta,  a(s) sin theta,  z(s)),
    z(s) = integral_0^s sqrt(1 - a'(t)^2) dt,

over the unit-speed meridian parameter ``s``; the positive branch of the
square root is fixed throughout (the other branch mirrors the surface).
:func:`embed_profile_curve` computes the generating curve on a uniform
``s``-grid — the poles are regular points of that grid, so no endpoint
singularity ever enters the quadrature — and :func:`make_mesh` revolves it
into a watertight genus-0 triangle mesh with pole fans.  The isometry is
checked, not assumed: :func:`induced_metric_residual` compares the first
fundamental form of the realized curve (derivatives taken by finite
differences, independent of how the curve was built) against the metric's
``ds^2 + a^2 dtheta^2``, and the mesh area converges to the fixed total 4*pi.

Profiles at the embeddability boundary (``|f'|`` touching 2 in the
interior) produce a tiny negative radicand through roundoff; values in
``[-tol, 0)`` are clamped to zero with :class:`GrazingClampWarning`, while
anything below ``-tol`` raises :class:`NotEmbeddableError` — consistent
with the slope test that gates this module.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .profile import Profile, arclength_recover, require_valid
from .quadrature import CumulativeIntegral

__all__ = [
    "ProfileCurve", "EmbeddingMesh", "MetricResiduals",
    "NotEmbeddableError", "MeshError", "GrazingClampWarning",
    "embed_profile_curve", "make_mesh", "mesh_area", "euler_characteristic",
    "induced_metric_residual", "export_obj", "curve_csv_text",
]


class NotEmbeddableError(ValueError):
    """Profile violates ``|f'| <= 2`` and admits no surface of revolution."""

    def __init__(self, max_slope: float, argmax_x: float):
        self.max_slope = max_slope
        self.argmax_x = argmax_x
        super().__init__(
            f"profile is not embeddable: max|f'| = {max_slope:.6g} > 2 "
            f"near x = {argmax_x:.6g} (slope criterion)")


class MeshError(ValueError):
    """Curve unusable for meshing (too short, repeated or collapsed samples)."""


class GrazingClampWarning(UserWarning):
    """The meridian grazed ``|a'| = 1`` in the interior; radicand clamped to 0."""


@dataclass(frozen=True)
class ProfileCurve:
    """Generating curve of the surface of revolution on a uniform s-grid.

    Arrays share one length: ``s`` (0 to ``length``), the generating
    coordinate ``x``, radius ``a`` (exactly 0 at both ends), height ``z``
    (0 at the south pole), and the analytic derivatives ``da = f'(x)/2``,
    ``dz = sqrt(1 - da^2)`` used to build ``z``.
    """

    s: np.ndarray
    x: np.ndarray
    a: np.ndarray
    z: np.ndarray
    da: np.ndarray
    dz: np.ndarray
    length: float


@dataclass(frozen=True)
class EmbeddingMesh:
    """Closed triangle mesh: interior vertex rings plus two pole vertices."""

    vertices: np.ndarray
    faces: np.ndarray
    curve: ProfileCurve
    n_theta: int


@dataclass(frozen=True)
class MetricResiduals:
    """Sup / RMS relative residuals of the induced metric, by component.

    ``*_ds`` covers the meridian part ``(a')^2 + (z')^2`` against 1 (unit
    speed), ``*_dtheta`` the angular part ``a^2`` against ``f``; ``sup`` and
    ``rms`` aggregate both.
    """

    sup_ds: float
    rms_ds: float
    sup_dtheta: float
    rms_dtheta: float
    sup: float
    rms: float

    def to_json_dict(self) -> dict:
        return {"sup_ds": self.sup_ds, "rms_ds": self.rms_ds,
                "sup_dtheta": self.sup_dtheta, "rms_dtheta": self.rms_dtheta,
                "sup": self.sup, "rms": self.rms}


def embed_profile_curve(p: Profile, n_samples: int = 256,
                        tol: float = 1e-8) -> ProfileCurve:
    """Generating curve ``(a(s), z(s))`` of the embedded surface.

    ``n_samples >= 16`` uniform points on ``[0, L]``.  The slope criterion
    is enforced up front (max over the curve's own samples and the dense
    validation already behind :func:`~revspec.profile.arclength_recover`);
    radicand dips in ``[-tol, 0)`` are clamped with a warning, deeper ones
    raise :class:`NotEmbeddableError`.
    """
    require_valid(p, context="embed_profile_curve")
    if n_samples < 16:
        raise ValueError("n_samples must be at least 16")
    ap = arclength_recover(p)
    L = ap.length
    s = np.linspace(0.0, L, n_samples)
    x = np.asarray(ap.x_of_s(s), dtype=float)
    x[0], x[-1] = -1.0, 1.0
    a = np.asarray(ap.a(s), dtype=float)
    a[0] = a[-1] = 0.0
    da = 0.5 * np.asarray(p.df(x), dtype=float)
    rad = 1.0 - da * da
    worst = float(np.min(rad))
    if worst < -tol:
        i = int(np.argmin(rad))
        raise NotEmbeddableError(max_slope=2.0 * abs(float(da[i])),
                                 argmax_x=float(x[i]))
    if worst < 0.0:
        warnings.warn(
            f"meridian grazes |f'| = 2 (radicand dips to {worst:.3e}); "
            f"clamping to 0", GrazingClampWarning, stacklevel=2)

    def dz_of_s(t):
        xt = np.asarray(ap.x_of_s(t), dtype=float)
        v = 1.0 - (0.5 * np.asarray(p.df(xt), dtype=float)) ** 2
        return np.sqrt(np.clip(v, 0.0, None))

    cum = CumulativeIntegral(dz_of_s, s, order=8)
    z = cum.cum.copy()
    dz = np.sqrt(np.clip(rad, 0.0, None))
    return ProfileCurve(s=s, x=x, a=a, z=z, da=da, dz=dz, length=float(L))


# ---------------------------------------------------------------------------
# meshing
# ---------------------------------------------------------------------------

def make_mesh(curve: ProfileCurve, n_theta: int = 64) -> EmbeddingMesh:
    """Revolve the curve: one vertex ring per interior sample, pole fans.

    ``n_theta >= 8`` vertices per ring.  Faces are oriented outward
    (positive enclosed volume), strips between rings are split quads.
    Vertex count is ``n_theta * (len(s) - 2) + 2``.
    """
    if n_theta < 8:
        raise ValueError("n_theta must be at least 8")
    n = curve.s.size
    if n < 3:
        raise MeshError("curve needs at least 3 samples to mesh")
    if np.any(np.diff(curve.s) <= 0.0):
        raise MeshError("curve samples repeat or run backwards in s")
    if np.any(curve.a[1:-1] <= 0.0):
        raise MeshError("curve radius collapses between the poles")

    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    ct, st = np.cos(theta), np.sin(theta)
    rings = n - 2
    verts = np.empty((n_theta * rings + 2, 3))
    for r in range(rings):
        av, zv = curve.a[r + 1], curve.z[r + 1]
        block = slice(r * n_theta, (r + 1) * n_theta)
        verts[block, 0] = av * ct
        verts[block, 1] = av * st
        verts[block, 2] = zv
    south = n_theta * rings
    north = south + 1
    verts[south] = (0.0, 0.0, curve.z[0])
    verts[north] = (0.0, 0.0, curve.z[-1])

    faces = []
    for j in range(n_theta):
        jn = (j + 1) % n_theta
        faces.append((south, jn, j))
    for r in range(rings - 1):
        lo, hi = r * n_theta, (r + 1) * n_theta
        for j in range(n_theta):
            jn = (j + 1) % n_theta
            faces.append((lo + j, lo + jn, hi + j))
            faces.append((lo + jn, hi + jn, hi + j))
    top = (rings - 1) * n_theta
    for j in range(n_theta):
        jn = (j + 1) % n_theta
        faces.append((north, top + j, top + jn))
    f = np.asarray(faces, dtype=np.int64)

    v0, v1, v2 = verts[f[:, 0]], verts[f[:, 1]], verts[f[:, 2]]
    volume6 = float(np.sum(np.einsum("ij,ij->i", v0, np.cross(v1, v2))))
    if volume6 < 0.0:
        f = f[:, ::-1]
    return EmbeddingMesh(vertices=verts, faces=np.ascontiguousarray(f),
                         curve=curve, n_theta=n_theta)


def mesh_area(mesh: EmbeddingMesh) -> float:
    v, f = mesh.vertices, mesh.faces
    cr = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
    return float(0.5 * np.sum(np.linalg.norm(cr, axis=1)))


def euler_characteristic(mesh: EmbeddingMesh) -> int:
    f = mesh.faces
    edges = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    n_edges = np.unique(edges, axis=0).shape[0]
    return int(mesh.vertices.shape[0] - n_edges + f.shape[0])


# ---------------------------------------------------------------------------
# isometry verification
# ---------------------------------------------------------------------------

def induced_metric_residual(obj: ProfileCurve | EmbeddingMesh,
                            p: Profile) -> MetricResiduals:
    """Residual of the realized first fundamental form against the metric.

    Derivatives of the sampled ``a`` and ``z`` are taken by 4th-order
    central differences on the uniform s-grid (deliberately ignoring the
    analytic derivatives stored on the curve, so construction errors cannot
    cancel), on interior samples two steps from the poles.  The meridian
    residual compares ``(a')^2 + (z')^2`` to 1; the angular residual
    compares ``a^2`` to ``f(x)`` relatively.
    """
    curve = obj.curve if isinstance(obj, EmbeddingMesh) else obj
    require_valid(p, context="induced_metric_residual")
    n = curve.s.size
    if n < 7:
        raise ValueError("curve too short for interior finite differences")
    h = curve.s[1] - curve.s[0]
    if not np.allclose(np.diff(curve.s), h, rtol=1e-9, atol=1e-12):
        raise ValueError("curve grid is not uniform")

    def d4(y):
        return (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)

    da = d4(curve.a)
    dz = d4(curve.z)
    res_ds = np.abs(da * da + dz * dz - 1.0)
    mid = slice(2, n - 2)
    fx = np.asarray(p.f(curve.x[mid]), dtype=float)
    res_th = np.abs(curve.a[mid] ** 2 - fx) / fx
    both = np.concatenate([res_ds, res_th])
    return MetricResiduals(
        sup_ds=float(np.max(res_ds)),
        rms_ds=float(np.sqrt(np.mean(res_ds ** 2))),
        sup_dtheta=float(np.max(res_th)),
        rms_dtheta=float(np.sqrt(np.mean(res_th ** 2))),
        sup=float(np.max(both)),
        rms=float(np.sqrt(np.mean(both ** 2))))


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def export_obj(mesh: EmbeddingMesh) -> bytes:
    """Mesh as OBJ text: ``v`` lines then 1-indexed ``f`` lines, LF endings,
    17 significant digits — byte-identical across runs."""
    if mesh.vertices.size == 0 or mesh.faces.size == 0:
        raise ValueError("refusing to export an empty mesh")
    lines = [f"v {vx:.17g} {vy:.17g} {vz:.17g}" for vx, vy, vz in mesh.vertices]
    lines.extend(f"f {i + 1} {j + 1} {k + 1}" for i, j, k in mesh.faces)
    return ("\n".join(lines) + "\n").encode("ascii")


def curve_csv_text(curve: ProfileCurve) -> str:
    """Curve samples as CSV (columns s, a, z) for plotting."""
    lines = ["s,a,z"]
    lines.extend(f"{s:.17g},{a:.17g},{z:.17g}"
                 for s, a, z in zip(curve.s, curve.a, curve.z))
    return "\n".join(lines) + "\n"
