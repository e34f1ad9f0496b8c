"""Weighted closed triangulations: data model, file ingestion, validation.

A surface is a closed triangulated 2-manifold given purely combinatorially
(faces as vertex triples), an inversive distance per edge, and a background
geometry tag. Edges are derived from faces, never listed by the caller.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from pathlib import Path

import numpy as np

from .errors import MeshFormatError, TopologyError, WeightError


class Geometry(enum.Enum):
    """Background geometry the faces are realized in."""

    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"


class WeightRegime(enum.Enum):
    """Allowed range for the inversive distances.

    NONNEGATIVE is the default: every weight >= 0. SIGNED admits weights
    down to (but not including) -1, subject to a per-face compatibility
    condition; see validate_weights.
    """

    NONNEGATIVE = "nonnegative"
    SIGNED = "signed"


@dataclasses.dataclass(frozen=True)
class WeightReport:
    """Outcome of a weight-regime validation. Failures are reported, not raised."""

    regime: WeightRegime
    passed: bool
    failures: tuple[str, ...] = ()


class WeightedTriangulation:
    """Closed triangulated surface with an inversive distance per edge.

    Validation happens at construction: every edge must lie in exactly two
    faces, faces must not repeat vertices or each other, the surface must be
    connected, and every edge must carry a weight.
    """

    def __init__(self, vertex_count, faces, weights, geometry=Geometry.EUCLIDEAN):
        self.vertex_count = int(vertex_count)
        self.geometry = geometry
        self.faces = np.asarray(faces, dtype=np.int64)
        if self.vertex_count <= 0:
            raise TopologyError("vertex_count must be positive")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3 or len(self.faces) == 0:
            raise TopologyError("faces must be a nonempty list of vertex triples")
        if self.faces.min() < 0 or self.faces.max() >= self.vertex_count:
            raise TopologyError("face vertex index out of range")

        self.edges, self.face_edges = self._derive_edges()
        self.weights = self._resolve_weights(weights)
        self._check_connected()

    # -- construction helpers -------------------------------------------------

    def _derive_edges(self):
        seen_faces = set()
        edge_faces: dict[tuple[int, int], int] = {}
        for f, (i, j, k) in enumerate(self.faces):
            if i == j or j == k or i == k:
                raise TopologyError(f"face {f} repeats a vertex")
            key = tuple(sorted((int(i), int(j), int(k))))
            if key in seen_faces:
                raise TopologyError(f"duplicate face {key}")
            seen_faces.add(key)
            for a, b in ((j, k), (i, k), (i, j)):
                e = (min(int(a), int(b)), max(int(a), int(b)))
                edge_faces[e] = edge_faces.get(e, 0) + 1

        bad = [e for e, n in edge_faces.items() if n != 2]
        if bad:
            e, n = bad[0], edge_faces[bad[0]]
            raise TopologyError(
                f"edge {e} lies in {n} face(s); a closed surface needs exactly 2"
            )

        edges = np.array(sorted(edge_faces), dtype=np.int64)
        self.edge_index = {tuple(e): idx for idx, e in enumerate(map(tuple, edges.tolist()))}
        # face_edges[f, c] = index of the edge opposite corner c of face f
        face_edges = np.empty_like(self.faces)
        for f, (i, j, k) in enumerate(self.faces.tolist()):
            face_edges[f, 0] = self.edge_index[(min(j, k), max(j, k))]
            face_edges[f, 1] = self.edge_index[(min(i, k), max(i, k))]
            face_edges[f, 2] = self.edge_index[(min(i, j), max(i, j))]
        return edges, face_edges

    def _resolve_weights(self, weights):
        if np.isscalar(weights):
            return np.full(len(self.edges), float(weights))
        w = np.full(len(self.edges), np.nan)
        for key, value in dict(weights).items():
            a, b = int(key[0]), int(key[1])
            e = (min(a, b), max(a, b))
            if e not in self.edge_index:
                raise WeightError(f"weight given for non-edge {e}")
            idx = self.edge_index[e]
            if not np.isnan(w[idx]):
                raise WeightError(f"duplicate weight for edge {e}")
            w[idx] = float(value)
        missing = np.nonzero(np.isnan(w))[0]
        if len(missing):
            e = tuple(self.edges[missing[0]])
            raise WeightError(f"missing weight for edge {e}")
        return w

    def _check_connected(self):
        adj = [[] for _ in range(self.vertex_count)]
        for a, b in self.edges.tolist():
            adj[a].append(b)
            adj[b].append(a)
        seen = np.zeros(self.vertex_count, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        if not seen.all():
            raise TopologyError("surface is disconnected (or has isolated vertices)")

    # -- queries ---------------------------------------------------------------

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def face_count(self):
        return len(self.faces)

    def weight_of(self, i, j):
        return float(self.weights[self.edge_index[(min(i, j), max(i, j))]])

    def face_weights(self):
        """Per-face weights aligned with face_edges: column c is the weight of
        the edge opposite corner c."""
        return self.weights[self.face_edges]

    def __repr__(self):
        return (
            f"WeightedTriangulation(V={self.vertex_count}, E={self.edge_count}, "
            f"F={self.face_count}, chi={euler_characteristic(self)}, "
            f"geometry={self.geometry.value})"
        )


def euler_characteristic(tri: WeightedTriangulation) -> int:
    return tri.vertex_count - tri.edge_count + tri.face_count


def validate_weights(tri: WeightedTriangulation, regime=WeightRegime.NONNEGATIVE) -> WeightReport:
    """Check the weights against a regime. Failures are reported, never raised.

    NONNEGATIVE: every I_ij >= 0.
    SIGNED: every I_ij > -1, and on every face (i,j,k) the three combinations
    I_ij + I_ik*I_jk, I_ik + I_ij*I_jk, I_jk + I_ij*I_ik are all >= 0.
    """
    failures = []
    if regime is WeightRegime.NONNEGATIVE:
        for e, w in zip(tri.edges.tolist(), tri.weights):
            if not w >= 0.0:
                failures.append(f"edge {tuple(e)}: weight {w} < 0")
    elif regime is WeightRegime.SIGNED:
        for e, w in zip(tri.edges.tolist(), tri.weights):
            if not w > -1.0:
                failures.append(f"edge {tuple(e)}: weight {w} <= -1")
        fw = tri.face_weights()
        for f in range(tri.face_count):
            w0, w1, w2 = fw[f]
            for combo, label in (
                (w0 + w1 * w2, "I_jk + I_ik*I_ij"),
                (w1 + w0 * w2, "I_ik + I_jk*I_ij"),
                (w2 + w0 * w1, "I_ij + I_jk*I_ik"),
            ):
                if not combo >= 0.0:
                    failures.append(
                        f"face {tuple(tri.faces[f].tolist())}: {label} = {combo} < 0"
                    )
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return WeightReport(regime=regime, passed=not failures, failures=tuple(failures))


# -- file ingestion -------------------------------------------------------------


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"{path}: invalid JSON ({exc})") from exc


def load_surface(path) -> WeightedTriangulation:
    """Load a mesh file.

    Format:
      { "geometry": "euclidean" | "hyperbolic",
        "vertex_count": N,
        "faces": [[i, j, k], ...],
        "weights": [{"edge": [i, j], "value": w}, ...]  or  {"uniform": c} }
    Indices are zero-based. An optional "regime" key names the default weight
    regime for validation tools.
    """
    data = _load_json(path)
    if not isinstance(data, dict):
        raise MeshFormatError(f"{path}: top level must be an object")
    try:
        geometry = Geometry(data["geometry"])
        vertex_count = int(data["vertex_count"])
        faces = data["faces"]
        weights_spec = data["weights"]
    except (KeyError, ValueError, TypeError) as exc:
        raise MeshFormatError(f"{path}: {exc}") from exc

    if isinstance(weights_spec, dict):
        if "uniform" not in weights_spec:
            raise MeshFormatError(f"{path}: weight object must have a 'uniform' key")
        weights = float(weights_spec["uniform"])
    elif isinstance(weights_spec, list):
        weights = {}
        for entry in weights_spec:
            try:
                i, j = entry["edge"]
                value = float(entry["value"])
            except (KeyError, ValueError, TypeError) as exc:
                raise MeshFormatError(f"{path}: bad weight entry {entry!r}") from exc
            key = (min(int(i), int(j)), max(int(i), int(j)))
            if key in weights:
                raise WeightError(f"duplicate weight for edge {key}")
            weights[key] = value
    else:
        raise MeshFormatError(f"{path}: 'weights' must be a list or a uniform object")

    return WeightedTriangulation(vertex_count, faces, weights, geometry)


def surface_regime(path_or_data) -> WeightRegime:
    """Read the optional 'regime' key of a mesh file (default NONNEGATIVE)."""
    data = _load_json(path_or_data) if not isinstance(path_or_data, dict) else path_or_data
    return WeightRegime(data.get("regime", "nonnegative"))


def load_radii(path, vertex_count=None) -> np.ndarray:
    """Load a radii file { "radii": [r_0, ..., r_{N-1}] }."""
    data = _load_json(path)
    if not isinstance(data, dict) or "radii" not in data:
        raise MeshFormatError(f"{path}: expected an object with a 'radii' key")
    radii = np.asarray(data["radii"], dtype=float)
    if radii.ndim != 1:
        raise MeshFormatError(f"{path}: radii must be a flat list")
    if vertex_count is not None and len(radii) != vertex_count:
        raise MeshFormatError(
            f"{path}: {len(radii)} radii for a surface with {vertex_count} vertices"
        )
    if not np.all(np.isfinite(radii)) or np.any(radii <= 0.0):
        raise MeshFormatError(f"{path}: radii must be finite and positive")
    return radii


def save_radii(path, radii):
    path = Path(path)
    payload = {"radii": [float(f"{r:.17g}") for r in np.asarray(radii, dtype=float)]}
    path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


# -- stock surfaces --------------------------------------------------------------

TETRA_FACES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))

# 7-vertex triangulated torus on the complete graph K7 (Csaszar/Moebius
# combinatorics): faces {i, i+1, i+3} and {i, i+2, i+3} mod 7.
CSASZAR_FACES = tuple(
    tuple(sorted(((i + a) % 7, (i + b) % 7, (i + c) % 7)))
    for i in range(7)
    for a, b, c in ((0, 1, 3), (0, 2, 3))
)


def tetrahedron(weight=2.0, geometry=Geometry.EUCLIDEAN) -> WeightedTriangulation:
    """Boundary of a tetrahedron: N=4, |E|=6, |F|=4, chi=2."""
    return WeightedTriangulation(4, TETRA_FACES, weight, geometry)


def csaszar_torus(weight=1.0, geometry=Geometry.EUCLIDEAN) -> WeightedTriangulation:
    """The 7-vertex torus: N=7, |E|=21, |F|=14, chi=0, every vertex degree 6."""
    return WeightedTriangulation(7, CSASZAR_FACES, weight, geometry)
