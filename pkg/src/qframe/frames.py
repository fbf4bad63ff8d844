"""Reference-frame fields generated by iterated gauge transformations.

Each frame carries the gauge that leads into it from its parent. A frame
sees the numbers of its descendants through the composite gauge along the
path, and never sees its ancestors. Fields come in four shapes:

``finite(k)``
    a root plus at most ``k`` generations of spawned frames;
``one-way``
    a root with unbounded descendants;
``two-way``
    no root: every frame has a parent, materialized on demand with an
    identity incoming gauge;
``cyclic(k)``
    stages run modulo ``k``; spawning from stage ``k-1`` closes the loop
    back onto the seed frame and records the closing edge.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
import hashlib
import json
import threading

from .gauge import GaugeTransform, apply_gauge, compose
from .states import RawStringState, StringRational
from .superpose import Superposition

KINDS = ("finite", "one-way", "two-way", "cyclic")
SEED_ID = "F"


class TopologyError(ValueError):
    pass


class PathError(ValueError):
    pass


class VisibilityError(PathError):
    pass


@dataclass(frozen=True)
class Topology:
    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TopologyError(f"unknown topology {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("finite", "cyclic"):
            if self.k is None or self.k < 1:
                raise TopologyError(f"{self.kind} topology needs k >= 1")
        elif self.k is not None:
            raise TopologyError(f"{self.kind} topology takes no k")

    @classmethod
    def parse(cls, text: str, k: int | None = None) -> "Topology":
        """Accepts ``cyclic:4`` or a bare kind with ``k`` given separately."""
        kind, _, rest = text.partition(":")
        return cls(kind, int(rest) if rest else k)

    def __str__(self) -> str:
        return self.kind if self.k is None else f"{self.kind}:{self.k}"


@dataclass(frozen=True, eq=False)
class Frame:
    id: str
    stage: int
    gauge: GaugeTransform = field(default_factory=GaugeTransform.identity, repr=False)
    parent: str | None = None

    def __eq__(self, other):
        return isinstance(other, Frame) and self.id == other.id

    def __hash__(self):
        return hash(self.id)


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    gauge: GaugeTransform
    kind: str = "spawn"  # "spawn", "close" (cycle wrap) or "ancestor" (two-way backfill)


def _digest(*parts: str) -> str:
    return hashlib.sha256("\x1f".join(parts).encode()).hexdigest()[:16]


class FrameField:
    """Append-only, lazily grown frame graph.

    ``ancestor_visibility`` set (the default) forbids viewing any frame
    from which the observer is reachable, which in a closed cycle rules out
    every cross-frame view. Clearing it leaves only the forward-reachability
    requirement.
    """

    def __init__(self, topology: Topology | str, k: int | None = None, *,
                 ancestor_visibility: bool = True):
        self.topology = topology if isinstance(topology, Topology) else Topology.parse(topology, k)
        self.ancestor_visibility = ancestor_visibility
        self._frames: dict[str, Frame] = {}
        self._children: dict[str, list[Edge]] = {}
        self._edges: list[Edge] = []
        self._spawned: dict[tuple[str, str], str] = {}
        self._lock = threading.RLock()
        two_way = self.topology.kind == "two-way"
        self._add(Frame(SEED_ID, 0, parent=self._ancestor_id(SEED_ID) if two_way else None))

    # -- structure ----------------------------------------------------

    @property
    def seed(self) -> Frame:
        return self._frames[SEED_ID]

    @property
    def root(self) -> Frame | None:
        """The single ancestor-free frame, present for finite and one-way fields."""
        return self.seed if self.topology.kind in ("finite", "one-way") else None

    def __getitem__(self, frame_id: str) -> Frame:
        try:
            return self._frames[frame_id]
        except KeyError:
            raise PathError(f"no frame with id {frame_id!r}") from None

    def __contains__(self, frame_id) -> bool:
        return frame_id in self._frames

    def __len__(self) -> int:
        return len(self._frames)

    def frames(self) -> list[Frame]:
        return list(self._frames.values())

    @property
    def edges(self) -> list[Edge]:
        return list(self._edges)

    def _add(self, frame: Frame) -> Frame:
        self._frames[frame.id] = frame
        self._children.setdefault(frame.id, [])
        return frame

    def _link(self, edge: Edge) -> None:
        self._edges.append(edge)
        self._children.setdefault(edge.source, []).append(edge)

    @staticmethod
    def _ancestor_id(frame_id: str) -> str:
        return "A." + _digest("ancestor", frame_id)

    def _resolve(self, frame) -> Frame:
        return self[frame] if isinstance(frame, str) else self[frame.id]

    # -- growth -------------------------------------------------------

    def spawn(self, parent: Frame | str, U: GaugeTransform) -> Frame:
        """Frame reached from ``parent`` through ``U``; repeated calls return the same frame."""
        with self._lock:
            parent = self._resolve(parent)
            key = (parent.id, U.fingerprint())
            if key in self._spawned:
                return self._frames[self._spawned[key]]
            topo = self.topology
            if topo.kind == "finite" and parent.stage >= topo.k:
                raise TopologyError(f"finite({topo.k}) field has no stage beyond {topo.k}")
            if topo.kind == "cyclic" and parent.stage == topo.k - 1:
                child = self.seed
                self._link(Edge(parent.id, child.id, U, "close"))
            else:
                stage = parent.stage + 1
                child = self._add(Frame("F." + _digest(parent.id, key[1]), stage, U, parent.id))
                self._link(Edge(parent.id, child.id, U))
            self._spawned[key] = child.id
            return child

    def parent(self, frame: Frame | str) -> Frame | None:
        """Tree parent; in a two-way field a missing parent is created on demand."""
        with self._lock:
            frame = self._resolve(frame)
            if frame.parent is None:
                return None
            if frame.parent not in self._frames:
                anc = Frame(frame.parent, frame.stage - 1, parent=self._ancestor_id(frame.parent))
                self._add(anc)
                self._link(Edge(anc.id, frame.id, frame.gauge, "ancestor"))
            return self._frames[frame.parent]

    # -- paths ----------------------------------------------------------

    def _tree_path(self, a: Frame, b: Frame) -> list[Edge] | None:
        steps = b.stage - a.stage
        if steps < 0:
            return None
        path, cur = [], b
        for _ in range(steps):
            par = self.parent(cur)
            if par is None:
                return None
            path.append(Edge(par.id, cur.id, cur.gauge))
            cur = par
        return path[::-1] if cur.id == a.id else None

    def _forward_path(self, a: Frame, b: Frame, *, proper: bool) -> list[Edge] | None:
        # Breadth-first along iteration direction; edges in insertion order.
        start = [[e] for e in self._children.get(a.id, [])] if proper else [[]]
        if not proper and a.id == b.id:
            return []
        queue, seen = deque(start), set()
        while queue:
            path = queue.popleft()
            node = path[-1].target if path else a.id
            if path and node == b.id:
                return path
            if node in seen:
                continue
            seen.add(node)
            for e in self._children.get(node, []):
                queue.append(path + [e])
        return None

    def path(self, ancestor: Frame | str, descendant: Frame | str) -> list[Edge]:
        a, b = self._resolve(ancestor), self._resolve(descendant)
        if a.id == b.id:
            return []
        if self.topology.kind == "cyclic":
            p = self._forward_path(a, b, proper=True)
        else:
            p = self._tree_path(a, b)
        if p is None:
            raise PathError(f"frame {b.id} is not reachable from {a.id}")
        return p

    @staticmethod
    def _compose_edges(edges: list[Edge]) -> GaugeTransform:
        total = GaugeTransform.identity()
        for e in edges:
            total = compose(e.gauge, total)
        return total

    def path_gauge(self, ancestor: Frame | str, descendant: Frame | str) -> GaugeTransform:
        """Composite of incoming gauges along the path, the latest applied last."""
        return self._compose_edges(self.path(ancestor, descendant))

    def cycle_gauge(self, frame: Frame | str) -> GaugeTransform:
        """Around-the-loop composite for a cyclic field (reported, never constrained)."""
        if self.topology.kind != "cyclic":
            raise TopologyError("only cyclic fields have loops")
        f = self._resolve(frame)
        p = self._forward_path(f, f, proper=True)
        if p is None:
            raise PathError(f"no closed loop through {f.id} yet")
        return self._compose_edges(p)

    def is_ancestor(self, a: Frame | str, b: Frame | str) -> bool:
        """True when ``b`` is reachable from ``a`` by at least one step."""
        a, b = self._resolve(a), self._resolve(b)
        if self.topology.kind == "cyclic":
            return self._forward_path(a, b, proper=True) is not None
        return a.id != b.id and self._tree_path(a, b) is not None

    # -- views ----------------------------------------------------------

    def visible(self, observer: Frame | str, owner: Frame | str) -> bool:
        o, w = self._resolve(observer), self._resolve(owner)
        if o.id == w.id:
            return True
        if not self.is_ancestor(o, w):
            return False
        return not (self.ancestor_visibility and self.is_ancestor(w, o))

    def view_gauge(self, observer: Frame | str, owner: Frame | str) -> GaugeTransform:
        o, w = self._resolve(observer), self._resolve(owner)
        if not self.visible(o, w):
            raise VisibilityError(f"frame {o.id} cannot see frame {w.id}")
        return self.path_gauge(o, w)

    def view_state(self, observer: Frame | str, owner: Frame | str, x, *, cap: int | None = None):
        """What ``observer`` sees of the owner's state or sequence ``x``.

        Within one frame ``x`` comes back unchanged; otherwise the path gauge
        is applied (termwise for sequences).
        """
        from .cauchy import StateSequence

        o, w = self._resolve(observer), self._resolve(owner)
        U = self.view_gauge(o, w)
        if o.id == w.id:
            return x
        if isinstance(x, StateSequence):
            return x.gauged(U)
        if isinstance(x, (StringRational, RawStringState, Superposition)):
            return apply_gauge(U, x, cap)
        raise TypeError(f"cannot view object of type {type(x).__name__}")

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "topology": self.topology.kind,
            "k": self.topology.k,
            "ancestor_visibility": self.ancestor_visibility,
            "frames": [{"id": f.id, "stage": f.stage, "parent": f.parent,
                        "children": [e.target for e in self._children.get(f.id, [])]}
                       for f in self._frames.values()],
            "edges": [{"from": e.source, "to": e.target, "kind": e.kind, "gauge": e.gauge.to_json()}
                      for e in self._edges],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FrameField":
        fld = cls(Topology(obj["topology"], obj.get("k")),
                  ancestor_visibility=obj.get("ancestor_visibility", True))
        for e in obj.get("edges", []):
            if e["kind"] == "ancestor":
                got = fld.parent(e["to"])
            else:
                got = fld.spawn(e["from"], GaugeTransform.from_json(e["gauge"]))
            want = e["from"] if e["kind"] == "ancestor" else e["to"]
            if got.id != want:
                raise ValueError(f"frame graph does not replay: expected {want}, got {got.id}")
        return fld

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "FrameField":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_dot(self) -> str:
        lines = [f'digraph "{self.topology}" {{', "  rankdir=LR;"]
        for f in self._frames.values():
            lines.append(f'  "{f.id}" [label="{f.id}\\nstage {f.stage}"];')
        for e in self._edges:
            style = {"close": " style=dashed", "ancestor": " style=dotted"}.get(e.kind, "")
            lines.append(f'  "{e.source}" -> "{e.target}" [label="{e.gauge.fingerprint()[:8]}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"
