"""Directed acyclic graphs, partially directed graphs, and equivalence-class operations.

Nodes are integers 0..p-1.  A :class:`Dag` stores directed edges; a
:class:`Pdag` stores one state per unordered pair (absent, directed either
way, or undirected) and is the output type of structure learning.
"""

from __future__ import annotations

from collections import deque
from enum import IntEnum
from typing import Iterable, Mapping

__all__ = [
    "Dag",
    "Pdag",
    "EdgeState",
    "node_set",
    "degree",
    "skeleton",
    "unshielded_colliders",
    "d_separated",
    "d_separated_sets",
    "markov_equivalent",
    "cpdag",
    "meek_closure",
    "shd",
    "dag_to_text",
    "dag_from_text",
    "pdag_to_text",
    "pdag_from_text",
]


def node_set(nodes: Iterable[int], p: int | None = None) -> tuple[int, ...]:
    """Normalize a collection of node indices to a sorted tuple.

    Raises ValueError on duplicates, non-integers, or indices outside
    ``0..p-1`` when ``p`` is given.
    """
    items = list(nodes)
    for x in items:
        if not isinstance(x, (int,)) or isinstance(x, bool):
            raise ValueError(f"node index must be an integer, got {x!r}")
        if x < 0 or (p is not None and x >= p):
            raise ValueError(f"node index {x} out of range for p={p}")
    if len(set(items)) != len(items):
        raise ValueError(f"duplicate node indices in {items}")
    return tuple(sorted(items))


class Dag:
    """Immutable directed acyclic graph on ``p`` nodes.

    Parameters
    ----------
    p : int
        Number of nodes; nodes are 0..p-1.
    edges : iterable of (int, int)
        Directed edges (u, v) meaning u -> v.  At most one edge per
        unordered pair; cycles are rejected.
    """

    __slots__ = ("p", "edges", "_parents", "_children", "_topo")

    def __init__(self, p: int, edges: Iterable[tuple[int, int]] = ()):
        if not isinstance(p, int) or isinstance(p, bool) or p < 1:
            raise ValueError(f"node count must be a positive integer, got {p!r}")
        self.p = p
        parents: list[list[int]] = [[] for _ in range(p)]
        children: list[list[int]] = [[] for _ in range(p)]
        pairs: set[tuple[int, int]] = set()
        edge_set: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < p and 0 <= v < p):
                raise ValueError(f"edge ({u}, {v}) out of range for p={p}")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            pair = (u, v) if u < v else (v, u)
            if pair in pairs:
                raise ValueError(f"multiple edges between {pair[0]} and {pair[1]}")
            pairs.add(pair)
            edge_set.add((u, v))
            parents[v].append(u)
            children[u].append(v)
        self.edges = frozenset(edge_set)
        self._parents = tuple(tuple(sorted(xs)) for xs in parents)
        self._children = tuple(tuple(sorted(xs)) for xs in children)
        self._topo = self._toposort()

    def _toposort(self) -> tuple[int, ...]:
        indeg = [len(self._parents[v]) for v in range(self.p)]
        queue = deque(v for v in range(self.p) if indeg[v] == 0)
        order: list[int] = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for w in self._children[u]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        if len(order) != self.p:
            raise ValueError("edge set contains a directed cycle")
        return tuple(order)

    def parents(self, v: int) -> tuple[int, ...]:
        return self._parents[v]

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self._parents[v] + self._children[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def is_adjacent(self, u: int, v: int) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def topological_order(self) -> tuple[int, ...]:
        return self._topo

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self.p == other.p and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.p, self.edges))

    def __repr__(self) -> str:
        return f"Dag(p={self.p}, edges={sorted(self.edges)})"


class EdgeState(IntEnum):
    """State of an unordered pair (u, v) with u < v inside a Pdag."""

    ABSENT = 0
    UNDIRECTED = 1
    FORWARD = 2  # u -> v
    BACKWARD = 3  # v -> u


class Pdag:
    """Immutable partially directed graph: one :class:`EdgeState` per pair."""

    __slots__ = ("p", "_states")

    def __init__(self, p: int, states: Mapping[tuple[int, int], EdgeState] = ()):
        if not isinstance(p, int) or isinstance(p, bool) or p < 1:
            raise ValueError(f"node count must be a positive integer, got {p!r}")
        self.p = p
        clean: dict[tuple[int, int], EdgeState] = {}
        for (u, v), st in dict(states).items():
            if not (0 <= u < v < p):
                raise ValueError(f"pair ({u}, {v}) must satisfy 0 <= u < v < p={p}")
            st = EdgeState(st)
            if st != EdgeState.ABSENT:
                clean[(u, v)] = st
        self._states = clean

    def state(self, u: int, v: int) -> EdgeState:
        """State of the pair, from the perspective (u, v): FORWARD means u -> v."""
        if u == v or not (0 <= u < self.p and 0 <= v < self.p):
            raise ValueError(f"invalid pair ({u}, {v}) for p={self.p}")
        if u < v:
            return self._states.get((u, v), EdgeState.ABSENT)
        st = self._states.get((v, u), EdgeState.ABSENT)
        if st == EdgeState.FORWARD:
            return EdgeState.BACKWARD
        if st == EdgeState.BACKWARD:
            return EdgeState.FORWARD
        return st

    def is_adjacent(self, u: int, v: int) -> bool:
        return self.state(u, v) != EdgeState.ABSENT

    def has_arrow(self, a: int, b: int) -> bool:
        """True when the directed edge a -> b is present."""
        return self.state(a, b) == EdgeState.FORWARD

    def is_undirected(self, u: int, v: int) -> bool:
        return self.state(u, v) == EdgeState.UNDIRECTED

    def neighbors(self, v: int) -> tuple[int, ...]:
        out = [u for u in range(self.p) if u != v and self.is_adjacent(u, v)]
        return tuple(out)

    def directed_edges(self) -> list[tuple[int, int]]:
        out = []
        for (u, v), st in self._states.items():
            if st == EdgeState.FORWARD:
                out.append((u, v))
            elif st == EdgeState.BACKWARD:
                out.append((v, u))
        return sorted(out)

    def undirected_edges(self) -> list[tuple[int, int]]:
        return sorted(k for k, st in self._states.items() if st == EdgeState.UNDIRECTED)

    def edge_count(self) -> int:
        return len(self._states)

    def pair_states(self) -> dict[tuple[int, int], EdgeState]:
        return dict(self._states)

    def has_directed_cycle(self) -> bool:
        """Check the directed subgraph for cycles (well-formed CPDAGs have none)."""
        arrows = self.directed_edges()
        children: dict[int, list[int]] = {}
        indeg = [0] * self.p
        for a, b in arrows:
            children.setdefault(a, []).append(b)
            indeg[b] += 1
        queue = deque(v for v in range(self.p) if indeg[v] == 0)
        seen = 0
        while queue:
            u = queue.popleft()
            seen += 1
            for w in children.get(u, ()):
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return seen != self.p

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pdag):
            return NotImplemented
        return self.p == other.p and self._states == other._states

    def __repr__(self) -> str:
        parts = []
        for (u, v), st in sorted(self._states.items()):
            if st == EdgeState.UNDIRECTED:
                parts.append(f"{u} -- {v}")
            elif st == EdgeState.FORWARD:
                parts.append(f"{u} -> {v}")
            else:
                parts.append(f"{v} -> {u}")
        return f"Pdag(p={self.p}, [{', '.join(parts)}])"


def degree(dag: Dag) -> int:
    """Maximum number of neighbors (parents plus children) over all nodes."""
    return max((len(dag.neighbors(v)) for v in range(dag.p)), default=0)


def skeleton(dag: Dag) -> set[tuple[int, int]]:
    """Unordered adjacencies of the DAG, as sorted pairs."""
    return {(u, v) if u < v else (v, u) for u, v in dag.edges}


def unshielded_colliders(dag: Dag) -> set[tuple[int, int, int]]:
    """Triples (u, v, w), u < w, with u -> v <- w and u, w nonadjacent."""
    out = set()
    for v in range(dag.p):
        pa = dag.parents(v)
        for i in range(len(pa)):
            for j in range(i + 1, len(pa)):
                u, w = pa[i], pa[j]
                if not dag.is_adjacent(u, w):
                    out.add((u, v, w))
    return out


def _reachable(dag: Dag, sources: Iterable[int], blocked: set[int]) -> set[int]:
    """Nodes connected to ``sources`` by a trail that is active given ``blocked``.

    Linear-time search over (node, direction) states: ``up`` marks arrival
    from a child, ``down`` arrival from a parent.  A collider node passes the
    trail on to its other parents exactly when it is in ``blocked`` or has a
    descendant there.
    """
    anc = set(blocked)
    stack = list(blocked)
    while stack:
        x = stack.pop()
        for pa in dag.parents(x):
            if pa not in anc:
                anc.add(pa)
                stack.append(pa)
    UP, DOWN = 0, 1
    queue = deque((x, UP) for x in sources)
    visited: set[tuple[int, int]] = set(queue)
    reached: set[int] = set()
    while queue:
        y, d = queue.popleft()
        if y not in blocked:
            reached.add(y)
        moves: list[tuple[int, int]] = []
        if d == UP and y not in blocked:
            moves.extend((z, UP) for z in dag.parents(y))
            moves.extend((z, DOWN) for z in dag.children(y))
        elif d == DOWN:
            if y not in blocked:
                moves.extend((z, DOWN) for z in dag.children(y))
            if y in anc:
                moves.extend((z, UP) for z in dag.parents(y))
        for mv in moves:
            if mv not in visited:
                visited.add(mv)
                queue.append(mv)
    return reached


def d_separated(dag: Dag, u: int, v: int, s: Iterable[int] = ()) -> bool:
    """Is every trail between u and v blocked by the conditioning set ``s``?

    A trail is blocked when some chain or fork node on it lies in ``s``, or
    some collider node on it has neither itself nor any descendant in ``s``.
    """
    cond = node_set(s, dag.p)
    if u == v:
        raise ValueError("u and v must be distinct")
    if u in cond or v in cond:
        raise ValueError("u and v must not belong to the conditioning set")
    if not (0 <= u < dag.p and 0 <= v < dag.p):
        raise ValueError(f"nodes ({u}, {v}) out of range for p={dag.p}")
    return v not in _reachable(dag, [u], set(cond))


def d_separated_sets(
    dag: Dag, a: Iterable[int], b: Iterable[int], s: Iterable[int] = ()
) -> bool:
    """Set-level d-separation: no active trail from any node of a to any of b."""
    a_set = node_set(a, dag.p)
    b_set = node_set(b, dag.p)
    cond = node_set(s, dag.p)
    if set(a_set) & set(b_set) or set(a_set) & set(cond) or set(b_set) & set(cond):
        raise ValueError("a, b, and s must be pairwise disjoint")
    reached = _reachable(dag, a_set, set(cond))
    return not any(x in reached for x in b_set)


def markov_equivalent(a: Dag, b: Dag) -> bool:
    """Same skeleton and same unshielded colliders."""
    if a.p != b.p:
        raise ValueError(f"node counts differ: {a.p} != {b.p}")
    return skeleton(a) == skeleton(b) and unshielded_colliders(a) == unshielded_colliders(b)


# -- Orientation closure -----------------------------------------------------

def _arrow_in(states: dict, a: int, b: int) -> bool:
    if a < b:
        return states.get((a, b)) == EdgeState.FORWARD
    return states.get((b, a)) == EdgeState.BACKWARD


def _undirected_in(states: dict, a: int, b: int) -> bool:
    key = (a, b) if a < b else (b, a)
    return states.get(key) == EdgeState.UNDIRECTED


def _adjacent_in(states: dict, a: int, b: int) -> bool:
    key = (a, b) if a < b else (b, a)
    return key in states


def _set_arrow(states: dict, a: int, b: int) -> None:
    if a < b:
        states[(a, b)] = EdgeState.FORWARD
    else:
        states[(b, a)] = EdgeState.BACKWARD


def _neighbor_map(states: dict, p: int) -> list[list[int]]:
    nbrs: list[list[int]] = [[] for _ in range(p)]
    for u, v in states:
        nbrs[u].append(v)
        nbrs[v].append(u)
    for xs in nbrs:
        xs.sort()
    return nbrs


def _meek_fixpoint(states: dict, p: int) -> None:
    """Orient undirected edges compelled by the three closure rules, in place.

    Rule 1 orients b - c into b -> c when a -> b exists with a, c nonadjacent
    (avoids a new collider).  Rule 2 orients a - c into a -> c when a directed
    path a -> b -> c exists (avoids a cycle).  Rule 3 orients a - b into
    a -> b when two nonadjacent nodes c, d are undirected neighbors of a and
    both point at b.
    """
    changed = True
    while changed:
        changed = False
        nbrs = _neighbor_map(states, p)
        for (u, v), st in sorted(states.items()):
            if st != EdgeState.UNDIRECTED:
                continue
            for a, b in ((u, v), (v, u)):
                # rule 1: some c -> a with c, b nonadjacent
                fired = False
                for c in nbrs[a]:
                    if c != b and _arrow_in(states, c, a) and not _adjacent_in(states, c, b):
                        _set_arrow(states, a, b)
                        changed = True
                        fired = True
                        break
                if fired:
                    break
                # rule 2: a -> c -> b for some common neighbor c
                for c in nbrs[a]:
                    if c != b and _arrow_in(states, a, c) and _arrow_in(states, c, b):
                        _set_arrow(states, a, b)
                        changed = True
                        fired = True
                        break
                if fired:
                    break
                # rule 3: c, d nonadjacent, a - c, a - d undirected, c -> b, d -> b
                cands = [
                    c
                    for c in nbrs[a]
                    if c != b and _undirected_in(states, a, c) and _arrow_in(states, c, b)
                ]
                for i in range(len(cands)):
                    for j in range(i + 1, len(cands)):
                        if not _adjacent_in(states, cands[i], cands[j]):
                            _set_arrow(states, a, b)
                            changed = True
                            fired = True
                            break
                    if fired:
                        break
                if fired:
                    break


def meek_closure(pdag: Pdag) -> Pdag:
    """Apply the three orientation rules until no undirected edge is compelled."""
    states = pdag.pair_states()
    _meek_fixpoint(states, pdag.p)
    return Pdag(pdag.p, states)


def cpdag(dag: Dag) -> Pdag:
    """Completed partially directed graph of the DAG's equivalence class.

    Starts from the skeleton, orients the unshielded colliders, and closes
    under the orientation rules.  Edges left undirected are exactly those
    whose direction varies across equivalent DAGs.
    """
    states: dict[tuple[int, int], EdgeState] = {
        pair: EdgeState.UNDIRECTED for pair in skeleton(dag)
    }
    for u, v, w in unshielded_colliders(dag):
        _set_arrow(states, u, v)
        _set_arrow(states, w, v)
    _meek_fixpoint(states, dag.p)
    return Pdag(dag.p, states)


def shd(a: Pdag, b: Pdag) -> int:
    """Structural Hamming distance: pairs whose edge state differs.

    Each unordered pair contributes 1 when the two graphs disagree on its
    state (absent, undirected, or either direction), 0 otherwise.
    """
    if a.p != b.p:
        raise ValueError(f"node counts differ: {a.p} != {b.p}")
    sa = a.pair_states()
    sb = b.pair_states()
    dist = 0
    for key in set(sa) | set(sb):
        if sa.get(key, EdgeState.ABSENT) != sb.get(key, EdgeState.ABSENT):
            dist += 1
    return dist


# -- Edge-list text format ---------------------------------------------------

def dag_to_text(dag: Dag) -> str:
    lines = [f"p={dag.p}"]
    lines.extend(f"{u} -> {v}" for u, v in sorted(dag.edges))
    return "\n".join(lines) + "\n"


def pdag_to_text(pdag: Pdag) -> str:
    lines = [f"p={pdag.p}"]
    for (u, v), st in sorted(pdag.pair_states().items()):
        if st == EdgeState.UNDIRECTED:
            lines.append(f"{u} -- {v}")
        elif st == EdgeState.FORWARD:
            lines.append(f"{u} -> {v}")
        else:
            lines.append(f"{v} -> {u}")
    return "\n".join(lines) + "\n"


def _parse_edge_lines(text: str) -> tuple[int, list[tuple[int, int, str]]]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("p="):
        raise ValueError("edge list must start with a 'p=<count>' header line")
    p = int(lines[0][2:])
    triples = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3 or parts[1] not in ("->", "--"):
            raise ValueError(f"unrecognized edge line: {ln!r}")
        triples.append((int(parts[0]), int(parts[2]), parts[1]))
    return p, triples


def dag_from_text(text: str) -> Dag:
    p, triples = _parse_edge_lines(text)
    edges = []
    for u, v, mark in triples:
        if mark != "->":
            raise ValueError(f"undirected edge {u} -- {v} not allowed in a DAG")
        edges.append((u, v))
    return Dag(p, edges)


def pdag_from_text(text: str) -> Pdag:
    p, triples = _parse_edge_lines(text)
    states: dict[tuple[int, int], EdgeState] = {}
    for u, v, mark in triples:
        key = (u, v) if u < v else (v, u)
        if key in states:
            raise ValueError(f"pair ({key[0]}, {key[1]}) listed twice")
        if mark == "--":
            states[key] = EdgeState.UNDIRECTED
        else:
            states[key] = EdgeState.FORWARD if u < v else EdgeState.BACKWARD
    return Pdag(p, states)
