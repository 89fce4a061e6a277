"""Architecture spaces: op vocabularies, encodings, edit moves and paths.

Two structural families are supported.

* ``op_slot``: a fixed DAG skeleton whose edges ("slots") each carry one op
  from the vocabulary.  The space is every assignment of ops to slots, so
  its size is C**S.  Benchmark-style cell spaces (6 slots over a complete
  4-node DAG, 5 ops) are the canonical instance.
* ``topology``: a fixed node set where interior nodes carry op labels and
  any edge set over forward pairs (u < v) with at most ``max_edges`` edges
  is admissible.

Architectures are immutable; every operation here is pure, so they are safe
to share across worker threads.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from hashlib import sha256
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import ParseError, SpaceTooLarge

DELETION_COST_FACTOR = 5.0
DEFAULT_HARD_CAP = 5_000_000
MAX_TOPOLOGY_NODES = 8


class OpKind(str, Enum):
    CONV = "conv"
    POOL_MAX = "pool_max"
    POOL_AVG = "pool_avg"
    IDENTITY = "identity"
    NONE = "none"
    OTHER = "other"


@dataclass(frozen=True)
class OpType:
    id: int
    name: str
    kind: OpKind


def _infer_kind(name: str) -> OpKind:
    lowered = name.lower()
    if lowered in ("none", "zeroize", "zero"):
        return OpKind.NONE
    if "maxpool" in lowered or "max_pool" in lowered or "max-pool" in lowered:
        return OpKind.POOL_MAX
    if "avgpool" in lowered or "avg_pool" in lowered or "avg-pool" in lowered:
        return OpKind.POOL_AVG
    if "identity" in lowered or lowered == "skip" or "skip_connect" in lowered:
        return OpKind.IDENTITY
    if "conv" in lowered:
        return OpKind.CONV
    return OpKind.OTHER


def _complete_dag_edges(m: int) -> tuple[tuple[int, int], ...]:
    return tuple((u, v) for u in range(m) for v in range(u + 1, m))


def default_skeleton(num_slots: int) -> tuple[tuple[int, int], ...]:
    """Skeleton used when a spec file omits one.

    If the slot count is triangular (m*(m-1)/2) the slots fill a complete
    DAG on m nodes, matching benchmark cell conventions; otherwise the
    slots form a chain from input to output.
    """
    m = int((1 + math.isqrt(1 + 8 * num_slots)) // 2)
    if m * (m - 1) // 2 == num_slots:
        return _complete_dag_edges(m)
    return tuple((i, i + 1) for i in range(num_slots))


class SpaceSpec:
    """Immutable description of an architecture space.

    ``cost_matrix`` holds substitution costs between ops.  Entries on the
    row/column of the ``none`` op are ignored: substituting to or from the
    none op is priced as a deletion/insertion at ``insertion_deletion_cost``
    (DELETION_COST_FACTOR times the largest stored substitution cost
    between non-none ops).
    """

    def __init__(
        self,
        family: str,
        ops: Sequence[OpType],
        num_slots: Optional[int] = None,
        num_nodes: Optional[int] = None,
        max_edges: Optional[int] = None,
        cost_matrix: Optional[np.ndarray] = None,
        skeleton: Optional[Sequence[tuple[int, int]]] = None,
    ):
        if family not in ("op_slot", "topology"):
            raise ParseError(f"unknown family {family!r}")
        self.family = family
        self.ops = tuple(ops)
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise ParseError("op names must be unique")
        if [op.id for op in self.ops] != list(range(len(self.ops))):
            raise ParseError("op ids must be dense 0..C-1")
        none_ids = [op.id for op in self.ops if op.kind is OpKind.NONE]
        if len(none_ids) > 1:
            raise ParseError("at most one op may have kind none")
        self.none_index: Optional[int] = none_ids[0] if none_ids else None

        C = len(self.ops)
        if cost_matrix is None:
            cost_matrix = np.ones((C, C), dtype=np.float64)
            np.fill_diagonal(cost_matrix, 0.0)
            if self.none_index is not None:
                cost_matrix[self.none_index, :] = 0.0
                cost_matrix[:, self.none_index] = 0.0
        cost_matrix = np.asarray(cost_matrix, dtype=np.float64)
        if cost_matrix.shape != (C, C):
            raise ParseError("cost_matrix must be CxC")
        if not np.allclose(cost_matrix, cost_matrix.T):
            raise ParseError("cost_matrix must be symmetric")
        if np.any(np.diag(cost_matrix) != 0.0):
            raise ParseError("cost_matrix diagonal must be zero")
        if np.any(cost_matrix < 0.0):
            raise ParseError("cost_matrix entries must be nonnegative")
        non_none = [i for i in range(C) if i != self.none_index]
        for i in non_none:
            for j in non_none:
                if i != j and cost_matrix[i, j] <= 0.0:
                    raise ParseError("substitution costs between distinct ops must be positive")
        self.cost_matrix = cost_matrix
        self.cost_matrix.setflags(write=False)

        if len(non_none) >= 2:
            max_sub = float(cost_matrix[np.ix_(non_none, non_none)].max())
        else:
            max_sub = 1.0
        self.insertion_deletion_cost = DELETION_COST_FACTOR * max_sub

        if family == "op_slot":
            if not num_slots or num_slots < 1:
                raise ParseError("op_slot family needs num_slots >= 1")
            self.num_slots = int(num_slots)
            if skeleton is None:
                skeleton = default_skeleton(self.num_slots)
            skeleton = tuple((int(u), int(v)) for u, v in skeleton)
            if len(skeleton) != self.num_slots:
                raise ParseError("skeleton must have one edge per slot")
            for u, v in skeleton:
                if not 0 <= u < v:
                    raise ParseError("skeleton edges must satisfy 0 <= u < v")
            self.skeleton = skeleton
            self.num_nodes = max(v for _, v in skeleton) + 1
            self.max_edges = None
        else:
            if not num_nodes or num_nodes < 3:
                raise ParseError("topology family needs num_nodes >= 3")
            if num_nodes > MAX_TOPOLOGY_NODES:
                raise ParseError(f"topology family capped at {MAX_TOPOLOGY_NODES} nodes")
            self.num_nodes = int(num_nodes)
            pair_count = self.num_nodes * (self.num_nodes - 1) // 2
            self.max_edges = pair_count if max_edges is None else int(max_edges)
            if not 0 <= self.max_edges <= pair_count:
                raise ParseError("max_edges out of range")
            self.num_slots = None
            self.skeleton = None
            self._pairs = _complete_dag_edges(self.num_nodes)

    # -- size and identity ------------------------------------------------

    @property
    def num_ops(self) -> int:
        return len(self.ops)

    def size(self) -> int:
        """Number of architectures in the space."""
        C = self.num_ops
        if self.family == "op_slot":
            return C ** self.num_slots
        interior = self.num_nodes - 2
        pair_count = len(self._pairs)
        edge_sets = sum(math.comb(pair_count, e) for e in range(self.max_edges + 1))
        return (C ** interior) * edge_sets

    def space_hash(self) -> str:
        """Hash of the structural definition, excluding the cost matrix."""
        cached = getattr(self, "_space_hash", None)
        if cached is not None:
            return cached
        doc = {
            "family": self.family,
            "ops": [[op.name, op.kind.value] for op in self.ops],
            "slots": self.num_slots,
            "nodes": self.num_nodes if self.family == "topology" else None,
            "max_edges": self.max_edges,
            "skeleton": [list(e) for e in self.skeleton] if self.skeleton else None,
        }
        self._space_hash = sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()
        return self._space_hash

    def cost_matrix_hash(self) -> str:
        return sha256(np.ascontiguousarray(self.cost_matrix).tobytes()).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpaceSpec):
            return NotImplemented
        return (
            self.space_hash() == other.space_hash()
            and self.cost_matrix_hash() == other.cost_matrix_hash()
        )

    def __hash__(self):
        return hash((self.space_hash(), self.cost_matrix_hash()))

    # -- cost helpers ------------------------------------------------------

    def edit_cost(self, old: int, new: int) -> float:
        if old == new:
            return 0.0
        if self.none_index is not None and self.none_index in (old, new):
            return self.insertion_deletion_cost
        return float(self.cost_matrix[old, new])

    def effective_cost_matrix(self) -> np.ndarray:
        """CxC matrix with none-involving substitutions priced as deletions."""
        eff = self.cost_matrix.copy()
        if self.none_index is not None:
            eff[self.none_index, :] = self.insertion_deletion_cost
            eff[:, self.none_index] = self.insertion_deletion_cost
            eff[self.none_index, self.none_index] = 0.0
        return eff

    def substitution_closure(self) -> np.ndarray:
        """All-pairs shortest substitution costs over the op vocabulary.

        Multi-step substitutions (including detours through the none op)
        can undercut a direct substitution when a custom matrix violates
        the triangle inequality; distances in the edit graph follow the
        closure, not the raw entries.
        """
        closure = self.effective_cost_matrix()
        C = self.num_ops
        for k in range(C):
            closure = np.minimum(closure, closure[:, k : k + 1] + closure[k : k + 1, :])
        return closure


@dataclass(frozen=True)
class Architecture:
    """One point of a space: a slot vector or (node labels, edge mask)."""

    spec: SpaceSpec = field(compare=False, repr=False)
    slots: Optional[tuple[int, ...]] = None
    node_ops: Optional[tuple[int, ...]] = None
    edge_mask: Optional[int] = None

    @property
    def arch_id(self) -> int:
        if self.spec.family == "op_slot":
            return slots_to_arch_id(self.spec, self.slots)
        return topo_to_arch_id(self.spec, self.node_ops, self.edge_mask)

    @property
    def is_degenerate(self) -> bool:
        """True when pruning none ops disconnects input from output."""
        return len(arch_paths_ops(self)) == 0

    def op_names(self) -> tuple[str, ...]:
        ops = self.slots if self.spec.family == "op_slot" else self.node_ops
        return tuple(self.spec.ops[i].name for i in ops)


# -- arch_id codecs --------------------------------------------------------


def slots_to_arch_id(spec: SpaceSpec, slots: Sequence[int]) -> int:
    rank = 0
    for s in reversed(slots):
        rank = rank * spec.num_ops + s
    return rank


def arch_from_rank(spec: SpaceSpec, rank: int) -> Architecture:
    C = spec.num_ops
    slots = []
    r = rank
    for _ in range(spec.num_slots):
        r, d = divmod(r, C)
        slots.append(d)
    if r:
        raise ValueError(f"rank {rank} outside space")
    return Architecture(spec=spec, slots=tuple(slots))


def _label_bits(spec: SpaceSpec) -> int:
    return max(1, (spec.num_ops - 1).bit_length())


def topo_to_arch_id(spec: SpaceSpec, node_ops: Sequence[int], edge_mask: int) -> int:
    bits = _label_bits(spec)
    rank = 0
    for label in reversed(node_ops):
        rank = (rank << bits) | label
    return (edge_mask << (bits * len(node_ops))) | rank


def arch_from_topo_id(spec: SpaceSpec, arch_id: int) -> Architecture:
    bits = _label_bits(spec)
    interior = spec.num_nodes - 2
    labels = []
    r = arch_id
    for _ in range(interior):
        labels.append(r & ((1 << bits) - 1))
        r >>= bits
    return Architecture(spec=spec, node_ops=tuple(labels), edge_mask=r)


def arch_from_id(spec: SpaceSpec, arch_id: int) -> Architecture:
    if spec.family == "op_slot":
        return arch_from_rank(spec, arch_id)
    return arch_from_topo_id(spec, arch_id)


# -- enumeration ------------------------------------------------------------


def enumerate_space(
    spec: SpaceSpec,
    limit: Optional[int] = None,
    hard_cap: int = DEFAULT_HARD_CAP,
) -> Iterator[Architecture]:
    """Yield every architecture of the space in deterministic order.

    Raises SpaceTooLarge when the full space exceeds ``hard_cap`` and no
    ``limit`` was given.
    """
    total = spec.size()
    if limit is None and total > hard_cap:
        raise SpaceTooLarge(
            f"space has {total} architectures (cap {hard_cap}); "
            "pass a limit or use the bipartite distance backend"
        )
    remaining = total if limit is None else min(limit, total)
    if spec.family == "op_slot":
        for rank in range(remaining):
            yield arch_from_rank(spec, rank)
        return
    interior = spec.num_nodes - 2
    produced = 0
    pair_count = len(spec._pairs)
    for edge_mask in range(1 << pair_count):
        if edge_mask.bit_count() > spec.max_edges:
            continue
        for labels in itertools.product(range(spec.num_ops), repeat=interior):
            if produced >= remaining:
                return
            yield Architecture(spec=spec, node_ops=labels, edge_mask=edge_mask)
            produced += 1


# -- edit moves --------------------------------------------------------------


def one_edit_neighbors(arch: Architecture) -> list[tuple[Architecture, float]]:
    """All architectures one edit away, with the cost of that edit.

    op_slot family: every single-slot substitution (S*(C-1) neighbors).
    topology family: label substitutions plus single-edge toggles that stay
    within max_edges, each toggle priced at insertion_deletion_cost.
    """
    spec = arch.spec
    out: list[tuple[Architecture, float]] = []
    if spec.family == "op_slot":
        slots = arch.slots
        for s, old in enumerate(slots):
            for new in range(spec.num_ops):
                if new == old:
                    continue
                nbr = slots[:s] + (new,) + slots[s + 1 :]
                out.append((Architecture(spec=spec, slots=nbr), spec.edit_cost(old, new)))
        return out
    labels = arch.node_ops
    for i, old in enumerate(labels):
        for new in range(spec.num_ops):
            if new == old:
                continue
            nbr = labels[:i] + (new,) + labels[i + 1 :]
            out.append(
                (Architecture(spec=spec, node_ops=nbr, edge_mask=arch.edge_mask), spec.edit_cost(old, new))
            )
    mask = arch.edge_mask
    for bit in range(len(spec._pairs)):
        toggled = mask ^ (1 << bit)
        if toggled.bit_count() > spec.max_edges:
            continue
        out.append(
            (Architecture(spec=spec, node_ops=labels, edge_mask=toggled), spec.insertion_deletion_cost)
        )
    return out


# -- path decomposition ------------------------------------------------------


def _active_adjacency(arch: Architecture) -> dict[int, list[tuple[int, Optional[int]]]]:
    """Adjacency of the pruned DAG: node -> [(next_node, op_index_or_None)].

    Pruning removes none ops: for op_slot that drops the slot's edge, for
    topology it drops the labeled node.  Topology edges carry no op, hence
    the None payload; the interior node's op is collected on arrival.
    """
    spec = arch.spec
    adj: dict[int, list[tuple[int, Optional[int]]]] = {}
    if spec.family == "op_slot":
        for slot, (u, v) in enumerate(spec.skeleton):
            op = arch.slots[slot]
            if spec.ops[op].kind is OpKind.NONE:
                continue
            adj.setdefault(u, []).append((v, op))
        return adj
    pruned = {
        i + 1
        for i, label in enumerate(arch.node_ops)
        if spec.ops[label].kind is OpKind.NONE
    }
    for bit, (u, v) in enumerate(spec._pairs):
        if not arch.edge_mask >> bit & 1:
            continue
        if u in pruned or v in pruned:
            continue
        adj.setdefault(u, []).append((v, None))
    return adj


def arch_paths_ops(arch: Architecture) -> list[list[int]]:
    """All simple input->output paths as lists of op indices.

    Returns [] when pruning disconnects input from output (the degenerate
    case).  The DAG orientation (u < v) keeps every path simple.
    """
    spec = arch.spec
    sink = spec.num_nodes - 1
    adj = _active_adjacency(arch)
    paths: list[list[int]] = []
    stack: list[int] = []

    def walk(node: int) -> None:
        if node == sink:
            paths.append(list(stack))
            return
        for nxt, op in adj.get(node, ()):  # deterministic: slot/bit order
            payload = None
            if op is not None:
                payload = op
            elif spec.family == "topology" and nxt != sink:
                payload = arch.node_ops[nxt - 1]
            if payload is not None:
                stack.append(payload)
            walk(nxt)
            if payload is not None:
                stack.pop()

    walk(0)
    return paths


def paths(arch: Architecture) -> list[list[OpKind]]:
    """All simple input->output op-kind sequences after pruning none ops."""
    spec = arch.spec
    return [[spec.ops[i].kind for i in p] for p in arch_paths_ops(arch)]


# -- spec file I/O -----------------------------------------------------------

_FORMAT_VERSION = 1


def serialize_space(spec: SpaceSpec) -> str:
    doc: dict = {
        "version": _FORMAT_VERSION,
        "family": spec.family,
        "ops": [{"name": op.name, "kind": op.kind.value} for op in spec.ops],
    }
    if spec.family == "op_slot":
        doc["slots"] = spec.num_slots
        doc["skeleton"] = [list(e) for e in spec.skeleton]
    else:
        doc["nodes"] = spec.num_nodes
        doc["max_edges"] = spec.max_edges
    doc["cost_matrix"] = [[float(x) for x in row] for row in spec.cost_matrix]
    return json.dumps(doc, indent=2) + "\n"


def parse_space(text: str) -> SpaceSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid space spec JSON: {exc}") from exc
    if not isinstance(doc, dict) or "family" not in doc or "ops" not in doc:
        raise ParseError("space spec must be an object with family and ops")
    ops = []
    for i, entry in enumerate(doc["ops"]):
        name = entry["name"]
        kind = OpKind(entry["kind"]) if "kind" in entry else _infer_kind(name)
        ops.append(OpType(id=i, name=name, kind=kind))
    matrix = doc.get("cost_matrix")
    if matrix is not None:
        matrix = np.asarray(matrix, dtype=np.float64)
    return SpaceSpec(
        family=doc["family"],
        ops=ops,
        num_slots=doc.get("slots"),
        num_nodes=doc.get("nodes"),
        max_edges=doc.get("max_edges"),
        cost_matrix=matrix,
        skeleton=doc.get("skeleton"),
    )


def load_space(path) -> SpaceSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_space(fh.read())


def save_space(spec: SpaceSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_space(spec))


# -- stock spaces -------------------------------------------------------------


def cell_ops_201() -> list[OpType]:
    names = ["conv1x1", "conv3x3", "avgpool3x3", "identity", "none"]
    return [OpType(id=i, name=n, kind=_infer_kind(n)) for i, n in enumerate(names)]


def nasbench201_space() -> SpaceSpec:
    """6 slots over a complete 4-node DAG, 5 ops: 15,625 architectures."""
    return SpaceSpec(family="op_slot", ops=cell_ops_201(), num_slots=6)


def toy27_space() -> SpaceSpec:
    """3 slots over a complete 3-node DAG, 3 ops: 27 architectures."""
    names = ["conv3x3", "conv1x1", "none"]
    ops = [OpType(id=i, name=n, kind=_infer_kind(n)) for i, n in enumerate(names)]
    return SpaceSpec(family="op_slot", ops=ops, num_slots=3)
