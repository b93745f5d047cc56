"""
A* search for the most-likely error.

The search walks a tree whose nodes are sets of error channels. A node may only
be extended by a channel incident to its lowest-ranked residual detector, and
every lower-index candidate skipped on the way to a child stays forbidden in
that child's subtree, so each error set is reached along at most one path.
Nodes are queued by ``g + h + det_penalty * r``, where ``g`` is the weight of
the chosen channels, ``r`` the number of residual detectors and ``h`` a sum of
per-detector lower bounds that never overestimates the remaining cost.

Internally detectors are relabeled by their rank in the detector order and
residual syndromes, chosen errors and forbidden channels are Python integers
used as bitsets.
"""

import heapq
import logging
import math
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field

from mle_decoder.exceptions import InvalidPermutation, UnsatisfiableSyndrome
from mle_decoder.model import ErrorModel, Syndrome, validate_syndrome
from mle_decoder.utils.config import SearchConfig

logger = logging.getLogger(__name__)


def iter_bits(mask: int) -> Iterable[int]:
    """Yield the positions of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


class SearchGraph:
    """
    A model compiled for one detector order.

    ``order[r]`` is the detector with rank r and ``rank[d]`` its inverse.
    ``channel_masks[e]`` holds the ranks of D(e) and ``incidence[r]`` is E(order[r]).
    """

    def __init__(self, model: ErrorModel, detector_order: Optional[Sequence[int]] = None):
        num_detectors = model.num_detectors
        if detector_order is None:
            order = list(range(num_detectors))
        else:
            order = list(detector_order)
            if sorted(order) != list(range(num_detectors)):
                raise InvalidPermutation(
                    f"Detector order must be a permutation of 0..{num_detectors - 1}"
                )
        self.model = model
        self.order: Tuple[int, ...] = tuple(order)
        rank = [0] * num_detectors
        for r, d in enumerate(order):
            rank[d] = r
        self.rank: Tuple[int, ...] = tuple(rank)
        self.weights: Tuple[float, ...] = model.weights
        self.channel_masks: Tuple[int, ...] = tuple(
            bits_of(rank[d] for d in channel.detectors) for channel in model.channels
        )
        self.observables: Tuple[int, ...] = tuple(c.observables for c in model.channels)
        self.incidence: Tuple[Tuple[int, ...], ...] = tuple(model.incidence[d] for d in order)

    def residual_mask(self, detectors: Iterable[int]) -> int:
        """Rank-space bitset of a set of detector labels."""
        return bits_of(self.rank[d] for d in detectors)

    def detectors_of(self, mask: int) -> Tuple[int, ...]:
        """Detector labels of a rank-space bitset, sorted."""
        return tuple(sorted(self.order[r] for r in iter_bits(mask)))


_GRAPH_CACHE_SIZE = 64
_graph_cache: "OrderedDict[Tuple[int, Optional[Tuple[int, ...]]], SearchGraph]" = OrderedDict()
_graph_lock = threading.Lock()


def search_graph(model: ErrorModel, detector_order: Optional[Sequence[int]] = None) -> SearchGraph:
    """Return the compiled graph for ``model`` and ``detector_order``, reusing recent ones."""
    order = None if detector_order is None else tuple(detector_order)
    key = (id(model), order)
    with _graph_lock:
        graph = _graph_cache.get(key)
        if graph is not None and graph.model is model:
            _graph_cache.move_to_end(key)
            return graph
    graph = SearchGraph(model, order)
    with _graph_lock:
        _graph_cache[key] = graph
        while len(_graph_cache) > _GRAPH_CACHE_SIZE:
            _graph_cache.popitem(last=False)
    return graph


@dataclass(slots=True, eq=False)
class SearchNode:
    """A node of the search tree. ``channel`` is -1 for the root."""

    parent: Optional["SearchNode"]
    channel: int
    errors: int
    g_cost: float
    residual: int
    num_residual: int
    forbidden: int
    f_cost: float

    def error_set(self) -> Tuple[int, ...]:
        return tuple(iter_bits(self.errors))

    def path(self) -> List[int]:
        """Channels in the order they were added from the root."""
        channels: List[int] = []
        node: Optional[SearchNode] = self
        while node is not None and node.channel >= 0:
            channels.append(node.channel)
            node = node.parent
        channels.reverse()
        return channels


class DecodeStats(BaseModel):
    """Counters collected while decoding one syndrome."""

    nodes_expanded: int = 0
    nodes_pushed: int = 0
    nodes_pruned_beam: int = 0
    nodes_pruned_revisit: int = 0
    pq_peak: int = 0
    wall_time: float = Field(0.0, description="Seconds spent decoding")
    num_pure_logical: int = 0
    attempts: int = 0

    def merge(self, other: "DecodeStats") -> "DecodeStats":
        """Combine the counters of two runs (peak and model facts take the maximum)."""
        return DecodeStats(
            nodes_expanded=self.nodes_expanded + other.nodes_expanded,
            nodes_pushed=self.nodes_pushed + other.nodes_pushed,
            nodes_pruned_beam=self.nodes_pruned_beam + other.nodes_pruned_beam,
            nodes_pruned_revisit=self.nodes_pruned_revisit + other.nodes_pruned_revisit,
            pq_peak=max(self.pq_peak, other.pq_peak),
            wall_time=self.wall_time + other.wall_time,
            num_pure_logical=max(self.num_pure_logical, other.num_pure_logical),
            attempts=self.attempts + other.attempts,
        )


class DecodeOutcome(BaseModel):
    """Result of decoding one syndrome."""

    model_config = ConfigDict(frozen=True)

    errors: Tuple[int, ...] = Field((), description="Chosen channel indices, sorted")
    cost: float = Field(math.inf, description="Total weight of the chosen channels")
    predicted_observables: int = 0
    low_confidence: bool = False
    stats: DecodeStats = Field(default_factory=DecodeStats)


NodeObserver = Callable[[SearchNode], None]


def forbidden_by_precedence(chosen: int, candidates: Sequence[int]) -> Set[int]:
    """Candidates that precede ``chosen`` and so become forbidden in its subtree."""
    return {e for e in candidates if e < chosen}


def _at_most_two_mask(graph: SearchGraph, errors: int) -> int:
    counts: dict = {}
    for e in iter_bits(errors):
        for r in iter_bits(graph.channel_masks[e]):
            counts[r] = counts.get(r, 0) + 1
    blocked = 0
    for r, count in counts.items():
        if count >= 2:
            blocked |= bits_of(graph.incidence[r])
    return blocked & ~errors


def forbidden_at_most_two(model: ErrorModel, errors: Iterable[int]) -> Set[int]:
    """Channels outside ``errors`` touching a detector already flipped by two chosen channels."""
    graph = search_graph(model)
    return set(iter_bits(_at_most_two_mask(graph, bits_of(errors))))


def _det_cost(graph: SearchGraph, residual: int, blocked: int, r: int) -> float:
    best = math.inf
    weights = graph.weights
    masks = graph.channel_masks
    for e in graph.incidence[r]:
        if not blocked >> e & 1:
            cost = weights[e] / (residual & masks[e]).bit_count()
            if cost < best:
                best = cost
    return best


def _heuristic(graph: SearchGraph, residual: int, blocked: int) -> float:
    total = 0.0
    for r in iter_bits(residual):
        cost = _det_cost(graph, residual, blocked, r)
        if cost == math.inf:
            return math.inf
        total += cost
    return total


def det_cost(
    model: ErrorModel, residual: Iterable[int], forbidden: Iterable[int], detector: int
) -> float:
    """
    Lower bound on the share of detector ``detector`` in the cost of clearing ``residual``.

    Each usable channel spreads its weight evenly over the residual detectors it
    flips; the bound is the smallest such share, or +inf if every channel at the
    detector is forbidden.
    """
    graph = search_graph(model)
    return _det_cost(graph, graph.residual_mask(residual), bits_of(forbidden), graph.rank[detector])


def heuristic(model: ErrorModel, residual: Iterable[int], forbidden: Iterable[int]) -> float:
    """Admissible estimate of the remaining cost: the sum of det_cost over ``residual``."""
    graph = search_graph(model)
    return _heuristic(graph, graph.residual_mask(residual), bits_of(forbidden))


def beam_admit(node: SearchNode, r_min: float, beam: Optional[int]) -> bool:
    """True unless the node has more than ``r_min + beam`` residual detectors."""
    if beam is None:
        return True
    return node.num_residual <= r_min + beam


def revisit_key(node: SearchNode) -> int:
    """Canonical key of a node's residual syndrome (the rank-space bitset)."""
    return node.residual


def _priority(
    graph: SearchGraph, config: SearchConfig, g_cost: float, residual: int, blocked: int,
    num_residual: int, use_heuristic: bool,
) -> float:
    f_cost = g_cost + config.det_penalty * num_residual
    if use_heuristic:
        f_cost += _heuristic(graph, residual, blocked)
    return f_cost


def root_node(
    graph: SearchGraph, syndrome: Syndrome, config: SearchConfig, use_heuristic: bool = True
) -> SearchNode:
    residual = graph.residual_mask(syndrome.activated)
    num_residual = residual.bit_count()
    return SearchNode(
        parent=None,
        channel=-1,
        errors=0,
        g_cost=0.0,
        residual=residual,
        num_residual=num_residual,
        forbidden=0,
        f_cost=_priority(graph, config, 0.0, residual, 0, num_residual, use_heuristic),
    )


def expand_node(
    graph: SearchGraph, node: SearchNode, config: SearchConfig, use_heuristic: bool = True
) -> List[SearchNode]:
    """
    Children of ``node``, in increasing order of the added channel.

    Candidates are the channels at the lowest-ranked residual detector that are
    neither chosen nor forbidden. A child whose heuristic is infinite is still
    returned, with ``f_cost`` set to +inf.
    """
    if node.residual == 0:
        return []
    lowest = (node.residual & -node.residual).bit_length() - 1
    excluded = node.forbidden | node.errors
    children: List[SearchNode] = []
    skipped = 0
    for e in graph.incidence[lowest]:
        if excluded >> e & 1:
            continue
        errors = node.errors | (1 << e)
        forbidden = node.forbidden | skipped
        if config.at_most_two:
            forbidden |= _at_most_two_mask(graph, errors)
        residual = node.residual ^ graph.channel_masks[e]
        num_residual = residual.bit_count()
        g_cost = node.g_cost + graph.weights[e]
        children.append(
            SearchNode(
                parent=node,
                channel=e,
                errors=errors,
                g_cost=g_cost,
                residual=residual,
                num_residual=num_residual,
                forbidden=forbidden,
                f_cost=_priority(
                    graph, config, g_cost, residual, forbidden | errors, num_residual,
                    use_heuristic,
                ),
            )
        )
        skipped |= 1 << e
    return children


def _finish(
    graph: SearchGraph, node: Optional[SearchNode], counters: dict, started: float
) -> DecodeOutcome:
    stats = DecodeStats(
        **counters,
        wall_time=time.perf_counter() - started,
        num_pure_logical=graph.model.num_pure_logical,
        attempts=1,
    )
    if node is None:
        return DecodeOutcome(low_confidence=True, stats=stats)
    errors = node.error_set()
    observables = 0
    for e in errors:
        observables ^= graph.observables[e]
    return DecodeOutcome(
        errors=errors,
        cost=graph.model.path_cost(errors),
        predicted_observables=observables,
        stats=stats,
    )


def decode(
    model: ErrorModel,
    syndrome: Syndrome,
    config: Optional[SearchConfig] = None,
    *,
    use_heuristic: bool = True,
    observer: Optional[NodeObserver] = None,
) -> DecodeOutcome:
    """
    Find a minimum-weight set of channels whose detector flips equal the syndrome.

    Args:
        model: A canonicalized error model.
        syndrome: Activated detectors.
        config: Search options; defaults to an exact search.
        use_heuristic: Disable to run a plain uniform-cost search.
        observer: Called with every node just before it is expanded.

    Returns:
        The outcome. ``low_confidence`` is set when the queue limit is hit or
        the queue empties without reaching an empty residual.

    Raises:
        InvalidSyndrome: If the syndrome references unknown detectors.
        UnsatisfiableSyndrome: If an activated detector has no incident channel.
    """
    config = config or SearchConfig()
    started = time.perf_counter()
    validate_syndrome(model, syndrome)
    for d in syndrome.detectors():
        if not model.incidence[d]:
            raise UnsatisfiableSyndrome(d)

    graph = search_graph(model, config.detector_order)
    counters = {
        "nodes_expanded": 0,
        "nodes_pushed": 1,
        "nodes_pruned_beam": 0,
        "nodes_pruned_revisit": 0,
        "pq_peak": 1,
    }
    root = root_node(graph, syndrome, config, use_heuristic)
    if root.residual == 0:
        return _finish(graph, root, counters, started)

    queue: List[Tuple[float, int, int, SearchNode]] = [(root.f_cost, root.num_residual, 0, root)]
    sequence = 1
    visited: Set[int] = set()
    r_min = math.inf
    beam = config.beam
    pqlimit = config.pqlimit

    while queue:
        _, _, _, node = heapq.heappop(queue)
        if node.residual == 0:
            outcome = _finish(graph, node, counters, started)
            logger.debug(
                f"Decoded {len(syndrome)} detections: cost={outcome.cost:.4f}, "
                f"expanded={counters['nodes_expanded']}"
            )
            return outcome
        if config.no_revisit:
            key = revisit_key(node)
            if key in visited:
                counters["nodes_pruned_revisit"] += 1
                continue
            visited.add(key)
        if not beam_admit(node, r_min, beam):
            counters["nodes_pruned_beam"] += 1
            continue
        r_min = min(r_min, node.num_residual)

        if observer is not None:
            observer(node)
        counters["nodes_expanded"] += 1
        for child in expand_node(graph, node, config, use_heuristic):
            if child.f_cost == math.inf:
                continue
            if config.no_revisit and revisit_key(child) in visited:
                counters["nodes_pruned_revisit"] += 1
                continue
            if not beam_admit(child, r_min, beam):
                counters["nodes_pruned_beam"] += 1
                continue
            if pqlimit is not None and counters["nodes_pushed"] >= pqlimit:
                logger.debug(f"Queue limit {pqlimit} reached")
                return _finish(graph, None, counters, started)
            heapq.heappush(queue, (child.f_cost, child.num_residual, sequence, child))
            sequence += 1
            counters["nodes_pushed"] += 1
            if len(queue) > counters["pq_peak"]:
                counters["pq_peak"] = len(queue)

    logger.debug("Queue exhausted without clearing the syndrome")
    return _finish(graph, None, counters, started)
