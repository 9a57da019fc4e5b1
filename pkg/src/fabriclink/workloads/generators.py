#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Synthetic execution-trace generators.

Each generator turns a :class:`ModelShape` and a topology into a
:class:`~fabriclink.workloads.trace.TraceFile`:

- **gen_dp_trace**: data parallel, gradient All-Reduce per layer.
- **gen_mp_trace**: model parallel, activation All-Gather forward and
  input-gradient All-Reduce backward.
- **gen_hybrid_trace**: MP and DP on disjoint dimension sets.
- **gen_pipeline_trace**: GPipe-style stages with microbatches over PeerComm.
- **gen_microbench**: one collective per NPU.
- **gen_offload_trace**: parameters streamed from the disaggregated pool.

Generators are pure functions of their arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..collectives import CollectiveKind, PlanError
from ..topology import TopologyError, TopologySpec
from ..units import MIB, Number, exact, render_exact
from .trace import TraceFile, TraceNode, replicate, validate_trace


class GeneratorError(ValueError):
    """Raised when generator arguments violate a precondition."""


def _per_layer(value, layers: int, what: str) -> Tuple[Fraction, ...]:
    if isinstance(value, (list, tuple)):
        if len(value) != layers:
            raise GeneratorError(
                f"{what} lists {len(value)} entries for a {layers}-layer model"
            )
        out = tuple(exact(v) for v in value)
    else:
        out = (exact(value),) * layers
    if any(v < 0 for v in out):
        raise GeneratorError(f"{what} must be non-negative")
    return out


@dataclass(frozen=True)
class ModelShape:
    """
    Layer-level description of a model.

    Parameters
    ----------
    fwd_flops, param_bytes, act_bytes : tuple of Fraction
        Per-layer forward FLOPs, parameter bytes and output activation bytes.
    bwd_flops : tuple of Fraction, optional
        Per-layer backward FLOPs; twice the forward FLOPs when omitted.
    minibatch : int, default: 1
        Samples per NPU per step; informational, already folded into FLOPs
        and activation bytes.
    name : str
    """

    fwd_flops: Tuple[Fraction, ...]
    param_bytes: Tuple[Fraction, ...]
    act_bytes: Tuple[Fraction, ...]
    bwd_flops: Optional[Tuple[Fraction, ...]] = None
    minibatch: int = 1
    name: str = "model"

    def __post_init__(self):
        layers = len(self.fwd_flops)
        if layers < 1:
            raise GeneratorError("a model needs at least one layer")
        object.__setattr__(
            self, "fwd_flops", _per_layer(self.fwd_flops, layers, "fwd_flops")
        )
        object.__setattr__(
            self, "param_bytes", _per_layer(self.param_bytes, layers, "param_bytes")
        )
        object.__setattr__(
            self, "act_bytes", _per_layer(self.act_bytes, layers, "act_bytes")
        )
        bwd = self.bwd_flops
        if bwd is None:
            bwd = tuple(2 * f for f in self.fwd_flops)
        object.__setattr__(self, "bwd_flops", _per_layer(bwd, layers, "bwd_flops"))
        if isinstance(self.minibatch, bool) or not isinstance(self.minibatch, int):
            raise GeneratorError("minibatch must be an int")
        if self.minibatch < 1:
            raise GeneratorError("minibatch must be >= 1")

    @property
    def num_layers(self) -> int:
        return len(self.fwd_flops)

    @property
    def total_flops(self) -> Fraction:
        return sum(self.fwd_flops, Fraction(0)) + sum(self.bwd_flops, Fraction(0))

    @classmethod
    def uniform(
        cls,
        num_layers: int,
        fwd_flops: Number,
        param_bytes: Number,
        act_bytes: Number,
        bwd_flops: Optional[Number] = None,
        minibatch: int = 1,
        name: str = "model",
    ) -> "ModelShape":
        if isinstance(num_layers, bool) or not isinstance(num_layers, int):
            raise GeneratorError(f"num_layers must be an int, got {num_layers!r}")
        if num_layers < 1:
            raise GeneratorError(f"num_layers must be >= 1, got {num_layers}")

        def rep(v):
            return (exact(v),) * num_layers

        return cls(
            rep(fwd_flops),
            rep(param_bytes),
            rep(act_bytes),
            None if bwd_flops is None else rep(bwd_flops),
            minibatch,
            name,
        )

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ModelShape":
        """
        Build a shape from a config mapping.

        Keys: ``layers``; ``fwd_flops`` or ``fwd_gflops``; ``param_bytes`` or
        ``param_mb``; ``act_bytes`` or ``act_mb``; optional ``bwd_flops`` /
        ``bwd_gflops``, ``minibatch``, ``name``. Values are scalars (same for
        every layer) or per-layer lists.
        """
        if not isinstance(d, dict):
            raise GeneratorError("model must be an object")
        layers = d.get("layers")
        if isinstance(layers, bool) or not isinstance(layers, int) or layers < 1:
            raise GeneratorError(f"model.layers must be an int >= 1, got {layers!r}")

        def pick(base, unit_key, scale, required=True):
            if base in d:
                return _per_layer(d[base], layers, f"model.{base}")
            if unit_key in d:
                values = _per_layer(d[unit_key], layers, f"model.{unit_key}")
                return tuple(v * scale for v in values)
            if required:
                raise GeneratorError(f"model needs {base!r} or {unit_key!r}")
            return None

        return cls(
            fwd_flops=pick("fwd_flops", "fwd_gflops", 10**9),
            param_bytes=pick("param_bytes", "param_mb", MIB),
            act_bytes=pick("act_bytes", "act_mb", MIB),
            bwd_flops=pick("bwd_flops", "bwd_gflops", 10**9, required=False),
            minibatch=d.get("minibatch", 1),
            name=str(d.get("name", "model")),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "layers": self.num_layers,
            "minibatch": self.minibatch,
            "fwd_flops": [render_exact(v) for v in self.fwd_flops],
            "bwd_flops": [render_exact(v) for v in self.bwd_flops],
            "param_bytes": [render_exact(v) for v in self.param_bytes],
            "act_bytes": [render_exact(v) for v in self.act_bytes],
        }


# -------------- helpers --------------


def _scope(spec: TopologySpec, dims: Optional[Sequence[int]]) -> Tuple[int, ...]:
    if dims is None:
        return tuple(range(1, spec.ndims + 1))
    if len(dims) == 0:
        return ()
    try:
        return spec.check_scope(dims)
    except TopologyError as err:
        raise GeneratorError(str(err)) from None


def _degree(spec: TopologySpec, dims: Sequence[int]) -> int:
    return math.prod(spec.dim(d).size for d in dims)


class _Builder:
    """Appends nodes for one NPU with consecutive ids."""

    def __init__(self, npu: int = 0):
        self.npu = npu
        self.nodes: List[TraceNode] = []

    @property
    def next_id(self) -> int:
        return len(self.nodes)

    def add(self, ctor, *args, deps=(), **kwargs) -> int:
        nid = self.next_id
        deps = tuple(d for d in deps if d is not None)
        self.nodes.append(ctor(nid, self.npu, *args, deps=deps, **kwargs))
        return nid

    def compute(self, flops, tensor_bytes=0, deps=()):
        return self.add(TraceNode.compute, flops, tensor_bytes, deps=deps)

    def collective(self, kind, nbytes, scope, deps=()):
        # the node id doubles as the tag; every group member uses the same template
        nid = self.next_id
        return self.add(TraceNode.collective, kind, nbytes, scope, nid, deps=deps)

    def memory(self, nbytes, location, direction, in_switch=False, deps=()):
        return self.add(
            TraceNode.memory,
            nbytes,
            location=location,
            direction=direction,
            in_switch=in_switch,
            deps=deps,
        )

    def peer(self, nbytes, peer, tag, direction, deps=()):
        return self.add(TraceNode.peer, nbytes, peer, tag, direction, deps=deps)


def _finish(
    nodes: List[TraceNode], npu_count: int, generator: Dict[str, Any]
) -> TraceFile:
    trace = TraceFile(npu_count=npu_count, nodes=nodes, generator=generator)
    validate_trace(trace)
    return trace


def _build_layers(
    model: ModelShape,
    mp_scope: Tuple[int, ...],
    dp_scope: Tuple[int, ...],
    mp_degree: int,
) -> List[TraceNode]:
    """
    One NPU's training step.

    Forward layers run in order, each followed by an activation All-Gather
    when MP is active. Backward layers run in reverse, each followed by an
    input-gradient All-Reduce under MP. The DP gradient All-Reduce of a layer
    hangs off its backward compute only, so it overlaps the backward pass of
    earlier layers.
    """
    b = _Builder()
    prev = None
    for i in range(model.num_layers):
        prev = b.compute(
            model.fwd_flops[i] / mp_degree,
            model.param_bytes[i] / mp_degree,
            deps=(prev,),
        )
        if mp_scope:
            prev = b.collective(
                CollectiveKind.ALL_GATHER, model.act_bytes[i], mp_scope, deps=(prev,)
            )
    for i in reversed(range(model.num_layers)):
        bwd = b.compute(
            model.bwd_flops[i] / mp_degree,
            model.param_bytes[i] / mp_degree,
            deps=(prev,),
        )
        prev = bwd
        if mp_scope:
            prev = b.collective(
                CollectiveKind.ALL_REDUCE, model.act_bytes[i], mp_scope, deps=(bwd,)
            )
        if dp_scope:
            b.collective(
                CollectiveKind.ALL_REDUCE,
                model.param_bytes[i] / mp_degree,
                dp_scope,
                deps=(bwd,),
            )
    return b.nodes


# -------------- data / model / hybrid parallel --------------


def gen_dp_trace(
    model: ModelShape, spec: TopologySpec, scope_dims: Optional[Sequence[int]] = None
) -> TraceFile:
    """
    Data-parallel training step.

    Every NPU runs the whole model on its own minibatch and all-reduces each
    layer's gradients over ``scope_dims`` (all dimensions when omitted).
    """
    scope = _scope(spec, scope_dims)
    if not scope:
        raise GeneratorError("data parallelism needs at least one scoped dimension")
    template = _build_layers(model, (), scope, 1)
    return _finish(
        replicate(template, spec.npu_count),
        spec.npu_count,
        {"name": "dp", "topology": spec.text, "scope_dims": list(scope),
         "model": model.to_dict()},
    )


def gen_mp_trace(
    model: ModelShape, spec: TopologySpec, scope_dims: Optional[Sequence[int]] = None
) -> TraceFile:
    """
    Model-parallel training step.

    Layer FLOPs are split evenly over the MP group spanned by ``scope_dims``.
    """
    scope = _scope(spec, scope_dims)
    if not scope:
        raise GeneratorError("model parallelism needs at least one scoped dimension")
    template = _build_layers(model, scope, (), _degree(spec, scope))
    return _finish(
        replicate(template, spec.npu_count),
        spec.npu_count,
        {"name": "mp", "topology": spec.text, "scope_dims": list(scope),
         "model": model.to_dict()},
    )


def gen_hybrid_trace(
    model: ModelShape,
    spec: TopologySpec,
    mp_scope: Sequence[int],
    dp_scope: Sequence[int],
) -> TraceFile:
    """
    Hybrid MP x DP training step.

    Parameters
    ----------
    mp_scope, dp_scope : sequence of int
        Disjoint dimension sets that together cover the topology. Either may
        be empty, which degenerates to pure DP or pure MP.

    Raises
    ------
    GeneratorError
        Overlapping scopes or scopes that do not cover every dimension.
    """
    mp = _scope(spec, mp_scope)
    dp = _scope(spec, dp_scope)
    overlap = sorted(set(mp) & set(dp))
    if overlap:
        raise GeneratorError(f"MP and DP scopes overlap on dimensions {overlap}")
    if _degree(spec, mp) * _degree(spec, dp) != spec.npu_count:
        raise GeneratorError(
            f"MP degree {_degree(spec, mp)} x DP degree {_degree(spec, dp)} does not "
            f"equal the {spec.npu_count} NPUs of {spec.text}"
        )
    template = _build_layers(model, mp, dp, _degree(spec, mp))
    return _finish(
        replicate(template, spec.npu_count),
        spec.npu_count,
        {"name": "hybrid", "topology": spec.text, "mp_scope": list(mp),
         "dp_scope": list(dp), "model": model.to_dict()},
    )


def split_degrees(
    spec: TopologySpec, mp_degree: int
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Split the dimensions into an inner MP scope of ``mp_degree`` NPUs and an
    outer DP scope.

    Raises
    ------
    GeneratorError
        When no prefix of the dimension stack multiplies to ``mp_degree``.
    """
    size = 1
    for j in range(spec.ndims + 1):
        if size == mp_degree:
            return tuple(range(1, j + 1)), tuple(range(j + 1, spec.ndims + 1))
        if j < spec.ndims:
            size *= spec.dims[j].size
    raise GeneratorError(
        f"MP degree {mp_degree} is not a product of the innermost dimensions of "
        f"{spec.text} ({spec.npu_count} NPUs)"
    )


# -------------- pipeline parallel --------------


def gen_pipeline_trace(
    model: ModelShape, spec: TopologySpec, stages: int, microbatches: int
) -> TraceFile:
    """
    GPipe-style pipeline-parallel step.

    NPUs are cut into ``stages`` contiguous rank blocks; stage ``s`` owns
    layers ``[s*L/stages, (s+1)*L/stages)``. Each microbatch carries ``1/M``
    of the FLOPs and activations. All forwards of a stage precede its
    backwards. Activations travel to the next stage with tag ``2m`` and input
    gradients travel back with tag ``2m + 1``.

    Raises
    ------
    GeneratorError
        ``stages`` does not divide the NPU count or the layer count.
    """
    for name, v in (("stages", stages), ("microbatches", microbatches)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise GeneratorError(f"{name} must be an int >= 1, got {v!r}")
    n, layers = spec.npu_count, model.num_layers
    if n % stages:
        raise GeneratorError(f"{stages} stages do not divide {n} NPUs")
    if layers % stages:
        raise GeneratorError(f"{stages} stages do not divide {layers} layers")
    group = n // stages
    per_stage = layers // stages
    m_count = Fraction(microbatches)

    nodes: List[TraceNode] = []
    for rank in range(n):
        s = rank // group
        own = range(s * per_stage, (s + 1) * per_stage)
        # activation entering this stage, and leaving it
        act_in = model.act_bytes[own[0] - 1] / m_count if s > 0 else Fraction(0)
        act_out = model.act_bytes[own[-1]] / m_count
        b = _Builder(rank)
        last = None
        for m in range(microbatches):
            recv = None
            if s > 0:
                recv = b.peer(act_in, rank - group, 2 * m, "recv", deps=(last,))
            for i in own:
                last = b.compute(
                    model.fwd_flops[i] / m_count,
                    model.param_bytes[i],
                    deps=(last, recv),
                )
                recv = None
            if s < stages - 1:
                b.peer(act_out, rank + group, 2 * m, "send", deps=(last,))
        for m in range(microbatches):
            recv = None
            if s < stages - 1:
                recv = b.peer(act_out, rank + group, 2 * m + 1, "recv", deps=(last,))
            for i in reversed(own):
                last = b.compute(
                    model.bwd_flops[i] / m_count,
                    model.param_bytes[i],
                    deps=(last, recv),
                )
                recv = None
            if s > 0:
                b.peer(act_in, rank - group, 2 * m + 1, "send", deps=(last,))
        nodes.extend(b.nodes)
    return _finish(
        nodes,
        n,
        {"name": "pipeline", "topology": spec.text, "stages": stages,
         "microbatches": microbatches, "model": model.to_dict()},
    )


# -------------- microbenchmark --------------


def gen_microbench(
    kind, nbytes: Number, spec: TopologySpec, scope_dims: Optional[Sequence[int]] = None
) -> TraceFile:
    """
    One collective per NPU, no compute.

    Parameters
    ----------
    kind : CollectiveKind or str
    nbytes : number
        Per-NPU collective size in bytes (``> 0``).
    spec : TopologySpec
    scope_dims : sequence of int, optional
        All dimensions when omitted.
    """
    try:
        kind = CollectiveKind.parse(kind)
    except PlanError as err:
        raise GeneratorError(str(err)) from None
    size = exact(nbytes)
    if size <= 0:
        raise GeneratorError(
            f"a microbenchmark collective needs a positive size, got {size}"
        )
    scope = _scope(spec, scope_dims)
    if not scope:
        raise GeneratorError("a microbenchmark collective needs a non-empty scope")
    node = TraceNode.collective(0, 0, kind, size, scope, 0)
    return _finish(
        replicate([node], spec.npu_count),
        spec.npu_count,
        {"name": "microbench", "topology": spec.text, "kind": kind.value,
         "bytes": render_exact(size), "scope_dims": list(scope)},
    )


# -------------- memory offload --------------


def gen_offload_trace(
    model: ModelShape, spec: TopologySpec, in_switch: bool = False
) -> TraceFile:
    """
    Training step with parameters resident in the disaggregated pool.

    Per layer, parameters are loaded from the pool before the forward compute
    and reloaded before the backward compute; gradients are stored back after
    it. Activations go to local memory during the forward pass and come back
    for the backward pass. Pool transfers run back to back on one queue per
    direction and use in-switch collectives when ``in_switch`` is set.
    """
    b = _Builder()
    fwd = None
    load = None
    act_store = []
    for i in range(model.num_layers):
        load = b.memory(model.param_bytes[i], "remote", "load", in_switch, deps=(load,))
        fwd = b.compute(model.fwd_flops[i], model.act_bytes[i], deps=(fwd, load))
        act_store.append(b.memory(model.act_bytes[i], "local", "store", deps=(fwd,)))
    bwd = fwd
    store = None
    for i in reversed(range(model.num_layers)):
        load = b.memory(model.param_bytes[i], "remote", "load", in_switch, deps=(load,))
        act = b.memory(model.act_bytes[i], "local", "load", deps=(act_store[i], bwd))
        bwd = b.compute(model.bwd_flops[i], model.act_bytes[i], deps=(bwd, load, act))
        store = b.memory(
            model.param_bytes[i], "remote", "store", in_switch, deps=(bwd, store)
        )
    return _finish(
        replicate(b.nodes, spec.npu_count),
        spec.npu_count,
        {"name": "offload", "topology": spec.text, "in_switch": bool(in_switch),
         "model": model.to_dict()},
    )


# -------------- config adapters --------------


def _model(params: Dict[str, Any]) -> ModelShape:
    model = params.get("model")
    if isinstance(model, ModelShape):
        return model
    return ModelShape.from_dict(model if model is not None else {})


def _reject_unknown(params: Dict[str, Any], allowed: Sequence[str], name: str) -> None:
    extra = sorted(set(params) - set(allowed))
    if extra:
        raise GeneratorError(f"generator {name!r} does not take {extra}")


def dp_from_params(spec: TopologySpec, **params) -> TraceFile:
    _reject_unknown(params, ("model", "scope_dims"), "dp")
    return gen_dp_trace(_model(params), spec, params.get("scope_dims"))


def mp_from_params(spec: TopologySpec, **params) -> TraceFile:
    _reject_unknown(params, ("model", "scope_dims"), "mp")
    return gen_mp_trace(_model(params), spec, params.get("scope_dims"))


def hybrid_from_params(spec: TopologySpec, **params) -> TraceFile:
    """
    ``mp_scope`` / ``dp_scope`` lists, or ``mp_degree`` (innermost dimensions
    form the MP group, the rest the DP group).
    """
    _reject_unknown(params, ("model", "mp_scope", "dp_scope", "mp_degree"), "hybrid")
    if "mp_degree" in params:
        mp, dp = split_degrees(spec, params["mp_degree"])
    else:
        mp, dp = params.get("mp_scope", []), params.get("dp_scope", [])
    return gen_hybrid_trace(_model(params), spec, mp, dp)


def pipeline_from_params(spec: TopologySpec, **params) -> TraceFile:
    _reject_unknown(params, ("model", "stages", "microbatches"), "pipeline")
    return gen_pipeline_trace(
        _model(params), spec, params.get("stages", 1), params.get("microbatches", 1)
    )


def microbench_from_params(spec: TopologySpec, **params) -> TraceFile:
    """``kind`` plus ``bytes`` or ``mb``; optional ``scope_dims``."""
    _reject_unknown(params, ("kind", "bytes", "mb", "scope_dims"), "microbench")
    if "bytes" in params:
        size = exact(params["bytes"])
    elif "mb" in params:
        size = exact(params["mb"]) * MIB
    else:
        raise GeneratorError("microbench needs 'bytes' or 'mb'")
    return gen_microbench(
        params.get("kind", "AllReduce"), size, spec, params.get("scope_dims")
    )


def offload_from_params(spec: TopologySpec, **params) -> TraceFile:
    _reject_unknown(params, ("model", "in_switch"), "offload")
    return gen_offload_trace(_model(params), spec, bool(params.get("in_switch", False)))
