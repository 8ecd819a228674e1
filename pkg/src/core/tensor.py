#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Tensores densos em float64 com diferenciação reversa

Cada operação executada com um ComputationRecord ativo registra um nó
(tipo, pais, valor, função vjp). backward() percorre os nós em ordem
reversa e acumula os gradientes nos parâmetros.
"""

import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
try:
    from ..utils.errors import ContractError, DimensionError, DomainError
except ImportError:
    # Fallback para quando executado da raiz
    import sys
    import os
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))
    from utils.errors import ContractError, DimensionError, DomainError

Number = Union[int, float]
Vjp = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_state = threading.local()


def _record_stack() -> List['ComputationRecord']:
    stack = getattr(_state, 'stack', None)
    if stack is None:
        stack = []
        _state.stack = stack
    return stack


def active_record() -> Optional['ComputationRecord']:
    """Retorna o registro ativo na thread atual (ou None)"""
    stack = _record_stack()
    return stack[-1] if stack else None


class Tensor:
    """Array denso de float64, opcionalmente ligado a um nó do registro ativo"""

    __slots__ = ('values', 'node', 'record')

    def __init__(self, values, node: Optional[int] = None, record: Optional['ComputationRecord'] = None):
        self.values = np.asarray(values, dtype=np.float64)
        self.node = node
        self.record = record

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return int(self.values.size)

    def item(self) -> float:
        return float(self.values.reshape(-1)[0]) if self.values.size == 1 else float('nan')

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def is_tracked(self) -> bool:
        return self.node is not None and self.record is not None

    def __repr__(self) -> str:
        tag = f" node={self.node}" if self.node is not None else ""
        return f"Tensor(shape={self.shape}{tag})"

    def __add__(self, other): return add(self, other)
    def __radd__(self, other): return add(other, self)
    def __sub__(self, other): return sub(self, other)
    def __rsub__(self, other): return sub(other, self)
    def __mul__(self, other): return mul(self, other)
    def __rmul__(self, other): return mul(other, self)
    def __neg__(self): return neg(self)
    def __matmul__(self, other): return matmul(self, other)


@dataclass
class Node:
    kind: str
    parents: Tuple[int, ...]
    value: np.ndarray
    vjp: Optional[Vjp]


class Parameter:
    """Parâmetro nomeado com acumulador de gradiente de mesma forma"""

    def __init__(self, name: str, values):
        self.name = name
        self.value = np.array(values, dtype=np.float64)
        self.grad = np.zeros_like(self.value)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    def tensor(self) -> Tensor:
        """Tensor do parâmetro; folha rastreada se houver registro ativo"""
        record = active_record()
        if record is None:
            return Tensor(self.value)
        return record.leaf(self)

    def zero_grad(self):
        self.grad = np.zeros_like(self.value)

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.shape})"


class ParameterSet:
    """Conjunto ordenado de parâmetros com nomes únicos"""

    def __init__(self, parameters: Optional[Sequence[Parameter]] = None):
        self._params: 'OrderedDict[str, Parameter]' = OrderedDict()
        for param in parameters or []:
            self.add(param)

    def add(self, param: Parameter) -> Parameter:
        if param.name in self._params:
            raise ContractError(f"Parâmetro duplicado: {param.name}")
        self._params[param.name] = param
        return param

    def create(self, name: str, values) -> Parameter:
        return self.add(Parameter(name, values))

    def __getitem__(self, name: str) -> Parameter:
        try:
            return self._params[name]
        except KeyError:
            raise ContractError(f"Parâmetro ausente: {name}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[Parameter]:
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> List[str]:
        return list(self._params.keys())

    def zero_grad(self):
        for param in self:
            param.zero_grad()

    def gradients(self) -> Dict[str, np.ndarray]:
        return {p.name: p.grad for p in self}

    def values(self) -> Dict[str, np.ndarray]:
        return {p.name: p.value for p in self}

    def copy(self) -> 'ParameterSet':
        return ParameterSet([Parameter(p.name, p.value.copy()) for p in self])

    def subset(self, names: Sequence[str]) -> 'ParameterSet':
        """Novo conjunto que compartilha os arrays dos parâmetros nomeados"""
        subset = ParameterSet()
        for name in names:
            source = self[name]
            shared = Parameter(name, source.value)
            shared.value = source.value
            subset.add(shared)
        return subset

    def size(self) -> int:
        return int(sum(p.value.size for p in self))


class ComputationRecord:
    """Fita de computação de um passo de treinamento"""

    def __init__(self):
        self.nodes: List[Node] = []
        self.grads: Dict[int, np.ndarray] = {}
        self._leaves: Dict[int, Parameter] = {}
        self._param_tensors: Dict[str, Tensor] = {}

    def __enter__(self) -> 'ComputationRecord':
        _record_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        stack = _record_stack()
        if stack and stack[-1] is self:
            stack.pop()
        return False

    def add_node(self, kind: str, parents: Tuple[int, ...], value: np.ndarray, vjp: Optional[Vjp]) -> int:
        self.nodes.append(Node(kind, parents, value, vjp))
        return len(self.nodes) - 1

    def leaf(self, param: Parameter) -> Tensor:
        cached = self._param_tensors.get(param.name)
        if cached is not None:
            return cached
        node = self.add_node('param', (), param.value, None)
        tensor = Tensor(param.value, node=node, record=self)
        self._leaves[node] = param
        self._param_tensors[param.name] = tensor
        return tensor

    def backward(self, loss: Tensor) -> Dict[str, np.ndarray]:
        """
        Propaga o gradiente de uma perda escalar

        Args:
            loss: Tensor escalar (forma () ou (1,)) registrado neste registro

        Returns:
            Dict[str, np.ndarray]: gradientes acumulados por parâmetro
        """
        if loss.values.size != 1 or loss.ndim > 1:
            raise ContractError(f"backward exige perda escalar, recebida forma {loss.shape}")
        if loss.record is not self or loss.node is None:
            raise ContractError("A perda não pertence a este registro de computação")

        grads: Dict[int, np.ndarray] = {loss.node: np.ones_like(loss.values)}
        for index in range(loss.node, -1, -1):
            g = grads.get(index)
            if g is None:
                continue
            node = self.nodes[index]
            if node.vjp is None:
                continue
            for parent, parent_grad in zip(node.parents, node.vjp(g)):
                if parent < 0 or parent_grad is None:
                    continue
                if parent in grads:
                    grads[parent] = grads[parent] + parent_grad
                else:
                    grads[parent] = parent_grad

        for index, g in grads.items():
            if index in self.grads:
                self.grads[index] = self.grads[index] + g
            else:
                self.grads[index] = g

        for index, param in self._leaves.items():
            if index in grads:
                param.grad += grads[index]
        return {param.name: param.grad for param in self._leaves.values()}


def backward(record: ComputationRecord, loss: Tensor) -> Dict[str, np.ndarray]:
    """Atalho funcional para ComputationRecord.backward"""
    return record.backward(loss)


# ---------------------------------------------------------------------------
# Registro de operações
# ---------------------------------------------------------------------------

def as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=np.float64))


def _emit(kind: str, inputs: Sequence[Tensor], value: np.ndarray, vjp: Vjp) -> Tensor:
    record = active_record()
    if record is None:
        return Tensor(value)
    parents = []
    tracked = False
    for tensor in inputs:
        if tensor.node is not None and tensor.record is not None:
            if tensor.record is not record:
                raise ContractError(f"{kind}: tensor pertence a outro registro de computação")
            parents.append(tensor.node)
            tracked = True
        else:
            parents.append(-1)
    if not tracked:
        return Tensor(value)
    node = record.add_node(kind, tuple(parents), value, vjp)
    return Tensor(value, node=node, record=record)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    return np.full(shape, grad.sum())


def _binary_shape(kind: str, a: Tensor, b: Tensor) -> Tuple[int, ...]:
    if a.shape == b.shape:
        return a.shape
    # Broadcasting limitado a escalar com tensor
    if a.size == 1:
        return b.shape
    if b.size == 1:
        return a.shape
    raise DimensionError(kind, a.shape, b.shape)


def _scalar_view(t: Tensor, target: Tuple[int, ...]) -> np.ndarray:
    if t.shape == target:
        return t.values
    return t.values.reshape(())


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError('matmul', a.shape, b.shape)
    av, bv = a.values, b.values
    return _emit('matmul', (a, b), av @ bv, lambda g: (g @ bv.T, av.T @ g))


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    shape = _binary_shape('add', a, b)
    value = _scalar_view(a, shape) + _scalar_view(b, shape)
    return _emit('add', (a, b), value,
                 lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    shape = _binary_shape('sub', a, b)
    value = _scalar_view(a, shape) - _scalar_view(b, shape)
    return _emit('sub', (a, b), value,
                 lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    shape = _binary_shape('mul', a, b)
    av, bv = _scalar_view(a, shape), _scalar_view(b, shape)
    return _emit('mul', (a, b), av * bv,
                 lambda g: (_unbroadcast(g * bv, a.shape), _unbroadcast(g * av, b.shape)))


def neg(x) -> Tensor:
    x = as_tensor(x)
    return _emit('neg', (x,), -x.values, lambda g: (-g,))


def tanh(x) -> Tensor:
    x = as_tensor(x)
    y = np.tanh(x.values)
    return _emit('tanh', (x,), y, lambda g: (g * (1.0 - y * y),))


def sigmoid(x) -> Tensor:
    x = as_tensor(x)
    y = 0.5 * (1.0 + np.tanh(0.5 * x.values))
    return _emit('sigmoid', (x,), y, lambda g: (g * y * (1.0 - y),))


def exp(x) -> Tensor:
    x = as_tensor(x)
    y = np.exp(x.values)
    return _emit('exp', (x,), y, lambda g: (g * y,))


def ln(x) -> Tensor:
    x = as_tensor(x)
    if np.any(x.values <= 0.0):
        raise DomainError("ln exige entrada estritamente positiva")
    xv = x.values
    return _emit('ln', (x,), np.log(xv), lambda g: (g / xv,))


_POINTWISE = {
    'tanh': tanh,
    'sigmoid': sigmoid,
    'exp': exp,
    'ln': ln,
    'neg': neg,
    'add': add,
    'mul': mul,
    'sub': sub,
}


def pointwise(kind: str, *inputs) -> Tensor:
    """Aplica uma operação elemento a elemento pelo nome"""
    try:
        op = _POINTWISE[kind]
    except KeyError:
        raise ContractError(f"Operação pontual desconhecida: {kind}") from None
    return op(*inputs)


def softmax_last_dim(x) -> Tensor:
    x = as_tensor(x)
    shifted = x.values - np.max(x.values, axis=-1, keepdims=True)
    e = np.exp(shifted)
    y = e / np.sum(e, axis=-1, keepdims=True)

    def vjp(g):
        return (y * (g - np.sum(g * y, axis=-1, keepdims=True)),)
    return _emit('softmax', (x,), y, vjp)


def log_softmax_last_dim(x) -> Tensor:
    x = as_tensor(x)
    shifted = x.values - np.max(x.values, axis=-1, keepdims=True)
    log_norm = np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))
    y = shifted - log_norm
    probs = np.exp(y)

    def vjp(g):
        return (g - probs * np.sum(g, axis=-1, keepdims=True),)
    return _emit('log_softmax', (x,), y, vjp)


def sum_all(x) -> Tensor:
    x = as_tensor(x)
    shape = x.shape
    return _emit('sum', (x,), np.asarray(x.values.sum()),
                 lambda g: (np.full(shape, float(g)),))


def sum_last_dim(x) -> Tensor:
    x = as_tensor(x)
    shape = x.shape
    return _emit('sum_last', (x,), x.values.sum(axis=-1),
                 lambda g: (np.broadcast_to(g[..., None], shape).copy(),))


def transpose(x) -> Tensor:
    x = as_tensor(x)
    if x.ndim != 2:
        raise DimensionError('transpose', x.shape)
    return _emit('transpose', (x,), x.values.T.copy(), lambda g: (g.T,))


def concat_last(tensors: Sequence) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    lead = parts[0].shape[:-1]
    for part in parts[1:]:
        if part.shape[:-1] != lead:
            raise DimensionError('concat', *[p.shape for p in parts])
    widths = [p.shape[-1] for p in parts]
    bounds = np.cumsum([0] + widths)

    def vjp(g):
        return tuple(g[..., bounds[i]:bounds[i + 1]] for i in range(len(parts)))
    return _emit('concat', parts, np.concatenate([p.values for p in parts], axis=-1), vjp)


def slice_last(x, start: int, stop: int) -> Tensor:
    x = as_tensor(x)
    if not 0 <= start < stop <= x.shape[-1]:
        raise DimensionError('slice', x.shape, (start, stop))
    shape = x.shape

    def vjp(g):
        full = np.zeros(shape)
        full[..., start:stop] = g
        return (full,)
    return _emit('slice', (x,), x.values[..., start:stop].copy(), vjp)


def gather_rows(table, ids) -> Tensor:
    """Seleciona linhas de uma matriz (lookup de embeddings)"""
    table = as_tensor(table)
    index = np.asarray(ids, dtype=np.int64).reshape(-1)
    if table.ndim != 2:
        raise DimensionError('gather_rows', table.shape)
    if index.size and (index.min() < 0 or index.max() >= table.shape[0]):
        raise ContractError(f"gather_rows: índice fora de [0, {table.shape[0]})")
    shape = table.shape

    def vjp(g):
        full = np.zeros(shape)
        np.add.at(full, index, g)
        return (full,)
    return _emit('gather', (table,), table.values[index], vjp)


def pick_last(x, ids) -> Tensor:
    """Para cada linha b, retorna x[b, ids[b]]"""
    x = as_tensor(x)
    index = np.asarray(ids, dtype=np.int64).reshape(-1)
    if x.ndim != 2 or index.shape[0] != x.shape[0]:
        raise DimensionError('pick', x.shape, index.shape)
    rows = np.arange(x.shape[0])
    shape = x.shape

    def vjp(g):
        full = np.zeros(shape)
        full[rows, index] = g
        return (full,)
    return _emit('pick', (x,), x.values[rows, index], vjp)


def tile_rows(vector, n: int) -> Tensor:
    """Repete um vetor (d,) ou (1, d) em n linhas; alinhamento explícito de bias"""
    vector = as_tensor(vector)
    if vector.ndim == 2 and vector.shape[0] != 1 or vector.ndim > 2:
        raise DimensionError('tile_rows', vector.shape)
    shape = vector.shape
    row = vector.values.reshape(1, -1)
    return _emit('tile', (vector,), np.repeat(row, n, axis=0),
                 lambda g: (g.sum(axis=0).reshape(shape),))


def stack_steps(steps: Sequence) -> Tensor:
    """Empilha L tensores (B, H) em (B, L, H)"""
    parts = [as_tensor(t) for t in steps]
    first = parts[0].shape
    for part in parts:
        if part.shape != first or part.ndim != 2:
            raise DimensionError('stack', *[p.shape for p in parts])

    def vjp(g):
        return tuple(g[:, k, :] for k in range(len(parts)))
    return _emit('stack', parts, np.stack([p.values for p in parts], axis=1), vjp)


def batched_matvec(states, query) -> Tensor:
    """(B, L, H) · (B, H) -> (B, L)"""
    states, query = as_tensor(states), as_tensor(query)
    if states.ndim != 3 or query.ndim != 2 or states.shape[0] != query.shape[0] \
            or states.shape[2] != query.shape[1]:
        raise DimensionError('batched_matvec', states.shape, query.shape)
    sv, qv = states.values, query.values

    def vjp(g):
        return (g[:, :, None] * qv[:, None, :], np.einsum('bl,blh->bh', g, sv))
    return _emit('batched_matvec', (states, query), np.einsum('blh,bh->bl', sv, qv), vjp)


def batched_weighted_sum(weights, states) -> Tensor:
    """(B, L) pesos sobre (B, L, H) -> (B, H)"""
    weights, states = as_tensor(weights), as_tensor(states)
    if weights.ndim != 2 or states.ndim != 3 or weights.shape != states.shape[:2]:
        raise DimensionError('batched_weighted_sum', weights.shape, states.shape)
    wv, sv = weights.values, states.values

    def vjp(g):
        return (np.einsum('bh,blh->bl', g, sv), wv[:, :, None] * g[:, None, :])
    return _emit('batched_weighted_sum', (weights, states), np.einsum('bl,blh->bh', wv, sv), vjp)
