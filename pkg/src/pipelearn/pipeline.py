"""Phases, operator combinations and their joint action spaces.

An action assigns one grid value to every parameter of every operator of
a combination. Actions are numbered in mixed radix over the parameter
grids, in chain order, with the last parameter varying fastest.
"""
import itertools
import logging
from dataclasses import dataclass
from math import prod

from .errors import PipelineError
from .imgcore import as_gray
from .operators import Kind, OperatorInstance, apply_operator

__all__ = [
    "Phase",
    "Combination",
    "ActionSpace",
    "Action",
    "enumerate_combinations",
    "build_action_space",
    "decode_action",
    "encode_action",
    "apply_pipeline",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Phase:
    name: str
    candidates: tuple

    def __post_init__(self):
        if not self.candidates:
            raise PipelineError(f"phase {self.name!r} has no candidate operators")
        names = [op.name for op in self.candidates]
        if len(set(names)) != len(names):
            raise PipelineError(f"phase {self.name!r} lists an operator twice: {names}")


@dataclass(frozen=True)
class Combination:
    operators: tuple

    def __post_init__(self):
        if not self.operators:
            raise PipelineError("empty combination")
        for a, b in zip(self.operators, self.operators[1:]):
            if a.output_kind != b.input_kind:
                raise PipelineError(
                    f"{a.name} -> {b.name}: {a.output_kind.value} output cannot feed "
                    f"{b.input_kind.value} input")

    @property
    def names(self):
        return tuple(op.name for op in self.operators)

    @property
    def label(self):
        return "(" + ", ".join(self.names) + ")"

    def __len__(self):
        return len(self.operators)


@dataclass(frozen=True)
class ActionSpace:
    combination: Combination
    dims: tuple

    @property
    def size(self):
        return prod(self.dims)

    @property
    def grids(self):
        return [g for op in self.combination.operators for g in op.param_grids]


@dataclass(frozen=True)
class Action:
    index: int
    assignment: tuple   # flat, one value per parameter in chain order

    def per_operator(self, combination):
        """Split the flat assignment into one value tuple per operator."""
        out, pos = [], 0
        for op in combination.operators:
            n = len(op.param_names)
            out.append(tuple(self.assignment[pos:pos + n]))
            pos += n
        return out


def enumerate_combinations(phases):
    """All kind-compatible chains picking one operator per phase.

    The first operator must take a gray image and the last must produce a
    binary one. Order is lexicographic in candidate position.
    """
    if not phases:
        raise PipelineError("no phases given")
    for ph in phases:
        if not ph.candidates:
            raise PipelineError(f"phase {ph.name!r} has no candidate operators")
    combos = []
    for chain in itertools.product(*(ph.candidates for ph in phases)):
        names = [op.name for op in chain]
        if chain[0].input_kind != Kind.GRAY or chain[-1].output_kind != Kind.BINARY:
            log.warning("dropping %s: chain must map a gray image to a binary one", names)
            continue
        if any(a.output_kind != b.input_kind for a, b in zip(chain, chain[1:])):
            log.warning("dropping %s: incompatible image kinds between operators", names)
            continue
        combos.append(Combination(tuple(chain)))
    if not combos:
        raise PipelineError("no kind-compatible operator combination")
    return combos


def build_action_space(combination):
    dims = tuple(len(g) for op in combination.operators for g in op.param_grids)
    if any(d == 0 for d in dims):
        raise PipelineError(f"{combination.label}: empty parameter grid")
    return ActionSpace(combination, dims)


def decode_action(space, index):
    if isinstance(index, bool) or not 0 <= index < space.size:
        raise PipelineError(f"action index {index} out of range [0, {space.size})")
    digits = []
    rest = int(index)
    for d in reversed(space.dims):
        rest, digit = divmod(rest, d)
        digits.append(digit)
    digits.reverse()
    return Action(int(index), tuple(g[i] for g, i in zip(space.grids, digits)))


def encode_action(space, assignment):
    """Inverse of :func:`decode_action`."""
    assignment = tuple(assignment)
    if len(assignment) != len(space.dims):
        raise PipelineError(f"expected {len(space.dims)} values, got {len(assignment)}")
    index = 0
    for grid, value in zip(space.grids, assignment):
        try:
            digit = grid.index(value)
        except ValueError:
            raise PipelineError(f"value {value!r} not in grid {list(grid)}") from None
        index = index * len(grid) + digit
    return index


def apply_pipeline(img, combination, action):
    """Run the operators of ``combination`` in order with ``action``'s values."""
    out = as_gray(img)
    if len(action.assignment) != sum(len(op.param_names) for op in combination.operators):
        raise PipelineError("action does not belong to this combination")
    for op, values in zip(combination.operators, action.per_operator(combination)):
        out = apply_operator(OperatorInstance(op, values), out)
    return out
