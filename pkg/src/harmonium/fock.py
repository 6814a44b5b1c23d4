"""Classical Fock-space encoding of role/filler structures.

A symbol structure is a total assignment of fillers to an ordered set of
roles.  Filler id 0 is reserved for the empty symbol, so a space with N
proper fillers and R roles has (N+1)**R basis states.  Binding (creation),
unbinding (annihilation) and number operators act on single basis states;
double occupation of a role annihilates the state, which is represented by
a flag rather than an exception so that operator algebra elsewhere has a
representable zero.

Everything here is an immutable value; operations are pure functions and
safe to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class SizeLimitError(ValueError):
    """A requested dense dimension exceeds the configured limit."""


class UniqueBindingError(ValueError):
    """A role appears more than once in a set of bindings."""


class AnnihilatedStateError(ValueError):
    """An operation that requires a live basis state got the zero vector."""


@dataclass(frozen=True)
class Filler:
    """A symbol that can occupy a role.  Id 0 is the empty filler."""

    id: int
    name: str

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"filler id must be nonnegative, got {self.id}")


@dataclass(frozen=True)
class Role:
    """A position in a structure, e.g. a tree-node address like 'c_0'."""

    id: int
    name: str

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"role id must be nonnegative, got {self.id}")


EMPTY_FILLER = Filler(0, "0")


@dataclass(frozen=True, eq=False)
class FockBasisState:
    """One filler-or-empty per role, or the annihilated (zero) vector.

    Annihilated states compare equal to each other regardless of the
    occupation array they were derived from.
    """

    occupation: tuple[int, ...]
    annihilated: bool = False

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FockBasisState):
            return NotImplemented
        if self.annihilated or other.annihilated:
            return self.annihilated and other.annihilated
        return self.occupation == other.occupation

    def __hash__(self) -> int:
        if self.annihilated:
            return hash(("FockBasisState", "annihilated"))
        return hash(("FockBasisState", self.occupation))

    def __repr__(self) -> str:
        if self.annihilated:
            return "FockBasisState(annihilated)"
        return f"FockBasisState({list(self.occupation)})"

    def annihilate(self) -> "FockBasisState":
        return FockBasisState(self.occupation, annihilated=True)


@dataclass(frozen=True)
class PTPRStructure:
    """A positional-role structure: a set of (filler, role) bindings.

    Roles must be pairwise distinct (unique binding) and fillers nonzero.
    """

    bindings: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        roles = [r for _, r in self.bindings]
        if len(set(roles)) != len(roles):
            raise UniqueBindingError(f"duplicate role in bindings: {roles}")
        for f, r in self.bindings:
            if f <= 0:
                raise ValueError(f"binding filler must be nonzero, got {f}")
            if r < 0:
                raise ValueError(f"binding role must be nonnegative, got {r}")

    @classmethod
    def of(cls, bindings: Iterable[tuple[int, int]]) -> "PTPRStructure":
        return cls(tuple((int(f), int(r)) for f, r in bindings))


def fock_dimension(num_roles: int, num_fillers: int,
                   max_dim: int | None = None) -> int:
    """Dimension (N+1)**R of the space over R roles and N proper fillers.

    Raises SizeLimitError when the result exceeds ``max_dim``; this is the
    gate used before materializing dense operators.
    """
    if num_roles < 0 or num_fillers < 0:
        raise ValueError("role and filler counts must be nonnegative")
    dim = (num_fillers + 1) ** num_roles
    if max_dim is not None and dim > max_dim:
        raise SizeLimitError(
            f"dimension {dim} = ({num_fillers}+1)**{num_roles} exceeds the "
            f"dense limit {max_dim}")
    return dim


def ptpr_dimension(num_roles: int, num_fillers: int) -> int:
    """Dimension R*N of the corresponding positional-role product space."""
    if num_roles < 0 or num_fillers < 0:
        raise ValueError("role and filler counts must be nonnegative")
    return num_roles * num_fillers


def ptpr_to_fock(structure: PTPRStructure | Iterable[tuple[int, int]],
                 num_roles: int, num_fillers: int) -> FockBasisState:
    """Transcribe a positional-role structure into a basis state.

    Each binding (f, r) sets occupation[r] = f; unbound roles stay empty.
    The map is injective: distinct structures give distinct states.
    """
    if not isinstance(structure, PTPRStructure):
        structure = PTPRStructure.of(structure)
    occ = [0] * num_roles
    for f, r in structure.bindings:
        if not 0 <= r < num_roles:
            raise ValueError(f"role id {r} out of range 0..{num_roles - 1}")
        if not 1 <= f <= num_fillers:
            raise ValueError(f"filler id {f} out of range 1..{num_fillers}")
        occ[r] = f
    return FockBasisState(tuple(occ))


@dataclass(frozen=True)
class FockSpace:
    """An ordered set of roles plus a filler alphabet (index 0 = empty).

    Role order is the declaration order and fixes basis-state indexing:
    role 0 is the most significant digit of the mixed-radix index.
    """

    roles: tuple[Role, ...]
    fillers: tuple[Filler, ...]

    def __post_init__(self) -> None:
        if not self.fillers or self.fillers[0].id != 0:
            raise ValueError("fillers must start with the empty filler (id 0)")
        for i, f in enumerate(self.fillers):
            if f.id != i:
                raise ValueError(f"filler ids must be dense 0..N, got {f.id} at {i}")
        for i, r in enumerate(self.roles):
            if r.id != i:
                raise ValueError(f"role ids must be dense 0..R-1, got {r.id} at {i}")
        if len({f.name for f in self.fillers}) != len(self.fillers):
            raise ValueError("filler names must be unique")
        if len({r.name for r in self.roles}) != len(self.roles):
            raise ValueError("role names must be unique")

    @classmethod
    def create(cls, role_names: Sequence[str],
               filler_names: Sequence[str]) -> "FockSpace":
        """Build a space from names; the empty filler is added automatically."""
        roles = tuple(Role(i, n) for i, n in enumerate(role_names))
        fillers = (EMPTY_FILLER,) + tuple(
            Filler(i + 1, n) for i, n in enumerate(filler_names))
        return cls(roles, fillers)

    @property
    def num_roles(self) -> int:
        return len(self.roles)

    @property
    def num_fillers(self) -> int:
        """Number of proper (nonempty) fillers N."""
        return len(self.fillers) - 1

    def dimension(self, max_dim: int | None = None) -> int:
        return fock_dimension(self.num_roles, self.num_fillers, max_dim)

    def vacuum(self) -> FockBasisState:
        return FockBasisState((0,) * self.num_roles)

    def _role_id(self, role: Role | int) -> int:
        r = role.id if isinstance(role, Role) else int(role)
        if not 0 <= r < self.num_roles:
            raise ValueError(f"role {r} out of range 0..{self.num_roles - 1}")
        return r

    def _filler_id(self, filler: Filler | int) -> int:
        f = filler.id if isinstance(filler, Filler) else int(filler)
        if not 0 <= f <= self.num_fillers:
            raise ValueError(f"filler {f} out of range 0..{self.num_fillers}")
        return f

    def bind(self, state: FockBasisState, role: Role | int,
             filler: Filler | int) -> FockBasisState:
        """Place a filler in a role; binding an occupied role annihilates."""
        r = self._role_id(role)
        f = self._filler_id(filler)
        if f == 0:
            raise ValueError("cannot bind the empty filler")
        if state.annihilated:
            return state
        if state.occupation[r] != 0:
            return state.annihilate()
        occ = list(state.occupation)
        occ[r] = f
        return FockBasisState(tuple(occ))

    def unbind(self, state: FockBasisState, role: Role | int,
               filler: Filler | int) -> FockBasisState:
        """Remove a filler from a role; any mismatch annihilates."""
        r = self._role_id(role)
        f = self._filler_id(filler)
        if f == 0:
            raise ValueError("cannot unbind the empty filler")
        if state.annihilated:
            return state
        if state.occupation[r] != f:
            return state.annihilate()
        occ = list(state.occupation)
        occ[r] = 0
        return FockBasisState(tuple(occ))

    def number(self, state: FockBasisState, role: Role | int,
               filler: Filler | int) -> int:
        """Occupation indicator: 1 iff the role holds exactly that filler.

        Equivalent to applying unbind-then-bind and testing survival.
        """
        if state.annihilated:
            raise AnnihilatedStateError("number operator needs a live state")
        r = self._role_id(role)
        f = self._filler_id(filler)
        if f == 0:
            raise ValueError("number operator is defined for proper fillers")
        return 1 if state.occupation[r] == f else 0

    def state_index(self, state: FockBasisState) -> int:
        """Mixed-radix basis index; role 0 is the most significant digit."""
        if state.annihilated:
            raise AnnihilatedStateError("the zero vector has no basis index")
        if len(state.occupation) != self.num_roles:
            raise ValueError("state length does not match role count")
        base = self.num_fillers + 1
        idx = 0
        for occ in state.occupation:
            idx = idx * base + occ
        return idx

    def state_from_index(self, index: int) -> FockBasisState:
        base = self.num_fillers + 1
        dim = self.dimension()
        if not 0 <= index < dim:
            raise ValueError(f"index {index} out of range 0..{dim - 1}")
        occ = [0] * self.num_roles
        for r in range(self.num_roles - 1, -1, -1):
            occ[r] = index % base
            index //= base
        return FockBasisState(tuple(occ))

    def ptpr_to_fock(self, structure: PTPRStructure) -> FockBasisState:
        return ptpr_to_fock(structure, self.num_roles, self.num_fillers)
