"""Generator sets and the group actions that define the vertex spaces.

Vertex spaces and their integer indexing (bit-exact, used for persistence):

* ``ProjectiveLine``: z in GF(p) -> z, the point at infinity -> p.
* ``PuncturedAffinePlane``: column vector (x, y) != (0, 0) -> x*p + y - 1.
* ``FullGroup``: :func:`~sl2graphs.modp.sl2_index`.
* ``PermutationDomain``: {0, ..., n-1} -> itself.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import BadPrimeResidue, ConfigError, InvalidVertex, ModulusMismatch, NotSymmetric
from .modp import (
    FieldElement,
    SL2Element,
    check_modulus,
    field_inv,
    sl2_index,
    sl2_inv,
    sl2_mul,
    sl2_order,
    sl2_unindex,
    sqrt_mod,
)

INFINITY = "inf"


class SpaceKind(enum.IntEnum):
    PROJECTIVE = 0
    AFFINE = 1
    GROUP = 2
    PERM = 3

    @classmethod
    def parse(cls, name) -> "SpaceKind":
        if isinstance(name, SpaceKind):
            return name
        aliases = {
            "projective": cls.PROJECTIVE,
            "projectiveline": cls.PROJECTIVE,
            "affine": cls.AFFINE,
            "puncturedaffineplane": cls.AFFINE,
            "group": cls.GROUP,
            "fullgroup": cls.GROUP,
            "perm": cls.PERM,
            "permutationdomain": cls.PERM,
        }
        try:
            return aliases[str(name).lower().replace("_", "")]
        except KeyError:
            raise ConfigError(f"unknown vertex space {name!r}") from None


@dataclass(frozen=True)
class VertexSpace:
    kind: SpaceKind
    size: int  # p for the SL2 spaces, n for permutation domains

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind.parse(self.kind))
        if self.kind is SpaceKind.PERM:
            if self.size < 1:
                raise ConfigError("permutation domain needs n >= 1")
        else:
            check_modulus(self.size)

    @classmethod
    def projective(cls, p):
        return cls(SpaceKind.PROJECTIVE, p)

    @classmethod
    def affine(cls, p):
        return cls(SpaceKind.AFFINE, p)

    @classmethod
    def group(cls, p):
        return cls(SpaceKind.GROUP, p)

    @classmethod
    def perm(cls, n):
        return cls(SpaceKind.PERM, n)

    @property
    def p(self) -> int:
        return self.size

    @property
    def n(self) -> int:
        s = self.size
        return {
            SpaceKind.PROJECTIVE: s + 1,
            SpaceKind.AFFINE: s * s - 1,
            SpaceKind.GROUP: s**3 - s,
            SpaceKind.PERM: s,
        }[self.kind]

    @property
    def name(self) -> str:
        return self.kind.name.lower()


@dataclass(frozen=True)
class GeneratorSet:
    """A symmetric generator multiset.

    ``inverse_of[i]`` names the letter that is the formal inverse of letter
    ``i``.  ``projective=True`` marks sets that are closed under inversion
    only up to the central element -1 (the LPS set), which is enough for the
    Mobius action on the projective line but not for the other spaces.
    """

    elements: tuple
    inverse_of: tuple
    kind: str
    p: int | None = None
    n: int | None = None
    seed: int | None = None
    projective: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.inverse_of) != len(self.elements):
            raise ConfigError("inverse_of must pair every element")
        for i, j in enumerate(self.inverse_of):
            if self.inverse_of[j] != i:
                raise ConfigError("inverse pairing is not an involution")

    def __len__(self):
        return len(self.elements)

    @property
    def k(self) -> int:
        return len(self.elements)

    @property
    def is_permutation(self) -> bool:
        return self.n is not None

    def matrices(self) -> np.ndarray:
        """``(k, 4)`` int64 array of row-major entries."""
        if self.is_permutation:
            raise ConfigError("permutation generators have no matrices")
        return np.array([g.entries for g in self.elements], dtype=np.int64).reshape(-1, 4)

    def permutations(self) -> np.ndarray:
        if not self.is_permutation:
            raise ConfigError("matrix generators have no permutation form")
        return np.array(self.elements, dtype=np.int64).reshape(-1, self.n)

    @property
    def contains_identity(self) -> bool:
        if self.is_permutation:
            return any(list(g) == list(range(self.n)) for g in self.elements)
        return any(g.entries == (1, 0, 0, 1) for g in self.elements)

    def check_symmetric(self, space: VertexSpace | None = None):
        """Raise :class:`NotSymmetric` unless the pairing is an exact inverse
        (or, for the projective line, an inverse up to sign)."""
        up_to_sign = space is not None and space.kind is SpaceKind.PROJECTIVE
        for i, j in enumerate(self.inverse_of):
            gi, gj = self.elements[i], self.elements[j]
            if self.is_permutation:
                ok = all(gj[gi[x]] == x for x in range(self.n))
            else:
                prod = sl2_mul(gj, gi).entries
                ok = prod == (1, 0, 0, 1) or (up_to_sign and prod == (self.p - 1, 0, 0, self.p - 1))
            if not ok:
                where = space.name if space else "the group"
                raise NotSymmetric(f"letter {j} is not the inverse of letter {i} on {where}")

    def to_json(self) -> dict:
        out = {"p": self.p, "kind": self.kind}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.is_permutation:
            out["n"] = self.n
            out["permutations"] = [list(map(int, g)) for g in self.elements]
        else:
            out["matrices"] = [list(g.entries) for g in self.elements]
        out["inverse_of"] = list(self.inverse_of)
        if self.projective:
            out["projective"] = True
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj) -> "GeneratorSet":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if "permutations" in obj:
            elements = tuple(tuple(int(x) for x in g) for g in obj["permutations"])
            inverse_of = obj.get("inverse_of") or _pair_inverses_perm(elements)
            return cls(elements, tuple(inverse_of), obj.get("kind", "custom"),
                       n=int(obj["n"]), seed=obj.get("seed"))
        p = int(obj["p"])
        elements = tuple(SL2Element(*m, p) for m in obj["matrices"])
        inverse_of = obj.get("inverse_of") or _pair_inverses(elements)
        return cls(elements, tuple(inverse_of), obj.get("kind", "custom"), p=p,
                   seed=obj.get("seed"), projective=bool(obj.get("projective", False)))


def _pair_inverses(elements) -> list[int]:
    """Match each matrix with an unused inverse (greedy, stable)."""
    out = [-1] * len(elements)
    for i, g in enumerate(elements):
        if out[i] >= 0:
            continue
        target = sl2_inv(g)
        for j in range(i, len(elements)):
            if out[j] < 0 and elements[j] == target and (j != i or g == target):
                out[i], out[j] = j, i
                break
        else:
            raise NotSymmetric(f"{g} has no inverse in the set")
    return out


def _pair_inverses_perm(elements) -> list[int]:
    out = [-1] * len(elements)
    for i, g in enumerate(elements):
        if out[i] >= 0:
            continue
        inv = [0] * len(g)
        for x, y in enumerate(g):
            inv[y] = x
        inv = tuple(inv)
        for j in range(i, len(elements)):
            if out[j] < 0 and tuple(elements[j]) == inv and (j != i or tuple(g) == inv):
                out[i], out[j] = j, i
                break
        else:
            raise NotSymmetric("permutation without inverse in the set")
    return out


def from_matrices(matrices, p: int, kind: str = "custom") -> GeneratorSet:
    elements = tuple(SL2Element(*m, p) for m in matrices)
    return GeneratorSet(elements, tuple(_pair_inverses(elements)), kind, p=p)


def fixed_generators_S(p: int) -> GeneratorSet:
    """``{[[1, +-2], [0, 1]], [[1, 0], [+-2, 1]]}`` reduced mod p."""
    check_modulus(p)
    elements = (
        SL2Element(1, 2, 0, 1, p),
        SL2Element(1, -2, 0, 1, p),
        SL2Element(1, 0, 2, 1, p),
        SL2Element(1, 0, -2, 1, p),
    )
    return GeneratorSet(elements, (1, 0, 3, 2), "fixed", p=p)


def lps_generators(p: int) -> GeneratorSet:
    """The LPS set attached to the prime 3, for p = 1 (mod 12).

    ``(1/sqrt3) [[i, x], [-conj(x), -i]]`` for x in {1+i, -1+i, 1-i, -1-i},
    where i and sqrt3 are the canonical square roots of -1 and 3.  Each
    matrix squares to -1, so the set is symmetric only in PSL2; every
    letter is paired with itself.
    """
    check_modulus(p)
    if p % 12 != 1:
        raise BadPrimeResidue(f"LPS generators need p = 1 mod 12, got p = {p} = {p % 12} mod 12")
    i = sqrt_mod(FieldElement(p - 1, p))
    s = field_inv(sqrt_mod(FieldElement(3, p)))
    one = FieldElement(1, p)
    rows = [
        (i, one + i, -one + i, -i),
        (i, -one + i, one + i, -i),
        (i, one - i, -one - i, -i),
        (i, -one - i, one - i, -i),
    ]
    elements = tuple(SL2Element(*(int(s * e) for e in r), p) for r in rows)
    return GeneratorSet(elements, (0, 1, 2, 3), "lps", p=p, projective=True,
                        meta={"i": i.value, "sqrt3": int(sqrt_mod(FieldElement(3, p)))})


def random_group_elements(gen: np.random.Generator, count: int, p: int) -> list[SL2Element]:
    """Uniform draws from SL2(Z/pZ) through the dense index."""
    idx = gen.integers(0, sl2_order(p), size=count)
    return [sl2_unindex(int(i), p) for i in idx]


def random_symmetric_generators(seed: int, d: int, p: int, trial: int = 0) -> GeneratorSet:
    """``d`` uniform independent elements, each followed by its inverse.

    Nothing is filtered: the identity or an involution is kept if drawn, and
    generation of the full group is not checked here.
    """
    check_modulus(p)
    if d < 1:
        raise ConfigError("need d >= 1")
    draws = random_group_elements(rng.stream(seed, p, trial), d, p)
    elements = []
    for g in draws:
        elements += [g, sl2_inv(g)]
    inverse_of = tuple(i ^ 1 for i in range(2 * d))
    return GeneratorSet(tuple(elements), inverse_of, "random", p=p, seed=seed,
                        meta={"trial": trial,
                              "has_identity": any(g.entries == (1, 0, 0, 1) for g in draws)})


def random_permutation_generators(seed: int, d: int, n: int, trial: int = 0) -> GeneratorSet:
    if d < 1 or n < 1:
        raise ConfigError("need d >= 1 and n >= 1")
    gen = rng.stream(seed, n, trial)
    elements = []
    for _ in range(d):
        perm = gen.permutation(n)
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        elements += [tuple(int(x) for x in perm), tuple(int(x) for x in inv)]
    inverse_of = tuple(i ^ 1 for i in range(2 * d))
    return GeneratorSet(tuple(elements), inverse_of, "perm", n=n, seed=seed)


def make_generators(family: str, p: int, seed: int | None = None, d: int = 2,
                    trial: int = 0) -> GeneratorSet:
    family = family.lower()
    if family in ("fixed", "fixeds", "s"):
        return fixed_generators_S(p)
    if family in ("lps", "l"):
        return lps_generators(p)
    if family == "random":
        return random_symmetric_generators(0 if seed is None else seed, d, p, trial)
    if family == "perm":
        return random_permutation_generators(0 if seed is None else seed, d, p, trial)
    raise ConfigError(f"unknown generator family {family!r}")


# --- actions -------------------------------------------------------------

def vertex_index(vertex, space: VertexSpace) -> int:
    p = space.size
    kind = space.kind
    if kind is SpaceKind.PROJECTIVE:
        if vertex == INFINITY or vertex is None:
            return p
        v = int(vertex)
        if not 0 <= v <= p:
            raise InvalidVertex(f"{vertex} is not a point of P1(F_{p})")
        return v
    if kind is SpaceKind.AFFINE:
        x, y = (int(t) for t in vertex)
        if not (0 <= x < p and 0 <= y < p) or (x, y) == (0, 0):
            raise InvalidVertex(f"{vertex} is not in A2 - 0 over F_{p}")
        return x * p + y - 1
    if kind is SpaceKind.GROUP:
        if not isinstance(vertex, SL2Element) or vertex.p != p:
            raise InvalidVertex(f"{vertex!r} is not an element of SL2(F_{p})")
        return sl2_index(vertex)
    v = int(vertex)
    if not 0 <= v < p:
        raise InvalidVertex(f"{vertex} not in range({p})")
    return v


def vertex_from_index(i: int, space: VertexSpace):
    p = space.size
    if not 0 <= i < space.n:
        raise InvalidVertex(f"index {i} out of range for {space}")
    if space.kind is SpaceKind.PROJECTIVE:
        return INFINITY if i == p else i
    if space.kind is SpaceKind.AFFINE:
        return divmod(i + 1, p)
    if space.kind is SpaceKind.GROUP:
        return sl2_unindex(i, p)
    return i


def act(g, vertex, space: VertexSpace):
    """Left action of ``g`` on a vertex (given in natural form, not index)."""
    p = space.size
    kind = space.kind
    if kind is SpaceKind.PERM:
        v = vertex_index(vertex, space)
        if len(g) != p:
            raise InvalidVertex("permutation size does not match the domain")
        return int(g[v])
    if g.p != p:
        raise ModulusMismatch(f"{g.p} != {p}")
    if kind is SpaceKind.PROJECTIVE:
        i = vertex_index(vertex, space)
        if i == p:
            return INFINITY if g.c == 0 else g.a * pow(g.c, p - 2, p) % p
        den = (g.c * i + g.d) % p
        if den == 0:
            return INFINITY
        return (g.a * i + g.b) * pow(den, p - 2, p) % p
    if kind is SpaceKind.AFFINE:
        vertex_index(vertex, space)
        x, y = vertex
        return ((g.a * x + g.b * y) % p, (g.c * x + g.d * y) % p)
    vertex_index(vertex, space)
    return sl2_mul(g, vertex)
