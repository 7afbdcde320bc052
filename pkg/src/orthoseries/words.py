"""Free-group word combinatorics.

Letters of the free group of rank r are encoded as integers in
``[0, 2r)``: letter ``2*i`` is the i-th generator and ``2*i + 1`` its
inverse, so ``letter ^ 1`` inverts a letter.  In text form generators are
lowercase letters ``a, b, c, ...`` and inverses the corresponding uppercase
letters; the empty word is the empty string (rendered ``e`` in reprs).

Everything in this module is an exact reference implementation operating on
small tuples.  The batch enumeration used by the identity and dimension
pipelines lives in :mod:`orthoseries.wordarrays` and is tested against the
functions here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

__all__ = [
    "Word",
    "LetterOrder",
    "BoundaryConfig",
    "ConeType",
    "letter",
    "letter_generator",
    "letter_sign",
    "letter_inverse",
    "reduce_letters",
    "shortlex_less",
    "enumerate_reduced",
    "cone_type",
    "in_cone",
    "is_redlex",
    "redlex_reps",
    "boundary_preset",
    "BOUNDARY_PRESETS",
]

_ALPHA = "abcdefghijklmnopqrstuvwxyz"


def letter(generator_index: int, sign: int) -> int:
    """Integer id of a generator (sign +1) or its inverse (sign -1)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return 2 * generator_index + (0 if sign == 1 else 1)


def letter_generator(l: int) -> int:
    return l >> 1


def letter_sign(l: int) -> int:
    return -1 if l & 1 else 1


def letter_inverse(l: int) -> int:
    return l ^ 1


def reduce_letters(letters) -> tuple[int, ...]:
    """Freely reduce a raw letter sequence (cancel adjacent inverse pairs)."""
    out: list[int] = []
    for l in letters:
        if out and out[-1] == (l ^ 1):
            out.pop()
        else:
            out.append(int(l))
    return tuple(out)


class Word:
    """An immutable reduced word in a free group.

    The constructor reduces its input, so every ``Word`` is reduced by
    construction.  Words multiply with ``*``, invert with ``~`` and power
    with ``**``; they compare equal iff they have the same letters.
    """

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        object.__setattr__(self, "letters", reduce_letters(letters))

    @classmethod
    def from_string(cls, s: str) -> "Word":
        if s in ("e", "ε"):
            return cls()
        out = []
        for ch in s:
            low = ch.lower()
            if low not in _ALPHA:
                raise ValueError(f"invalid letter {ch!r} in word {s!r}")
            out.append(letter(_ALPHA.index(low), 1 if ch.islower() else -1))
        return cls(out)

    def __setattr__(self, *a):
        raise AttributeError("Word is immutable")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __hash__(self):
        return hash(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __invert__(self) -> "Word":
        return Word(tuple(l ^ 1 for l in reversed(self.letters)))

    def inverse(self) -> "Word":
        return ~self

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return (~self) ** (-n)
        w = Word()
        for _ in range(n):
            w = w * self
        return w

    @property
    def last_letter(self) -> int | None:
        return self.letters[-1] if self.letters else None

    def is_identity(self) -> bool:
        return not self.letters

    def is_cyclically_reduced(self) -> bool:
        ls = self.letters
        return not ls or ls[0] != (ls[-1] ^ 1)

    def max_rank(self) -> int:
        """Smallest free-group rank this word lives in."""
        return max((l >> 1 for l in self.letters), default=0) + 1

    def is_power_of(self, alpha: "Word") -> bool:
        """True iff this word equals alpha**m for some integer m."""
        if not alpha.letters:
            return self.is_identity()
        if self.is_identity():
            return True
        la = len(alpha)
        if len(self) % la:
            return False
        m = len(self) // la
        return self == alpha ** m or self == alpha ** (-m)

    def to_string(self) -> str:
        return "".join(
            _ALPHA[l >> 1].upper() if l & 1 else _ALPHA[l >> 1] for l in self.letters
        )

    def __str__(self):
        return self.to_string() or "e"

    def __repr__(self):
        return f"Word({str(self)!r})"


@dataclass(frozen=True)
class LetterOrder:
    """A strict total order on the 2*rank letters.

    ``ranks[l]`` is the position of letter ``l`` in the order.  The default
    order is a < A < b < B < ... which coincides with the integer encoding.
    """

    rank: int
    ranks: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 2:
            raise ValueError("free-group rank must be >= 2")
        if sorted(self.ranks) != list(range(2 * self.rank)):
            raise ValueError("ranks must be a permutation of the letters")

    @classmethod
    def default(cls, rank: int) -> "LetterOrder":
        return cls(rank, tuple(range(2 * rank)))

    @classmethod
    def from_string(cls, s: str) -> "LetterOrder":
        ids = [Word.from_string(ch).letters[0] for ch in s]
        if sorted(ids) != list(range(len(ids))) or len(ids) % 2:
            raise ValueError(f"invalid letter order string {s!r}")
        ranks = [0] * len(ids)
        for pos, lid in enumerate(ids):
            ranks[lid] = pos
        return cls(len(ids) // 2, tuple(ranks))

    def to_string(self) -> str:
        ids = sorted(range(2 * self.rank), key=lambda l: self.ranks[l])
        return "".join(str(Word((l,))) for l in ids)

    def key(self, w: Word):
        """Sort key realizing ShortLex: length first, then letter ranks."""
        return (len(w), tuple(self.ranks[l] for l in w.letters))


def shortlex_less(w1: Word, w2: Word, order: LetterOrder) -> bool:
    """True iff w1 strictly precedes w2 in ShortLex order."""
    return order.key(w1) < order.key(w2)


def enumerate_reduced(rank: int, max_len: int, order: LetterOrder | None = None):
    """Yield every reduced word of length <= max_len exactly once.

    Words come out in ShortLex order; there are ``2r*(2r-1)**(N-1)`` of
    length N >= 1.
    """
    if rank < 2:
        raise ValueError("free-group rank must be >= 2")
    order = order or LetterOrder.default(rank)
    letters_sorted = sorted(range(2 * rank), key=lambda l: order.ranks[l])
    level = [()]
    yield Word()
    for _ in range(max_len):
        nxt = []
        for ls in level:
            for l in letters_sorted:
                if not ls or ls[-1] != (l ^ 1):
                    nxt.append(ls + (l,))
        for ls in nxt:
            w = Word.__new__(Word)
            object.__setattr__(w, "letters", ls)
            yield w
        level = nxt


@dataclass(frozen=True)
class ConeType:
    """Cone type of a word: the identity cone or the cone of its last letter.

    A rank-r free group has exactly 2r + 1 cone types.
    """

    last: int | None

    def __str__(self):
        return "cone(e)" if self.last is None else f"cone({Word((self.last,))})"


def cone_type(w: Word) -> ConeType:
    return ConeType(w.last_letter)


def in_cone(w: Word, eta: Word) -> bool:
    """True iff eta extends w geodesically: |w*eta| = |w| + |eta|."""
    return len(w * eta) == len(w) + len(eta)


@dataclass(frozen=True)
class BoundaryConfig:
    """The boundary words alpha_1..alpha_k of a surface-with-boundary.

    Each word must be nontrivial and cyclically reduced (so powers have
    predictable lengths and the coset search window is certified).
    """

    words: tuple[Word, ...]
    name: str = ""

    def __post_init__(self):
        if not self.words:
            raise ValueError("at least one boundary word is required")
        for w in self.words:
            if w.is_identity():
                raise ValueError("boundary words must be nontrivial")
            if not w.is_cyclically_reduced():
                raise ValueError(f"boundary word {w} is not cyclically reduced")

    @property
    def k(self) -> int:
        return len(self.words)

    def min_rank(self) -> int:
        return max(max(w.max_rank() for w in self.words), 2)

    @classmethod
    def from_strings(cls, strings, name: str = "") -> "BoundaryConfig":
        return cls(tuple(Word.from_string(s) for s in strings), name)

    def pair_indices(self):
        """All ordered boundary pairs (j, q), 0-based."""
        return itertools.product(range(self.k), repeat=2)


# Rank-2 presets.  "torus" is the one-holed torus (single boundary, the
# commutator), the configuration under which the L=5 Schottky family
# satisfies the identity; "pants" is the three-holed sphere reading of the
# same generators; "two-boundary" tracks the generator pair only.
BOUNDARY_PRESETS = {
    "torus": ("abAB",),
    "pants": ("a", "b", "BA"),
    "two-boundary": ("a", "b"),
}


def boundary_preset(name: str) -> BoundaryConfig:
    try:
        strings = BOUNDARY_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown boundary preset {name!r}; choose from {sorted(BOUNDARY_PRESETS)}"
        ) from None
    return BoundaryConfig.from_strings(strings, name=name)


def _power_window(alpha: Word, maxlen: int):
    """All powers alpha**m with |alpha**m| <= maxlen (alpha cyclically
    reduced, so |alpha**m| = |m|*|alpha|)."""
    top = maxlen // len(alpha)
    for m in range(-top, top + 1):
        yield alpha ** m


def is_redlex(
    w: Word,
    p: int,
    q: int,
    bc: BoundaryConfig,
    order: LetterOrder | None = None,
) -> bool:
    """Is w the ShortLex-least representative of its double coset H_p w H_q?

    Trivial cosets are excluded: for p == q any power of alpha_p (the
    identity included) answers False.  For p != q the coset of the empty
    word is a genuine orthogeodesic between distinct boundaries and is kept.

    The search window |alpha_p**m| <= |w| + |alpha_p| (and likewise on the
    right) is exhaustive: cancellation against w is bounded by |w|, so any
    coset element beyond the window is strictly longer than w.
    """
    order = order or LetterOrder.default(max(bc.min_rank(), w.max_rank()))
    alpha, beta = bc.words[p], bc.words[q]
    if p == q and w.is_power_of(alpha):
        return False
    wkey = order.key(w)
    for left in _power_window(alpha, len(w) + len(alpha)):
        lw = left * w
        for right in _power_window(beta, len(w) + len(beta)):
            cand = lw * right
            if cand is not w and order.key(cand) < wkey:
                return False
    return True


def redlex_reps(
    p: int,
    q: int,
    bc: BoundaryConfig,
    order: LetterOrder | None = None,
    max_len: int = 0,
) -> list[Word]:
    """All RedLex double-coset representatives of length <= max_len,
    ShortLex sorted.  Reference implementation; see
    :func:`orthoseries.wordarrays.redlex_level_masks` for the batch version.
    """
    rank = bc.min_rank()
    order = order or LetterOrder.default(rank)
    return [
        w
        for w in enumerate_reduced(rank, max_len, order)
        if is_redlex(w, p, q, bc, order)
    ]
