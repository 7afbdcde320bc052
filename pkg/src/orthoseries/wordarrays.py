"""Batch enumeration of reduced words as integer arrays.

The identity and dimension pipelines touch every reduced word up to length
12 and beyond (about 10^6 words at rank 2), which is far too many for
tuple-based code.  This module stores each level (all reduced words of one
length) as an ``(count, length)`` int8 array, in ShortLex order for the
default letter order, together with parent indices into the previous level.
Matrix evaluation then becomes one batched matmul per level.

The double-coset representative test is vectorized using the structure of
cancellation against a fixed cyclically reduced word alpha: the reduced
length of ``alpha**s * w`` is V-shaped in s, with the cancellation depth
equal to the longest common prefix of w with the periodic word
``(alpha^{-1})^inf`` (s > 0) or ``alpha^inf`` (s < 0), capped at
``|alpha|*|s|``.  Consequently

* a strictly shorter coset element exists iff such a prefix exceeds
  ``|alpha|/2`` (and symmetrically for suffixes on the right), and
* equal-length elements only arise from single ``alpha**(+-1)`` moves with
  an exact half-period cancellation, whose ShortLex verdict is a constant
  per (boundary word, sign) computable ahead of time.

Words short enough for the cancelled regions to interact are routed
through the reference implementation in :mod:`orthoseries.words`; the two
paths are asserted equal in the test suite.
"""

from __future__ import annotations

import numpy as np

from .words import BoundaryConfig, LetterOrder, Word, is_redlex

__all__ = ["WordLevels", "redlex_level_masks", "level_counts"]


def level_counts(rank: int, max_len: int) -> list[int]:
    """Number of reduced words per length: 1, 2r, 2r(2r-1), ..."""
    counts = [1]
    if max_len >= 1:
        counts.append(2 * rank)
    for _ in range(2, max_len + 1):
        counts.append(counts[-1] * (2 * rank - 1))
    return counts[: max_len + 1]


class WordLevels:
    """All reduced words of length <= max_len, one int8 array per level.

    ``letters[m]`` has shape ``(count_m, m)``; rows are in ShortLex order
    for the default letter order.  ``parents[m]`` maps each row to its
    length-(m-1) prefix row.
    """

    _shared: dict[tuple[int, int], "WordLevels"] = {}

    def __init__(self, rank: int, max_len: int):
        if rank < 2:
            raise ValueError("free-group rank must be >= 2")
        self.rank = rank
        self.max_len = max_len
        nlet = 2 * rank
        self.letters: list[np.ndarray] = [np.zeros((1, 0), dtype=np.int8)]
        self.parents: list[np.ndarray] = [np.zeros(1, dtype=np.int64)]
        if max_len >= 1:
            self.letters.append(np.arange(nlet, dtype=np.int8).reshape(-1, 1))
            self.parents.append(np.zeros(nlet, dtype=np.int64))
        for m in range(2, max_len + 1):
            prev = self.letters[m - 1]
            cnt = prev.shape[0]
            last = prev[:, -1].astype(np.int8)
            grid = np.broadcast_to(np.arange(nlet, dtype=np.int8), (cnt, nlet))
            keep = grid != (last[:, None] ^ 1)
            ext = grid[keep].reshape(cnt, nlet - 1)
            par = np.repeat(np.arange(cnt, dtype=np.int64), nlet - 1)
            rows = np.concatenate([prev[par], ext.reshape(-1, 1)], axis=1)
            self.letters.append(rows)
            self.parents.append(par)

    @classmethod
    def shared(cls, rank: int, max_len: int) -> "WordLevels":
        """Session-wide cache; levels are immutable once built."""
        for (r, n), inst in cls._shared.items():
            if r == rank and n >= max_len:
                return inst
        inst = cls(rank, max_len)
        cls._shared[(rank, max_len)] = inst
        return inst

    def count(self, m: int) -> int:
        return self.letters[m].shape[0]

    def total(self, max_len: int | None = None) -> int:
        n = self.max_len if max_len is None else max_len
        return sum(self.count(m) for m in range(n + 1))

    def word(self, m: int, row: int) -> Word:
        return Word(self.letters[m][row].tolist())

    def matrices(self, gen_images: np.ndarray, upto: int | None = None):
        """Yield per level the stacked products of generator images.

        ``gen_images`` is a ``(2*rank, n, n)`` array indexed by letter id.
        Level m is computed from level m-1 with one batched matmul, so the
        whole run costs one matrix multiply per word.
        """
        n = gen_images.shape[-1]
        upto = self.max_len if upto is None else upto
        current = np.eye(n, dtype=gen_images.dtype)[None, :, :]
        yield 0, current
        for m in range(1, upto + 1):
            rows = self.letters[m]
            current = np.matmul(current[self.parents[m]], gen_images[rows[:, -1]])
            yield m, current

    def sort_order(self, m: int, order: LetterOrder) -> np.ndarray:
        """Row permutation putting level m into ShortLex order for `order`.

        Rows are built in default-order ShortLex, so this is the identity
        permutation unless a custom letter order is in play.
        """
        if order.ranks == tuple(range(2 * self.rank)):
            return np.arange(self.count(m))
        ranks = np.asarray(order.ranks, dtype=np.int8)
        mapped = ranks[self.letters[m]]
        return np.lexsort(mapped.T[::-1])


def _periodic(word: Word, length: int) -> np.ndarray:
    base = np.array(word.letters, dtype=np.int8)
    reps = -(-length // len(base))
    return np.tile(base, reps)[:length]


def _lcp(words: np.ndarray, pattern: np.ndarray, cap: int) -> np.ndarray:
    """Length of the common prefix of each row with `pattern`, capped."""
    t = min(cap, words.shape[1], len(pattern))
    if t == 0:
        return np.zeros(words.shape[0], dtype=np.int64)
    eq = words[:, :t] == pattern[:t]
    full = eq.all(axis=1)
    return np.where(full, t, eq.argmin(axis=1))


def _tie_verdict_kills(candidate_half: tuple[int, ...], word_half: tuple[int, ...],
                       order: LetterOrder) -> bool:
    """Does the half-period splice beat the tied words in ShortLex?

    `candidate_half` replaces `word_half` as the affected prefix/suffix; the
    remainder of the word is unchanged, so the lexicographic comparison is
    decided entirely by these fixed letters.  Equality cannot occur for a
    reduced boundary word (it would force a cancellation inside it).
    """
    ra = [order.ranks[l] for l in candidate_half]
    rb = [order.ranks[l] for l in word_half]
    if ra == rb:
        raise AssertionError("half-period splice equals the word; boundary word not reduced?")
    return ra < rb


def redlex_level_masks(
    levels: WordLevels,
    bc: BoundaryConfig,
    p: int,
    q: int,
    order: LetterOrder | None = None,
    upto: int | None = None,
) -> list[np.ndarray]:
    """Boolean mask per level selecting the RedLex representatives of
    nontrivial double cosets H_p w H_q.

    Matches :func:`orthoseries.words.is_redlex` row for row.
    """
    order = order or LetterOrder.default(levels.rank)
    upto = levels.max_len if upto is None else upto
    alpha, beta = bc.words[p], bc.words[q]
    h, g = len(alpha), len(beta)
    alpha_inv, beta_inv = ~alpha, ~beta

    # prefix patterns for left multiplication by alpha**(+-1)
    pat_left_pos = _periodic(alpha_inv, upto + h)
    pat_left_neg = _periodic(alpha, upto + h)
    # prefix patterns on the inverse-reversed word for right multiplication
    pat_right_pos = _periodic(beta, upto + g)
    pat_right_neg = _periodic(beta_inv, upto + g)

    cap_l, cap_r = h // 2 + 1, g // 2 + 1
    tie_specs = []
    if h % 2 == 0:
        half = h // 2
        # the splice alpha**(+-1) * w replaces the word's half-period prefix
        # by the matching half of alpha (or its inverse)
        for base, pattern in ((alpha, pat_left_pos), (alpha_inv, pat_left_neg)):
            kills = _tie_verdict_kills(base.letters[:half], tuple(pattern[:half]), order)
            tie_specs.append(("L", pattern, half, kills))
    if g % 2 == 0:
        half = g // 2
        # w * beta**(+-1) replaces the word's trailing letters (the inverse
        # reverse of the first half of beta) by the second half of beta
        for base, pattern in ((beta, pat_right_pos), (beta_inv, pat_right_neg)):
            cand_tail = tuple(base.letters[half:])
            word_tail = tuple(l ^ 1 for l in reversed(base.letters[:half]))
            kills = _tie_verdict_kills(cand_tail, word_tail, order)
            tie_specs.append(("R", pattern, half, kills))

    guard = (h + g) // 2 + 2
    masks = [np.array([p != q])]  # the empty word
    for m in range(1, upto + 1):
        rows = levels.letters[m]
        if m <= guard:
            ref = np.fromiter(
                (is_redlex(levels.word(m, i), p, q, bc, order) for i in range(rows.shape[0])),
                dtype=bool,
                count=rows.shape[0],
            )
            masks.append(ref)
            continue

        rwords = rows[:, ::-1] ^ 1
        keep = np.ones(rows.shape[0], dtype=bool)
        cl_pos = _lcp(rows, pat_left_pos, cap_l)
        cl_neg = _lcp(rows, pat_left_neg, cap_l)
        cr_pos = _lcp(rwords, pat_right_pos, cap_r)
        cr_neg = _lcp(rwords, pat_right_neg, cap_r)
        keep &= (2 * cl_pos <= h) & (2 * cl_neg <= h)
        keep &= (2 * cr_pos <= g) & (2 * cr_neg <= g)

        for side, pattern, half, kills in tie_specs:
            if not kills:
                continue
            if side == "L":
                tied = _lcp(rows, pattern, cap_l) == half
            else:
                tied = _lcp(rwords, pattern, cap_r) == half
            keep &= ~tied

        if p == q and m % h == 0:
            full_pos = _lcp(rows, _periodic(alpha, m), m) == m
            full_neg = _lcp(rows, _periodic(alpha_inv, m), m) == m
            keep &= ~(full_pos | full_neg)
        masks.append(keep)
    return masks
