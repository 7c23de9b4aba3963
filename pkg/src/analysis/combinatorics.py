"""
Combinatorics Module
Signed counts over binary sequences: sigma, parity, the counts M_n and P_n,
and d_n = sum over eps of (-1)^{sigma(eps)} by brute force, recursion and closed form.

All arithmetic is exact integer arithmetic.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from utils.errors import ScopeError, VerificationError

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_N = 25
RECURSION_MAX_N = 62
CHUNK_BITS = 20


def _bits(eps: Any) -> Tuple[int, ...]:
    return tuple(int(b) for b in getattr(eps, "bits", eps))


def sigma(eps: Any) -> Tuple[int, int]:
    """
    Number of pairs j < k with eps_j = 0 and eps_k = 1, and its parity.

    Single pass keeping a running count of zeros.

    Args:
        eps: EpsSeq or sequence of 0/1

    Returns:
        Tuple of (count, parity)
    """
    zeros_seen = 0
    count = 0
    for bit in _bits(eps):
        if bit:
            count += zeros_seen
        else:
            zeros_seen += 1
    return count, count % 2


def sigma_pairs(eps: Any) -> Tuple[int, int]:
    """Reference O(n^2) pair loop for sigma."""
    bits = _bits(eps)
    count = sum(
        1
        for j in range(len(bits))
        for k in range(j + 1, len(bits))
        if bits[j] == 0 and bits[k] == 1
    )
    return count, count % 2


def pa(eps: Any) -> int:
    """Parity of the number of ones."""
    return sum(_bits(eps)) % 2


def signed_count(n: int, start: int, stop: int) -> Tuple[int, int]:
    """
    Sum of (-1)^sigma over the sequences with integer codes in [start, stop).

    The code of eps has eps_1 as its most significant bit.

    Args:
        n: Sequence length
        start: First code (inclusive)
        stop: Last code (exclusive)

    Returns:
        Tuple of (signed sum, number of sequences with even sigma)
    """
    codes = np.arange(start, stop, dtype=np.int64)
    zeros_seen = np.zeros_like(codes)
    parity = np.zeros_like(codes)
    for k in range(n):
        bit = (codes >> (n - 1 - k)) & 1
        parity ^= (bit * zeros_seen) & 1
        zeros_seen += 1 - bit
    even = int(np.count_nonzero(parity == 0))
    return 2 * even - len(codes), even


def d_brute(n: int, max_n: int = BRUTE_FORCE_MAX_N, chunk_bits: int = CHUNK_BITS) -> int:
    """
    d_n by enumerating all 2^n sequences in chunks.

    Args:
        n: Sequence length (1 <= n <= max_n)
        max_n: Enumeration budget
        chunk_bits: log2 of the chunk size

    Returns:
        Exact signed sum
    """
    if n < 1:
        raise ScopeError(f"n must be positive, got {n}")
    if n > max_n:
        raise ScopeError(f"brute force limited to n <= {max_n}, got n={n}")

    total = 1 << n
    chunk = 1 << chunk_bits
    result = 0
    for start in range(0, total, chunk):
        partial, _ = signed_count(n, start, min(start + chunk, total))
        result += partial
    logger.debug(f"d_brute({n}) = {result}")
    return result


def m_brute(n: int) -> Tuple[int, int]:
    """M_n and P_n counted directly (small n)."""
    if n > BRUTE_FORCE_MAX_N:
        raise ScopeError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got n={n}")
    m_count = 0
    p_count = 0
    for code in range(1 << n):
        bits = [(code >> (n - 1 - k)) & 1 for k in range(n)]
        s = sigma(bits)[1]
        m_count += s == 0
        p_count += (s + pa(bits)) % 2 == 0
    return m_count, p_count


def mp_recursion(n: int, max_n: int = RECURSION_MAX_N) -> Tuple[List[int], List[int]]:
    """
    M_k and P_k for k = 1..n from M_1 = 2, P_1 = 1 and
    M_k = M_{k-1} + P_{k-1}, P_k = (2^{k-1} - P_{k-1}) + M_{k-1}.

    The two-step form M_k = 2 M_{k-2} + 2^{k-2} is checked at every k >= 3.

    Args:
        n: Largest index
        max_n: Integer-width guard

    Returns:
        Tuple of (M, P) lists, entry k-1 holding M_k / P_k
    """
    if n < 1:
        raise ScopeError(f"n must be positive, got {n}")
    if n > max_n:
        raise ScopeError(f"recursion limited to n <= {max_n} (64-bit counts), got n={n}")

    m_values = [2]
    p_values = [1]
    for k in range(2, n + 1):
        m_prev, p_prev = m_values[-1], p_values[-1]
        m_values.append(m_prev + p_prev)
        p_values.append((2 ** (k - 1) - p_prev) + m_prev)

        if k >= 3 and m_values[k - 1] != 2 * m_values[k - 3] + 2 ** (k - 2):
            raise VerificationError(f"Two-step recursion fails at k={k}")
    return m_values, p_values


def d_rec(n: int) -> int:
    """d_n = 2 M_n - 2^n from the recursion."""
    m_values, _ = mp_recursion(n)
    return 2 * m_values[-1] - 2 ** n


def d_closed(n: int) -> int:
    """Closed form 2^{(n+1)/2} for odd n."""
    if n < 1 or n % 2 == 0:
        raise ScopeError(f"closed form requires odd positive n, got n={n}")
    return 2 ** ((n + 1) // 2)


def doubling_chain(n: int) -> List[int]:
    """
    d_1, d_3, ..., d_n from the recursion, checking d_k = 2 d_{k-2}.

    Args:
        n: Odd upper index

    Returns:
        List of d_k for odd k <= n
    """
    if n % 2 == 0:
        raise ScopeError(f"doubling chain runs over odd n, got n={n}")
    m_values, _ = mp_recursion(n)
    chain = [2 * m_values[k - 1] - 2 ** k for k in range(1, n + 1, 2)]
    for prev, cur in zip(chain, chain[1:]):
        if cur != 2 * prev:
            raise VerificationError(f"Doubling fails: {prev} -> {cur}")
    return chain


@dataclass
class LemmaReport:
    """
    The three routes to d_n.

    Attributes:
        n: Odd sequence length
        d_brute: Enumeration result (None when not requested)
        d_rec: Recursion result (None when not requested)
        d_closed: Closed form (None when not requested)
        M: M_k for k <= n
        P: P_k for k <= n
        chain: d_k for odd k <= n
    """

    n: int
    d_brute: Optional[int] = None
    d_rec: Optional[int] = None
    d_closed: Optional[int] = None
    M: List[int] = field(default_factory=list)
    P: List[int] = field(default_factory=list)
    chain: List[int] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def values(self) -> List[int]:
        return [v for v in (self.d_brute, self.d_rec, self.d_closed) if v is not None]

    @property
    def agree(self) -> bool:
        return len(set(self.values)) <= 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "d_brute": self.d_brute,
            "d_rec": self.d_rec,
            "d_closed": self.d_closed,
            "agree": self.agree,
            "M": self.M,
            "P": self.P,
            "chain": self.chain,
            "notes": self.notes,
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"k": k, "M_k": m, "P_k": p, "d_k": 2 * m - 2 ** k}
            for k, (m, p) in enumerate(zip(self.M, self.P), start=1)
        ]
        return pd.DataFrame(rows)


METHODS = ("brute", "recursion", "closed")


def lemma_report(
    n: int,
    methods: Sequence[str] = METHODS,
    max_brute_n: int = BRUTE_FORCE_MAX_N,
) -> LemmaReport:
    """
    Compute d_n by the requested routes and check that they agree.

    Odd n is the scope of the closed form; for even n the closed route is
    skipped with a note and the others still run.

    Args:
        n: Sequence length
        methods: Subset of ("brute", "recursion", "closed")
        max_brute_n: Brute-force budget

    Returns:
        LemmaReport
    """
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ScopeError(f"Unknown lemma methods: {sorted(unknown)}")
    if n < 1:
        raise ScopeError(f"n must be positive, got {n}")

    report = LemmaReport(n=n)
    if n % 2 == 0:
        report.notes.append("non-theorem scope: n even, closed form 2^((n+1)/2) does not apply")

    if "brute" in methods:
        report.d_brute = d_brute(n, max_n=max_brute_n)

    if n <= RECURSION_MAX_N:
        report.M, report.P = mp_recursion(n)
    if "recursion" in methods:
        report.d_rec = d_rec(n)

    if "closed" in methods and n % 2 == 1:
        report.d_closed = d_closed(n)
        if n <= RECURSION_MAX_N:
            report.chain = doubling_chain(n)

    if not report.agree:
        logger.error(f"Lemma routes disagree for n={n}: {report.values}")
        raise VerificationError(
            f"d_{n} disagrees: brute={report.d_brute}, rec={report.d_rec}, closed={report.d_closed}"
        )

    logger.info(f"Lemma n={n}: {report.values}")
    return report
