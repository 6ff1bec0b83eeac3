"""Lexical similarity metrics and per-group dataset statistics."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .records import CLASS_ORDER, ClaimClass, ClaimRecord

# Letters/digits runs, kept whole across internal hyphens and apostrophes.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*", re.UNICODE)

BLEU_MAX_ORDER = 4
METEOR_NODE_BUDGET = 200_000
# Exact minimum-chunk search only below this size; longer pairs use the
# deterministic greedy alignment.
METEOR_EXACT_MAX_TOKENS = 24


@dataclass
class TokenSequence:
    tokens: list[str]
    language: str

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize(text: str, language: str) -> TokenSequence:
    """Lowercase, Unicode-aware tokenization; standalone punctuation dropped."""
    return TokenSequence(tokens=_TOKEN_RE.findall(text.lower()), language=language)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(reference: TokenSequence, candidate: TokenSequence) -> float:
    """Sentence-level BLEU, orders 1-4, uniform weights.

    Add-one smoothing on orders 2-4; order 1 is unsmoothed, so zero unigram
    overlap (or an empty candidate) scores 0. Brevity penalty exp(1 - r/c)
    when the candidate is shorter than the reference.
    """
    ref, cand = reference.tokens, candidate.tokens
    if not cand:
        return 0.0
    log_sum = 0.0
    for n in range(1, BLEU_MAX_ORDER + 1):
        cand_ngrams = _ngrams(cand, n)
        ref_ngrams = _ngrams(ref, n)
        matched = sum(min(count, ref_ngrams[gram]) for gram, count in cand_ngrams.items())
        total = sum(cand_ngrams.values())
        if n == 1:
            if matched == 0:
                return 0.0
            precision = matched / total
        else:
            precision = (matched + 1) / (total + 1)
        log_sum += math.log(precision) / BLEU_MAX_ORDER
    r, c = len(ref), len(cand)
    brevity = 1.0 if c >= r else math.exp(1 - r / c)
    return brevity * math.exp(log_sum)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(reference: TokenSequence, candidate: TokenSequence) -> float:
    """LCS-based F-measure with beta = 1."""
    ref, cand = reference.tokens, candidate.tokens
    if not ref or not cand:
        return 0.0
    lcs = _lcs_length(ref, cand)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 2 * precision * recall / (precision + recall)


class _ChunkBudgetExceeded(Exception):
    pass


def _min_chunks_exact(cand: Sequence[str], ref: Sequence[str], need: int) -> int:
    """Minimum chunk count over all maximum unigram alignments.

    Memoized search over (candidate position, used reference mask, previous
    reference index); raises _ChunkBudgetExceeded on pathological inputs.
    """
    positions: dict[str, list[int]] = {}
    for idx, tok in enumerate(ref):
        positions.setdefault(tok, []).append(idx)
    inf = need + 1
    memo: dict[tuple[int, int, int], int] = {}
    nodes = 0

    def rec(ci: int, mask: int, prev: int, matched: int) -> int:
        nonlocal nodes
        nodes += 1
        if nodes > METEOR_NODE_BUDGET:
            raise _ChunkBudgetExceeded
        if ci == len(cand):
            return 0 if matched == need else inf
        if matched + (len(cand) - ci) < need:
            return inf
        key = (ci, mask, prev)
        if key in memo:
            return memo[key]
        best = rec(ci + 1, mask, -1, matched)
        # Chunk continuation first so good solutions are found early.
        options = [r for r in positions.get(cand[ci], ()) if not mask & (1 << r)]
        options.sort(key=lambda r: r != prev + 1)
        for r in options:
            cost = 0 if r == prev + 1 and prev >= 0 else 1
            sub = rec(ci + 1, mask | (1 << r), r, matched + 1)
            if cost + sub < best:
                best = cost + sub
        memo[key] = best
        return best

    return rec(0, 0, -1, 0)


def _chunks_greedy(cand: Sequence[str], ref: Sequence[str]) -> int:
    """Deterministic greedy fallback: prefer extending the current chunk."""
    unused: dict[str, list[int]] = {}
    for idx, tok in enumerate(ref):
        unused.setdefault(tok, []).append(idx)
    chunks = 0
    prev = -2
    for tok in cand:
        slots = unused.get(tok)
        if not slots:
            prev = -2
            continue
        if prev + 1 in slots:
            r = prev + 1
        else:
            r = slots[0]
            chunks += 1
        slots.remove(r)
        prev = r
    return max(chunks, 1)


def meteor(reference: TokenSequence, candidate: TokenSequence) -> float:
    """Exact-match unigram METEOR: Fmean = 10PR/(R+9P), cubic chunk penalty."""
    ref, cand = reference.tokens, candidate.tokens
    if not ref or not cand:
        return 0.0
    ref_counts = Counter(ref)
    cand_counts = Counter(cand)
    matches = sum(min(count, ref_counts[tok]) for tok, count in cand_counts.items())
    if matches == 0:
        return 0.0
    precision = matches / len(cand)
    recall = matches / len(ref)
    fmean = 10 * precision * recall / (recall + 9 * precision)
    if max(len(cand), len(ref)) > METEOR_EXACT_MAX_TOKENS:
        chunks = _chunks_greedy(cand, ref)
    else:
        try:
            chunks = _min_chunks_exact(cand, ref, matches)
        except _ChunkBudgetExceeded:
            chunks = _chunks_greedy(cand, ref)
    penalty = 0.5 * (chunks / matches) ** 3
    return fmean * (1 - penalty)


@dataclass
class SimilarityScores:
    bleu4: float
    rouge_l: float
    meteor: float


def similarity(source_text: str, claim: str, language: str) -> SimilarityScores:
    ref = tokenize(source_text, language)
    cand = tokenize(claim, language)
    return SimilarityScores(
        bleu4=bleu4(ref, cand),
        rouge_l=rouge_l(ref, cand),
        meteor=meteor(ref, cand),
    )


@dataclass
class DatasetStats:
    language: str
    claim_class: ClaimClass
    count: int
    words_mu: Optional[float]
    words_sd: Optional[float]
    mean_self_contained: Optional[float]
    mean_support: Optional[float]
    mean_objective: Optional[float]
    mean_quality: Optional[float]
    mean_bleu4: Optional[float]
    mean_rouge_l: Optional[float]
    mean_meteor: Optional[float]

    _MEAN_FIELDS = (
        "mean_self_contained", "mean_support", "mean_objective",
        "mean_quality", "mean_bleu4", "mean_rouge_l", "mean_meteor",
    )

    def to_dict(self) -> dict:
        d = {
            "language": self.language,
            "class": self.claim_class.value,
            "count": self.count,
            "words_mu": self.words_mu,
            "words_sd": self.words_sd,
        }
        for name in self._MEAN_FIELDS:
            d[name] = getattr(self, name)
        return d


def merge_stats(a: DatasetStats, b: DatasetStats) -> DatasetStats:
    """Count-weighted merge of two stats rows for the same (language, class)."""
    if (a.language, a.claim_class) != (b.language, b.claim_class):
        raise ValueError("cannot merge stats across groups")
    if a.count == 0:
        return b
    if b.count == 0:
        return a
    n = a.count + b.count
    delta = b.words_mu - a.words_mu
    words_mu = a.words_mu + delta * b.count / n
    m2 = (
        a.count * a.words_sd**2
        + b.count * b.words_sd**2
        + delta**2 * a.count * b.count / n
    )
    merged = {"words_mu": words_mu, "words_sd": math.sqrt(m2 / n)}
    for name in DatasetStats._MEAN_FIELDS:
        merged[name] = (getattr(a, name) * a.count + getattr(b, name) * b.count) / n
    return DatasetStats(language=a.language, claim_class=a.claim_class, count=n, **merged)


def compute_stats(records: Iterable[ClaimRecord]) -> list[DatasetStats]:
    """Per-(language, class) aggregates; population standard deviation.

    Rows are ordered language ascending, class in supports/refutes/not-info
    order. Every language present contributes a row per class; empty groups
    have count 0 and null means.
    """
    groups: dict[tuple[str, ClaimClass], list[ClaimRecord]] = {}
    languages: set[str] = set()
    for record in records:
        if record.judgment is None:
            continue
        languages.add(record.language)
        groups.setdefault((record.language, record.target_class), []).append(record)

    rows: list[DatasetStats] = []
    for language in sorted(languages):
        for claim_class in CLASS_ORDER:
            members = groups.get((language, claim_class), [])
            rows.append(_stats_row(language, claim_class, members))
    return rows


def _stats_row(language: str, claim_class: ClaimClass, members: list[ClaimRecord]) -> DatasetStats:
    if not members:
        return DatasetStats(
            language=language, claim_class=claim_class, count=0,
            words_mu=None, words_sd=None, mean_self_contained=None,
            mean_support=None, mean_objective=None, mean_quality=None,
            mean_bleu4=None, mean_rouge_l=None, mean_meteor=None,
        )
    n = len(members)
    counts = [len(tokenize(r.claim, r.language).tokens) for r in members]
    mu = sum(counts) / n
    sd = math.sqrt(sum((c - mu) ** 2 for c in counts) / n)
    sims = [similarity(r.source_text, r.claim, r.language) for r in members]
    return DatasetStats(
        language=language,
        claim_class=claim_class,
        count=n,
        words_mu=mu,
        words_sd=sd,
        mean_self_contained=sum(r.judgment.self_contained for r in members) / n,
        mean_support=sum(r.judgment.supported_score for r in members) / n,
        mean_objective=sum(r.judgment.objective for r in members) / n,
        mean_quality=sum(r.judgment.overall_quality for r in members) / n,
        mean_bleu4=sum(s.bleu4 for s in sims) / n,
        mean_rouge_l=sum(s.rouge_l for s in sims) / n,
        mean_meteor=sum(s.meteor for s in sims) / n,
    )


STATS_COLUMNS = (
    "language", "class", "count", "words_mu", "words_sd",
    "mean_self_contained", "mean_support", "mean_objective", "mean_quality",
    "mean_bleu4", "mean_rouge_l", "mean_meteor",
)


def stats_report(rows: list[DatasetStats]) -> str:
    """Tab-separated report, one row per (language, class)."""
    lines = ["\t".join(STATS_COLUMNS)]
    for row in rows:
        d = row.to_dict()
        cells = []
        for col in STATS_COLUMNS:
            value = d[col]
            if value is None:
                cells.append("-")
            elif isinstance(value, float):
                cells.append(f"{value:.4f}")
            else:
                cells.append(str(value))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
