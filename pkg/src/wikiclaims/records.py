"""Core record types shared across the pipeline stages."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional


class ClaimClass(enum.Enum):
    SUPPORTS = "supports"
    REFUTES = "refutes"
    NOT_INFO = "not-info"

    @classmethod
    def from_str(cls, value: str) -> "ClaimClass":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"unknown claim class: {value!r}")


# Deterministic row/report ordering: supports, refutes, not-info.
CLASS_ORDER = (ClaimClass.SUPPORTS, ClaimClass.REFUTES, ClaimClass.NOT_INFO)


class SourceKind(enum.Enum):
    PAGE_RANDOM_5 = "page_random_5"
    SUMMARY_TRIPLE_3 = "summary_triple_3"


class NliLabel(enum.Enum):
    ENTAILMENT = "entailment"
    NEUTRAL = "neutral"
    CONTRADICTION = "contradiction"


# Tie-break order for equal probabilities (first wins).
NLI_TIE_ORDER = (NliLabel.ENTAILMENT, NliLabel.NEUTRAL, NliLabel.CONTRADICTION)


class Status(enum.Enum):
    GENERATED = "generated"
    PASSED_LLM_FILTER = "passed_llm_filter"
    PASSED_NLI_FILTER = "passed_nli_filter"
    REJECTED = "rejected"


@dataclass
class RawPage:
    page_id: int
    title: str
    namespace: int
    wikitext: str
    language: str


@dataclass
class ParsedPage:
    page_id: int
    title: str
    language: str
    body_sentences: list[str]
    summary_sentences: list[str]


@dataclass
class KnowledgeSource:
    source_id: str
    page_id: int
    topic: str
    language: str
    kind: SourceKind
    sentences: list[str]
    seed: int

    @property
    def joined_text(self) -> str:
        return " ".join(self.sentences)

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "page_id": self.page_id,
            "topic": self.topic,
            "language": self.language,
            "kind": self.kind.value,
            "sentences": list(self.sentences),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KnowledgeSource":
        return cls(
            source_id=d["source_id"],
            page_id=d["page_id"],
            topic=d["topic"],
            language=d["language"],
            kind=SourceKind(d["kind"]),
            sentences=list(d["sentences"]),
            seed=d["seed"],
        )


@dataclass
class GenerationJudgment:
    claim: str
    self_contained: int
    category: str  # "C0" | "C1" | "C2"
    supported_score: int
    factual: str
    objective: int
    overall_quality: int

    VALID_CATEGORIES = ("C0", "C1", "C2")

    def __post_init__(self) -> None:
        if not self.claim:
            raise ValueError("claim must be non-empty")
        if self.category not in self.VALID_CATEGORIES:
            raise ValueError(f"category must be one of {self.VALID_CATEGORIES}")
        for name in ("self_contained", "supported_score", "objective", "overall_quality"):
            score = getattr(self, name)
            if not isinstance(score, int) or not 1 <= score <= 5:
                raise ValueError(f"{name} must be an integer in [1, 5], got {score!r}")

    @property
    def is_factual(self) -> bool:
        text = self.factual.lower()
        return any(cue in text for cue in ("real", "non-fiction", "non-fantastic"))

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "self_contained": self.self_contained,
            "category": self.category,
            "supported_score": self.supported_score,
            "factual": self.factual,
            "objective": self.objective,
            "overall_quality": self.overall_quality,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationJudgment":
        return cls(**d)


@dataclass
class NliVerdict:
    label: NliLabel
    probs: dict[NliLabel, float]

    PROB_SUM_TOLERANCE = 1e-6

    @classmethod
    def from_probs(cls, probs: dict[NliLabel, float]) -> "NliVerdict":
        total = sum(probs.values())
        if any(p < 0 for p in probs.values()) or abs(total - 1.0) > cls.PROB_SUM_TOLERANCE:
            raise ValueError(f"probabilities must be nonnegative and sum to 1, got {probs}")
        best = max(NLI_TIE_ORDER, key=lambda lab: (probs.get(lab, 0.0), -NLI_TIE_ORDER.index(lab)))
        return cls(label=best, probs=dict(probs))

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "probs": {lab.value: self.probs.get(lab, 0.0) for lab in NliLabel},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NliVerdict":
        return cls(
            label=NliLabel(d["label"]),
            probs={NliLabel(k): v for k, v in d["probs"].items()},
        )


@dataclass
class ClaimRecord:
    claim_id: str
    source_id: str
    topic: str
    language: str
    target_class: ClaimClass
    source_text: str
    judgment: Optional[GenerationJudgment]
    word_count: int = 0
    over_length: bool = False
    nli_verdict: Optional[NliVerdict] = None
    status: Status = Status.GENERATED
    rejected_reason: Optional[str] = None
    rejected_stage: Optional[str] = None

    @property
    def claim(self) -> str:
        return self.judgment.claim if self.judgment else ""

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "source_id": self.source_id,
            "topic": self.topic,
            "language": self.language,
            "target_class": self.target_class.value,
            "source_text": self.source_text,
            "judgment": self.judgment.to_dict() if self.judgment else None,
            "word_count": self.word_count,
            "over_length": self.over_length,
            "nli_verdict": self.nli_verdict.to_dict() if self.nli_verdict else None,
            "status": self.status.value,
            "rejected_reason": self.rejected_reason,
            "rejected_stage": self.rejected_stage,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClaimRecord":
        return cls(
            claim_id=d["claim_id"],
            source_id=d["source_id"],
            topic=d["topic"],
            language=d["language"],
            target_class=ClaimClass.from_str(d["target_class"]),
            source_text=d["source_text"],
            judgment=GenerationJudgment.from_dict(d["judgment"]) if d.get("judgment") else None,
            word_count=d.get("word_count", 0),
            over_length=d.get("over_length", False),
            nli_verdict=NliVerdict.from_dict(d["nli_verdict"]) if d.get("nli_verdict") else None,
            status=Status(d["status"]),
            rejected_reason=d.get("rejected_reason"),
            rejected_stage=d.get("rejected_stage"),
        )


@dataclass
class FilterDecision:
    keep: bool
    stage: str  # "llm_filter" | "nli_filter"
    reason: str = ""

    def __post_init__(self) -> None:
        if not self.keep and not self.reason:
            raise ValueError("a drop decision must carry a reason")
