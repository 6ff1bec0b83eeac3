"""Checkpoint store for interruption-safe, resumable runs."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Union

STAGES = ("sampled", "generated", "llm_filtered", "nli_filtered", "exported")


class CheckpointMismatch(Exception):
    """Existing checkpoint was produced under a different configuration."""


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write via a temp file and rename, so readers never see a truncated file."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


class CheckpointStore:
    """Single-writer store of per-stage completed ids, keyed by config fingerprint."""

    def __init__(self, path: Union[str, Path], fingerprint: str):
        self.path = Path(path)
        self.fingerprint = fingerprint
        self.stage = STAGES[0]
        self._completed: dict[str, set[str]] = {stage: set() for stage in STAGES}

    def try_resume(self) -> bool:
        """Load an existing checkpoint. False when none exists; raises on
        a fingerprint mismatch."""
        if not self.path.exists():
            return False
        data = json.loads(self.path.read_text(encoding="utf-8"))
        if data.get("fingerprint") != self.fingerprint:
            raise CheckpointMismatch(
                "checkpoint fingerprint does not match the current configuration; "
                "delete the output directory or fix the config to resume"
            )
        self.stage = data.get("stage", STAGES[0])
        for stage in STAGES:
            self._completed[stage] = set(data.get("completed", {}).get(stage, []))
        return True

    def completed(self, stage: str) -> set[str]:
        return self._completed[stage]

    def mark_completed(self, stage: str, item_id: str) -> None:
        self._completed[stage].add(item_id)
        self.save()

    def mark_many(self, stage: str, ids) -> None:
        self._completed[stage].update(ids)
        self.save()

    def set_stage(self, stage: str) -> None:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        self.stage = stage
        self.save()

    def save(self) -> None:
        payload = {
            "fingerprint": self.fingerprint,
            "stage": self.stage,
            "completed": {stage: sorted(ids) for stage, ids in self._completed.items()},
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(self.path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
