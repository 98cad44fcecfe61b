"""Interactive synthesis sessions: one decision at a time, replayable.

A session stores only its inputs and the answers given so far; every step
re-runs the synthesis with a provider that replays those answers and raises
on the first unanswered question.  That makes sessions trivially resumable
(crash recovery is replay), keeps batch and interactive synthesis on the
same code path, and guarantees a transcript-equal batch run yields the same
model byte for byte.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass

from .errors import ForgeError
from .knowledge import (
    DecisionProvider,
    DomainKnowledge,
    PendingQuestion,
    load_dk,
)
from .matrix import IngestionHints, parse_matrix
from .model import to_json
from .pipeline import SynthesisOptions, synthesize


class IllegalAnswer(ForgeError):
    stage = "session"


def serialize_candidates(kind, candidates):
    if kind == "group":
        return [{"kind": g.kind, "parent": g.parent, "children": list(g.children)}
                for g in candidates]
    return [c for c in candidates]


class SessionProvider(DecisionProvider):
    """Replays raw wire answers in order; raises PendingQuestion when spent."""

    def __init__(self, dk, raw_answers):
        super().__init__(dk)
        self._raw = list(raw_answers)
        self._cursor = 0

    def _fallback(self, kind, subject, candidates, **info):
        if self._cursor >= len(self._raw):
            raise PendingQuestion(kind, subject, candidates)
        raw = self._raw[self._cursor]
        self._cursor += 1
        answer = self._decode(kind, raw, candidates)
        self.record(kind, subject, candidates, answer)
        return answer

    def _decode(self, kind, raw, candidates):
        if kind == "group":
            if not isinstance(raw, list):
                raise IllegalAnswer("group answers are lists of candidate indices")
            try:
                return [candidates[int(i)] for i in raw]
            except (ValueError, IndexError, TypeError):
                raise IllegalAnswer(f"bad group indices {raw!r}") from None
        if kind == "bounds":
            if not isinstance(raw, list):
                raise IllegalAnswer("bounds answers are lists of naturals")
            out = []
            for x in raw:
                try:
                    k = int(x)
                except (TypeError, ValueError):
                    raise IllegalAnswer(f"bound {x!r} is not a natural number") from None
                if k not in candidates:
                    raise IllegalAnswer(f"bound {k} is not a domain value")
                out.append(k)
            return out
        if not isinstance(raw, str):
            raise IllegalAnswer(f"{kind} answers are candidate names")
        return raw


@dataclass
class StepResult:
    status: str                  # "pending" | "completed"
    question: dict | None
    progress: dict
    transcript: list
    model: object = None


class Session:
    """One interactive synthesis; all mutation goes through answer()."""

    def __init__(self, session_id, csv_text, dk_text, options):
        self.id = session_id
        self.csv_text = csv_text
        self.dk_text = dk_text
        self.options = options
        self.answers = []
        self.lock = threading.Lock()
        self._cache_key = None
        self._cache = None

    def to_record(self) -> dict:
        return {"id": self.id, "csv": self.csv_text, "dk": self.dk_text,
                "options": self.options, "answers": self.answers}

    @staticmethod
    def from_record(rec) -> "Session":
        s = Session(rec["id"], rec["csv"], rec.get("dk"), rec.get("options", {}))
        s.answers = list(rec.get("answers", []))
        return s

    def _dk(self) -> DomainKnowledge:
        return load_dk(self.dk_text) if self.dk_text else DomainKnowledge()

    def step(self) -> StepResult:
        key = len(self.answers)
        if self._cache_key == key:
            return self._cache
        dk = self._dk()
        identifiers = {c for c, k in dk.column_kinds.items() if k == "identifier"}
        matrix = parse_matrix(self.csv_text, IngestionHints(identifier_columns=identifiers))
        provider = SessionProvider(dk, self.answers)
        options = SynthesisOptions(
            or_groups=bool(self.options.get("or_groups", False)),
            or_budget_ms=self.options.get("or_budget_ms", 30_000),
            phi=bool(self.options.get("phi", True)))
        progress = {}
        try:
            model = synthesize(matrix, provider, options, progress=progress)
        except PendingQuestion as q:
            result = StepResult("pending", {
                "kind": q.kind,
                "subject": q.subject,
                "candidates": serialize_candidates(q.kind, q.candidates),
            }, progress, self._transcript(provider))
        else:
            result = StepResult("completed", None, progress, self._transcript(provider))
            result.model = model
        self._cache_key, self._cache = key, result
        return result

    def _transcript(self, provider) -> list:
        return [{"kind": k, "subject": s,
                 "candidates": serialize_candidates(k, c),
                 "answer": serialize_candidates(k, a) if k == "group" else a}
                for k, s, c, a in provider.transcript]

    def answer(self, raw) -> StepResult:
        with self.lock:
            state = self.step()
            if state.status == "completed":
                raise IllegalAnswer("session already completed")
            self.answers.append(raw)
            try:
                return self.step()
            except ForgeError:
                self.answers.pop()
                self._cache_key = None
                raise

    def snapshot(self) -> dict:
        state = self.step()
        snap = {
            "id": self.id,
            "status": state.status,
            "question": state.question,
            "answered": len(self.answers),
            "progress": state.progress,
            "transcript": state.transcript,
        }
        if state.status == "completed" and state.model.phi is None:
            snap["over_approximation"] = self._over_approximation(state.model)
        return snap

    def _over_approximation(self, model) -> dict:
        """Configurations the diagram admits beyond the matrix (no residual
        constraint): the table a reviewer compares against the input rows."""
        from .errors import BudgetExceeded
        from .semantics import check_semantics

        try:
            rep = check_semantics(model, model.vm.matrix, budget=200_000)
        except BudgetExceeded:
            return {"computed": False, "reason": "enumeration budget exceeded"}
        extra = [{"selected": sorted(c.selected), "values": dict(c.values)}
                 for c in rep.extra[:50]]
        return {"computed": True, "complete": rep.complete,
                "extra_count": len(rep.extra), "extra": extra}

    def export_json(self) -> str:
        state = self.step()
        if state.status != "completed":
            raise IllegalAnswer("session is not completed")
        return to_json(state.model)


class SessionStore:
    """In-memory sessions with optional file-backed persistence."""

    def __init__(self, persist_dir: str | None = None):
        self.persist_dir = persist_dir
        self._sessions = {}
        self._lock = threading.Lock()
        if persist_dir:
            os.makedirs(persist_dir, exist_ok=True)

    def _path(self, session_id):
        return os.path.join(self.persist_dir, f"{session_id}.json")

    def create(self, csv_text, dk_text, options) -> Session:
        session = Session(uuid.uuid4().hex, csv_text, dk_text, options)
        session.step()  # validate inputs eagerly; parse errors surface here
        with self._lock:
            self._sessions[session.id] = session
        self.save(session)
        return session

    def get(self, session_id) -> Session | None:
        with self._lock:
            got = self._sessions.get(session_id)
        if got is None and self.persist_dir:
            path = self._path(session_id)
            if os.path.exists(path):
                with open(path, "r", encoding="utf-8") as fh:
                    got = Session.from_record(json.load(fh))
                with self._lock:
                    self._sessions[session_id] = got
        return got

    def save(self, session: Session):
        if not self.persist_dir:
            return
        with open(self._path(session.id), "w", encoding="utf-8") as fh:
            json.dump(session.to_record(), fh)
