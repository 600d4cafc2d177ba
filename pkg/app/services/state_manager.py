from typing import Dict, Optional
import uuid

from app.engines.models import CalibrationState
from app.schemas.calibration import RoundLog


class StateManager:
    """In-memory store of in-flight calibration runs, keyed by run_id."""

    def __init__(self):
        self.run_store: Dict[str, CalibrationState] = {}

    def create_run(self, method: str, run_id: Optional[str] = None) -> CalibrationState:
        """Initialize a new calibration run."""
        run_id = run_id or f"{method}-{uuid.uuid4().hex[:12]}"
        if run_id in self.run_store:
            raise ValueError(f"run {run_id!r} is already in flight")
        state = CalibrationState(run_id=run_id, method=method)
        self.run_store[run_id] = state
        return state

    def get_run(self, run_id: str) -> Optional[CalibrationState]:
        """Retrieve run state."""
        return self.run_store.get(run_id)

    def add_round(self, run_id: str, log: RoundLog) -> None:
        """
        Add or update the log of an outer round.

        A round that is already recorded is replaced, otherwise the log is
        appended.
        """
        state = self.get_run(run_id)
        if state is None:
            return
        existing = next((i for i, r in enumerate(state.rounds) if r.round == log.round), None)
        if existing is not None:
            state.rounds[existing] = log
        else:
            state.rounds.append(log)

    def list_runs(self) -> Dict[str, CalibrationState]:
        """Runs currently in flight."""
        return self.run_store

    def discard(self, run_id: str) -> None:
        """Forget a run once its result has been built (or it failed)."""
        self.run_store.pop(run_id, None)


# Global state manager instance
state_manager = StateManager()
