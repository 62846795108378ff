"""Competition harness: scenario simulator, question generator and scorer."""

from epilog.harness.queries import QueryItem, default_session, generate_queries
from epilog.harness.scenario import Scenario, ScenarioConfig, generate_scenario
from epilog.harness.scoring import QueryResult, ScoreReport, run_and_score, score_document, session_and_extended

__all__ = ["QueryItem", "QueryResult", "Scenario", "ScenarioConfig", "ScoreReport", "default_session",
           "generate_queries", "generate_scenario", "run_and_score", "score_document", "session_and_extended"]
