"""Corpus-mining trivia answerer and prize-ladder game player."""

from .question_bank import (
    Question,
    QuestionBank,
    QuestionFlags,
    BankFormatError,
    classify,
    load_bank,
    tokenize,
    tokenize_and_filter,
)
from .retrieval import (
    Document,
    LocalCorpusIndex,
    Query,
    QueryPlan,
    SearchBackend,
    build_query_plan,
    index_corpus,
    read_corpus,
)
from .scoring import (
    NounPhrase,
    ProximityParams,
    ScoreVector,
    Strategy,
    distance_score,
    extract_noun_phrases,
    naive_counts,
    noun_phrase_strategy,
    proximity_strategy,
)
from .ensemble import (
    AnswerBreakdown,
    CombinedScores,
    ExpertOpinion,
    WeightMode,
    WeightVector,
    answer_question,
    answer_question_detailed,
    combine,
    confidence_ratio,
    confidence_weights,
    select_answer,
)
from .decision import (
    Action,
    ActionChoice,
    ActionKind,
    DecisionPlanner,
    GameRules,
    GameState,
    LevelAccuracy,
    Lifeline,
    LifelineModel,
    LifelineSpec,
    RiskParams,
    apply_fifty_fifty,
    apply_vote_lifeline,
    best_action,
    lifeline_boost,
    question_probability,
    safe_amount,
    stage_to_level,
    utility,
)
from .simulator import (
    GameRecord,
    PipelineOracle,
    QAOracle,
    SimulationParams,
    SimulationReport,
    SyntheticOracle,
    calibrate,
    evaluate_accuracy,
    play_game,
    run_games,
    simulate,
    sweep,
    synthetic_answer,
)
from .stopwords import STOPWORDS

__version__ = "0.1.0"
