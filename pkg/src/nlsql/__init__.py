"""Plain-English questions over relational databases.

The pipeline: onboard a database (clean identifiers, synonyms, datetime
expansion), normalize temporal phrases in the question, translate through a
pluggable backend with a query cache, resolve ``'Terminal'`` value
placeholders, execute read-only, summarize the SQL in plain English, and
rank candidate visualizations of the result.
"""

from .errors import (
    AmbiguityError,
    BackendUnavailable,
    CycleDetected,
    DegenerateInput,
    ExecutionError,
    FormatMismatch,
    NlsqlError,
    NoCandidates,
    NoTranslation,
    OnboardingError,
    RejectedStatement,
    UnknownDatabase,
    UnknownIdentifier,
    UnknownResult,
    UnsupportedSyntax,
    UnterminatedLiteral,
)
from .executor import ResultTable, execute, export_csv
from .explain import Explanation, explain
from .onboarding import (
    ColumnMeta,
    DateFormat,
    OnboardedDatabase,
    OnboardingConfig,
    apply_synonyms,
    clean_identifier,
    expand_datetime_column,
    onboard_database,
)
from .resolver import ResolutionResult, ValueIndex, resolve, resolve_numeric, resolve_textual
from .service import QueryResponse, QueryService, create_app
from .sqlparser import ParsedQuery, SqlToken, find_terminals, parse, render, tokenize
from .temporal import NormalizedQuery, TemporalSpan, normalize_query, recognize_temporal
from .translator import (
    CachedTranslator,
    CandidateSql,
    FixtureTranslator,
    QueryCacheKey,
    RemoteTranslator,
)
from .viz import (
    DiversifiedConfig,
    FeatureVector,
    RankingModel,
    VisualizationNode,
    enumerate_candidates,
    rank,
    rank_diversified,
    rank_partial_order,
    train_pairwise,
)

__version__ = "0.1.0"
