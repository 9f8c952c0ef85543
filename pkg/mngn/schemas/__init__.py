from mngn.schemas.linalg import SvdFactors, GsvdFactors, GsvdLayout, NullSpaceBasis, BasisKind
from mngn.schemas.rank import RankParams
from mngn.schemas.relaxation import EtaState, BetaState, DeltaMode, LogBase
from mngn.schemas.solver import Problem, SolveOptions, IterationRecord, SolveResult, Method, FailureReason
from mngn.schemas.problems import TestProblem, ProblemId, ProblemParams, RegularizerSpec, RegularizerKind, CheckResult
from mngn.schemas.bench import TrialSpec, TrialRecord, BenchRow, BenchSummary, OutputFormat
from mngn.schemas.cli import CliConfig, Subcommand
