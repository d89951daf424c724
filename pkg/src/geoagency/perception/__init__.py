from .perceptors import (
    CaptionPerceptor,
    MockOraclePerceptor,
    PerceptionQuery,
    PerceptionResult,
    Perceptor,
    PerceptorRegistry,
    ResolutionLimitedPerceptor,
    TaskKind,
)

__all__ = [
    "CaptionPerceptor", "MockOraclePerceptor", "PerceptionQuery",
    "PerceptionResult", "Perceptor", "PerceptorRegistry",
    "ResolutionLimitedPerceptor", "TaskKind",
]
