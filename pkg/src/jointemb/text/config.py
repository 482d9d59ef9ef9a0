"""Configuration shared by the five text-embedding trainers."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from ..errors import ConfigError

METHODS = ("lda", "word2vec", "fasttext", "doc2vec", "glove")

# per-method default learning rates; LDA has none (Gibbs sampling)
_DEFAULT_LR = {"word2vec": 0.025, "fasttext": 0.05, "doc2vec": 0.025, "glove": 0.05}


@dataclass
class EmbeddingConfig:
    """Hyperparameters for one trainer; method-irrelevant fields are ignored.

    dim doubles as the topic count for the topic-model method. topic_alpha
    left unset resolves to 50/dim; learning_rate left unset resolves to a
    per-method default.
    """

    method: str = "word2vec"
    dim: int = 400
    epochs: int = 5
    window: int = 5
    negative: int = 5
    learning_rate: float | None = None
    min_count: int = 1
    min_n: int = 3
    max_n: int = 6
    topic_alpha: float | None = None
    topic_beta: float = 0.01
    gibbs_sweeps: int = 200
    inference_steps: int = 50
    x_max: float = 100.0
    glove_alpha: float = 0.75
    workers: int = 1
    seed: int = 0

    def validate(self, method: str | None = None) -> "EmbeddingConfig":
        if method is not None and self.method != method:
            raise ConfigError(
                f"config.method is {self.method!r}, this trainer requires {method!r}"
            )
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.dim < 1:
            raise ConfigError(f"dim must be positive, got {self.dim}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.negative < 0:
            raise ConfigError(f"negative must be >= 0, got {self.negative}")
        if self.min_count < 1:
            raise ConfigError(f"min_count must be >= 1, got {self.min_count}")
        if self.method == "fasttext" and self.min_n > self.max_n:
            raise ConfigError(f"min_n ({self.min_n}) exceeds max_n ({self.max_n})")
        if self.min_n < 1:
            raise ConfigError(f"min_n must be >= 1, got {self.min_n}")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.topic_alpha is not None and self.topic_alpha <= 0:
            raise ConfigError(f"topic_alpha must be positive, got {self.topic_alpha}")
        if self.topic_beta <= 0:
            raise ConfigError(f"topic_beta must be positive, got {self.topic_beta}")
        if self.gibbs_sweeps < 0:
            raise ConfigError(f"gibbs_sweeps must be >= 0, got {self.gibbs_sweeps}")
        if self.inference_steps < 1:
            raise ConfigError(f"inference_steps must be >= 1, got {self.inference_steps}")
        if self.x_max <= 0:
            raise ConfigError(f"x_max must be positive, got {self.x_max}")
        if not 0 < self.glove_alpha <= 1:
            raise ConfigError(f"glove_alpha must be in (0, 1], got {self.glove_alpha}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        return self

    @property
    def effective_learning_rate(self) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return _DEFAULT_LR.get(self.method, 0.025)

    @property
    def effective_topic_alpha(self) -> float:
        return self.topic_alpha if self.topic_alpha is not None else 50.0 / self.dim

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EmbeddingConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown embedding config fields {sorted(unknown)}")
        return cls(**data)
