import yaml
from typing import Tuple, Type, Dict, Any, Annotated
from functools import lru_cache
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)


class YamlFileSource(PydanticBaseSettingsSource):
    """
    A custom settings source that loads configuration from a specific YAML file.
    """

    def __init__(self, settings_cls: Type[BaseSettings], filepath: str):
        super().__init__(settings_cls)
        self.filepath = filepath

    def get_field_value(self, field, field_name):
        return None, field_name, False

    def __call__(self) -> Dict[str, Any]:
        try:
            with open(self.filepath, "r") as f:
                data = yaml.safe_load(f)
            return data if isinstance(data, dict) else {}
        except FileNotFoundError:
            return {}


class SamplerSettings(BaseModel):
    """Settings for drawing numeric models consistent with a qualitative network."""

    seed: Annotated[int, Field(description="Base seed; model i uses (seed, i).")] = 42
    samples: Annotated[
        int, Field(description="Number of sampled models per numeric check.")
    ] = 1000
    epsilon: Annotated[
        float,
        Field(description="Minimum margin for every strict sign constraint."),
    ] = 0.01

    @field_validator("samples")
    @classmethod
    def must_be_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("Must be positive")
        return v

    @field_validator("epsilon")
    @classmethod
    def must_be_small_margin(cls, v: float) -> float:
        if not (0 < v < 0.1):
            raise ValueError("Epsilon must be in (0, 0.1)")
        return v


class ReductionSettings(BaseModel):
    """Settings for qualitative graph reduction and order construction."""

    orient_signals: Annotated[
        bool,
        Field(
            description="Reverse state->signal links so observed signals precede "
            "the state they report on."
        ),
    ] = True
    max_order_variables: Annotated[
        int,
        Field(description="Largest predecessor set for an explicit partial order."),
    ] = 12

    @field_validator("max_order_variables")
    @classmethod
    def must_be_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("Must be positive")
        return v


class AdmissibilitySettings(BaseModel):
    """Techniques used when computing the admissible strategy set."""

    pairwise: Annotated[bool, Field(description="Pairwise matched-case dominance.")] = (
        True
    )
    kway: Annotated[bool, Field(description="k-way dominance over strategy pairs.")] = (
        True
    )
    mixed: Annotated[bool, Field(description="Mixed-strategy dominance.")] = True
    prune: Annotated[
        bool, Field(description="Hypothetical-optimality pruning rules.")
    ] = True
    tolerance: Annotated[
        float, Field(description="Numeric slack when comparing expected utilities.")
    ] = 1e-12
    max_region_pairs: Annotated[
        int,
        Field(
            description="Most unknown utility comparisons split into sign regions "
            "by the symbolic k-way route."
        ),
    ] = 6
    cross_check: Annotated[
        bool,
        Field(description="Falsify every symbolic proof against sampled models."),
    ] = True

    @field_validator("tolerance")
    @classmethod
    def must_be_non_negative(cls, v: float) -> float:
        if v < 0:
            raise ValueError("Tolerance cannot be negative")
        return v

    @field_validator("max_region_pairs")
    @classmethod
    def must_be_bounded(cls, v: int) -> int:
        if not (0 <= v <= 12):
            raise ValueError("Must be between 0 and 12")
        return v


class OracleSettings(BaseModel):
    """Limits for exhaustive numeric evaluation."""

    max_chance_variables: Annotated[
        int, Field(description="Largest network the oracle enumerates exactly.")
    ] = 20

    @field_validator("max_chance_variables")
    @classmethod
    def must_be_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("Must be positive")
        return v


class LoggingSettings(BaseModel):
    """Settings for application logging."""

    log_level: Annotated[
        str,
        Field(
            description="Logging verbosity level.",
            json_schema_extra={
                "possible_values": ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
            },
        ),
    ] = "INFO"

    @field_validator("log_level")
    @classmethod
    def valid_log_level(cls, v: str) -> str:
        levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in levels:
            raise ValueError(f"Log level must be one of {levels}")
        return v.upper()


class Settings(BaseSettings):
    """
    Root Configuration.
    Access fields via settings.sampler, settings.reduction, settings.admissibility,
    settings.oracle or settings.logging.
    """

    model_config = SettingsConfigDict(
        env_prefix="QPN_", env_nested_delimiter="__", env_file_encoding="utf-8"
    )

    sampler: SamplerSettings = Field(default_factory=lambda: SamplerSettings())
    reduction: ReductionSettings = Field(default_factory=lambda: ReductionSettings())
    admissibility: AdmissibilitySettings = Field(
        default_factory=lambda: AdmissibilitySettings()
    )
    oracle: OracleSettings = Field(default_factory=lambda: OracleSettings())
    logging: LoggingSettings = Field(default_factory=lambda: LoggingSettings())

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            YamlFileSource(settings_cls, "config/config.yaml"),
            dotenv_settings,
            file_secret_settings,
        )


@lru_cache()
def get_settings() -> Settings:
    return Settings()
