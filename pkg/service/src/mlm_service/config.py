import os
from dataclasses import dataclass


@dataclass(frozen=True)
class ServiceConfig:
    model_id: str
    port: int = 8100
    host: str = "127.0.0.1"
    device: str = "cpu"
    max_top_k: int = 200
    max_tokens: int = 128

    def __post_init__(self):
        if self.max_top_k < 1:
            raise ValueError("max_top_k must be >= 1")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


def config_from_env(**overrides) -> ServiceConfig:
    """Environment-driven config: MODEL_ID and PORT, overridable per field."""
    values = {
        "model_id": os.environ.get("MODEL_ID", ""),
        "port": int(os.environ.get("PORT", 8100)),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if not values.get("model_id"):
        raise ValueError("a model id is required (--model or MODEL_ID)")
    return ServiceConfig(**values)
