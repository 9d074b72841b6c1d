import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field


def _flag(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


class Settings(BaseModel):
    workers: int = Field(1, ge=1)
    default_order: int = Field(12, ge=1)
    checked: bool = True
    seed: int = 0
    log_level: str = "INFO"
    api_host: str = "0.0.0.0"
    port: int = 8000


@lru_cache()
def get_settings() -> Settings:
    """Settings from the environment, after loading a .env file if present."""
    load_dotenv()
    return Settings(
        workers=int(os.getenv("GERMCOH_WORKERS", "1")),
        default_order=int(os.getenv("GERMCOH_DEFAULT_ORDER", "12")),
        checked=_flag("GERMCOH_CHECKED", True),
        seed=int(os.getenv("GERMCOH_SEED", "0")),
        log_level=os.getenv("GERMCOH_LOG_LEVEL", "INFO").upper(),
        api_host=os.getenv("API_HOST", "0.0.0.0"),
        port=int(os.getenv("PORT", "8000")),
    )
