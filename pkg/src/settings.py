from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    log_level: str = "INFO"
    threads: int = 1
    table_ceiling: int = 2 ** 24
    block_size: int = 65536
    cutoff_exponent: float = 1 / 16
    sieve_level_exponent: float = 1 / 64
    decay_exponent: float = 1 / 7
    z_constant: float = 1.0
    calibration_limit: int = 10_000_000
    gamma_cutoff: int = 10_000
    bessel_epsilon: float = 1e-13
    mollifier_epsilon: float = 0.01

settings = Settings()
