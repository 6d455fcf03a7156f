from .count_record import CountRecord  # noqa: F401
