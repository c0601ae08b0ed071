import numpy as np


class EprwitError(Exception):  # pragma: no cover
    def __init__(self, error_type=None, message=None, source=None):
        self.error_type = error_type
        self.source = source
        self.message = message
        super().__init__(self, message)


def chunked(n, size):
    """Yield (start, stop) slices covering range(n) in blocks of `size`."""
    for start in range(0, n, size):
        yield start, min(start + size, n)


def shard_rng(seed, shard):
    """RNG for one sampling shard.

    The shard layout is part of the reproducibility contract: shard k always
    draws from SeedSequence([seed, k]).
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(shard)]))


def parse_spec_string(text):
    """Parse `family:key=value,key=value` into (family, {key: value}).

    Values that look numeric are converted to float (or complex when they
    contain a `j`); anything else stays a string.
    """
    if not text:
        raise EprwitError(
            error_type="InvalidConfig",
            message="Empty specification string")

    family, _, rest = text.partition(":")
    params = {}
    if rest and family == "file":
        params["path"] = rest
        return family, params

    for item in filter(None, rest.split(",")):
        if "=" not in item:
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Expected key=value in '{text}', got '{item}'")
        key, value = item.split("=", 1)
        params[key.strip()] = _coerce(value.strip())

    return family.strip(), params


def _coerce(value):
    try:
        return float(value)
    except ValueError:
        pass
    try:
        return complex(value)
    except ValueError:
        return value
