class StegoError(Exception):
    """Base class of every pipeline failure."""


class CapacityExceeded(StegoError):
    def __init__(self, available: int, required: int):
        self.available = available
        self.required = required
        super().__init__(f"host carries {available} words, payload needs {required} "
                         f"(deficit {required - available})")

    @property
    def deficit(self) -> int:
        return self.required - self.available


class CorruptPayloadError(StegoError):
    """Stream cannot be decoded: wrong key, wrong parameters or a damaged stego image."""


class FieldOverflowError(StegoError):
    def __init__(self, field: str, value: int, bits: int):
        self.field = field
        self.value = value
        self.bits = bits
        super().__init__(f"{field}={value} does not fit in {bits} bits")


class ConfigError(Exception):
    pass
