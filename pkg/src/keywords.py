from enum import Enum, IntEnum


class Layout:
    # payload header
    DIM_BITS = 20
    COUNT_BITS = 16
    COORD_BITS = 12
    HEADER_BITS = 2 * DIM_BITS + COUNT_BITS
    RECT_BITS = 4 * COORD_BITS

    MAX_DIM = (1 << DIM_BITS) - 1
    MAX_COUNT = (1 << COUNT_BITS) - 1
    MAX_COORD = (1 << COORD_BITS) - 1

    # decimal coding
    FIELD_BITS = 6
    WORD_BITS = 2 * FIELD_BITS
    MAX_TOKEN_LENGTH = (1 << FIELD_BITS) - 1
    MAX_TOKEN_VALUE = (1 << FIELD_BITS) - 1

    # embedding
    LSB_BITS = 3
    PIXELS_PER_WORD = WORD_BITS // LSB_BITS


class MergeOrder(Enum):
    VERTICAL_FIRST = "vertical-first"
    HORIZONTAL_FIRST = "horizontal-first"

    @classmethod
    def of(cls, text: str):
        text_lower = text.lower()
        for member in cls.__members__.values():
            if member.value == text_lower:
                return member
        else:
            raise ValueError(f"Unknown merge order: {text}")


class StatsFormat(Enum):
    NONE = "none"
    CSV = "csv"


class ExitCode(IntEnum):
    OK = 0
    USAGE = 1
    CAPACITY = 2
    CORRUPT = 3
