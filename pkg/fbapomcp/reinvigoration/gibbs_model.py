from enum import Enum


class SeedSourceEnum(str, Enum):
    BELIEF = "belief"
    PRIOR = "prior"
