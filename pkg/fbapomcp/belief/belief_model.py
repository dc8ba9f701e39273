from enum import Enum


class ResamplingEnum(str, Enum):
    SYSTEMATIC = "systematic"
    MULTINOMIAL = "multinomial"


class BeliefUpdateEnum(str, Enum):
    IMPORTANCE = "importance"
    REJECTION = "rejection"
