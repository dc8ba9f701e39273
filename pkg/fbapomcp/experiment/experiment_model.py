from enum import Enum


class AgentEnum(str, Enum):
    BAPOMCP = "bapomcp"
    KNOWS_STRUCTURE = "knows-structure"
    NO_REINVIGORATION = "no-reinvigoration"
    FBAPOMCP_FULL = "fbapomcp-full"


class ModelClassEnum(str, Enum):
    TABULAR = "tabular"
    FACTORED = "factored"
    KNOWN = "known"


class StructurePriorEnum(str, Enum):
    UNIFORM = "uniform"
    KNOWN = "known"


CSV_COLUMNS = ["run", "episode", "return", "ms", "reinvigorated", "topo_count"]
SUMMARY_COLUMNS = ["episode", "mean", "ci_low", "ci_high"]

# fields an agents.<id>.* block may set; everything else is shared
AGENT_FIELDS = frozenset({"model_class", "structure_prior", "reinvigorate"})
