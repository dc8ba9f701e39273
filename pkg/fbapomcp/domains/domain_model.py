from enum import Enum


class DomainEnum(str, Enum):
    TIGER = "tiger"
    COLLISION = "collision"
    GRIDWORLD = "gridworld"


class TigerActionEnum(int, Enum):
    OPEN_LEFT = 0
    OPEN_RIGHT = 1
    LISTEN = 2


class CollisionActionEnum(int, Enum):
    STAY = 0
    UP = 1
    DOWN = 2


class GridActionEnum(int, Enum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


TIGER_REWARDS = {"tiger": -100.0, "gold": 10.0, "listen": -1.0}
COLLISION_REWARDS = {"collision": -1000.0, "diagonal": -1.0}
GOAL_REWARD = 1.0
