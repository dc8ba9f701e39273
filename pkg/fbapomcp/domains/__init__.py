from typing import Any, Tuple, Union

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.models.prior_base import PriorSpec
from fbapomcp.pomdp.domain_base import DomainSpec

from .collision_avoidance import make_collision_avoidance
from .domain_model import DomainEnum
from .gridworld import make_gridworld
from .tiger import make_factored_tiger


class DomainFactory:
    _builders = {
        DomainEnum.TIGER: make_factored_tiger,
        DomainEnum.COLLISION: make_collision_avoidance,
        DomainEnum.GRIDWORLD: make_gridworld,
    }

    @classmethod
    def create(
        cls, domain: Union[DomainEnum, str], **params: Any
    ) -> Tuple[DomainSpec, PriorSpec]:
        if isinstance(domain, str):
            try:
                domain = DomainEnum(domain.lower())
            except ValueError:
                raise InvalidArgumentError(f"Unsupported domain: {domain}")
        return cls._builders[domain](**params)
