"""Finite rigid saturated structures: Rado-graph rigidification, layered
graph towers, exact rational metric extensions and rigid metric towers."""

from ._search import BACKEND
from .automorphism import (
    AutSet,
    Embedding,
    automorphisms,
    extension_square,
    ge_group,
    is_automorphism,
    is_rigid,
)
from .errors import (
    ConstructionError,
    ContractError,
    InvalidQueryError,
    MetricError,
    RigidsatError,
    ScheduleError,
    SizeCapError,
)
from .graph import (
    Graph,
    WitnessQuery,
    binary_rado,
    extension_defects,
    find_witness,
    format_graph,
    parse_graph,
    saturate,
)
from .metric import (
    KatetovType,
    QMetricSpace,
    format_metric,
    one_point_extend,
    parse_metric,
    pushout_amalgam,
    qu_saturate,
    validate_metric,
)
from .rigid import DegreeSchedule, RigidifyState, audit_tower, build_fingerprint, build_tower, rigidify
from .rtype import (
    LayeredSpace,
    ObstructionGadget,
    PointedSpace,
    RTypeSpec,
    SupportClosure,
    gadget_embeds,
    make_gadget,
    mr_validate,
    rtype_lower_bound,
    rtype_saturate,
    separating_family,
    support_closure,
)
from .tower import RMatrix, TowerState, audit_stage_rigidity, build_stage, four_point_gadget

__version__ = "0.1.0"
