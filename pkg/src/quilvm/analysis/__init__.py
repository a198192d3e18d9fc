from .cfg import BasicBlock, ControlFlowGraph, build_cfg
from .jsonexport import export_json, program_to_json
from .parallel import ParallelSchedule, format_schedule, parallelize
from .rewrite import RewriteError, RewriteRule, RoutingError, Topology, rewrite_gates, route
