"""Approximate Euclidean shortest paths inside simple cube-curves.

Rubberband solvers (original, corrected edge-based, face-based), a
graph-search oracle over subdivided critical edges, random curve generation
and a runtime benchmark harness.
"""

from .cube_model import (
    Axis,
    ChordAdjacency,
    CriticalEdge,
    CubeCurve,
    CurveClassification,
    CurveError,
    CurveParseError,
    DuplicateCube,
    END_ANGLE,
    MIDDLE_ANGLE,
    NotClosed,
    NotFaceAdjacent,
    PathNotOnCurve,
    TooShort,
    angle_kind,
    classify_angles,
    classify_first_class,
    critical_edges,
    curve_to_text,
    face_adjacent,
    load_curve,
    parse_curve_text,
    save_curve,
    validate_curve,
)
from .curve_gen import GenConfig, GenerationFailed, generate_curve
from .graph_oracle import (
    Disconnected,
    SubdivisionGraph,
    TooFewCriticalEdges,
    build_graph,
    oracle_then_rba,
    shortest_cycle,
)
from .rubberband import (
    EDGE_BASED,
    FACE_BASED,
    NoCriticalEdges,
    ORIGINAL,
    PathVertex,
    Polyline,
    RunReport,
    SolverConfig,
    initialize_path,
    make_polyline,
    parse_path_text,
    path_length,
    path_to_text,
    rba_loop_edge_based,
    rba_loop_face_based,
    rba_loop_original,
    run_rba,
    simplify_collinear,
    solve_curve,
)
from .tube_geometry import (
    DEFAULT_TOL,
    DegenerateTriangle,
    Point3,
    Segment3,
    Tolerance,
    dist,
    min_dist_sum_on_segment,
    op3_optimize,
    point_in_tube,
    segment_critical_intersections,
    segment_in_tube,
    triangle_critical_intersections,
)

__version__ = "0.1.0"
