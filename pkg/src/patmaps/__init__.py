"""patmaps: time-resolved geographic and classification-space patent maps."""

from .citystats import (
    CityStats,
    classify_ztest,
    node_scale,
    percentile_classes,
    top_cited_threshold,
    ztest_proportion,
)
from .diversity import (
    BaseMap,
    CitationMatrix,
    ClassVector,
    DisparityMatrix,
    base_map_layout,
    class_proportions,
    disparity_from_citations,
    profile_disparity,
    rao_stirling,
    spearman,
)
from .errors import PatmapsError
from .geocode import GeoCache, GeoPoint, gazetteer_lookup, geocode_batch, load_gazetteer
from .network import (
    CityGraph,
    Layout,
    Partition,
    build_co_network,
    components,
    density,
    kamada_kawai,
    louvain,
    modularity,
    read_pajek,
    write_pajek,
)
from .pipeline import RunConfig, build_bundle, compare_windows, parse_bundle, run_pipeline
from .records import (
    Corpus,
    Party,
    PatentRecord,
    WindowSpec,
    normalize_party,
    parse_records,
    truncate_ipc,
    window_slices,
    write_records,
)

__version__ = "0.1.0"

__all__ = [
    "BaseMap",
    "CitationMatrix",
    "CityGraph",
    "CityStats",
    "ClassVector",
    "Corpus",
    "DisparityMatrix",
    "GeoCache",
    "GeoPoint",
    "Layout",
    "Partition",
    "Party",
    "PatentRecord",
    "PatmapsError",
    "RunConfig",
    "WindowSpec",
    "base_map_layout",
    "build_bundle",
    "build_co_network",
    "class_proportions",
    "classify_ztest",
    "compare_windows",
    "components",
    "density",
    "disparity_from_citations",
    "gazetteer_lookup",
    "geocode_batch",
    "kamada_kawai",
    "load_gazetteer",
    "louvain",
    "modularity",
    "node_scale",
    "normalize_party",
    "parse_bundle",
    "parse_records",
    "percentile_classes",
    "profile_disparity",
    "rao_stirling",
    "read_pajek",
    "run_pipeline",
    "spearman",
    "top_cited_threshold",
    "truncate_ipc",
    "window_slices",
    "write_pajek",
    "write_records",
    "ztest_proportion",
]
