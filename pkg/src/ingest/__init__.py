"""
Census ingestion: LODES origin-destination flows, ACS attributes, 311
complaints, centroids, and network assembly.

Public API:
    parse_od_file(path, geo_level)          -> List[FlowRecord]
    parse_attribute_file(path, schema)      -> AttributeTable
    parse_complaint_file(path)              -> AttributeTable (proportions)
    parse_centroid_file(path)               -> Dict[RegionId, (lon, lat)]
    build_network(flows, regions)           -> MobilityNetwork
    write_edge_list / read_edge_list        -> canonical edge list I/O
    network_stats(net)                      -> NetworkStats
    load_city(...)                          -> CityData

Mobility Analytics Team — 2026-10
"""

from .attributes import (
    align_attributes, align_columns, normalize_region_code, parse_attribute_file,
    parse_centroid_file, parse_complaint_file,
)
from .city import CityData, load_city
from .lodes import aggregate_flows, parse_od_file, records_total, truncate_geoid
from .models import (
    AttributeParseError, AttributeSchema, AttributeTable, FlowRecord, ODParseError,
    RegionMismatchError,
)
from .network import (
    NetworkStats, build_network, edge_list_frame, job_counts, network_stats,
    network_to_records, read_edge_list, resident_worker_counts, write_edge_list,
)

__all__ = [
    'AttributeParseError', 'AttributeSchema', 'AttributeTable', 'CityData',
    'FlowRecord', 'NetworkStats', 'ODParseError', 'RegionMismatchError',
    'aggregate_flows', 'align_attributes', 'align_columns', 'build_network',
    'edge_list_frame', 'job_counts', 'load_city', 'network_stats',
    'network_to_records', 'normalize_region_code', 'parse_attribute_file',
    'parse_centroid_file', 'parse_complaint_file', 'parse_od_file',
    'read_edge_list', 'records_total', 'resident_worker_counts',
    'truncate_geoid', 'write_edge_list',
]
