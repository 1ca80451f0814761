"""src/imaging — 仿射 LiDAR 成像映射与暴力射线投射真值"""
from src.imaging.maps import (
    AffineImagingMap,
    HitEdge,
    hit_edge_for_region,
    imaging_map,
    lidar_image_affine,
    partition_imaging_maps,
    region_imaging_maps,
)
from src.imaging.oracle import lidar_hit_edges_batch, lidar_image_bruteforce, lidar_images_batch

__all__ = [
    "AffineImagingMap",
    "HitEdge",
    "hit_edge_for_region",
    "imaging_map",
    "lidar_image_affine",
    "lidar_hit_edges_batch",
    "lidar_image_bruteforce",
    "lidar_images_batch",
    "partition_imaging_maps",
    "region_imaging_maps",
]
