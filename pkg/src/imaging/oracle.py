"""src/imaging/oracle.py — 暴力射线投射 LiDAR 图像（独立于仿射映射的真值）"""
from __future__ import annotations

import numpy as np

from src.errors import NoHit
from src.geometry.raycast import first_hit
from src.geometry.types import RAY_EPS, LidarSpec, Point2, WorkspaceSpec, direction


def lidar_image_bruteforce(position: Point2, workspace: WorkspaceSpec, lidar: LidarSpec) -> np.ndarray:
    """对每束激光 r_i = 到第一个击中点的距离，d_i = (r_i cos θ_i, r_i sin θ_i)"""
    out = np.empty(2 * lidar.laser_count, dtype=float)
    for i, angle in enumerate(lidar.angles):
        hit = first_hit(position, angle, workspace)
        out[2 * i] = hit.point[0] - position[0]
        out[2 * i + 1] = hit.point[1] - position[1]
    return out


def _batch_hits(positions: np.ndarray, workspace: WorkspaceSpec, lidar: LidarSpec, chunk: int):
    """逐块生成 (距离 (K, N), 击中边下标 (K, N))"""
    dirs = np.array([direction(a) for a in lidar.angles])          # (N, 2)
    edges = workspace.edge_array                                    # (E, 4)
    px, py = edges[:, 0], edges[:, 1]
    ex, ey = edges[:, 2] - px, edges[:, 3] - py
    elen = np.hypot(ex, ey)
    c, s = dirs[:, 0:1], dirs[:, 1:2]                               # (N, 1)
    denom = c * ey[None, :] - s * ex[None, :]                       # (N, E)
    parallel = np.abs(denom) <= RAY_EPS * elen[None, :]
    safe_denom = np.where(parallel, 1.0, denom)
    slack = RAY_EPS / elen

    for start in range(0, len(positions), chunk):
        block = positions[start:start + chunk]
        wx = px[None, :] - block[:, 0:1]                            # (K, E)
        wy = py[None, :] - block[:, 1:2]
        t = (wx * ey[None, :] - wy * ex[None, :])[:, None, :] / safe_denom[None, :, :]
        u = (wx[:, None, :] * s[None, :, :] - wy[:, None, :] * c[None, :, :]) / safe_denom[None, :, :]
        valid = (~parallel[None, :, :]) & (t > RAY_EPS) & (u >= -slack) & (u <= 1.0 + slack)
        t = np.where(valid, t, np.inf)
        idx = t.argmin(axis=2)                                      # (K, N)
        r = np.take_along_axis(t, idx[:, :, None], axis=2)[:, :, 0]
        if not np.all(np.isfinite(r)):
            k = int(np.argwhere(~np.isfinite(r))[0, 0])
            raise NoHit(f"position {block[k].tolist()} has a laser without hit")
        yield r, idx


def lidar_images_batch(
    positions: np.ndarray,
    workspace: WorkspaceSpec,
    lidar: LidarSpec,
    chunk: int = 4096,
) -> np.ndarray:
    """
    批量 LiDAR 图像：positions (K, 2) → (K, 2N)

    在 位置 × 激光 × 边 上向量化求交；与边平行的激光忽略该边
    （只在位置恰好落在边的延长线上时才有影响，且此时相邻边给出同一距离）。

    Raises:
        NoHit: 某个位置的某束激光没有击中任何边
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    dirs = np.array([direction(a) for a in lidar.angles])
    results = [(r[:, :, None] * dirs[None, :, :]).reshape(len(r), -1)
               for r, _ in _batch_hits(positions, workspace, lidar, chunk)]
    return np.concatenate(results, axis=0) if results else np.empty((0, 2 * lidar.laser_count))


def lidar_hit_edges_batch(
    positions: np.ndarray,
    workspace: WorkspaceSpec,
    lidar: LidarSpec,
    chunk: int = 4096,
) -> np.ndarray:
    """批量击中边：positions (K, 2) → (K, N)，值为 workspace.edge_list 中的下标"""
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    results = [idx for _, idx in _batch_hits(positions, workspace, lidar, chunk)]
    return np.concatenate(results, axis=0) if results else np.empty((0, lidar.laser_count), dtype=int)
