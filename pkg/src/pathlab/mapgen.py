"""Seeded synthetic grid maps in the style of the standard benchmark families.

``maze_map`` carves a perfect maze (iterative depth-first backtracker) with
corridors ``corridor`` cells wide and one-cell walls, like the ``mazeN-W-i``
maps.  ``open_terrain_map`` scatters blob obstacles over an open field and
keeps only the largest connected region, loosely imitating game maps.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .fastmap import make_rng
from .mapio import GridMap, Neighborhood, grid_from_array


def maze_map(cells_x: int, cells_y: int, corridor: int, seed: int = 0,
             neighborhood: Neighborhood | str = Neighborhood.FOUR) -> GridMap:
    rng = make_rng(seed)
    step = corridor + 1
    width, height = cells_x * step + 1, cells_y * step + 1
    p = np.zeros((height, width), dtype=bool)
    for cy in range(cells_y):
        for cx in range(cells_x):
            y0, x0 = 1 + cy * step, 1 + cx * step
            p[y0:y0 + corridor, x0:x0 + corridor] = True

    seen = np.zeros((cells_y, cells_x), dtype=bool)
    stack = [(0, 0)]
    seen[0, 0] = True
    while stack:
        cx, cy = stack[-1]
        options = [(cx + dx, cy + dy) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
                   if 0 <= cx + dx < cells_x and 0 <= cy + dy < cells_y
                   and not seen[cy + dy, cx + dx]]
        if not options:
            stack.pop()
            continue
        nx, ny = options[int(rng.integers(len(options)))]
        # knock down the wall between the two cells
        if nx != cx:
            wx = 1 + max(cx, nx) * step - 1
            y0 = 1 + cy * step
            p[y0:y0 + corridor, wx] = True
        else:
            wy = 1 + max(cy, ny) * step - 1
            x0 = 1 + cx * step
            p[wy, x0:x0 + corridor] = True
        seen[ny, nx] = True
        stack.append((nx, ny))
    return grid_from_array(p, neighborhood, f"maze{width}-{corridor}-{seed}")


def open_terrain_map(width: int, height: int, obstacles: int, max_radius: int,
                     seed: int = 0, neighborhood: Neighborhood | str = Neighborhood.FOUR) -> GridMap:
    rng = make_rng(seed)
    p = np.ones((height, width), dtype=bool)
    p[0, :] = p[-1, :] = p[:, 0] = p[:, -1] = False
    yy, xx = np.mgrid[0:height, 0:width]
    for _ in range(obstacles):
        cx = rng.integers(width)
        cy = rng.integers(height)
        rx = rng.integers(1, max_radius + 1)
        ry = rng.integers(1, max_radius + 1)
        p &= ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 > 1.0
    labels, count = ndimage.label(p)
    if count > 1:
        sizes = np.bincount(labels.ravel())
        sizes[0] = 0
        p = labels == int(np.argmax(sizes))
    return grid_from_array(p, neighborhood, f"open{width}x{height}-{seed}")


def open_grid(width: int, height: int,
              neighborhood: Neighborhood | str = Neighborhood.FOUR) -> GridMap:
    return grid_from_array(np.ones((height, width), dtype=bool), neighborhood,
                           f"empty{width}x{height}")
