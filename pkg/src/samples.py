"""Synthetic hosts and document pages for experiments and tests."""
import numpy as np

# ink ~= INK_FACTOR * x_height / line_pitch for the layout below
INK_FACTOR = 0.64


def textured_host(rows: int = 512, cols: int = 512, seed: int = 0, noise: float = 24.0) -> np.ndarray:
    """Smooth shading plus seeded noise; pixel (0, 0) is pinned to 255 so the peak is known."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:rows, 0:cols].astype(np.float64)
    phase = rng.uniform(0, 2 * np.pi, size=2)
    base = 128.0 + 60.0 * np.sin(xx / 17.0 + phase[0]) * np.cos(yy / 23.0 + phase[1])
    img = np.clip(np.rint(base + rng.normal(0.0, noise, size=(rows, cols))), 0, 255).astype(np.uint8)
    img[0, 0] = 255
    return img


def text_page(rows: int = 512, cols: int = 512, ink: float = 0.10, seed: int = 0) -> np.ndarray:
    """White page of greeked text: solid black word blocks laid out on lines."""
    page = np.full((rows, cols), 255, dtype=np.uint8)
    if ink <= 0:
        return page
    rng = np.random.default_rng(seed)
    x_height = max(2, rows // 64)
    gap = max(2, x_height * 3 // 4)
    margin_x = max(1, cols // 16)
    margin_y = max(1, rows // 16)
    pitch = max(x_height + 2, int(round(INK_FACTOR * x_height / ink)))

    for top in range(margin_y, rows - margin_y - x_height + 1, pitch):
        x = margin_x
        while x < cols - margin_x:
            end = min(x + int(rng.integers(2 * x_height, 6 * x_height + 1)), cols - margin_x)
            page[top:top + x_height, x:end] = 0
            x = end + gap
    return page
