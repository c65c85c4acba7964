"""Flat-shaded orthographic rasterizer for the three camera views.

The endoscope view projects world (x, z); each wrist view is a zoomed (y, z)
projection centered on its own tool tip, so depth along the approach axis is
observable there. Pure numpy; bit-deterministic for a given state.
"""

from __future__ import annotations

import numpy as np

CUT_HALF_GAP_MM = 1.3
TOOL_ANCHORS = (np.array([-34.0, -4.0, 30.0]), np.array([34.0, -4.0, 30.0]))

_SILVER = (205, 210, 220)
_APPLIER = (185, 190, 205)
_APPLIER_EMPTY = (148, 152, 164)
_SCISSOR = (222, 226, 238)
_CLIP = (238, 238, 248)


class _View:
    """Orthographic world->pixel map over two world axes."""

    def __init__(self, size, window_mm, center, axes):
        self.w, self.h = size
        self.ppm = self.w / window_mm[0]
        self.center = center  # world coords of the image center on (axes)
        self.axes = axes      # pair of world-axis indices -> (u, v-up)
        self.img = np.zeros((self.h, self.w, 3), dtype=np.uint8)

    def to_px(self, p):
        u = (p[self.axes[0]] - self.center[0]) * self.ppm + self.w / 2
        v = self.h / 2 - (p[self.axes[1]] - self.center[1]) * self.ppm
        return u, v

    def capsule(self, p0, p1, r_mm, color):
        r = r_mm * self.ppm
        a, b = self.to_px(p0), self.to_px(p1)
        x0 = int(min(a[0], b[0]) - r - 1); x1 = int(max(a[0], b[0]) + r + 2)
        y0 = int(min(a[1], b[1]) - r - 1); y1 = int(max(a[1], b[1]) + r + 2)
        x0, x1 = max(0, x0), min(self.w, x1)
        y0, y1 = max(0, y0), min(self.h, y1)
        if x0 >= x1 or y0 >= y1:
            return
        ys, xs = np.mgrid[y0:y1, x0:x1]
        dx = xs - a[0]
        dy = ys - a[1]
        sx, sy = b[0] - a[0], b[1] - a[1]
        L2 = sx * sx + sy * sy
        t = np.clip((dx * sx + dy * sy) / (L2 + 1e-12), 0.0, 1.0)
        mask = (dx - t * sx) ** 2 + (dy - t * sy) ** 2 <= r * r
        self.img[y0:y1, x0:x1][mask] = color

    def ellipse(self, c, rx_mm, ry_mm, color):
        cu, cv = self.to_px(c)
        rx, ry = rx_mm * self.ppm, ry_mm * self.ppm
        x0, x1 = max(0, int(cu - rx - 1)), min(self.w, int(cu + rx + 2))
        y0, y1 = max(0, int(cv - ry - 1)), min(self.h, int(cv + ry + 2))
        if x0 >= x1 or y0 >= y1:
            return
        ys, xs = np.mgrid[y0:y1, x0:x1]
        mask = ((xs - cu) / rx) ** 2 + ((ys - cv) / ry) ** 2 <= 1.0
        self.img[y0:y1, x0:x1][mask] = color


def _tube_samples(state, name):
    """(point, arc_mm) samples along the current tube, 2 per segment."""
    tube = state.anatomy.tube(name)
    pts = state.tube_points[name]
    cum = np.concatenate([[0.0], np.cumsum(tube.rest_lengths)])
    samples = []
    for i in range(len(pts) - 1):
        for f in (0.0, 0.5):
            samples.append((pts[i] + f * (pts[i + 1] - pts[i]), cum[i] + f * tube.rest_lengths[i]))
    samples.append((pts[-1], cum[-1]))
    return samples, cum[-1]


def _draw_tube(view, state, name):
    tube = state.anatomy.tube(name)
    samples, total = _tube_samples(state, name)
    cut_arcs = [arc * total for t, arc in state.cuts if t == name]

    def in_gap(arc_mm):
        return any(abs(arc_mm - c) < CUT_HALF_GAP_MM for c in cut_arcs)

    dark = tuple(int(c * 0.55) for c in tube.color)
    for (p0, a0), (p1, a1) in zip(samples[:-1], samples[1:]):
        if in_gap(a0) or in_gap(a1):
            continue
        view.capsule(p0, p1, state.anatomy.tube_radius, tube.color)
    # darkened stubs at the severed ends
    for c in cut_arcs:
        for s in (-1.0, 1.0):
            arc_mm = c + s * CUT_HALF_GAP_MM
            if 0 < arc_mm < total:
                idx = int(np.clip(round(arc_mm / total * (len(samples) - 1)), 0, len(samples) - 1))
                view.ellipse(samples[idx][0], state.anatomy.tube_radius * 1.1,
                             state.anatomy.tube_radius * 1.1, dark)


def _draw_clips(view, state):
    for name, arc in state.placed_clips:
        tube = state.anatomy.tube(name)
        samples, total = _tube_samples(state, name)
        idx = int(np.clip(round(arc * (len(samples) - 1)), 1, len(samples) - 2))
        p = samples[idx][0]
        tangent = samples[idx + 1][0] - samples[idx - 1][0]
        tangent = tangent / (np.linalg.norm(tangent) + 1e-9)
        perp = np.cross(tangent, np.array([0.0, 1.0, 0.0]))
        n = np.linalg.norm(perp)
        perp = np.array([1.0, 0, 0]) if n < 1e-6 else perp / n
        view.capsule(p - 2.0 * perp, p + 2.0 * perp, 0.8, _CLIP)


def _jaw_geometry(pose, anchor, jaw):
    tip = pose.position
    d = tip - anchor
    d = d / (np.linalg.norm(d) + 1e-9)
    perp = np.cross(d, np.array([0.0, 1.0, 0.0]))
    n = np.linalg.norm(perp)
    perp = np.array([0.0, 0, 1.0]) if n < 1e-6 else perp / n
    half = 0.5 * jaw  # radians of half-opening
    L = 3.2
    tips = [tip + L * (np.cos(half) * d + s * np.sin(half) * perp) for s in (1.0, -1.0)]
    return tip, d, tips


def _draw_tools(view, state):
    for idx, pose in enumerate(state.arms):
        anchor = TOOL_ANCHORS[idx]
        tip, d, jaw_tips = _jaw_geometry(pose, anchor, pose.jaw)
        shaft_color = (166, 170, 182)
        view.capsule(anchor, tip - 2.0 * d, 1.0, shaft_color)
        if idx == 0:
            for jt in jaw_tips:
                view.capsule(tip, jt, 0.55, _SILVER)
        else:
            tool = state.tool_right
            if tool == "scissors":
                back = tip - 1.5 * d
                perp = jaw_tips[0] - tip
                for jt, s in zip(jaw_tips, (1.0, -1.0)):
                    view.capsule(back - 0.6 * s * (perp / (np.linalg.norm(perp) + 1e-9)), jt, 0.45, _SCISSOR)
            else:
                color = _APPLIER if tool == "clip_applier_loaded" else _APPLIER_EMPTY
                for jt in jaw_tips:
                    view.capsule(tip, jt, 0.7, color)
                if tool == "clip_applier_loaded":
                    mid = 0.5 * (jaw_tips[0] + jaw_tips[1])
                    view.capsule(tip + 0.3 * (mid - tip), mid, 0.5, _CLIP)


def _draw_scene(view, state):
    bg = state.anatomy.background_color
    view.img[:] = bg
    # coarse vertical shading: darker toward the bottom of the world
    h = view.img.shape[0]
    shade = (np.linspace(1.08, 0.82, h))[:, None, None]
    view.img[:] = np.clip(view.img.astype(np.float32) * shade, 0, 255).astype(np.uint8)
    for center, rx, ry, color in state.anatomy.blotches:
        view.ellipse(center, rx, ry, color)

    body_center = state.neck + np.array([0.0, 1.0, 6.5])
    view.capsule(state.neck, body_center, 2.0, tuple(int(c * 0.8) for c in state.anatomy.body_color))
    view.ellipse(body_center, 8.5, 5.5, state.anatomy.body_color)

    _draw_tube(view, state, "left")
    _draw_tube(view, state, "right")
    _draw_clips(view, state)
    _draw_tools(view, state)


def render_observation(state, cfg):
    from .env import Observation  # local import to avoid a cycle

    endo = _View(cfg.endoscope_size, cfg.endoscope_window_mm, (0.0, 18.0), (0, 2))
    _draw_scene(endo, state)

    wrists = []
    for arm in (0, 1):
        tip = state.arms[arm].position
        view = _View(cfg.wrist_size, cfg.wrist_window_mm, (tip[1], tip[2]), (1, 2))
        _draw_scene(view, state)
        wrists.append(view.img)

    return Observation(endo.img, wrists[0], wrists[1], state.t)
