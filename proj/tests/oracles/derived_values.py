"""Independent numpy computations of the frozen values used by the C++ unit tests.

Run: python3 tests/oracles/derived_values.py
"""
import numpy as np


def steering(m, spacing, s):
    return np.exp(1j * 2 * np.pi * spacing * np.arange(m) * s) / np.sqrt(m)


def grid(q, fov):
    return -fov + np.arange(q) * (2 * fov / (q - 1))


def brute_force_argmax(m, q, fov, s):
    h = np.conj(steering(m, 0.5, s))
    gains = [abs(np.sum(h * steering(m, 0.5, g))) ** 2 for g in grid(q, fov)]
    return int(np.argmax(gains)), gains


print("phase of element 5, M=16, s=0.3:", 2 * np.pi * 0.5 * 5 * 0.3)
g = grid(64, 0.866)
print("64-beam grid: first", g[0], "last", g[-1], "step", g[1] - g[0])
for s in (0.25, 0.40):
    idx, _ = brute_force_argmax(16, 64, 0.866, s)
    print(f"s={s}: brute-force argmax {idx}, arithmetic {(s + 0.866) / (1.732 / 63):.4f}")
idx, gains = brute_force_argmax(16, 64, 0.866, g[31])
print("aligned with beam 31 -> argmax", idx, "gain", gains[31], "runner-up", sorted(gains)[-2])
lr, eps = 0.01, 1e-8
m, v = 0.1 * 1.0, 0.001 * 1.0
print("adam first step:", lr * (m / 0.1) / (np.sqrt(v / 0.001) + eps))
