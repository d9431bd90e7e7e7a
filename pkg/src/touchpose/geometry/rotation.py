"""Quaternion utilities, scalar-first (w, x, y, z), Hamilton convention.

All rotations are active: ``rotate(q, v) = R(q) v`` maps model-frame vectors
into the world frame.
"""
import numpy as np

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q):
    q = np.asarray(q, dtype=np.float64)
    return q / np.linalg.norm(q)


def quat_multiply(q1, q2):
    """Hamilton product q1 ⊗ q2."""
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quat_conjugate(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_to_matrix(q):
    """Rotation matrix of a unit quaternion."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_axis_angle(axis, angle_rad):
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * angle_rad
    return np.concatenate([[np.cos(half)], np.sin(half) * axis])


def quat_from_euler_xyz(rx, ry, rz):
    """Intrinsic x-y-z Euler angles (radians) to quaternion: R = Rx Ry Rz."""
    qx = quat_from_axis_angle([1.0, 0.0, 0.0], rx)
    qy = quat_from_axis_angle([0.0, 1.0, 0.0], ry)
    qz = quat_from_axis_angle([0.0, 0.0, 1.0], rz)
    return quat_multiply(qx, quat_multiply(qy, qz))


def geodesic_angle(q1, q2):
    """Rotation angle (radians) between two unit quaternions.

    Handles the double cover: q and -q describe the same rotation.
    """
    dot = min(abs(float(np.dot(q1, q2))), 1.0)
    return 2.0 * np.arccos(dot)


def rotation_seeds(ring_angles_deg=(25.0, 45.0), ring_counts=(6, 10)):
    """Deterministic rotation seeds for multi-start registration.

    Returns the identity followed by axis-angle rotations whose axes follow a
    Fibonacci spiral on the sphere, ``ring_counts[k]`` of them at
    ``ring_angles_deg[k]``.
    """
    seeds = [IDENTITY_QUAT.copy()]
    golden = np.pi * (3.0 - np.sqrt(5.0))
    for angle_deg, count in zip(ring_angles_deg, ring_counts):
        for k in range(count):
            z = 1.0 - 2.0 * (k + 0.5) / count
            r = np.sqrt(max(0.0, 1.0 - z * z))
            theta = golden * k
            axis = np.array([r * np.cos(theta), r * np.sin(theta), z])
            seeds.append(quat_from_axis_angle(axis, np.deg2rad(angle_deg)))
    return seeds
