"""Convert the Stanford Bunny JSON mesh (npm `bunny` package) to a binary PLY.

Usage:
    node -e "const b=require('bunny');console.log(JSON.stringify(b))" > bunny.json
    python scripts/make_bunny_ply.py bunny.json data/bunny.ply

The mesh is rescaled so its bounding-box diagonal is 0.25 m (the physical
size of the original scan) and centered on the bounding-box midpoint.
"""
import json
import struct
import sys

import numpy as np


def main(src, dst):
    with open(src) as f:
        raw = json.load(f)
    verts = np.asarray(raw["positions"], dtype=np.float64)
    faces = np.asarray(raw["cells"], dtype=np.int64)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    verts = (verts - (lo + hi) / 2.0) * (0.25 / np.linalg.norm(hi - lo))

    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        "comment Stanford Bunny (Stanford Computer Graphics Laboratory scan,\n"
        "comment decimated mesh from the npm 'bunny' package), rescaled to meters\n"
        f"element vertex {len(verts)}\n"
        "property float x\n"
        "property float y\n"
        "property float z\n"
        f"element face {len(faces)}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    )
    with open(dst, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(verts.astype("<f4").tobytes())
        for tri in faces:
            f.write(struct.pack("<B3i", 3, *tri))
    print(f"wrote {dst}: {len(verts)} vertices, {len(faces)} faces")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
