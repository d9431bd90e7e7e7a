"""Download the full-resolution Stanford Bunny reconstruction (35947 vertices).

Usage:
    python scripts/fetch_stanford_bunny.py [dest_dir]

Fetches bunny.tar.gz from the Stanford Scanning Repository and extracts
bun_zipper.ply into dest_dir (default: data/). Tests that need the canonical
file look for it at data/bun_zipper.ply or $BUNNY_PLY.
"""
import io
import sys
import tarfile
import urllib.request

URL = "http://graphics.stanford.edu/pub/3Dscanrep/bunny.tar.gz"


def main(dest="data"):
    print(f"fetching {URL} ...")
    with urllib.request.urlopen(URL) as resp:
        buf = io.BytesIO(resp.read())
    with tarfile.open(fileobj=buf, mode="r:gz") as tar:
        member = tar.getmember("bunny/reconstruction/bun_zipper.ply")
        member.name = "bun_zipper.ply"
        tar.extract(member, path=dest)
    print(f"wrote {dest}/bun_zipper.ply")


if __name__ == "__main__":
    main(*sys.argv[1:])
