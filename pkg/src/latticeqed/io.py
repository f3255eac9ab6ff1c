"""Deterministic CSV / JSON outputs with content-hashed manifests."""

import csv
import hashlib
import io as _io
import json
import os


def format_float(x):
    return "%.12e" % float(x)


def write_csv(path, header, rows):
    """UTF-8 CSV, comma separated, %.12e floats, atomic replace."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, str) else format_float(c)
                         for c in row])
    data = buf.getvalue().encode("utf-8")
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)
    return path


def write_json(path, payload):
    data = json.dumps(payload, indent=2, sort_keys=True).encode("utf-8")
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)
    return path


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, name, config, seed, output_paths, wall_seconds):
    """JSON manifest: resolved config echo, seed, version, hashes."""
    from . import __version__
    manifest = {
        "name": name,
        "config": config,
        "seed": seed,
        "code_version": __version__,
        "wall_seconds": round(wall_seconds, 3),
        "outputs": [
            {"path": os.path.basename(p), "sha256": sha256_file(p)}
            for p in output_paths
        ],
    }
    path = os.path.join(out_dir, f"{name}.manifest.json")
    return write_json(path, manifest)
