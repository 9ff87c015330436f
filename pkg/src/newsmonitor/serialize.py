"""Deterministic on-disk containers for arrays and metadata.

Models are saved as ordinary zip files whose members are .npy arrays plus
a meta.json entry. Member timestamps are pinned to the zip epoch and
members are written in sorted-name order, so saving the same content twice
produces byte-identical files. Files stay readable with numpy alone:
``np.load`` accepts a file handle opened from the archive.
"""

from __future__ import annotations

import io
import json
import zipfile

import numpy as np

_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


class SerializeError(ValueError):
    pass


def _npy_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.lib.format.write_array(buf, np.ascontiguousarray(arr), allow_pickle=False)
    return buf.getvalue()


def save_arrays(path, arrays: dict, meta: dict | None = None) -> None:
    """Write named arrays (and a JSON-safe meta dict) to a zip at ``path``."""
    names = sorted(arrays)
    if any("/" in n or n == "meta" for n in names):
        raise SerializeError("array names must not contain '/' or be 'meta'")
    meta_payload = json.dumps(meta or {}, ensure_ascii=False, sort_keys=True,
                              indent=2).encode("utf-8")
    with open(path, "wb") as fh:
        with zipfile.ZipFile(fh, "w", zipfile.ZIP_DEFLATED) as zf:
            info = zipfile.ZipInfo("meta.json", date_time=_ZIP_EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, meta_payload)
            for name in names:
                data = _npy_bytes(np.asarray(arrays[name]))
                info = zipfile.ZipInfo(name + ".npy", date_time=_ZIP_EPOCH)
                info.compress_type = zipfile.ZIP_DEFLATED
                zf.writestr(info, data)


def load_arrays(path):
    """Read back a container written by save_arrays -> (arrays, meta)."""
    arrays = {}
    try:
        with zipfile.ZipFile(path, "r") as zf:
            names = zf.namelist()
            if "meta.json" not in names:
                raise SerializeError(f"{path}: missing meta.json entry")
            meta = json.loads(zf.read("meta.json").decode("utf-8"))
            for name in names:
                if not name.endswith(".npy"):
                    continue
                with zf.open(name) as member:
                    arrays[name[:-4]] = np.load(member, allow_pickle=False)
    except zipfile.BadZipFile as exc:
        raise SerializeError(f"{path}: not a model container ({exc})") from None
    return arrays, meta
