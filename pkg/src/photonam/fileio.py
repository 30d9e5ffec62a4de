"""Single-file container for wavefunctions and fields.

Layout (all integers little endian):

    bytes 0..7    magic  b"PHOTONAM"
    bytes 8..15   uint64 manifest length M
    next M bytes  manifest, UTF-8 JSON with sorted keys
    next 8 bytes  uint64 payload length P
    next P bytes  float64 payload

The payload is the concatenation of the named components, each in C order
over (x, y, z) with z fastest, complex data interleaved (re, im).
Momentum-space data keeps the FFT axis ordering.  Writing is deterministic:
write -> read -> write reproduces the file byte for byte.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from . import photon_state, polarization
from .fields_bridge import RSField, RealVectorField
from .grids import make_grid, UnitsConfig, _readonly

MAGIC = b"PHOTONAM"
FORMAT_VERSION = 1


class FieldFileError(ValueError):
    pass


def _manifest_for_grid(grid):
    return {
        "dims": list(grid.dims),
        "spacing": list(grid.spacing),
        "units": {"c": grid.units.c, "hbar": grid.units.hbar, "eps0": grid.units.eps0},
        "index_order": "x-major, z fastest",
        "byte_order": "little",
        "format_version": FORMAT_VERSION,
    }


def _pack(manifest, arrays, complex_data):
    payload = bytearray()
    for a in arrays:
        a = np.ascontiguousarray(a)
        if complex_data:
            inter = np.empty(a.shape + (2,))
            inter[..., 0] = a.real
            inter[..., 1] = a.imag
            payload += inter.astype("<f8").tobytes()
        else:
            payload += a.astype("<f8").tobytes()
    blob = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<Q", len(blob))
    out += blob
    out += struct.pack("<Q", len(payload))
    out += payload
    return bytes(out)


def write_wavefunction(path, wf, provenance=None):
    manifest = _manifest_for_grid(wf.grid)
    manifest.update({
        "kind": "wavefunction",
        "components": ["gL", "gR"],
        "complex": True,
        "time": wf.time,
        "chart_axis": [float(v) for v in wf.basis.chart_axis],
        "k_ordering": "fft",
    })
    if provenance:
        manifest["provenance"] = provenance
    data = _pack(manifest, [wf.gL, wf.gR], complex_data=True)
    with open(path, "wb") as fh:
        fh.write(data)
    return manifest


def write_rs_field(path, rs, provenance=None):
    manifest = _manifest_for_grid(rs.grid)
    manifest.update({
        "kind": "rs_field",
        "components": ["Fx", "Fy", "Fz"],
        "complex": True,
        "time": rs.time,
        "chart_axis": None,
    })
    if provenance:
        manifest["provenance"] = provenance
    with open(path, "wb") as fh:
        fh.write(_pack(manifest, [rs.F[0], rs.F[1], rs.F[2]], complex_data=True))
    return manifest


def write_real_field(path, field, provenance=None):
    manifest = _manifest_for_grid(field.grid)
    role = field.role
    manifest.update({
        "kind": "real_field",
        "role": role,
        "components": [role + ax for ax in "xyz"],
        "complex": False,
        "time": field.time,
        "chart_axis": None,
    })
    if provenance:
        manifest["provenance"] = provenance
    with open(path, "wb") as fh:
        fh.write(_pack(manifest, [field.values[i] for i in range(3)], complex_data=False))
    return manifest


def _read_container(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != MAGIC:
        raise FieldFileError(f"{path}: not a photonam field file")
    (mlen,) = struct.unpack("<Q", raw[8:16])
    manifest = json.loads(raw[16:16 + mlen].decode("utf-8"))
    (plen,) = struct.unpack("<Q", raw[16 + mlen:24 + mlen])
    payload = raw[24 + mlen:24 + mlen + plen]
    if len(payload) != plen:
        raise FieldFileError(f"{path}: truncated payload")
    ncomp = len(manifest["components"])
    per = int(np.prod(manifest["dims"])) * (2 if manifest["complex"] else 1) * 8
    if plen != ncomp * per:
        raise FieldFileError(f"{path}: payload length {plen} does not match manifest")
    return manifest, payload


def _unpack_component(manifest, payload, index):
    dims = tuple(manifest["dims"])
    count = int(np.prod(dims))
    if manifest["complex"]:
        flat = np.frombuffer(payload, dtype="<f8", count=2 * count, offset=index * 16 * count)
        a = flat[0::2] + 1j * flat[1::2]
    else:
        a = np.frombuffer(payload, dtype="<f8", count=count, offset=index * 8 * count).copy()
    return a.reshape(dims)


def _grid_from_manifest(manifest):
    u = manifest["units"]
    return make_grid(
        tuple(manifest["dims"]),
        tuple(manifest["spacing"]),
        UnitsConfig(c=u["c"], hbar=u["hbar"], eps0=u["eps0"]),
    )


def read(path, grid=None, basis=None):
    """Read any field file; returns (object, manifest).

    `grid` (and, for wavefunctions, `basis`) may be supplied to reuse
    existing instances; they must match the manifest.
    """
    manifest, payload = _read_container(path)
    if grid is None:
        grid = _grid_from_manifest(manifest)
    elif list(grid.dims) != manifest["dims"] or list(grid.spacing) != manifest["spacing"]:
        raise FieldFileError("supplied grid does not match the file manifest")

    kind = manifest["kind"]
    if kind == "wavefunction":
        if basis is None:
            basis = polarization.build_basis(grid, tuple(manifest["chart_axis"]))
        gL = _unpack_component(manifest, payload, 0)
        gR = _unpack_component(manifest, payload, 1)
        wf = photon_state.wavefunction(grid, basis, gL, gR, time=manifest["time"], warn=False)
        return wf, manifest
    if kind == "rs_field":
        F = np.stack([_unpack_component(manifest, payload, i) for i in range(3)])
        return RSField(F=_readonly(F), grid=grid, time=manifest["time"]), manifest
    if kind == "real_field":
        vals = np.stack([_unpack_component(manifest, payload, i) for i in range(3)])
        return RealVectorField(values=_readonly(vals.real), role=manifest["role"],
                               grid=grid, time=manifest["time"]), manifest
    raise FieldFileError(f"unknown file kind {kind!r}")
