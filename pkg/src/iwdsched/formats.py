"""Reading and writing workflows and cloud profiles.

Two versioned JSON documents are understood:

``iwdsched.workflow`` v1::

    {"format": "iwdsched.workflow", "version": 1, "name": "diamond",
     "tasks": [{"id": "A", "size_mi": 10000}, ...],
     "edges": [{"parent": "A", "child": "B", "volume_mb": 50}, ...],
     "deadline_s": 900}            # optional

``iwdsched.profile`` v1 -- see :func:`profile_to_dict`.

Pegasus DAX files can be imported (a subset: jobs, file uses, dependencies).
"""
from __future__ import annotations

import json
import os
import xml.etree.ElementTree as ET
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Union

from .resources import ECU_TO_MIPS, CloudProfile, VmType
from .workflow import DataEdge, Task, Workflow, validate

WORKFLOW_FORMAT = "iwdsched.workflow"
PROFILE_FORMAT = "iwdsched.profile"
BUNDLED = ("montage-small", "cybershake-small", "ligo-small", "sipht-small")

PathLike = Union[str, os.PathLike]


class FormatError(ValueError):
    """Base class for file problems other than a missing file."""


class ParseError(FormatError):
    def __init__(self, path, line, column, msg):
        self.path, self.line, self.column = str(path), line, column
        super().__init__(f"{path}:{line}:{column}: {msg}")


class VersionError(FormatError):
    pass


class SchemaError(FormatError):
    def __init__(self, path, where, msg):
        self.path, self.where = str(path), where
        super().__init__(f"{path}: {where}: {msg}")


class WorkflowValidationError(FormatError):
    def __init__(self, path, violations):
        self.path = str(path)
        self.violations = list(violations)
        super().__init__(f"{path}: invalid workflow: " + "; ".join(map(str, self.violations)))


class UnsupportedDaxError(FormatError):
    pass


def _read_json(path: PathLike):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.colno, exc.msg) from None


def _check_header(doc, path, fmt):
    if not isinstance(doc, dict):
        raise SchemaError(path, "$", "top level must be an object")
    if doc.get("format") != fmt:
        raise VersionError(f"{path}: expected format {fmt!r}, got {doc.get('format')!r}")
    if doc.get("version") != 1:
        raise VersionError(f"{path}: unsupported {fmt} version {doc.get('version')!r}")


def _field(obj, key, where, path, kind=(int, float), required=True, default=None):
    if key not in obj:
        if required:
            raise SchemaError(path, f"{where}.{key}", "missing")
        return default
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or isinstance(val, bool)):
        raise SchemaError(path, f"{where}.{key}", f"expected {_kind_name(kind)}, got {type(val).__name__}")
    return val


def _kind_name(kind):
    if kind == (int, float):
        return "number"
    return kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)


def workflow_from_dict(doc, path: PathLike = "<memory>") -> Workflow:
    _check_header(doc, path, WORKFLOW_FORMAT)
    tasks = []
    for i, t in enumerate(_field(doc, "tasks", "$", path, list)):
        where = f"tasks[{i}]"
        if not isinstance(t, dict):
            raise SchemaError(path, where, "expected an object")
        tasks.append(Task(_field(t, "id", where, path, str), float(_field(t, "size_mi", where, path))))
    edges = []
    for i, e in enumerate(_field(doc, "edges", "$", path, list, required=False, default=[])):
        where = f"edges[{i}]"
        if not isinstance(e, dict):
            raise SchemaError(path, where, "expected an object")
        edges.append(DataEdge(_field(e, "parent", where, path, str), _field(e, "child", where, path, str),
                              float(_field(e, "volume_mb", where, path, required=False, default=0.0))))
    deadline = _field(doc, "deadline_s", "$", path, required=False)
    name = _field(doc, "name", "$", path, str, required=False, default=Path(str(path)).stem)
    wf = Workflow(tuple(tasks), tuple(edges), None if deadline is None else float(deadline), name)
    problems = validate(wf)
    if problems:
        raise WorkflowValidationError(path, problems)
    return wf


def workflow_to_dict(wf: Workflow) -> dict:
    doc = {
        "format": WORKFLOW_FORMAT,
        "version": 1,
        "name": wf.name,
        "tasks": [{"id": t.id, "size_mi": t.size} for t in wf.tasks],
        "edges": [{"parent": e.parent, "child": e.child, "volume_mb": e.volume} for e in wf.edges],
    }
    if wf.deadline is not None:
        doc["deadline_s"] = wf.deadline
    return doc


def load_workflow(path: PathLike) -> Workflow:
    """Load a workflow file. Raises FileNotFoundError, ParseError, VersionError,
    SchemaError or WorkflowValidationError."""
    return workflow_from_dict(_read_json(path), path)


def save_workflow(wf: Workflow, path: PathLike):
    Path(path).write_text(json.dumps(workflow_to_dict(wf), indent=2) + "\n")


def profile_to_dict(profile: CloudProfile, ecu_to_mips: float = ECU_TO_MIPS) -> dict:
    return {
        "format": PROFILE_FORMAT,
        "version": 1,
        "catalog": [
            {"name": v.name, "ecu": v.speed / ecu_to_mips, "cores": v.cores,
             "memory_gb": v.memory, "cost_per_period": v.cost_per_period}
            for v in profile.catalog
        ],
        "bandwidth_mbps": profile.bandwidth,
        "billing_period_s": profile.billing_period,
        "boot_time_s": profile.boot_time,
        "degradation": {"mean": profile.degradation_mean, "stddev": profile.degradation_stddev,
                        "cap": profile.degradation_cap},
        "ecu_to_mips": ecu_to_mips,
    }


def profile_from_dict(doc, path: PathLike = "<memory>") -> CloudProfile:
    """Missing keys fall back to the built-in EC2 defaults."""
    _check_header(doc, path, PROFILE_FORMAT)
    base = CloudProfile()
    ecu_to_mips = float(_field(doc, "ecu_to_mips", "$", path, required=False, default=ECU_TO_MIPS))
    catalog = base.catalog
    if "catalog" in doc:
        catalog = []
        for i, row in enumerate(_field(doc, "catalog", "$", path, list)):
            where = f"catalog[{i}]"
            if not isinstance(row, dict):
                raise SchemaError(path, where, "expected an object")
            try:
                catalog.append(VmType(
                    _field(row, "name", where, path, str),
                    float(_field(row, "ecu", where, path)) * ecu_to_mips,
                    float(_field(row, "cost_per_period", where, path)),
                    int(_field(row, "cores", where, path, required=False, default=1)),
                    float(_field(row, "memory_gb", where, path, required=False, default=0.0)),
                ))
            except SchemaError:
                raise
            except ValueError as exc:
                raise SchemaError(path, where, str(exc)) from None
    deg = _field(doc, "degradation", "$", path, dict, required=False, default={})
    try:
        return CloudProfile(
            catalog=tuple(catalog),
            bandwidth=float(_field(doc, "bandwidth_mbps", "$", path, required=False, default=base.bandwidth)),
            billing_period=float(_field(doc, "billing_period_s", "$", path, required=False, default=base.billing_period)),
            boot_time=float(_field(doc, "boot_time_s", "$", path, required=False, default=base.boot_time)),
            degradation_mean=float(_field(deg, "mean", "degradation", path, required=False, default=base.degradation_mean)),
            degradation_stddev=float(_field(deg, "stddev", "degradation", path, required=False, default=base.degradation_stddev)),
            degradation_cap=float(_field(deg, "cap", "degradation", path, required=False, default=base.degradation_cap)),
        )
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(path, "$", str(exc)) from None


def load_profile(path: PathLike) -> CloudProfile:
    return profile_from_dict(_read_json(path), path)


def save_profile(profile: CloudProfile, path: PathLike):
    Path(path).write_text(json.dumps(profile_to_dict(profile), indent=2) + "\n")


_DAX_ALLOWED = {"adag", "job", "uses", "argument", "child", "parent"}


def _local(tag):
    return tag.rsplit("}", 1)[-1]


def import_dax(path: PathLike, reference_mips: float = ECU_TO_MIPS, name=None) -> Workflow:
    """Read a Pegasus DAX document (jobs, file uses, parent/child dependencies).

    Job ``runtime`` seconds times ``reference_mips`` gives the task size.
    The volume on edge p->c is the total size of files p writes and c reads,
    converted from bytes to MB.
    """
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError(path, line, col, str(exc)) from None
    if _local(root.tag) != "adag":
        raise UnsupportedDaxError(f"{path}: root element must be <adag>, got <{_local(root.tag)}>")
    for el in root.iter():
        tag = _local(el.tag)
        if tag not in _DAX_ALLOWED:
            raise UnsupportedDaxError(f"{path}: unsupported DAX element <{tag}>")

    tasks, outputs, inputs = [], {}, {}
    for job in root:
        if _local(job.tag) != "job":
            continue
        jid = job.get("id")
        if jid is None:
            raise SchemaError(path, "job", "missing id attribute")
        if job.get("runtime") is None:
            raise SchemaError(path, f"job[{jid}]", "missing runtime attribute")
        tasks.append(Task(jid, float(job.get("runtime")) * reference_mips))
        outputs[jid], inputs[jid] = {}, {}
        for use in job:
            if _local(use.tag) != "uses":
                continue
            fname = use.get("file") or use.get("name")
            link = use.get("link")
            size = float(use.get("size", 0)) / 1e6
            if link == "output":
                outputs[jid][fname] = size
            elif link == "input":
                inputs[jid][fname] = size
            else:
                raise UnsupportedDaxError(f"{path}: job {jid}: file {fname!r} has unsupported link {link!r}")

    edges = []
    for child in root:
        if _local(child.tag) != "child":
            continue
        cid = child.get("ref")
        for par in child:
            pid = par.get("ref")
            shared = set(outputs.get(pid, {})) & set(inputs.get(cid, {}))
            vol = sum(outputs[pid][f] for f in sorted(shared))
            edges.append(DataEdge(pid, cid, vol))

    wf = Workflow(tuple(tasks), tuple(edges), None, name or root.get("name") or Path(str(path)).stem)
    problems = validate(wf)
    if problems:
        raise WorkflowValidationError(path, problems)
    return wf


def bundled_path(name: str) -> Path:
    """Filesystem path of a bundled workflow (``diamond`` or one of :data:`BUNDLED`)."""
    ref = importlib_resources.files("iwdsched") / "data" / f"{name}.v1.json"
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled workflow named {name!r}")
    return Path(str(ref))


def bundled_instances() -> list:
    return [load_workflow(bundled_path(n)) for n in BUNDLED]


def resolve_workflow(spec: str) -> Workflow:
    """Load ``spec`` as a path, a ``.dax``/``.xml`` file, or the name of a bundled instance."""
    p = Path(spec)
    if p.exists():
        if p.suffix.lower() in (".dax", ".xml"):
            return import_dax(p)
        return load_workflow(p)
    try:
        return load_workflow(bundled_path(spec))
    except FileNotFoundError:
        raise FileNotFoundError(f"workflow file not found: {spec}") from None
