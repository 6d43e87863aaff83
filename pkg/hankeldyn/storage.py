"""
Reading and writing trajectories, snapshot pairs, tables and models.

Tables are CSV with a header row; floats are written with 17 significant
digits so that a table round-trips bit-exactly and identical inputs give
identical bytes. Models and manifests are JSON documents whose `kind`
key selects the model class on loading.
"""
import csv
import json
import os

import numpy as np

from hankeldyn.dynsys import Trajectory, TrajectoryDataset

_float_format = "%.17g"


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        os.makedirs(parent)


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _float_format % value
    return str(value)


def write_table(path, header, rows):
    '''Write rows under a header as CSV.

    Args:
        path (str): Output file.
        header (list): Column names.
        rows (list): Sequences of values; floats use 17 significant digits.
    '''
    _ensure_parent(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError("Row of length %d does not match header of "
                                 "length %d" % (len(row), len(header)))
            writer.writerow([format_value(v) for v in row])


def write_records(path, records, header=None):
    '''Write a list of dicts as CSV, columns in the order of `header` or of
    the first record.'''
    if not records and header is None:
        raise ValueError("Need records or a header")
    header = list(header or records[0].keys())
    write_table(path, header, [[r[k] for k in header] for r in records])


def read_table(path):
    '''
    Returns:
        tuple: `(header, rows)` with every row a list of strings.
    '''
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        return header, [row for row in reader]


def read_matrix(path):
    '''Read a CSV of numbers with a header row.

    Returns:
        tuple: `(header, array)`.
    '''
    header, rows = read_table(path)
    data = np.array([[float(v) for v in row] for row in rows], dtype=np.float64)
    return header, data.reshape(len(rows), len(header))


def write_matrix(path, a, header=None):
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    header = header or ["c%d" % (j + 1) for j in range(a.shape[1])]
    write_table(path, header, a.tolist())


def write_trajectory(path, traj, names=None):
    '''Write a trajectory as CSV with header `t,x1,...,xn`.'''
    d = traj.states.shape[1]
    names = names or ["x%d" % (i + 1) for i in range(d)]
    write_table(path, ["t"] + list(names),
                np.column_stack([traj.times, traj.states]).tolist())


def read_trajectory(path):
    header, data = read_matrix(path)
    if not header or header[0] != "t":
        raise ValueError("%s is not a trajectory file, the first column "
                         "must be 't'" % path)
    return Trajectory(data[:, 0], data[:, 1:])


def write_pairs(path, ds):
    '''Write snapshot pairs, one pair per row, with header
    `x1,...,xn,xp1,...,xpn`.'''
    d = ds.dimension
    header = ["x%d" % (i + 1) for i in range(d)] + ["xp%d" % (i + 1) for i in range(d)]
    write_table(path, header, np.vstack([ds.x, ds.xp]).T.tolist())


def read_pairs(path, delta_t=1.0):
    header, data = read_matrix(path)
    if len(header) % 2:
        raise ValueError("%s does not hold snapshot pairs" % path)
    d = len(header) // 2
    return TrajectoryDataset(data[:, :d].T, data[:, d:].T, delta_t)


def write_json(path, doc):
    _ensure_parent(path)
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path):
    with open(path) as f:
        return json.load(f)


def write_manifest(path, ds):
    '''Dataset manifest: generating configuration, seed and counts.'''
    doc = dict(ds.metadata)
    doc.update(n_pairs=len(ds), dimension=ds.dimension, delta_t=ds.delta_t)
    write_json(path, doc)


def _model_classes():
    from hankeldyn.dmd import DmdModel
    from hankeldyn.ffnn import FfnnParams
    from hankeldyn.havok import HavokModel
    from hankeldyn.sindy import SindyModel
    from hankeldyn.stnn import StnnParams
    return {"stnn": StnnParams, "ffnn": FfnnParams, "dmd": DmdModel,
            "sindy": SindyModel, "havok": HavokModel}


def save_model(path, model, **extra):
    '''Write a model as JSON.

    Args:
        path (str): Output file.
        model: Any model with a `to_dict` method.
        extra: Additional top-level keys, e.g. a standardizer.
    '''
    doc = model.to_dict()
    doc.update(extra)
    write_json(path, doc)


def load_model(path):
    '''Read a model written by :func:`save_model`.

    Returns:
        tuple: `(model, doc)`, the model and the full JSON document.
    '''
    doc = read_json(path)
    kind = doc.get("kind")
    classes = _model_classes()
    if kind not in classes:
        raise ValueError("Unknown model kind '%s' in %s" % (kind, path))
    return classes[kind].from_dict(doc), doc
