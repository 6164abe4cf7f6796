"""End-to-end checks of the seglab command line tool."""

import csv
import filecmp
import json
import os
import shutil
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
SCHEMA = sys.argv[2]

failures = []


def check(cond, what):
    if not cond:
        failures.append(what)
        print("FAIL:", what)


def run(args, env=None):
    full_env = dict(os.environ)
    full_env.pop("SEGLAB_WORKERS", None)
    if env:
        full_env.update(env)
    return subprocess.run([BIN] + args, capture_output=True, text=True, env=full_env)


def write(path, text):
    with open(path, "w") as f:
        f.write(text)


def load(path):
    with open(path) as f:
        return json.load(f)


def same_tree(a, b):
    cmp = filecmp.dircmp(a, b)
    if cmp.left_only or cmp.right_only or cmp.funny_files:
        return False
    _, mismatch, errors = filecmp.cmpfiles(a, b, cmp.common_files, shallow=False)
    if mismatch or errors:
        return False
    return all(same_tree(os.path.join(a, d), os.path.join(b, d)) for d in cmp.common_dirs)


def validate(summary):
    try:
        import jsonschema
    except ImportError:
        print("jsonschema not available, schema check skipped")
        return
    with open(SCHEMA) as f:
        schema = json.load(f)
    try:
        jsonschema.validate(summary, schema)
    except jsonschema.ValidationError as e:
        check(False, "summary.json violates the schema: %s" % e.message)


tmp = tempfile.mkdtemp(prefix="seglab_cli_")
try:
    small = os.path.join(tmp, "small.ini")
    write(small, "[domain]\nn = 33\n[solver]\nbeta_schedule = 1,100,1e4\n[diagnostics]\nnu = 2\n")

    r = run(["--help"])
    check(r.returncode == 0, "--help exits 0")
    check("beta_schedule" in r.stdout and "SEGLAB_WORKERS" in r.stdout, "--help lists config keys and env")

    r = run(["sweep", "--bogus"])
    check(r.returncode == 1, "unknown flag exits 1")

    neg = os.path.join(tmp, "neg.ini")
    write(neg, "[solver]\nsweep_tol = -1\n")
    r = run(["sweep", "--config", neg, "--out", os.path.join(tmp, "neg")])
    check(r.returncode == 1, "negative sweep_tol exits 1")
    check("sweep_tol" in r.stderr, "config error names the key")

    # full pipeline, schema, determinism across worker counts
    a, b = os.path.join(tmp, "a"), os.path.join(tmp, "b")
    r = run(["sweep", "--config", small, "--out", a, "--workers", "1"])
    check(r.returncode == 0, "sweep exits 0: " + r.stderr)
    r = run(["sweep", "--config", small, "--out", b], env={"SEGLAB_WORKERS": "3"})
    check(r.returncode == 0, "sweep with SEGLAB_WORKERS exits 0")
    check(same_tree(a, b), "workers 1 and 3 give identical trees")
    summary = load(os.path.join(a, "summary.json"))
    validate(summary)
    check(len(summary["beta"]) == 3 and summary["status"] == "ok", "three stages, status ok")
    listed = set(summary["artifacts"])
    on_disk = set()
    for root, _, files in os.walk(a):
        for name in files:
            on_disk.add(os.path.relpath(os.path.join(root, name), a).replace(os.sep, "/"))
    check(listed == on_disk, "artifact list matches the directory")

    # report rebuilds the same tree
    c = os.path.join(tmp, "c")
    shutil.copytree(a, c)
    os.remove(os.path.join(c, "summary.json"))
    r = run(["report", "--config", small, "--out", c])
    check(r.returncode == 0, "report exits 0")
    check(same_tree(a, c), "report reproduces the sweep artifacts")

    # diagnostics on a checkpoint
    state = os.path.join(a, "checkpoints", "stage_02.seg")
    for kind in ["acf", "pohozaev", "holder", "overlap", "decay"]:
        d = os.path.join(tmp, "diag_" + kind)
        r = run(["diag", kind, "--config", small, "--state", state, "--out", d])
        check(r.returncode == 0, "diag %s exits 0" % kind)
        check(os.path.exists(os.path.join(d, kind + ".json")), "diag %s writes json" % kind)
    r = run(["diag", "acf", "--config", small, "--out", os.path.join(tmp, "x")])
    check(r.returncode == 1, "diag without --state exits 1")

    # solve with and without warm start
    r = run(["solve", "--config", small, "--out", os.path.join(tmp, "solve"), "--state", state])
    check(r.returncode == 0, "warm solve exits 0")
    sj = load(os.path.join(tmp, "solve", "solve.json"))
    check(sj["converged"] and sj["warm_start"], "warm solve converged")
    check(sj["sweeps"] <= 2, "warm solve from the converged stage needs at most 2 sweeps")

    # two_phase: interaction identically 0
    tp = os.path.join(tmp, "tp.ini")
    write(tp, "[domain]\nn = 33\n[boundary]\npreset = two_phase\na1 = 1\na2 = 0.5\n[solver]\nbeta_schedule = 1,10,100\n"
              "[diagnostics]\nnu = 2\n")
    r = run(["sweep", "--config", tp, "--out", os.path.join(tmp, "tp")])
    check(r.returncode == 0, "two_phase sweep exits 0")
    tps = load(os.path.join(tmp, "tp", "summary.json"))
    check(all(v == 0 for v in tps["interaction"]), "two_phase interaction identically 0")
    with open(os.path.join(tmp, "tp", "continuation.csv")) as f:
        rows = list(csv.DictReader(f))
    check(len(rows) == 3 and all(float(row["interaction"]) == 0.0 for row in rows), "continuation.csv zeros")

    # single stage
    one = os.path.join(tmp, "one.ini")
    write(one, "[domain]\nn = 33\n[solver]\nbeta_schedule = 10\n[diagnostics]\nnu = 2\n")
    r = run(["sweep", "--config", one, "--out", os.path.join(tmp, "one")])
    ones = load(os.path.join(tmp, "one", "summary.json"))
    check(r.returncode == 0 and len(ones["beta"]) == 1 and len(ones["interaction"]) == 1, "single-stage arrays")
    validate(ones)

    # starved budget: exit 2, artifacts still written
    starved = os.path.join(tmp, "starved.ini")
    write(starved, "[domain]\nn = 33\n[solver]\nbeta_schedule = 1e6\nmax_sweeps = 1\ninit = zero\n"
                   "[diagnostics]\nnu = 2\n")
    r = run(["sweep", "--config", starved, "--out", os.path.join(tmp, "starved")])
    check(r.returncode == 2, "starved run exits 2 (got %d)" % r.returncode)
    st = load(os.path.join(tmp, "starved", "summary.json"))
    check(st["exit_code"] == 2 and st["status"] == "unconverged", "summary records exit 2")
    validate(st)

    # tampered checkpoint: exit 3
    t = os.path.join(tmp, "t")
    shutil.copytree(a, t)
    ck = os.path.join(t, "checkpoints", "stage_01.seg")
    with open(ck) as f:
        lines = f.read().split("\n")
    row = lines[2 + 16].split(" ")
    row[16] = "-0.5"
    lines[2 + 16] = " ".join(row)
    write(ck, "\n".join(lines))
    r = run(["report", "--config", small, "--out", t])
    check(r.returncode == 3, "report on a tampered checkpoint exits 3")
    check("invariant" in r.stderr, "tamper error mentions the invariant")
    r = run(["diag", "overlap", "--config", small, "--state", ck, "--out", os.path.join(tmp, "td")])
    check(r.returncode == 3, "diag on a tampered checkpoint exits 3")
    r = run(["solve", "--config", small, "--state", ck, "--out", os.path.join(tmp, "ts")])
    check(r.returncode == 3, "solve from a tampered checkpoint exits 3")

    # sphere
    r = run(["sphere", "--k", "2", "--out", os.path.join(tmp, "sph")])
    check(r.returncode == 0, "sphere exits 0")
    sp = json.loads(r.stdout)
    check(abs(sp["best_value"] - 2.0) < 1e-6, "sphere k=2 gives 2")
    check(os.path.exists(os.path.join(tmp, "sph", sp["trace_csv_path"])), "sphere trace written")
    r = run(["sphere", "--k", "1"])
    check(r.returncode == 1, "sphere k=1 exits 1")

    r = run(["sweep", "--config", small, "--out", os.path.join(tmp, "w")], env={"SEGLAB_WORKERS": "0"})
    check(r.returncode == 1, "SEGLAB_WORKERS=0 exits 1")
finally:
    shutil.rmtree(tmp, ignore_errors=True)

if failures:
    print("%d failure(s)" % len(failures))
    sys.exit(1)
print("cli: all checks passed")
