"""End-to-end checks of the clarklab command line tool."""

import argparse
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(tool, args, threads=1, cwd=None):
    env = dict(os.environ, CLARKLAB_THREADS=str(threads))
    return subprocess.run([tool, *args], capture_output=True, text=True, env=env, cwd=cwd)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tool", required=True)
    ap.add_argument("--schemas", required=True, type=Path)
    ap.add_argument("--data", required=True, type=Path)
    opts = ap.parse_args()
    schemas = {p.name.split(".")[0]: json.loads(p.read_text()) for p in opts.schemas.glob("*.schema.json")}
    data = opts.data
    tmp = Path(tempfile.mkdtemp(prefix="clarklab_cli_"))

    for spec in ["z2.json", "b2.json", "half.json", "bp2x2.json"]:
        errors = list(jsonschema.Draft202012Validator(schemas["theta"]).iter_errors(json.loads((data / spec).read_text())))
        check(not errors, f"{spec} is a valid function spec")

    cases = {
        "moments": ["moments", "--theta", data / "z2.json", "--A", data / "one.json", "--k", "4"],
        "moments_both": ["moments", "--theta", data / "bp2x2.json", "--A", data / "contraction2.json", "--k", "6",
                         "--method", "both"],
        "moments_density": ["moments", "--theta", data / "half.json", "--A", data / "one.json", "--k", "3",
                            "--density-grid", "64", "--density-csv", tmp / "density.csv"],
        "disintegrate": ["disintegrate", "--theta", data / "bp2x2.json", "--f", "1,0,1", "--samples", "400", "--seed", "7"],
        "spectrum": ["spectrum", "--theta", data / "z2.json", "--unitary", data / "minus1.json", "--plot", tmp / "atoms.txt"],
        "spectrum_b2": ["spectrum", "--theta", data / "b2.json", "--out", tmp / "sys.json"],
        "charfun": ["charfun", "--theta", data / "bp2x2.json", "--k", "6", "--contraction", data / "contraction2.json",
                    "--z", "0.2:0.1"],
        "cad": ["cad", "--theta", data / "z2.json", "--zeta", "1"],
        "cad_dense": ["cad", "--theta", data / "singular.json", "--dense"],
        "extreme": ["extreme", "--theta", data / "half.json"],
    }
    schema_of = {"moments_both": "moments", "moments_density": "moments", "spectrum_b2": "spectrum", "cad_dense": "cad"}
    outputs = {}
    for name, args in cases.items():
        args = [str(a) for a in args]
        r = run(opts.tool, args)
        check(r.returncode == 0, f"{name} exits 0 (stderr: {r.stderr.strip()})")
        text = (tmp / "sys.json").read_text() if "--out" in args else r.stdout
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            check(False, f"{name} emits JSON")
            continue
        errors = list(jsonschema.Draft202012Validator(schemas[schema_of.get(name, name)]).iter_errors(doc))
        check(not errors, f"{name} output validates" + (f": {errors[0].message}" if errors else ""))
        outputs[name] = doc
        again = run(opts.tool, args, threads=4)
        again_text = (tmp / "sys.json").read_text() if "--out" in args else again.stdout
        check(again_text == text, f"{name} output is byte-identical with 1 and 4 threads")

    l = [m[0][0] for m in outputs["moments"]["l"]]
    check(all(abs(complex(*v) - e) < 1e-12 for v, e in zip(l[1:], [0, 1, 0, 1])), "z^2 moments l_1..l_4 = 0, 1, 0, 1")
    atoms = sorted([(complex(*c["lambda"]), c["weight"][0][0][0]) for c in outputs["spectrum"]["clusters"]], key=lambda a: a[0].imag)
    check(len(atoms) == 2 and abs(atoms[0][0] + 1j) < 1e-10 and abs(atoms[1][0] - 1j) < 1e-10,
          "z^2 with U = -1 has atoms at -i and i")
    check(all(abs(w - 0.5) < 1e-10 for _, w in atoms), "z^2 with U = -1 has weights 1/2")
    plot = (tmp / "atoms.txt").read_text().split()
    check(len(plot) == 4, "atom plot has two angle/weight rows")
    check((tmp / "density.csv").read_text().startswith("entry,"), "density CSV written")
    check(outputs["cad"]["status"] == "exists", "z^2 has an angular derivative at 1")
    check(outputs["cad_dense"]["densely_defined"] == "true", "singular inner function is densely defined")
    check(outputs["extreme"]["classification"] == "non_extreme", "(1+z)/2 is not extreme")

    (tmp / "samples.csv").write_text("re,im\n1,0\n0.5,0.5\n")
    (tmp / "points.csv").write_text("0.1,0.2\n0,0\n")
    rec = ["reconstruct", "--system", str(tmp / "sys.json"), "--samples", str(tmp / "samples.csv"),
           "--points", str(tmp / "points.csv")]
    r = run(opts.tool, rec)
    rows = r.stdout.strip().splitlines()
    check(r.returncode == 0 and len(rows) == 3 and rows[0].startswith("z_re"), "reconstruct writes a CSV")
    check(run(opts.tool, rec, threads=4).stdout == r.stdout, "reconstruct is byte-identical with 1 and 4 threads")

    r = run(opts.tool, ["frame-export", "--theta", str(data / "b2.json"), "--k", "6", "--out", str(tmp / "frame")])
    sidecar = json.loads((tmp / "frame.json").read_text())
    check(r.returncode == 0 and not list(jsonschema.Draft202012Validator(schemas["frame"]).iter_errors(sidecar)),
          "frame-export sidecar validates")
    size = sidecar["size"]
    check((tmp / "frame.gram.bin").stat().st_size == 16 * size * size, "gram binary has size^2 complex entries")

    r = run(opts.tool, ["moments", "--theta", str(data / "malformed.json"), "--A", str(data / "one.json")])
    check(r.returncode == 2, "malformed JSON exits 2")
    r = run(opts.tool, ["spectrum", "--theta", str(data / "badfield.json")])
    check(r.returncode == 2 and "/bp/0/w/1" in r.stderr, "bad field exits 2 with its JSON pointer")
    r = run(opts.tool, ["spectrum", "--theta", str(data / "half.json")])
    check(r.returncode == 2, "spectrum of a non-inner function exits 2")
    r = run(opts.tool, ["moments", "--theta", str(data / "z2.json"), "--A", str(data / "two.json")])
    check(r.returncode == 2, "non-contraction exits 2")
    check(run(opts.tool, ["frobnicate"]).returncode == 2, "unknown subcommand exits 2")
    check(run(opts.tool, ["--help"]).returncode == 0, "--help exits 0")
    r = run(opts.tool, ["selftest", "--only", "3"])
    check(r.returncode == 0 and r.stdout.startswith("PASS  3"), "selftest --only 3 passes")

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
