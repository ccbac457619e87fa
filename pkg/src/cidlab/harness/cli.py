"""Command-line interface.

Subcommands:
  simulate  run one configured experiment, write samples and a summary
  verify    run acceptance suites, write reports.json and summary.csv
  oracle    exact finite-depth certificates for a process spec
  report    render SVG plots from a verify/simulate output directory

Exit status is 0 iff every executed check passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from cidlab.errors import CidlabError
from cidlab.harness.config import (
    CONFIG_VERSION,
    ExperimentConfig,
    dump_json,
    summarize,
)
from cidlab.harness.experiments import run_replicas
from cidlab.harness.suites import SUITE_ORDER, run_suites
from cidlab.oracle import (
    check_cid_eq5_law,
    check_cid_gamma,
    check_exchangeable,
    check_permuted_cid,
    enumerate_polya_joint,
)
from cidlab.processes import (
    CompensatedGaussianSpec,
    PolyaUrnSpec,
    spec_from_json,
)


def _write_samples_csv(path: Path, values: np.ndarray) -> None:
    with path.open("w") as fp:
        fp.write("value\n")
        for v in values:
            fp.write(repr(float(v)) + "\n")


def cmd_simulate(args) -> int:
    cfg_data = json.loads(Path(args.config).read_text())
    config = ExperimentConfig.from_json(cfg_data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    values = run_replicas(config)
    with (out / "config.json").open("w") as fp:
        dump_json(config.to_json(), fp)
    _write_samples_csv(out / "stats.csv", values)
    with (out / "summary.json").open("w") as fp:
        dump_json(
            {"version": CONFIG_VERSION, "name": config.name, "summary": summarize(values)},
            fp,
        )
    print(f"simulate: {config.name}: {values.size} replicas -> {out}")
    return 0


def cmd_verify(args) -> int:
    names = SUITE_ORDER if args.suite == "all" else (args.suite,)
    results = run_suites(names, args.seed)
    out = Path(args.out)
    samples_dir = out / "samples"
    samples_dir.mkdir(parents=True, exist_ok=True)

    all_pass = True
    summary_rows = []
    for suite, reports in results.items():
        for report in reports:
            for check in report.checks:
                ok = check.passed or not check.gating
                all_pass = all_pass and ok
                flag = "PASS" if check.passed else ("warn" if not check.gating else "FAIL")
                print(
                    f"[{flag}] {suite}: {report.experiment}: {check.check_id} "
                    f"value={check.value:.6g} {check.comparison} threshold={check.threshold:.6g}"
                )
                summary_rows.append(
                    (
                        suite,
                        report.experiment,
                        check.check_id,
                        repr(float(check.value)),
                        repr(float(check.threshold)),
                        check.comparison,
                        str(check.passed),
                        str(check.gating),
                    )
                )
            if report.inconclusive:
                print(f"[warn] {suite}: {report.experiment}: inconclusive (excluded={report.excluded})")
            if report.samples is not None and report.samples.size:
                _write_samples_csv(samples_dir / f"{report.experiment}.csv", report.samples)

    with (out / "reports.json").open("w") as fp:
        dump_json(
            {
                "version": CONFIG_VERSION,
                "seed": args.seed,
                "suites": {
                    suite: [r.to_dict() for r in reports]
                    for suite, reports in results.items()
                },
            },
            fp,
        )
    with (out / "summary.csv").open("w") as fp:
        fp.write("suite,experiment,check_id,value,threshold,comparison,passed,gating\n")
        for row in summary_rows:
            fp.write(",".join(row) + "\n")

    print(f"verify: {'all checks passed' if all_pass else 'FAILURES present'} -> {out}")
    return 0 if all_pass else 1


def cmd_oracle(args) -> int:
    spec = spec_from_json(json.loads(Path(args.spec).read_text()))
    certs = []
    if isinstance(spec, PolyaUrnSpec):
        joint = enumerate_polya_joint(spec, args.depth)
        certs.append(check_cid_eq5_law(joint))
        certs.append(check_exchangeable(joint))
        if args.tau:
            tau = tuple(int(v) for v in args.tau.split(","))
            certs.append(check_permuted_cid(spec, tau, args.depth))
    elif isinstance(spec, CompensatedGaussianSpec):
        certs.append(check_cid_gamma(spec, args.depth))
    else:
        print("oracle: exact checks cover urn and Gaussian specs only", file=sys.stderr)
        return 2
    payload = {"depth": args.depth, "certificates": [c.to_json() for c in certs]}
    print(json.dumps(payload, sort_keys=True, indent=2))
    return 0 if all(c.passed for c in certs) else 1


def cmd_report(args) -> int:
    from cidlab.harness.report import render_report_dir

    written = render_report_dir(Path(args.indir), svg=args.svg)
    for p in written:
        print(f"report: wrote {p}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cidlab",
        description="simulation and verification harness for dependent-sequence limit laws",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configured experiment")
    p_sim.add_argument("--config", required=True, help="experiment config JSON")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(fn=cmd_simulate)

    p_ver = sub.add_parser("verify", help="run acceptance suites")
    p_ver.add_argument(
        "--suite", default="all", choices=SUITE_ORDER + ("all",), help="suite name or all"
    )
    p_ver.add_argument("--seed", type=int, default=42, help="base seed (unsigned 64-bit)")
    p_ver.add_argument("--out", required=True, help="output directory")
    p_ver.set_defaults(fn=cmd_verify)

    p_orc = sub.add_parser("oracle", help="exact finite-depth certificates")
    p_orc.add_argument("--spec", required=True, help="process spec JSON")
    p_orc.add_argument("--depth", type=int, default=6, help="enumeration depth")
    p_orc.add_argument("--tau", default=None, help="comma-separated permutation images")
    p_orc.set_defaults(fn=cmd_oracle)

    p_rep = sub.add_parser("report", help="render plots from an output directory")
    p_rep.add_argument("--in", dest="indir", required=True, help="verify/simulate output dir")
    p_rep.add_argument("--svg", action="store_true", help="emit SVG files")
    p_rep.set_defaults(fn=cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CidlabError as exc:
        print(f"cidlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
