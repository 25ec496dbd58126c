"""Command-line face of the platform.

Workflow: `new` a manifest, `add-agent` for each character, `export` the
workspace folder, then `run` it (embedded with --local, or against a
service instance named by --service / $GRIDARENA_SERVICE). `status`,
`watch`, `resubmit` and `report` cover the rest of the lifecycle;
`serve` hosts the HTTP API.
"""

from __future__ import annotations

import argparse
import datetime as dt
import os
import sys
import time
from pathlib import Path

import httpx

from gridarena import xmlio
from gridarena.characters import AgentCharacter, TdParams
from gridarena.grid.topology import GridTopology, Cluster, load_topology, save_topology
from gridarena.orchestrator import Orchestrator, OrchestratorError, report_text, report_to_xml
from gridarena.statusmap import ExperimentStatusMap, load_status
from gridarena.tournament import ExperimentManifest, generate_experiment, load_manifest, save_manifest

SERVICE_ENV = "GRIDARENA_SERVICE"

DEMO_TOPOLOGY = GridTopology(
    (Cluster("c0", 2), Cluster("c1", 2, wn_speed_factor=1.5)), central_se_bandwidth=100e6
)


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# ---- service client ---------------------------------------------------------


class ServiceClient:
    def __init__(self, base_url: str, token: str | None = None):
        headers = {"x-api-token": token} if token else {}
        self.http = httpx.Client(base_url=base_url, headers=headers, timeout=60.0)

    def _check(self, response: httpx.Response):
        if response.status_code >= 400:
            try:
                root = xmlio.parse_text(response.text)
                raise CliError(root.attrib.get("code", "error"), root.attrib.get("message", ""))
            except CliError:
                raise
            except Exception:
                raise CliError("http_error", f"{response.status_code}: {response.text[:200]}")
        return response

    def create(self, manifest_xml: bytes) -> str:
        r = self._check(self.http.post("/experiments", content=manifest_xml))
        return xmlio.parse_text(r.text).attrib["id"]

    def start(self, experiment_id: str) -> None:
        self._check(self.http.post(f"/experiments/{experiment_id}/start"))

    def pause(self, experiment_id: str) -> None:
        self._check(self.http.post(f"/experiments/{experiment_id}/pause"))

    def status_xml(self, experiment_id: str) -> str:
        return self._check(self.http.get(f"/experiments/{experiment_id}")).text

    def report_xml(self, experiment_id: str) -> str:
        return self._check(self.http.get(f"/experiments/{experiment_id}/report")).text

    def resubmit(self, job_id: str) -> str:
        r = self._check(self.http.post(f"/jobs/{job_id}/resubmit"))
        return xmlio.parse_text(r.text).attrib["new_job_id"]

    def follow_events(self, since: int = 0, experiment_id: str | None = None):
        with self.http.stream("GET", "/events", params={"since": since}) as response:
            self._check(response)
            for line in response.iter_lines():
                if not line.startswith("data: "):
                    continue
                fields = line[len("data: "):].split()
                if experiment_id is None or fields[1] == experiment_id:
                    yield fields


def make_client(args) -> ServiceClient:
    address = args.service or os.environ.get(SERVICE_ENV)
    if not address:
        raise CliError(
            "no_service",
            f"no service address: pass --service, set ${SERVICE_ENV}, or use --local",
        )
    return ServiceClient(address, token=args.token)


# ---- rendering ---------------------------------------------------------------


def status_table(status: ExperimentStatusMap) -> str:
    lines = [f"experiment {status.experiment_id}: {status.state.value}"]
    header = f"{'round':>5}  {'match':<28} {'state':<12} {'att':>3} {'cluster':<8} {'job':<24}"
    lines.append(header)
    lines.append("-" * len(header))
    for round_index in sorted(status.rounds):
        for s in status.rounds[round_index]:
            lines.append(
                f"{round_index:>5}  {s.match_id:<28} {s.state:<12} "
                f"{s.attempt:>3} {s.cluster:<8} {s.job_id:<24}"
            )
    return "\n".join(lines)


def parse_status_xml(text: str) -> ExperimentStatusMap:
    from gridarena.statusmap import status_from_xml

    return status_from_xml(xmlio.parse_text(text))


# ---- subcommands --------------------------------------------------------------


def cmd_new(args) -> int:
    manifest = ExperimentManifest(
        experiment_id=args.id,
        game_id=args.game,
        agents=(),
        games_per_match=args.games_per_match,
        max_attempts=args.max_attempts,
        seed=args.seed,
        created_at=args.created_at
        or dt.datetime.now(dt.timezone.utc).replace(microsecond=0).isoformat(),
    )
    save_manifest(args.out, manifest, validate=False)
    print(f"wrote draft manifest {args.out} (add agents, then export)")
    return 0


def cmd_add_agent(args) -> int:
    manifest = load_manifest(args.manifest, validate=False)
    character = AgentCharacter(
        agent_id=args.id,
        display_name=args.name,
        network_seed=args.seed,
        td_params=TdParams(
            alpha=args.alpha, gamma=args.gamma, trace_decay=args.trace_decay, epsilon=args.epsilon
        ),
    )
    if any(a.agent_id == args.id for a in manifest.agents):
        raise CliError("duplicate_agent", f"agent {args.id!r} already in manifest")
    save_manifest(args.manifest, manifest.with_agent(character), validate=False)
    print(f"added agent {args.id} ({len(manifest.agents) + 1} total)")
    return 0


def cmd_export(args) -> int:
    manifest = load_manifest(args.manifest)
    ws = generate_experiment(manifest, args.out)
    print(f"exported experiment {manifest.experiment_id} to {ws.root}")
    return 0


def _topology(args) -> GridTopology:
    if args.topology:
        return load_topology(args.topology)
    return DEMO_TOPOLOGY


def cmd_run(args) -> int:
    if args.local:
        orch = Orchestrator(args.target, _topology(args), backend=args.backend)
        orch.launch()
        orch.run_to_completion()
        report = orch.finalize()
        orch.shutdown()
        print(xmlio.to_text(report_to_xml(report)) if args.xml else report_text(report), end="")
        return 0 if not report.permanently_failed else 1
    client = make_client(args)
    manifest_path = Path(args.target)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.xml"
    experiment_id = client.create(manifest_path.read_bytes())
    client.start(experiment_id)
    for fields in client.follow_events(experiment_id=experiment_id):
        print(" ".join(fields))
        if fields[2] == "-" and fields[4] in ("COMPLETED", "FAILED"):
            break
    report = client.report_xml(experiment_id)
    print(report if args.xml else f"experiment {experiment_id} finished; report follows")
    if not args.xml:
        print(report)
    return 0


def _local_status(args) -> ExperimentStatusMap:
    return load_status(Path(args.target) / "status.xml")


def cmd_status(args) -> int:
    if args.local:
        status = _local_status(args)
        print(xmlio.to_text(xmlio.parse_file(Path(args.target) / "status.xml")) if args.xml
              else status_table(status), end="\n" if not args.xml else "")
        return 0
    client = make_client(args)
    text = client.status_xml(args.target)
    print(text if args.xml else status_table(parse_status_xml(text)))
    return 0


def cmd_watch(args) -> int:
    iterations = 0
    while True:
        if args.local:
            status = _local_status(args)
        else:
            status = parse_status_xml(make_client(args).status_xml(args.target))
        print("\x1b[2J\x1b[H" if sys.stdout.isatty() else "", end="")
        print(status_table(status))
        iterations += 1
        if status.state.value in ("COMPLETED", "FAILED"):
            return 0
        if args.iterations and iterations >= args.iterations:
            return 0
        time.sleep(args.interval)


def cmd_resubmit(args) -> int:
    if args.local:
        orch = Orchestrator(args.target, _topology(args), backend=args.backend)
        resubmitted = orch.resubmit_failed()
        orch.run_to_completion()
        report = orch.finalize()
        orch.shutdown()
        print(f"resubmitted {len(resubmitted)} match(es); experiment now {report.state}")
        return 0
    client = make_client(args)
    new_id = client.resubmit(args.target)
    print(f"resubmitted as {new_id}")
    return 0


def cmd_report(args) -> int:
    if args.local:
        ws_root = Path(args.target)
        orch = Orchestrator(ws_root, _topology(args), backend=args.backend)
        report = orch.finalize()
        orch.shutdown()
        print(xmlio.to_text(report_to_xml(report)) if args.xml else report_text(report), end="")
        return 0
    text = make_client(args).report_xml(args.target)
    print(text)
    return 0


def cmd_init_topology(args) -> int:
    clusters = []
    for part in args.clusters.split(","):
        cluster_id, wn_count, speed = (part.split(":") + ["1.0"])[:3]
        clusters.append(Cluster(cluster_id, int(wn_count), wn_speed_factor=float(speed)))
    save_topology(args.out, GridTopology(tuple(clusters), central_se_bandwidth=args.bandwidth))
    print(f"wrote topology {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from gridarena.service import Platform, create_app

    platform = Platform(args.data_root, _topology(args), backend=args.backend)
    ui_dir = args.ui_dir if args.ui_dir and Path(args.ui_dir).is_dir() else None
    app = create_app(platform, api_token=args.token, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridarena", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, target_help):
        p.add_argument("target", help=target_help)
        p.add_argument("--local", action="store_true", help="embedded orchestrator, no service")
        p.add_argument("--service", help=f"service address (default ${SERVICE_ENV})")
        p.add_argument("--token", help="x-api-token value")
        p.add_argument("--topology", help="topology XML (local mode)")
        p.add_argument("--backend", default="local", choices=["local", "sim"])
        p.add_argument("--xml", action="store_true", help="machine-readable XML output")

    p = sub.add_parser("new", help="create a draft experiment manifest")
    p.add_argument("--id", required=True)
    p.add_argument("--game", default="rsp")
    p.add_argument("--games-per-match", type=int, default=100)
    p.add_argument("--max-attempts", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--created-at", default=None, help="override the creation timestamp")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_new)

    p = sub.add_parser("add-agent", help="append an agent character to a manifest")
    p.add_argument("manifest")
    p.add_argument("--id", required=True)
    p.add_argument("--name", default="")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--lambda", dest="trace_decay", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.set_defaults(fn=cmd_add_agent)

    p = sub.add_parser("export", help="generate the experiment workspace folder")
    p.add_argument("manifest")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("run", help="run an experiment and print the report")
    common(p, "workspace dir (--local) or manifest path (service mode)")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("status", help="one-shot status table")
    common(p, "workspace dir (--local) or experiment id")
    p.set_defaults(fn=cmd_status)

    p = sub.add_parser("watch", help="live-refreshing status table")
    common(p, "workspace dir (--local) or experiment id")
    p.add_argument("--interval", type=float, default=2.0)
    p.add_argument("--iterations", type=int, default=0, help="stop after N refreshes (0 = run until terminal)")
    p.set_defaults(fn=cmd_watch)

    p = sub.add_parser("resubmit", help="resubmit failed work")
    common(p, "workspace dir (--local) or job id")
    p.set_defaults(fn=cmd_resubmit)

    p = sub.add_parser("report", help="print the final experiment report")
    common(p, "workspace dir (--local) or experiment id")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("init-topology", help="write a topology XML file")
    p.add_argument("--clusters", default="c0:2:1.0,c1:2:1.5", help="id:wn_count[:speed],...")
    p.add_argument("--bandwidth", type=float, default=100e6)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_init_topology)

    p = sub.add_parser("serve", help="host the HTTP service")
    p.add_argument("--data-root", required=True)
    p.add_argument("--topology")
    p.add_argument("--backend", default="local", choices=["local", "sim"])
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8990)
    p.add_argument("--token", default=None)
    p.add_argument("--ui-dir", default=None, help="serve a built dashboard from this directory")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except (OrchestratorError, OSError, ValueError, KeyError) as exc:
        print(f"error[failed]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
