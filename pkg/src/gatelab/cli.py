"""Thin command-line client for the workbench service.

Every command builds a request, sends it to the service (an in-process
instance by default, or ``--server URL`` for a remote one), renders the
response, and maps outcomes to exit codes:

    0  success
    1  usage error (bad flags, unknown recipe, malformed config)
    2  physics-validity failure (regime check failed, excessive leakage,
       integrator norm drift)
    3  inconclusive (orbit search hit its cap)
"""

from __future__ import annotations

import pathlib
import sys

import click

from .config import ConfigError, parse_preset_config, parse_sweep_config
from .serialize import dumps_report, format_cell, tsv_text

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PHYSICS = 2
EXIT_INCONCLUSIVE = 3


class UsageFailure(Exception):
    pass


class PhysicsFailure(Exception):
    pass


class Client:
    """HTTP client; without --server it drives the app in-process."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            from starlette.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def request(self, method: str, path: str, payload: dict | None = None) -> dict:
        resp = self._client.request(method, path, json=payload)
        if resp.status_code == 200:
            return resp.json()
        try:
            detail = resp.json().get("detail")
        except Exception:
            detail = resp.text
        if isinstance(detail, dict) and detail.get("code") == "physics":
            raise PhysicsFailure(detail.get("message", "physics failure"))
        raise UsageFailure(_describe_detail(detail, resp.status_code))


def _describe_detail(detail, status: int) -> str:
    if isinstance(detail, dict):
        return detail.get("message", str(detail))
    if isinstance(detail, list):  # request-model validation report
        return "; ".join(
            f"{'.'.join(str(p) for p in item.get('loc', []))}: {item.get('msg')}"
            for item in detail
        )
    return f"{detail} (HTTP {status})"


def _preset_payload(preset: str, config: str | None) -> dict:
    if preset == "custom":
        if config is None:
            raise UsageFailure("--preset custom needs --config FILE")
        text = pathlib.Path(config).read_text()
        p = parse_preset_config(text)
        fields = ("omega", "delta1", "delta2", "g", "g_physical",
                  "pair_rate_physical", "t_cavity", "t_relax", "t_motional",
                  "nominal_population")
        return {"preset": "custom",
                "custom": {k: getattr(p, k) for k in fields}}
    return {"preset": preset}


def _emit(report: dict, out_dir: str | None, fmt: str, text_summary: str,
          extra_files: dict[str, str] | None = None):
    if fmt == "json":
        click.echo(dumps_report(report), nl=False)
    else:
        click.echo(text_summary)
    if out_dir:
        out = pathlib.Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        kind = report.get("kind", "report")
        path = out / f"{kind}.json"
        path.write_text(dumps_report(report))
        written = [path]
        for name, content in (extra_files or {}).items():
            p = out / name
            p.write_text(content)
            written.append(p)
        for p in written:
            click.echo(f"wrote {p}", err=True)


def _parse_range(raw: str) -> list[float]:
    raw = raw.strip()
    if ":" in raw:
        try:
            start, stop, count = raw.split(":")
            start, stop, count = float(start), float(stop), int(count)
        except ValueError:
            raise UsageFailure(f"--range {raw!r} is not start:stop:count") from None
        if count < 1:
            raise UsageFailure("--range count must be >= 1")
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + k * step for k in range(count)]
    try:
        return [float(tok) for tok in raw.replace(",", " ").split()]
    except ValueError:
        raise UsageFailure(f"--range {raw!r} is not a list of numbers") from None


def _timeseries_tsv(report: dict) -> str:
    states = report["states"]
    header = ["t", "t_seconds"]
    header += [f"phase_{s}" for s in states]
    header += [f"leak_{s}" for s in states]
    header += ["excited_population", "photon_population", "conditional_phase"]
    rows = []
    for row in report["timeseries"]:
        cells = [row["t"], row["t_seconds"] if row["t_seconds"] is not None else "nan"]
        cells += row["phases"] + row["leakages"]
        cells += [row["excited_population"], row["photon_population"],
                  row["conditional_phase"] if row["conditional_phase"] is not None
                  else "nan"]
        rows.append(cells)
    return tsv_text(header, rows)


server_option = click.option("--server", default=None, metavar="URL",
                             help="Remote service URL (default: in-process).")
out_dir_option = click.option("--out-dir", default=None, metavar="DIR",
                              help="Directory for report files.")
format_option = click.option("--format", "fmt", default="text",
                             type=click.Choice(["text", "json"]),
                             help="Stdout rendering.")
preset_option = click.option("--preset", default="squid",
                             type=click.Choice(["squid", "ion", "custom"]))
config_option = click.option("--config", default=None, metavar="FILE",
                             help="Key-value parameter file for --preset custom.")


@click.group()
def cli():
    """Dispersive-gate and graph-state workbench client."""


@cli.command()
@preset_option
@config_option
@click.option("--min-ratio", default=10.0, show_default=True,
              help="Smallest acceptable hierarchy ratio.")
@server_option
@out_dir_option
@format_option
def regime(preset, config, min_ratio, server, out_dir, fmt):
    """Check the dispersive-regime validity ratios."""
    payload = _preset_payload(preset, config)
    payload["min_ratio"] = min_ratio
    report = Client(server).request("POST", "/regime", payload)
    lines = [f"regime check, preset={report['preset']}, "
             f"threshold={format_cell(report['threshold'])}"]
    for entry in report["ratios"]:
        mark = "ok  " if entry["passes"] else "FAIL"
        lines.append(f"  [{mark}] {entry['name']:<24} {format_cell(entry['value'])}")
    lines.append(f"overall: {'pass' if report['passed'] else 'FAIL'}")
    _emit(report, out_dir, fmt, "\n".join(lines))
    return EXIT_OK if report["passed"] else EXIT_PHYSICS


@cli.command()
@preset_option
@config_option
@click.option("--model", default="full",
              type=click.Choice(["full", "eff_cavity", "eff_diag"]))
@click.option("--n-atoms", default=2, show_default=True)
@click.option("--n-max", default=4, show_default=True,
              help="Mode truncation (max excitation number).")
@click.option("--t", default=None, type=float,
              help="Evolution time in 1/g (default: the gate time).")
@click.option("--samples", default=16, show_default=True,
              help="Time-series sample count.")
@server_option
@out_dir_option
@format_option
def cz(preset, config, model, n_atoms, n_max, t, samples, server, out_dir, fmt):
    """Run the conditional-phase gate and score it against controlled-Z."""
    payload = _preset_payload(preset, config)
    payload.update({"model": model, "n_atoms": n_atoms, "n_max": n_max,
                    "t": t, "n_samples": samples})
    report = Client(server).request("POST", "/cz", payload)
    lines = [f"controlled-Z run, preset={report['preset']}, "
             f"model={report['model']}"]
    if report["model"] is None:
        lines.append(f"  gate time (angular rate): "
                     f"{format_cell(report['gate_time_seconds'])} s")
        lines.append(f"  gate time (cyclic rate):  "
                     f"{format_cell(report['gate_time_seconds_cyclic_rate'])} s")
        extra = None
    else:
        lines.append(f"  pair rate: {format_cell(report['pair_rate'])} g")
        lines.append(f"  gate time: {format_cell(report['gate_time'])} /g"
                     + (f" = {format_cell(report['gate_time_seconds'])} s"
                        if report["gate_time_seconds"] is not None else ""))
        lines.append(f"  fidelity: {format_cell(report['fidelity'])}   "
                     f"max leakage: {format_cell(report['max_leakage'])}")
        lines.append(f"  conditional phase: "
                     f"{format_cell(report['conditional_phase'])}")
        extra = {"cz_timeseries.tsv": _timeseries_tsv(report)}
    for note in report["notes"]:
        lines.append(f"  note: {note}")
    _emit(report, out_dir, fmt, "\n".join(lines), extra_files=extra)
    return EXIT_OK


@cli.command()
@preset_option
@config_option
@click.option("--n-max", default=4, show_default=True)
@click.option("--nominal-only", is_flag=True,
              help="Skip the full-model occupation measurement.")
@server_option
@out_dir_option
@format_option
def budget(preset, config, n_max, nominal_only, server, out_dir, fmt):
    """Decoherence budget: quoted and simulation-measured occupations."""
    payload = _preset_payload(preset, config)
    payload.update({"n_max": n_max, "include_measured": not nominal_only})
    report = Client(server).request("POST", "/budget", payload)
    lines = [f"decoherence budget, preset={report['preset']}"]
    for label in ("nominal", "measured"):
        numbers = report[label]
        if numbers is None:
            continue
        lines.append(f"  {label}:")
        for key in ("p_r", "p_c", "t_relax_eff_seconds",
                    "t_cavity_eff_seconds", "t_gate_seconds", "headroom"):
            if numbers[key] is not None:
                lines.append(f"    {key:<22} {format_cell(numbers[key])}")
    for note in report["notes"]:
        lines.append(f"  note: {note}")
    _emit(report, out_dir, fmt, "\n".join(lines))
    return EXIT_OK


@cli.command()
@click.option("--recipe", default=None, help="Named plan from the catalog.")
@click.option("--plan", "plan_file", default=None, metavar="FILE",
              help="Fusion-plan config file.")
@click.option("--orbit-cap", default=1_000_000, show_default=True,
              help="Orbit-search budget (distinct graphs).")
@click.option("--skip-statevector", is_flag=True,
              help="Skip the statevector cross-checks.")
@server_option
@out_dir_option
@format_option
def fuse(recipe, plan_file, orbit_cap, skip_statevector, server, out_dir, fmt):
    """Run a fusion plan and test equivalence against its target graph."""
    payload = {"recipe": recipe, "orbit_cap": orbit_cap}
    if plan_file is not None:
        payload["plan_text"] = pathlib.Path(plan_file).read_text()
    if skip_statevector:
        payload["statevector"] = False
    if recipe is None and plan_file is None:
        raise UsageFailure("give --recipe NAME or --plan FILE")
    report = Client(server).request("POST", "/fuse", payload)
    lines = [f"fusion plan: {report['recipe'] or 'from file'} "
             f"({report['n_qubits']} qubits)"]
    if report["description"]:
        lines.append(f"  {report['description']}")
    if report["reconstructed"]:
        lines.append("  [reconstructed plan: outcome reported, not asserted]")
    lines.append(f"  status: {report['status']} "
                 f"(explored {report['orbit_explored']} graphs)")
    if report["witness"] is not None:
        lines.append(f"  witness: {report['witness']}")
    if report["statevector_verified"] is not None:
        lines.append(f"  statevector verified: {report['statevector_verified']}")
    extra = {
        "final.dot": report["final_dot"],
        "final.adj": report["final_adjacency"],
        "target.dot": report["target_dot"],
    }
    _emit(report, out_dir, fmt, "\n".join(lines), extra_files=extra)
    return EXIT_INCONCLUSIVE if report["status"] == "cap_reached" else EXIT_OK


@cli.command()
@preset_option
@config_option
@click.option("--param", default=None,
              type=click.Choice(["delta-scale", "omega", "n-max", "t"]))
@click.option("--range", "values_raw", default=None, metavar="GRID",
              help="Grid: 'a,b,c' or start:stop:count.")
@click.option("--metric", default=None,
              type=click.Choice(["fidelity", "leakage", "phase",
                                 "phase-deviation"]))
@click.option("--grid", "grid_file", default=None, metavar="FILE",
              help="Sweep config file; flags override its keys.")
@click.option("--model", default=None,
              type=click.Choice(["full", "eff_cavity", "eff_diag"]))
@click.option("--n-atoms", default=2, show_default=True)
@click.option("--n-max", default=4, show_default=True)
@click.option("--t", default=None, type=float,
              help="Fixed evolution time for phase metrics.")
@server_option
@out_dir_option
@format_option
def sweep(preset, config, param, values_raw, metric, grid_file, model,
          n_atoms, n_max, t, server, out_dir, fmt):
    """Tabulate a gate metric over a parameter grid (TSV-friendly)."""
    values = _parse_range(values_raw) if values_raw is not None else None
    if grid_file is not None:
        loaded = parse_sweep_config(pathlib.Path(grid_file).read_text())
        param = param or loaded["param"]
        metric = metric or loaded["metric"]
        model = model or loaded["model"]
        values = values if values is not None else loaded["values"]
    missing = [flag for flag, v in (("--param", param), ("--range", values),
                                    ("--metric", metric)) if v is None]
    if missing:
        raise UsageFailure(f"missing {', '.join(missing)} (or give --grid FILE)")
    payload = _preset_payload(preset, config)
    payload.update({"param": param, "values": values,
                    "metric": metric, "model": model or "full",
                    "n_atoms": n_atoms, "n_max": n_max, "t": t})
    report = Client(server).request("POST", "/sweep", payload)
    tsv = tsv_text([param, metric],
                   [[row["value"], row["metric_value"]] for row in report["rows"]])
    _emit(report, out_dir, fmt, tsv.rstrip("\n"),
          extra_files={"sweep.tsv": tsv})
    return EXIT_OK


@cli.command()
@server_option
@format_option
def recipes(server, fmt):
    """List the named target graphs and fusion plans."""
    report = Client(server).request("GET", "/recipes")
    lines = []
    for e in report["entries"]:
        flag = " [reconstructed]" if e["reconstructed"] else ""
        lines.append(f"{e['kind']:<5} {e['name']:<12} n={e['n_qubits']:<3} "
                     f"{e['description']}{flag}")
    _emit(report, None, fmt, "\n".join(lines))
    return EXIT_OK


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the workbench service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)
    return EXIT_OK


def main(argv=None) -> int:
    """Dispatch and map failures onto the exit-code contract."""
    try:
        rv = cli.main(args=argv, standalone_mode=False)
        return int(rv) if isinstance(rv, int) else EXIT_OK
    except (UsageFailure, ConfigError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except PhysicsFailure as exc:
        click.echo(f"physics failure: {exc}", err=True)
        return EXIT_PHYSICS
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE


def run():
    sys.exit(main())
