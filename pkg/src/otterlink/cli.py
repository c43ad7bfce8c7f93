"""Operator command line: serve the network front end, generate traces, run
couple simulations, verify logs, inspect config, and switch a pair's mode.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from .config import NotifierConfig, ServiceConfig, load_config, parse_active_hours
from .model import Mode
from .seeds import derive_seed
from .service import OtterEngine
from .simulate import AgentPolicy, read_log, run_couple, write_log
from .tracegen import (
    DEFAULT_PLAN,
    DEFAULT_PROFILE,
    generate_trace,
    load_plan,
    write_trace,
)
from .verify import verify

logger = logging.getLogger(__name__)

MODE_NAMES = {"off": Mode.SENSING_OFF, "on": Mode.SENSING_ON}


def _data_dir(args) -> Path:
    if args.data_dir:
        return Path(args.data_dir)
    return Path(os.environ.get("OTTERLINK_DATA_DIR", "./otterlink-data"))


def _config_with_overrides(args) -> ServiceConfig:
    cfg = load_config(args.config)
    notif = cfg.notifier
    updates = {}
    if getattr(args, "notif_min_gap_mins", None) is not None:
        updates["min_gap_mins"] = args.notif_min_gap_mins
    if getattr(args, "notif_jitter_mins", None) is not None:
        updates["jitter_mins"] = args.notif_jitter_mins
    if getattr(args, "active_hours", None) is not None:
        start, end = parse_active_hours(args.active_hours)
        updates["active_start_min"] = start
        updates["active_end_min"] = end
    if updates:
        notif = NotifierConfig(
            min_gap_mins=updates.get("min_gap_mins", notif.min_gap_mins),
            jitter_mins=updates.get("jitter_mins", notif.jitter_mins),
            active_start_min=updates.get("active_start_min", notif.active_start_min),
            active_end_min=updates.get("active_end_min", notif.active_end_min),
            drop_probability=notif.drop_probability,
        )
        from dataclasses import replace

        cfg = replace(cfg, notifier=notif)
    return cfg


def cmd_serve(args) -> int:
    from .server import OtterServer

    cfg = _config_with_overrides(args)
    data_dir = _data_dir(args)
    if (data_dir / "events.log").exists() or (data_dir / "snapshot.json").exists():
        engine, corruption = OtterEngine.restore(data_dir, config=cfg)
        if corruption:
            print(
                f"recovered {corruption.recovered} records; log truncated: "
                f"{corruption.reason}",
                file=sys.stderr,
            )
    else:
        engine = OtterEngine(config=cfg, data_dir=data_dir)
    server = OtterServer(
        engine,
        host=args.host,
        port=args.port,
        ws_port=args.ws_port,
        tick_interval=1.0,
    )
    server.start()
    print(f"serving on {server.host}:{server.port} (ws: {server.ws_port})")
    try:
        while True:
            time.sleep(60)
            engine.snapshot()
    except KeyboardInterrupt:
        server.stop()
        engine.snapshot()
        engine.close()
    return 0


def cmd_gen_trace(args) -> int:
    if args.plan:
        plan, profile, sigma = load_plan(args.plan)
    else:
        import datetime as dt

        from .model import DailyProfile

        plan = DEFAULT_PLAN
        profile = DailyProfile(date=dt.date(1970, 1, 1), **DEFAULT_PROFILE)
        sigma = 2.0
    events = generate_trace(
        plan, profile, seed=args.seed, days=args.days, noise_sigma=sigma
    )
    write_trace(events, args.out)
    print(f"wrote {len(events)} events to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    import datetime as dt
    from dataclasses import replace

    from .model import DailyProfile

    cfg = _config_with_overrides(args)
    mode = MODE_NAMES[args.mode]
    cfg = replace(
        cfg,
        seed=args.seed,
        default_mode=mode,
        notifier=replace(cfg.notifier, drop_probability=args.drop_probability),
    )
    if args.plan:
        plan, profile, sigma = load_plan(args.plan)
    else:
        plan = DEFAULT_PLAN
        profile = DailyProfile(date=dt.date(1970, 1, 1), **DEFAULT_PROFILE)
        sigma = 2.0
    trace_a = generate_trace(
        plan, profile, seed=derive_seed(args.seed, "trace", "a"),
        days=args.days, noise_sigma=sigma,
    )
    trace_b = generate_trace(
        plan, profile, seed=derive_seed(args.seed, "trace", "b"),
        days=args.days, noise_sigma=sigma,
    )
    records = run_couple(
        trace_a,
        trace_b,
        AgentPolicy(),
        AgentPolicy(),
        mode=mode,
        days=args.days,
        seed=args.seed,
        config=cfg,
    )
    write_log(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_verify(args) -> int:
    report = verify(read_log(args.log))
    print(report.render())
    return 0 if report.ok else 1


def cmd_config_show(args) -> int:
    from .config import render_config

    print(render_config(_config_with_overrides(args)), end="")
    return 0


def cmd_admin_set_mode(args) -> int:
    cfg = load_config(args.config)
    data_dir = _data_dir(args)
    engine, corruption = OtterEngine.restore(data_dir, config=cfg)
    if corruption:
        print(f"log truncated during restore: {corruption.reason}", file=sys.stderr)
    engine.set_mode(args.pair, MODE_NAMES[args.mode])
    engine.snapshot()
    engine.close()
    print(f"pair {args.pair} mode set to sensing_{args.mode}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="otterlink")
    parser.add_argument("--config", help="path to a TOML config file")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the network service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=7475)
    serve.add_argument("--ws-port", type=int, default=7476)
    serve.add_argument("--data-dir")
    serve.add_argument("--notif-min-gap-mins", type=float)
    serve.add_argument("--notif-jitter-mins", type=float)
    serve.add_argument("--active-hours", help="HH:MM-HH:MM local")
    serve.set_defaults(func=cmd_serve)

    gen = sub.add_parser("gen-trace", help="generate a synthetic sensor trace")
    gen.add_argument("--plan", help="day-plan TOML file")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--days", type=int, default=1)
    gen.add_argument("--out", default="trace.jsonl")
    gen.set_defaults(func=cmd_gen_trace)

    sim = sub.add_parser("simulate", help="run a deterministic couple simulation")
    sim.add_argument("--mode", choices=("off", "on"), required=True)
    sim.add_argument("--days", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--plan", help="day-plan TOML file")
    sim.add_argument("--drop-probability", type=float, default=0.0)
    sim.add_argument("--out", default="simulation.log")
    sim.add_argument("--notif-min-gap-mins", type=float)
    sim.add_argument("--notif-jitter-mins", type=float)
    sim.add_argument("--active-hours")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="check a record log against the rules")
    ver.add_argument("log")
    ver.set_defaults(func=cmd_verify)

    cfg = sub.add_parser("config", help="configuration commands")
    cfg_sub = cfg.add_subparsers(dest="config_command", required=True)
    show = cfg_sub.add_parser("show", help="print the effective configuration")
    show.add_argument("--notif-min-gap-mins", type=float)
    show.add_argument("--notif-jitter-mins", type=float)
    show.add_argument("--active-hours")
    show.set_defaults(func=cmd_config_show)

    admin = sub.add_parser("admin", help="administrative operations")
    admin_sub = admin.add_subparsers(dest="admin_command", required=True)
    set_mode = admin_sub.add_parser("set-mode", help="switch a pair's sensing mode")
    set_mode.add_argument("pair")
    set_mode.add_argument("mode", choices=("off", "on"))
    set_mode.add_argument("--data-dir")
    set_mode.set_defaults(func=cmd_admin_set_mode)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
