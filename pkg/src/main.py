"""
CLI 入口

用法:
    python -m src.main partition --config data/run.yaml
    python -m src.main verify --config data/run.yaml --workers 4
    python -m src.main simulate --config data/run.yaml --x0 2.0 2.0 --steps 100
    python -m src.main bench --output out/bench

退出码: 0 成功；1 验证不完整（超预算 / 数值失败）或仿真发现不安全轨迹；2 输入错误。
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path

import numpy as np
import yaml
from rich.console import Console

from src.errors import InputError, ParseError, VerificationError
from src.graph.builder import build_pipeline
from src.graph.state import VerifyState
from src.utils.config import RunConfig, get_config
from src.utils.logger import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INCOMPLETE = 1
EXIT_INPUT = 2

PIPELINE_COMMANDS = ("partition", "preprocess", "abstract", "verify")


async def run_pipeline(config: RunConfig, target: str) -> VerifyState:
    """执行流水线直到 target 对应的节点"""
    graph = build_pipeline()
    initial_state: VerifyState = {
        "config": config,
        "target": target,
        "execution_log": [],
        "artifacts": {},
        "phase": "init",
        "error": None,
        "error_type": None,
    }
    return await graph.ainvoke(initial_state)


def exit_code_for(state: VerifyState) -> int:
    if "exit_code" in state:
        return state["exit_code"]
    ts = state.get("transitions")
    if ts is not None and ts.incomplete_pairs:
        return EXIT_INCOMPLETE
    return EXIT_OK


# ── 参数 ──

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML/JSON 运行配置文件")
    p.add_argument("--workspace", type=Path)
    p.add_argument("--network", type=Path)
    p.add_argument("--dynamics", type=Path)
    p.add_argument("--lasers", dest="laser_count", type=int)
    p.add_argument("--heading", type=float)
    p.add_argument("--primary", dest="primary_lasers", type=int, nargs="+", help="1-based 主激光下标")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--strict-closed", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--refine-intra", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--boundary-vertices", dest="include_boundary_vertices",
                   action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--skip-unsafe-sources", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--time-limit", dest="smc_time_limit_s", type=float, help="单次 SMC 检查的时间上限（秒）")
    p.add_argument("--conflict-limit", dest="smc_conflict_limit", type=int)
    p.add_argument("--sat-backend")
    p.add_argument("--workers", type=int)
    p.add_argument("--output", dest="output_dir", type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--log-level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lidar-nn-verify", description="LiDAR 神经网络控制器安全性验证")
    sub = parser.add_subparsers(dest="command", required=True)

    helps = {
        "partition": "工作空间划分 + 成像映射 + SVG",
        "preprocess": "逐区域 SMC 预处理，写冲突缓存",
        "abstract": "构建有限状态抽象 δ_F",
        "verify": "完整流水线：输出报告与安全集",
    }
    for name in PIPELINE_COMMANDS:
        _add_common(sub.add_parser(name, help=helps[name]))

    sim = sub.add_parser("simulate", help="闭环轨迹仿真")
    _add_common(sim)
    sim.add_argument("--x0", type=float, nargs="+", help="初始状态；缺省时从安全集采样")
    sim.add_argument("--steps", type=int, default=100)
    sim.add_argument("--samples", type=int, default=1, help="从安全集采样的初始状态个数")
    sim.add_argument("--safe-set", type=Path, help="安全集 JSON（默认 <output>/safe_set.json）")

    bench = sub.add_parser("bench", help="规模基准，输出 CSV")
    _add_common(bench)
    bench.add_argument("--sweep", type=Path, help="YAML 扫描参数文件")
    bench.add_argument("--bench-lasers", type=int, nargs="+")
    bench.add_argument("--bench-vertices", type=int, nargs="+")
    bench.add_argument("--bench-hidden", nargs="+", help="隐层结构，如 8 16 4x4")
    bench.add_argument("--bench-transition-hidden", help="转移检查基准的隐层结构，如 10x10")
    return parser


_CONFIG_KEYS = (
    "workspace", "network", "dynamics", "laser_count", "heading", "primary_lasers", "epsilon",
    "strict_closed", "refine_intra", "include_boundary_vertices", "skip_unsafe_sources",
    "smc_time_limit_s", "smc_conflict_limit", "sat_backend", "workers", "output_dir", "seed", "log_level",
)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    return get_config(args.config, **{k: getattr(args, k, None) for k in _CONFIG_KEYS})


# ── 子命令 ──

def cmd_pipeline(config: RunConfig, target: str, console: Console) -> int:
    state = asyncio.run(run_pipeline(config, target))
    code = exit_code_for(state)
    if state.get("phase") == "failed":
        console.print(f"[{state.get('error_type')}] {state.get('error')}", markup=False)
        return code

    if target == "verify" and state.get("report") is not None:
        from src.report.report import render_text

        console.print(render_text(state["report"]))
    for name, path in sorted((state.get("artifacts") or {}).items()):
        console.print(f"{name}: {path}")
    return code


def cmd_simulate(config: RunConfig, args: argparse.Namespace, console: Console) -> int:
    from src.abstraction.io import load_dynamics, load_safe_set
    from src.abstraction.simulate import sample_safe_starts, simulate
    from src.geometry.io import load_workspace
    from src.network.io import load_network
    from src.utils.jsonio import dump_json

    config.check_inputs("workspace", "network", "dynamics")
    workspace = load_workspace(config.workspace)
    net = load_network(config.network)
    dyn, bounds = load_dynamics(config.dynamics, config.epsilon)
    lidar = config.lidar()

    if args.x0:
        if len(args.x0) != dyn.n:
            raise ParseError(f"--x0 has {len(args.x0)} entries, dynamics has n={dyn.n}")
        starts = np.array([args.x0], dtype=float)
    else:
        safe_path = args.safe_set or Path(config.output_dir) / "safe_set.json"
        safe = load_safe_set(safe_path)
        if safe.is_empty:
            console.print("安全集为空，没有可仿真的初始状态")
            return EXIT_OK
        starts = sample_safe_starts(safe, args.samples, np.random.default_rng(config.seed))

    results = [simulate(dyn, net, workspace, lidar, x0, args.steps, bounds, config.geometry_tolerance)
               for x0 in starts]
    path = dump_json(Path(config.output_dir) / "simulation.json",
                     {"steps": args.steps, "trajectories": [r.to_dict() for r in results]})
    unsafe = [i for i, r in enumerate(results) if not r.safe]
    console.print(f"{len(results)} 条轨迹, {len(unsafe)} 条不安全 → {path}")
    for i in unsafe:
        r = results[i]
        console.print(f"  轨迹 {i}: t={r.violation_step} {r.reason}")
    return EXIT_INCOMPLETE if unsafe else EXIT_OK


def cmd_bench(config: RunConfig, args: argparse.Namespace, console: Console) -> int:
    from src.report.bench import BenchSweep, run_bench

    values = {}
    if args.sweep:
        try:
            values = yaml.safe_load(Path(args.sweep).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ParseError(f"cannot read sweep file: {e}", path=str(args.sweep)) from e
    if args.bench_lasers:
        values["lasers"] = args.bench_lasers
    if args.bench_vertices:
        values["obstacle_vertices"] = args.bench_vertices
    try:
        if args.bench_hidden:
            values["hidden"] = [[int(x) for x in h.split("x")] for h in args.bench_hidden]
        if args.bench_transition_hidden:
            values["transition_hidden"] = [int(x) for x in args.bench_transition_hidden.split("x")]
    except ValueError as e:
        raise ParseError(f"bad hidden layer spec: {e}") from e
    values.setdefault("time_limit_s", config.bench_time_limit_s)
    values.setdefault("seed", config.seed)
    try:
        sweep = BenchSweep(**values)
    except ValueError as e:
        raise ParseError(f"invalid sweep: {e}", path=str(args.sweep) if args.sweep else None) from e

    part, pre, trans = run_bench(sweep, config.output_dir)
    console.print(f"partition: {part}")
    console.print(f"preprocess: {pre}")
    console.print(f"transition: {trans}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    console = Console()

    try:
        config = load_run_config(args)
    except InputError as e:
        console.print(f"[{type(e).__name__}] {e}", markup=False)
        return EXIT_INPUT

    setup_logging(config.log_level, Path(config.output_dir) / "run.log", force=True)
    logger.info(f"命令: {args.command}, 输出目录: {config.output_dir}")

    try:
        if args.command in PIPELINE_COMMANDS:
            return cmd_pipeline(config, args.command, console)
        if args.command == "simulate":
            return cmd_simulate(config, args, console)
        return cmd_bench(config, args, console)
    except InputError as e:
        logger.error(f"输入错误: {e}")
        console.print(f"[{type(e).__name__}] {e}", markup=False)
        return EXIT_INPUT
    except VerificationError as e:
        logger.error(f"运行失败: {type(e).__name__}: {e}")
        console.print(f"[{type(e).__name__}] {e}", markup=False)
        return EXIT_INCOMPLETE


if __name__ == "__main__":
    sys.exit(main())
