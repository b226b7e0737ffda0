"""Command-line front door: analyze, batch, replay, score, inspect."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .bundles import Bundle, load_bundle, save_bundle
from .config import RunConfig, load_config
from .errors import ConfigError, PatchOracleError, PipelineError
from .gateway.backend import HTTPBackend
from .gateway.gateway import Budget, GatewayMode, LLMGateway, Transcript
from .gateway.prompts import template_version
from .ingestion.forge import ForgeClient
from .ingestion.snapshots import SnapshotStore
from .orchestrator.artifacts import RunArtifacts
from .orchestrator.engine import Pipeline
from .orchestrator.state import ValidationReport, Verdict
from .sandbox.backends import (
    ContainerSandbox,
    RecordingSandbox,
    StubSandbox,
    SubprocessSandbox,
)
from .sandbox.executor import SandboxExecutor

logger = logging.getLogger(__name__)

EXIT_CONSISTENT = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 2
EXIT_INCONCLUSIVE = 3

_VERDICT_EXIT = {
    Verdict.CONSISTENT: EXIT_CONSISTENT,
    Verdict.INCONSISTENT: EXIT_INCONSISTENT,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


def _build_sandbox(cfg: RunConfig, bundle: Bundle | None):
    sb = cfg.sandbox
    if sb.backend == "stub":
        if bundle is None:
            raise ConfigError("stub sandbox requires a bundle with recorded executions")
        return StubSandbox(bundle.stub_outcomes)
    if sb.backend == "subprocess":
        if not sb.shim_path:
            raise ConfigError("subprocess sandbox requires a runner shim path (--shim)")
        return SubprocessSandbox(
            shim_path=sb.shim_path,
            interpreter=sb.interpreter,
            timeout=sb.timeout,
            pythonpath=sb.pythonpath,
        )
    if not sb.shim_path:
        raise ConfigError("container sandbox requires a runner shim path (--shim)")
    return ContainerSandbox(image=sb.image, shim_path=sb.shim_path, timeout=sb.timeout)


def _build_gateway(cfg: RunConfig, bundle: Bundle | None) -> LLMGateway:
    budget = Budget(cfg.budgets.max_llm_calls)
    if cfg.mode is GatewayMode.REPLAY:
        assert bundle is not None
        return LLMGateway(
            backend=None,
            budget=budget,
            mode=GatewayMode.REPLAY,
            transcript=Transcript(bundle.transcript.entries),
        )
    backend = HTTPBackend(
        base_url=cfg.backend.base_url,
        model=cfg.backend.model,
        api_key_env=cfg.backend.api_key_env,
    )
    return LLMGateway(
        backend=backend,
        budget=budget,
        mode=cfg.mode,
        transcript=Transcript() if cfg.mode is GatewayMode.RECORD else None,
        temperature=cfg.backend.temperature,
        max_output_tokens=cfg.backend.max_output_tokens,
    )


def run_analysis(
    cfg: RunConfig,
    repo: str | None = None,
    number: int | None = None,
    run_dir: Path | None = None,
) -> tuple[ValidationReport, Path]:
    """Run one PR through the pipeline; returns the report and run dir."""
    cfg.validate()

    bundle: Bundle | None = None
    if cfg.bundle is not None:
        bundle = load_bundle(cfg.bundle)
        pr, pre, post = bundle.pr, bundle.pre, bundle.post
        if repo and repo != pr.repo_id:
            raise ConfigError(f"bundle is for {pr.repo_id}, not {repo}")
        if number and number != pr.number:
            raise ConfigError(f"bundle is for PR {pr.number}, not {number}")
        if bundle.meta.get("budgets"):
            from .orchestrator.state import Budgets

            cfg = replace(cfg, budgets=Budgets(**bundle.meta["budgets"]))
    else:
        if not repo or not number:
            raise ConfigError("live analysis requires a repository and PR number")
        forge = ForgeClient(base_url=cfg.forge_url)
        pr = forge.fetch_pr(repo, number)
        store = SnapshotStore(cfg.cache_dir)
        clone_url = f"https://github.com/{repo}.git"
        pre = store.ensure(repo, pr.base_commit, clone_url)
        post = store.ensure(repo, pr.head_commit, clone_url)

    if run_dir is None:
        run_dir = cfg.output_dir / f"{pr.repo_id.replace('/', '__')}__{pr.number}"
    artifacts = RunArtifacts(run_dir)

    gateway = _build_gateway(cfg, bundle)
    sandbox = _build_sandbox(cfg, bundle)
    if cfg.mode is GatewayMode.RECORD:
        sandbox = RecordingSandbox(sandbox)
    executor = SandboxExecutor(backend=sandbox, max_parallel=cfg.sandbox.parallelism)

    started = time.time()
    pipeline = Pipeline(
        gateway=gateway,
        executor=executor,
        budgets=cfg.budgets,
        artifacts=artifacts,
        distill=cfg.distill,
    )
    oracle, report = pipeline.run(pr, pre, post)

    artifacts.write_metadata(
        started_at=started,
        finished_at=time.time(),
        mode=cfg.mode.value,
        sandbox_backend=cfg.sandbox.backend,
        template_version=template_version(),
        backend_model=cfg.backend.model or None,
    )

    if cfg.mode is GatewayMode.RECORD:
        assert isinstance(sandbox, RecordingSandbox)
        save_bundle(
            run_dir / "bundle",
            pr,
            pre,
            post,
            gateway.transcript or Transcript(),
            sandbox.outcomes,
            description=f"recorded run of {pr.repo_id}#{pr.number}",
        )

    return report, run_dir


def _print_report(report: ValidationReport, run_dir: Path) -> None:
    print(f"verdict: {report.verdict.value}")
    if report.detail:
        print(f"detail: {report.detail}")
    for index, justification in report.warnings:
        first_line = justification.strip().splitlines()[0] if justification.strip() else ""
        print(f"warning (assertion {index}): {first_line}")
    print(
        f"oracle revision {report.oracle_revision}, "
        f"{report.llm_calls} LLM calls, "
        f"{report.input_tokens}+{report.output_tokens} tokens"
    )
    print(f"artifacts: {run_dir}")


# --- subcommands ---------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
        report, run_dir = run_analysis(cfg, repo=args.repo, number=args.pr)
    except (ConfigError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _print_report(report, run_dir)
    return _VERDICT_EXIT[report.verdict]


def cmd_replay(args: argparse.Namespace) -> int:
    args.mode = "replay"
    args.repo = None
    args.pr = None
    args.bundle = args.bundle_path
    return cmd_analyze(args)


def cmd_batch(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
        manifest = Path(args.manifest)
        if not manifest.is_file():
            raise ConfigError(f"manifest {manifest} not found")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    entries: list[tuple[str, int, Path | None]] = []
    seen: set[tuple[str, int]] = set()
    for raw in manifest.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        repo, number = parts[0], int(parts[1])
        bundle = Path(parts[2]) if len(parts) > 2 else None
        if (repo, number) in seen:
            print(f"warning: duplicate manifest entry {repo} {number} skipped", file=sys.stderr)
            continue
        seen.add((repo, number))
        entries.append((repo, number, bundle))

    bundles_root = Path(args.bundles_root) if args.bundles_root else None

    def resolve_bundle(repo: str, number: int, explicit: Path | None) -> Path | None:
        if explicit:
            return explicit
        if bundles_root:
            return bundles_root / f"{repo.replace('/', '__')}__{number}"
        return cfg.bundle

    def run_one(entry):
        repo, number, explicit = entry
        run_cfg = replace(cfg, bundle=resolve_bundle(repo, number, explicit))
        run_dir = cfg.output_dir / f"{repo.replace('/', '__')}__{number}"
        try:
            report, _ = run_analysis(run_cfg, repo=repo, number=number, run_dir=run_dir)
            return (repo, number, report, None)
        except PatchOracleError as exc:
            return (repo, number, None, str(exc))

    with ThreadPoolExecutor(max_workers=max(1, args.parallel)) as pool:
        results = list(pool.map(run_one, entries))

    counts = {"oracles": 0, "warnings": 0, "inconclusive": 0, "errors": 0}
    total_in = total_out = total_calls = 0
    print(f"{'repo':40} {'pr':>7} {'verdict':14} {'warn':>4} {'calls':>5} {'tokens':>12}")
    for repo, number, report, error in results:
        if report is None:
            counts["errors"] += 1
            print(f"{repo:40} {number:>7} {'error':14} {'-':>4} {'-':>5} {'-':>12}  {error}")
            continue
        if report.oracle_revision >= 0:
            counts["oracles"] += 1
        counts["warnings"] += len(report.warnings)
        if report.verdict is Verdict.INCONCLUSIVE:
            counts["inconclusive"] += 1
        total_calls += report.llm_calls
        total_in += report.input_tokens
        total_out += report.output_tokens
        print(
            f"{repo:40} {number:>7} {report.verdict.value:14} "
            f"{len(report.warnings):>4} {report.llm_calls:>5} "
            f"{report.input_tokens}+{report.output_tokens}"
        )
    print(
        f"\ntotals: {len(results)} PRs, {counts['oracles']} oracles, "
        f"{counts['warnings']} warnings, {counts['inconclusive']} inconclusive, "
        f"{counts['errors']} errors, {total_calls} LLM calls, "
        f"{total_in}+{total_out} tokens"
    )
    return EXIT_ERROR if counts["errors"] == len(results) and results else EXIT_CONSISTENT


def cmd_score(args: argparse.Namespace) -> int:
    from .adequacy.mutants import generate_mutants
    from .adequacy.scoring import mutation_score
    from .context import build_code_context
    from .ingestion.filters import classify_pr
    from .oracle.model import PatchOracle

    try:
        cfg = _config_from_args(args)
        if cfg.sandbox.backend == "stub":
            raise ConfigError("scoring executes mutants and needs a real sandbox backend")
        bundle = load_bundle(Path(args.bundle_path))
    except (ConfigError, PatchOracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    run_dir = Path(args.run_dir) if args.run_dir else None
    if run_dir is None:
        # replay the bundle first to regenerate the oracle revisions
        replay_cfg = replace(cfg, mode=GatewayMode.REPLAY, bundle=bundle.root,
                             sandbox=replace(cfg.sandbox, backend="stub"))
        try:
            _, run_dir = run_analysis(replay_cfg)
        except PatchOracleError as exc:
            print(f"error: replay failed: {exc}", file=sys.stderr)
            return EXIT_ERROR

    revision = args.revision
    if revision is None:
        revisions = sorted(
            int(p.stem.split("rev")[1]) for p in run_dir.glob("oracle_rev*.json")
        )
        if not revisions:
            print("error: no oracle revisions in run directory", file=sys.stderr)
            return EXIT_ERROR
        revision = revisions[-1]
    oracle = PatchOracle.load(run_dir / f"oracle_rev{revision}.json")

    decision = classify_pr(bundle.pr.diff, bundle.pre, bundle.post)
    fd = next(f for f in bundle.pr.diff if f.path == decision.target_path)
    _, ctx = build_code_context(bundle.pre, bundle.post, fd)

    try:
        executor = SandboxExecutor(
            backend=_build_sandbox(cfg, bundle), max_parallel=cfg.sandbox.parallelism
        )
        mutants = generate_mutants(ctx.post_function)
        report = mutation_score(oracle, ctx, mutants, executor)
    except PatchOracleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    out_path = run_dir / f"mutation_score_rev{revision}.json"
    out_path.write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    score = "undefined" if report.score is None else f"{report.score:.3f}"
    print(
        f"mutation score {score} ({report.killed}/{report.total} killed, "
        f"{report.timeout_kills} by timeout), revision {revision}"
    )
    print(f"report: {out_path}")
    return EXIT_CONSISTENT


def cmd_inspect(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    log_path = run_dir / "run.log"
    if not log_path.is_file():
        print(f"error: {log_path} not found", file=sys.stderr)
        return EXIT_ERROR
    for line in log_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        event = record.pop("event")
        detail = ", ".join(f"{k}={record[k]}" for k in sorted(record))
        print(f"{event:16} {detail}")
    report_path = run_dir / "report.json"
    if report_path.is_file():
        data = json.loads(report_path.read_text(encoding="utf-8"))
        print(f"\nreport: verdict={data['verdict']} detail={data.get('detail') or '-'}")
    return EXIT_CONSISTENT


# --- argument plumbing -----------------------------------------------------


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "mode": getattr(args, "mode", None),
        "output_dir": getattr(args, "out", None),
        "bundle": getattr(args, "bundle", None),
        "max_llm_calls": getattr(args, "max_llm_calls", None),
        "max_enhancements": getattr(args, "max_enhancements", None),
        "review_cap": getattr(args, "review_cap", None),
        "repair_cap": getattr(args, "repair_cap", None),
        "sandbox_backend": getattr(args, "sandbox", None),
        "sandbox_timeout": getattr(args, "timeout", None),
        "shim_path": getattr(args, "shim", None),
        "interpreter": getattr(args, "interpreter", None),
        "image": getattr(args, "image", None),
        "backend_model": getattr(args, "model", None),
        "backend_url": getattr(args, "backend_url", None),
        "forge_url": getattr(args, "forge_url", None),
        "pythonpath": getattr(args, "pythonpath", None),
    }
    if getattr(args, "no_distill", False):
        overrides["distill"] = False
    return load_config(getattr(args, "config", None), overrides)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--mode", choices=["live", "record", "replay"], default=None)
    p.add_argument("--out", help="output directory for run artifacts")
    p.add_argument("--bundle", help="golden bundle directory (replay input)")
    p.add_argument("-M", "--max-llm-calls", type=int, dest="max_llm_calls")
    p.add_argument("-N", "--max-enhancements", type=int, dest="max_enhancements")
    p.add_argument("--review-cap", type=int, dest="review_cap")
    p.add_argument("--repair-cap", type=int, dest="repair_cap")
    p.add_argument("--sandbox", choices=["subprocess", "container", "stub"])
    p.add_argument("--timeout", type=float, help="sandbox timeout in seconds")
    p.add_argument("--shim", help="path to the in-sandbox runner file")
    p.add_argument("--interpreter", help="python interpreter for the subprocess sandbox")
    p.add_argument("--image", help="container image for the container sandbox")
    p.add_argument("--pythonpath", nargs="*", help="extra sys.path entries inside the sandbox")
    p.add_argument("--model", help="LLM model identifier")
    p.add_argument("--backend-url", dest="backend_url", help="LLM API base URL")
    p.add_argument("--forge-url", dest="forge_url", help="forge API base URL")
    p.add_argument("--no-distill", action="store_true", help="skip issue distillation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patchoracle",
        description="Infer executable patch oracles from PR intent and validate the change",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze one pull request")
    p.add_argument("repo", nargs="?", help="owner/name")
    p.add_argument("pr", nargs="?", type=int, help="pull request number")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("replay", help="replay a golden bundle")
    p.add_argument("bundle_path", help="bundle directory")
    _add_common(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("batch", help="analyze a manifest of PRs")
    p.add_argument("manifest", help="file with one 'owner/name number' pair per line")
    p.add_argument("--bundles-root", help="directory of bundles named owner__name__pr")
    p.add_argument("--parallel", type=int, default=2)
    _add_common(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("score", help="mutation-score a run's oracle")
    p.add_argument("bundle_path", help="bundle directory")
    p.add_argument("--run-dir", help="existing run directory (skips replay)")
    p.add_argument("--revision", type=int, help="oracle revision to score (default: latest)")
    _add_common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("inspect", help="pretty-print a run log")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
