# -*- coding: utf-8 -*-
"""
主要應用程式進入點 - 命令列介面

子命令:
    generate     產生合成實例 (impartial / mallows)
    solve        以指定規則計算集體排程
    evaluate     評估使用者提供的排程
    check        檢查公理 (pareto / pta / reinforcement)
    experiment   執行實驗並輸出 CSV
    export-ilp   匯出先後順序 ILP 模型 (LP 格式)

結束碼: 0 成功或公理成立、1 使用錯誤、2 超過容量、3 公理不成立
"""

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from app import __version__
from app.core import Axiom, CostKind, CostSpec, Instance, Schedule, SourceKind
from app.exceptions import CollectiveScheduleError, InvalidInstanceError, InvalidSpecError
from app.services.axiom_service import (AxiomReport, check_pareto, check_pta_condorcet,
                                        paradox_rate, test_reinforcement)
from app.services.cost_service import cost_vector
from app.services.experiment_service import gini, load_experiment_spec, run_experiment
from app.services.ilp_service import export_ilp
from app.services.profile_service import LengthSpec, ProfileSource, load_instance, write_instance
from app.services.rule_service import Rule, available_rules, resolve_rule, rule_for_spec
from app.utils.helpers import format_decimal, format_elapsed, setup_logging
from config.settings import Config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAPACITY = 2
EXIT_AXIOM_VIOLATED = 3


class _ArgumentParser(argparse.ArgumentParser):
    """使用錯誤以結束碼 1 離開"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# === 共用輔助 ===

def _effective_config(args: argparse.Namespace) -> Dict[str, str]:
    settings = {'version': __version__}
    for key, value in sorted(vars(args).items()):
        if key in ('handler',) or value is None:
            continue
        settings[key] = str(value)
    return settings


def _echo_config(args: argparse.Namespace, out=None) -> None:
    """把有效設定 (包含預設值) 印成 '# key: value'"""
    out = out or sys.stdout
    for key, value in _effective_config(args).items():
        print(f"# {key}: {value}", file=out)


def _cost_spec(args: argparse.Namespace) -> CostSpec:
    return CostSpec.parse(args.cost, args.agg, args.p)


def _rule(args: argparse.Namespace) -> Rule:
    """--rule 優先，否則由 --cost/--agg/--p 組成成本規則"""
    if getattr(args, 'rule', None):
        return resolve_rule(args.rule)
    return rule_for_spec(_cost_spec(args))


def _parse_schedule(text: str, instance: Instance) -> Schedule:
    """以逗號分隔的工作編號或名稱解析排程"""
    tokens = [t.strip() for t in text.split(',') if t.strip()]
    lookup = {label: job for job, label in enumerate(instance.labels)}
    order = []
    for token in tokens:
        if token in lookup:
            order.append(lookup[token])
        elif token.isdigit() and int(token) < instance.m:
            order.append(int(token))
        else:
            raise InvalidInstanceError(f"unknown job in schedule: {token}")
    if sorted(order) != list(range(instance.m)):
        raise InvalidInstanceError(f"schedule must list each of the {instance.m} jobs exactly once")
    return Schedule(tuple(order))


def _write_rows(header: Sequence[str], rows: List[Sequence[str]]) -> None:
    writer = csv.writer(sys.stdout, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)


def _print_report(report: AxiomReport, instance: Optional[Instance]) -> int:
    print(report.format(instance))
    return EXIT_OK if report.holds else EXIT_AXIOM_VIOLATED


# === 子命令 ===

def cmd_generate(args: argparse.Namespace) -> int:
    """產生合成實例並寫成原生格式"""
    mallows = args.model == SourceKind.MALLOWS.value
    if args.phi is not None and not mallows:
        raise InvalidSpecError(f"--phi only applies to the mallows model, not {args.model}")
    if mallows and args.phi is None:
        args.phi = Config.DEFAULT_MALLOWS_PHI
    length_spec = LengthSpec.parse(args.lengths) if args.lengths else LengthSpec.uniform(args.pmax)
    reference = tuple(int(j) for j in args.reference.split(',')) if args.reference else ()
    source = ProfileSource(kind=SourceKind(args.model), m=args.m, n=args.n,
                           phi=Config.DEFAULT_MALLOWS_PHI if args.phi is None else args.phi,
                           reference=reference, length_spec=length_spec, seed=args.seed)
    instance = source.build(0)
    comments = [f"{key}: {value}" for key, value in _effective_config(args).items()]
    text = write_instance(instance, comments)

    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        _echo_config(args)
        print(f"wrote {path} (m={instance.m}, n={instance.n})")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    """計算集體排程，印出排程、目標值、方法與每位代理人的成本"""
    instance = load_instance(args.instance)
    rule = _rule(args)
    result = rule.run(instance)
    costs = result.costs or cost_vector(_cost_spec(args), instance, result.schedule)
    schedule = instance.format_schedule(result.schedule)
    method = result.diagnostics.get('method', 'positional')
    objective = result.objective if result.objective is not None else costs.value
    logger.info(f"{rule.name}: {schedule} ({format_elapsed(result.diagnostics.get('elapsed', 0.0))})")

    _echo_config(args)
    if args.format == 'csv':
        _write_rows(('rule', 'schedule', 'objective', 'method', 'agent', 'count', 'cost'),
                    [(rule.name, schedule, str(objective), method, instance.format_schedule(pref),
                      str(weight), str(cost))
                     for (pref, weight), cost in zip(instance.agents(), costs.costs)])
        return EXIT_OK

    print(f"rule: {rule.name}")
    print(f"schedule: {schedule}")
    print(f"objective ({costs.cost_spec.name}): {objective}")
    print(f"method: {method}")
    if 'nodes' in result.diagnostics:
        print(f"nodes: {result.diagnostics['nodes']}")
    if 'optimum_count' in result.diagnostics:
        print(f"optima: {result.diagnostics['optimum_count']}")
    print("per-agent costs:")
    for (pref, weight), cost in zip(instance.agents(), costs.costs):
        print(f"  {instance.format_schedule(pref)} x{weight}: {cost}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    """評估指定排程：目標值、成本向量、Gini、悖論比例與 Pareto 檢查"""
    instance = load_instance(args.instance)
    schedule = _parse_schedule(args.schedule, instance)
    costs = cost_vector(_cost_spec(args), instance, schedule)
    inequality = gini(costs.costs, costs.weights) if min(costs.costs) >= 0 else None
    rate = paradox_rate(schedule, instance) if instance.m >= 2 else None
    pareto = check_pareto(schedule, instance)

    _echo_config(args)
    values = {
        'schedule': instance.format_schedule(schedule),
        'objective': str(costs.value),
        'per_agent': " ".join(str(c) for c in costs.per_agent),
        'gini': 'n/a' if inequality is None else format_decimal(inequality),
        'paradox_rate': 'n/a' if rate is None else format_decimal(rate),
        'pareto': 'holds' if pareto.holds else 'violated',
    }
    if args.format == 'csv':
        _write_rows(list(values), [list(values.values())])
    else:
        for key, value in values.items():
            print(f"{key}: {value}")
        for k, l in pareto.witnesses:
            print(f"  pareto witness: {instance.label(k)} before {instance.label(l)} for every agent")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    """檢查公理；公理不成立時以結束碼 3 離開"""
    axiom = Axiom(args.axiom)
    rule = _rule(args)

    if axiom == Axiom.REINFORCEMENT:
        if args.instance:
            logger.warning("reinforcement trials generate their own instances; the file is ignored")
        _echo_config(args)
        report = test_reinforcement(rule, args.m, args.trials, args.seed, p_max=args.pmax)
        return _print_report(report, None)

    if not args.instance:
        raise InvalidSpecError(f"--axiom {axiom.value} needs an instance file")
    instance = load_instance(args.instance)
    schedule = _parse_schedule(args.schedule, instance) if args.schedule else rule(instance)

    _echo_config(args)
    print(f"schedule: {instance.format_schedule(schedule)}")
    if axiom == Axiom.PARETO:
        report = check_pareto(schedule, instance)
    else:
        report = check_pta_condorcet(schedule, instance)
    return _print_report(report, instance)


def cmd_experiment(args: argparse.Namespace) -> int:
    """執行實驗設定檔並寫出 CSV"""
    spec = load_experiment_spec(args.spec)
    overrides = {}
    if args.jobs is not None:
        overrides['workers'] = args.jobs
    if args.db is not None:
        overrides['database_url'] = args.db
    if overrides:
        spec = replace(spec, **overrides)
    output_dir = Path(args.out) if args.out else Path(Config.OUTPUT_DIR) / spec.name

    _echo_config(args)
    for key, value in spec.describe().items():
        print(f"# {key}: {value}")
    print(f"# output_dir: {output_dir}")

    result = run_experiment(spec, output_dir)
    summary = result.summary()
    if args.format == 'csv':
        _write_rows(list(summary), [[str(v) if isinstance(v, int) else format_decimal(v)
                                     for v in summary.values()]])
    else:
        for key, value in summary.items():
            print(f"{key}: {value if isinstance(value, int) else format_decimal(value)}")
    return EXIT_OK


def cmd_export_ilp(args: argparse.Namespace) -> int:
    """匯出 LP 格式的先後順序模型"""
    instance = load_instance(args.instance)
    text = export_ilp(instance, _cost_spec(args))
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        _echo_config(args)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# === 參數定義 ===

def _add_cost_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--cost', default=CostKind.T.value, type=str.upper,
                        choices=[k.value for k in CostKind], help='成本函數')
    parser.add_argument('--agg', default='sum', type=str.lower, choices=['sum', 'max', 'lp'],
                        help='聚合方式')
    parser.add_argument('--p', type=int, default=None, help='L_p 的 p (預設 2)')


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog='collective-schedule',
                             description='集體排程：由代理人的偏好排程計算共同排程')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', default=Config.LOG_LEVEL, type=str.upper,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--format', default='plain', choices=['plain', 'csv'], help='輸出格式')
    subparsers = parser.add_subparsers(dest='command', required=True)

    generate = subparsers.add_parser('generate', help='產生合成實例')
    generate.add_argument('--model', default=SourceKind.IMPARTIAL.value,
                          choices=[SourceKind.IMPARTIAL.value, SourceKind.MALLOWS.value])
    generate.add_argument('--m', type=int, default=10, help='工作數')
    generate.add_argument('--n', type=int, default=500, help='代理人數')
    generate.add_argument('--phi', type=float, default=None,
                          help=f'Mallows 離散度 (只用於 mallows，預設 {Config.DEFAULT_MALLOWS_PHI})')
    generate.add_argument('--reference', default=None, help='Mallows 參考排列 (例如 2,0,1)')
    generate.add_argument('--pmax', type=int, default=Config.DEFAULT_P_MAX, help='最大工作長度')
    generate.add_argument('--lengths', default=None, help="長度指定: unit | uniform:P | explicit:3,1,2")
    generate.add_argument('--seed', type=int, default=Config.DEFAULT_SEED)
    generate.add_argument('--out', default=None, help='輸出檔案 (預設標準輸出)')
    generate.set_defaults(handler=cmd_generate)

    solve = subparsers.add_parser('solve', help='計算集體排程')
    solve.add_argument('instance', help='實例檔 (原生格式或 PrefLib)')
    solve.add_argument('--rule', default=None, help=f'規則: {available_rules()}')
    _add_cost_flags(solve)
    solve.set_defaults(handler=cmd_solve)

    evaluate = subparsers.add_parser('evaluate', help='評估指定排程')
    evaluate.add_argument('instance')
    evaluate.add_argument('--schedule', required=True, help='逗號分隔的工作編號或名稱')
    _add_cost_flags(evaluate)
    evaluate.set_defaults(handler=cmd_evaluate)

    check = subparsers.add_parser('check', help='檢查公理')
    check.add_argument('instance', nargs='?', default=None)
    check.add_argument('--axiom', required=True, choices=[a.value for a in Axiom])
    check.add_argument('--rule', default=None, help=f'規則: {available_rules()}')
    check.add_argument('--schedule', default=None, help='直接檢查此排程而不執行規則')
    check.add_argument('--trials', type=int, default=200, help='reinforcement 試驗次數')
    check.add_argument('--m', type=int, default=5, help='reinforcement 的最大工作數')
    check.add_argument('--pmax', type=int, default=Config.DEFAULT_P_MAX)
    check.add_argument('--seed', type=int, default=Config.DEFAULT_SEED)
    _add_cost_flags(check)
    check.set_defaults(handler=cmd_check)

    experiment = subparsers.add_parser('experiment', help='執行實驗')
    experiment.add_argument('spec', help='key=value 實驗設定檔')
    experiment.add_argument('--jobs', type=int, default=None, help='平行工作行程數')
    experiment.add_argument('--out', default=None, help='輸出目錄')
    experiment.add_argument('--db', nargs='?', const=Config.DATABASE_URL, default=None,
                            help='把結果存入資料庫 (未指定網址時使用預設 SQLite)')
    experiment.set_defaults(handler=cmd_experiment)

    ilp = subparsers.add_parser('export-ilp', help='匯出 ILP 模型')
    ilp.add_argument('instance')
    ilp.add_argument('--out', default=None)
    _add_cost_flags(ilp)
    ilp.set_defaults(handler=cmd_export_ilp)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令列進入點

    Args:
        argv: 參數列表 (預設 sys.argv[1:])

    Returns:
        結束碼
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except CollectiveScheduleError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
