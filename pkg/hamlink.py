"""
hamlink 명령행

    hamlink <fig2|fig3|ghz|kicks|sweep> [--config FILE] [--n-sites N] [--chi X] [--ratio R]
            [--frame lab|rotating] [--out DIR] [--threads K] ...

종료 코드: 0 성공, 2 설정 오류, 3 수치 오류, 4 입출력 오류
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

from pydantic import ValidationError

from config.config_file import load_experiment_config
from config.settings import get_settings
from core.errors import ConfigError, ContractError, DimensionError, NumericError, ParameterError
from models.experiment_models import ExperimentKind
from services.experiment_service import ExperimentService

logger = logging.getLogger("hamlink")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

# 명령행 옵션 -> ExperimentConfig 필드
_OPTION_FIELDS = {
    "n_sites": "n_sites",
    "sites": "sites_list",
    "chi": "chi",
    "ratio": "ratio",
    "alpha": "alpha",
    "beta": "beta",
    "parity_constant": "parity_constant",
    "frame": "frame",
    "time_max": "time_max",
    "time_samples": "time_samples",
    "ratio_min": "ratio_min",
    "ratio_max": "ratio_max",
    "ratio_samples": "ratio_samples",
    "ratio_spacing": "ratio_spacing",
    "n_kicks": "n_kicks",
    "kick_matcher": "kick_matcher",
    "kick_state": "kick_state",
    "alpha_scale": "alpha_scale",
    "sweep_axis": "sweep_axis",
    "sweep_values": "sweep_values",
    "backend": "backend",
    "seed": "seed",
    "out": "output_dir",
    "threads": "threads",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hamlink", description="커넥터 연산자 스핀 체인 시뮬레이터")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for kind in ExperimentKind:
        sub = subparsers.add_parser(kind.value)
        sub.add_argument("--config", help="key = value 설정 파일")
        sub.add_argument("--n-sites", type=int)
        sub.add_argument("--sites", help="쉼표로 구분한 N 목록")
        sub.add_argument("--chi", type=float)
        sub.add_argument("--ratio", type=float, help="beta/alpha")
        sub.add_argument("--alpha", type=float)
        sub.add_argument("--beta", type=float)
        sub.add_argument("--parity-constant", choices=["fixed", "second_order"])
        sub.add_argument("--frame", choices=["lab", "rotating"])
        sub.add_argument("--time-max", type=float, help="chi*t 최댓값")
        sub.add_argument("--time-samples", type=int)
        sub.add_argument("--ratio-min", type=float)
        sub.add_argument("--ratio-max", type=float)
        sub.add_argument("--ratio-samples", type=int)
        sub.add_argument("--ratio-spacing", choices=["linear", "log"])
        sub.add_argument("--n-kicks", type=int)
        sub.add_argument("--kick-matcher", choices=["none", "residual", "overlap"])
        sub.add_argument("--kick-state", choices=["coherent_x", "connector_eigenstate"])
        sub.add_argument("--alpha-scale", type=float)
        sub.add_argument("--sweep-axis", choices=["ratio", "n_sites", "chi", "time_max"])
        sub.add_argument("--sweep-values", help="쉼표로 구분한 값 목록")
        sub.add_argument("--backend", choices=["dense_eig", "krylov"])
        sub.add_argument("--seed", type=int)
        sub.add_argument("--out", help="출력 디렉터리")
        sub.add_argument("--threads", type=int)
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, object]:
    overrides: Dict[str, object] = {"experiment": args.command}
    for option, field_name in _OPTION_FIELDS.items():
        value = getattr(args, option, None)
        if value is not None:
            overrides[field_name] = value
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(level=settings.LOG_LEVEL)
    for warning in settings.validate_settings():
        logger.warning(warning)

    args = build_parser().parse_args(argv)

    try:
        config = load_experiment_config(args.config, collect_overrides(args))
        result = ExperimentService(config).run()
    except (ConfigError, ParameterError, ValidationError) as e:
        logger.error(f"설정 오류: {e}")
        return EXIT_CONFIG
    except (NumericError, ContractError, DimensionError) as e:
        logger.error(f"수치 오류: {e}", exc_info=True)
        return EXIT_NUMERIC
    except OSError as e:
        logger.error(f"입출력 오류: {e}")
        return EXIT_IO

    for path in result.files:
        logger.info(f"출력: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
