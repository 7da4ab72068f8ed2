"""
평문 key = value 설정 파일 (# 주석) 읽기/쓰기
"""

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from core.errors import ConfigError
from models.experiment_models import ExperimentConfig
from models.spin_models import HamiltonianKind, HamiltonianSpec, SpinChainParams, TactCoefficients

logger = logging.getLogger(__name__)

_NONE_VALUES = ("none", "null", "")


def parse_key_values(text: str, source: str = "<string>") -> Dict[str, Optional[str]]:
    values: Dict[str, Optional[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: 'key = value' 형식이 아닙니다: {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: 키가 비어 있습니다")
        key = key.replace("-", "_").lower()
        if key in values:
            raise ConfigError(f"{source}:{lineno}: 중복된 키 '{key}'")
        values[key] = None if value.lower() in _NONE_VALUES else value
    return values


def read_config_file(path: str) -> Dict[str, Optional[str]]:
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise ConfigError(f"설정 파일이 없습니다: {path}") from e
    return parse_key_values(text, source=str(config_path))


def build_experiment_config(file_values: Mapping[str, Any], overrides: Mapping[str, Any]) -> ExperimentConfig:
    """파일 값 위에 명령행 값을 덮어써서 검증"""
    known = set(ExperimentConfig.model_fields)
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise ConfigError(f"알 수 없는 설정 키: {unknown}")

    merged = {key: value for key, value in file_values.items() if value is not None}
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return ExperimentConfig(**merged)


def load_experiment_config(path: Optional[str], overrides: Mapping[str, Any]) -> ExperimentConfig:
    file_values = read_config_file(path) if path else {}
    config = build_experiment_config(file_values, overrides)
    logger.info(f"설정: {config.resolved_line()}")
    return config


def dump_experiment_config(config: ExperimentConfig) -> str:
    lines = [f"{key} = {value}" for key, value in config.resolved_items().items()]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# HamiltonianSpec 직렬화
# ---------------------------------------------------------------------------

_PARAM_KEYS = ("n_sites", "chi", "beta", "alpha", "omega", "ferromagnetic", "periodic")
_TACT_KEYS = ("chi", "alpha", "beta", "gamma")


def dump_hamiltonian_spec(spec: HamiltonianSpec) -> str:
    lines = [f"kind = {spec.kind.value}"]
    params = spec.params.model_dump()
    for key in _PARAM_KEYS:
        value = params[key]
        if value is None:
            value = "none"
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    lines.append(f"lmg_omega = {spec.lmg_omega!r}")
    lines.append(f"gammas = {','.join(repr(g) for g in spec.gammas)}")
    for key in _TACT_KEYS:
        lines.append(f"tact_{key} = {getattr(spec.tact, key)!r}")
    lines.append(f"field = {spec.field!r}")
    return "\n".join(lines) + "\n"


def parse_hamiltonian_spec(text: str) -> HamiltonianSpec:
    values = parse_key_values(text, source="<hamiltonian>")
    if "kind" not in values or values["kind"] is None:
        raise ConfigError("해밀토니안 명세에 kind 가 없습니다")

    allowed = {"kind", "lmg_omega", "gammas", "field", *_PARAM_KEYS, *(f"tact_{k}" for k in _TACT_KEYS)}
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ConfigError(f"알 수 없는 해밀토니안 키: {unknown}")

    try:
        kind = HamiltonianKind(values["kind"].lower())
    except ValueError as e:
        raise ConfigError(f"알 수 없는 해밀토니안 종류: {values['kind']}") from e

    params = SpinChainParams(**{k: values[k] for k in _PARAM_KEYS if values.get(k) is not None})
    tact = TactCoefficients(**{k: values[f"tact_{k}"] for k in _TACT_KEYS if values.get(f"tact_{k}") is not None})
    gammas_text = values.get("gammas")
    gammas = tuple(float(g) for g in gammas_text.split(",") if g.strip()) if gammas_text else ()

    extras = {key: values[key] for key in ("lmg_omega", "field") if values.get(key) is not None}
    return HamiltonianSpec(kind=kind, params=params, gammas=gammas, tact=tact, **extras)
