import hashlib
import threading
import time
from pathlib import Path
from typing import Any, Dict, Optional

from models.experiment_models import ExperimentConfig


class CacheService:
    """실험 결과 TTL 캐시 (설정 해시 키)"""

    def __init__(self, default_ttl: int = 3600):
        self.default_ttl = default_ttl
        self._cache: Dict[str, tuple] = {}
        self._cache_stats = {"hits": 0, "misses": 0}
        self._lock = threading.Lock()

    @staticmethod
    def make_key(config: ExperimentConfig) -> str:
        # 키: 재현 설정 + output_dir
        text = f"{config.resolved_line()}|{config.output_dir}"
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def get_result(self, key: str) -> Optional[Dict[str, Any]]:
        with self._lock:
            if key in self._cache:
                data, expire_time = self._cache[key]
                if time.time() < expire_time and self._files_exist(data):
                    self._cache_stats["hits"] += 1
                    return data
                del self._cache[key]

            self._cache_stats["misses"] += 1
            return None

    @staticmethod
    def _files_exist(data: Dict[str, Any]) -> bool:
        """삭제된 출력 파일을 가리키는 항목은 무효"""
        return all(Path(f).exists() for f in data.get("files", []))

    def save_result(self, key: str, data: Dict[str, Any], ttl: Optional[int] = None):
        expire_time = time.time() + (self.default_ttl if ttl is None else ttl)
        with self._lock:
            self._cache[key] = (data, expire_time)

    def clear(self):
        with self._lock:
            self._cache.clear()
            self._cache_stats = {"hits": 0, "misses": 0}

    def is_healthy(self) -> bool:
        return True

    def get_hit_rate(self) -> float:
        """캐시 히트율"""
        total = self._cache_stats["hits"] + self._cache_stats["misses"]
        if total == 0:
            return 0.0
        return self._cache_stats["hits"] / total
