from fastapi import Body, FastAPI, HTTPException, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from typing import Any, Dict, Optional
import logging
import time
from datetime import datetime

from pydantic import ValidationError

from config.config_file import build_experiment_config
from config.settings import get_settings
from core.errors import HamlinkError, NumericError
from models.experiment_models import ExperimentKind, ExperimentResponse
from providers.propagator import PropagatorFactory
from services.cache_service import CacheService
from services.experiment_service import ExperimentService

settings = get_settings()
logging.basicConfig(level=settings.LOG_LEVEL)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="hamlink",
    description="커넥터 연산자 스핀 체인 시뮬레이터",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

cache_service = CacheService(default_ttl=settings.CACHE_TTL)

for warning in settings.validate_settings():
    logger.warning(warning)


@app.get("/")
async def root():
    return {
        "message": "hamlink server",
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "version": "1.0.0",
        "endpoints": ["experiments/{experiment}", "health", "config"],
        "experiments": [kind.value for kind in ExperimentKind],
    }


@app.get("/health")
async def health_check():
    return {
        "status": "healthy",
        "backends": PropagatorFactory.get_available_backends(),
        "backend_policy": settings.get_backend_info(),
        "cache": {
            "enabled": settings.USE_CACHE,
            "healthy": cache_service.is_healthy(),
            "hit_rate": cache_service.get_hit_rate(),
        },
        "timestamp": datetime.now().isoformat(),
    }


@app.get("/config")
async def get_config():
    """현재 설정"""
    return {
        "settings": settings.model_dump(),
        "warnings": settings.validate_settings(),
    }


@app.post("/experiments/{experiment}", response_model=ExperimentResponse)
async def run_experiment(experiment: ExperimentKind, body: Optional[Dict[str, Any]] = Body(None)):
    try:
        config = build_experiment_config(body or {}, {"experiment": experiment})
    except (ValidationError, HamlinkError) as e:
        raise HTTPException(status_code=422, detail=str(e))

    key = cache_service.make_key(config)
    if settings.USE_CACHE:
        cached = cache_service.get_result(key)
        if cached is not None:
            return ExperimentResponse(**{**cached, "cached": True})

    start = time.time()
    result = await run_in_threadpool(ExperimentService(config).run)
    response = ExperimentResponse(
        experiment=result.experiment,
        files=result.files,
        metrics=result.metrics,
        elapsed_seconds=time.time() - start,
    )
    if settings.USE_CACHE:
        cache_service.save_result(key, response.model_dump())
    return response


@app.exception_handler(HTTPException)
async def http_exception_handler(request: Request, exc: HTTPException):
    return JSONResponse(status_code=exc.status_code, content={
        "error": exc.detail,
        "status_code": exc.status_code,
        "timestamp": datetime.now().isoformat()
    })


@app.exception_handler(HamlinkError)
async def hamlink_exception_handler(request: Request, exc: HamlinkError):
    status_code = 500 if isinstance(exc, NumericError) else 422
    logger.error(f"{request.url.path} 실패: {exc}")
    return JSONResponse(status_code=status_code, content={
        "error": str(exc),
        "kind": type(exc).__name__,
        "status_code": status_code,
        "timestamp": datetime.now().isoformat()
    })


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    logger.error(f"{request.url.path} 처리 중 오류: {exc}", exc_info=True)
    return JSONResponse(status_code=500, content={
        "error": "실험 실행 중 오류가 발생했습니다.",
        "status_code": 500,
        "timestamp": datetime.now().isoformat()
    })


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8000)
