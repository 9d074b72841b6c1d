from datetime import datetime
from typing import Any, Dict, Optional

import uvicorn
from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .agents.analyze import AnalyzeAgent
from .agents.corpus import CorpusAgent
from .agents.ibc import IBCAgent
from .agents.reduce import ReduceAgent
from .agents.strip import StripAgent
from .agents.validate import ValidateAgent
from .config import get_settings
from .core.errors import ProblemFileError
from .middleware.error_handler import ErrorHandlerMiddleware, LoggingMiddleware, status_code_for
from .services.problem_io import load_problem, resolve_options
from .utils.logger import setup_logger

VERSION = "1.0.0"

# Setup logging
logger = setup_logger()
settings = get_settings()

app = FastAPI(
    title="Germ Cohomology Engine",
    description="Exact germ cohomology, residue pairings and reductions for holomorphic families of complexes",
    version=VERSION,
    docs_url="/docs",
    redoc_url="/redoc",
)

app.add_middleware(ErrorHandlerMiddleware)
app.add_middleware(LoggingMiddleware)

validate_agent = ValidateAgent()
analyze_agent = AnalyzeAgent()
reduce_agent = ReduceAgent()
strip_agent = StripAgent()
ibc_agent = IBCAgent()
corpus_agent = CorpusAgent()

COMMANDS = {
    "validate": validate_agent.validate,
    "analyze": analyze_agent.analyze,
    "reduce": reduce_agent.reduce,
    "strip": strip_agent.strip,
    "ibc": ibc_agent.ibc,
}

# default command per payload kind for uploads
UPLOAD_DISPATCH = {
    "complex": "analyze",
    "indicial": "analyze",
    "generator": "analyze",
    "strip": "strip",
    "ibc": "ibc",
}


class CorpusRequest(BaseModel):
    seed: int = 0
    count: int = Field(50, ge=1, le=500)
    checked: Optional[bool] = None


def _respond(report: Dict[str, Any]) -> JSONResponse:
    return JSONResponse(status_code=status_code_for(report), content=report)


def _run(command: str, body: Any) -> JSONResponse:
    try:
        problem = load_problem(body)
    except ProblemFileError as e:
        logger.error(f"Error parsing problem for {command}: {e}")
        return _respond({"command": command, "status": "error", **e.to_dict()})
    if command in ("strip", "ibc") and problem.kind != command:
        return _respond({"command": command, "status": "error", "message": f"{command} needs a {command} payload"})
    options = resolve_options(problem, settings)
    return _respond(COMMANDS[command](problem, options))


@app.get("/")
async def root():
    return {"service": "Germ Cohomology Engine", "version": VERSION, "docs": "/docs"}


@app.get("/health")
async def health_check():
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "version": VERSION,
        "workers": settings.workers,
        "checked": settings.checked,
    }


@app.get("/api/capabilities")
async def get_capabilities():
    return {
        "commands": {
            "validate": {
                "description": "Composition-zero, indicial identity and ideal boundary checks",
                "payloads": ["complex", "indicial", "strip", "ibc", "generator"],
            },
            "analyze": {
                "description": "Spectrum scan, germ cohomology and pairing certification per degree",
                "payloads": ["complex", "indicial", "generator"],
                "options": ["depth", "degree", "candidates", "checked", "seed", "workers"],
            },
            "reduce": {
                "description": "Recursive nondegeneracy certificate through Schur reduction",
                "payloads": ["complex", "indicial", "generator"],
                "options": ["degree", "candidates", "order", "checked"],
            },
            "strip": {
                "description": "Strip pairing of log sections through their Mellin singular parts",
                "payloads": ["strip"],
                "options": ["checked"],
            },
            "ibc": {
                "description": "Ideal boundary conditions, quotient cohomology and chart systems",
                "payloads": ["ibc"],
                "options": ["seed"],
            },
            "corpus": {
                "description": "Gauge-generated regression corpus",
                "options": ["seed", "count", "checked"],
            },
        }
    }


@app.post("/api/validate")
async def validate(body: Dict[str, Any]):
    return _run("validate", body)


@app.post("/api/analyze")
async def analyze(body: Dict[str, Any]):
    return _run("analyze", body)


@app.post("/api/reduce")
async def reduce(body: Dict[str, Any]):
    return _run("reduce", body)


@app.post("/api/strip")
async def strip(body: Dict[str, Any]):
    return _run("strip", body)


@app.post("/api/ibc")
async def ibc(body: Dict[str, Any]):
    return _run("ibc", body)


# Problem file upload, dispatched by payload kind unless a command is given
@app.post("/api/problems/upload")
async def upload_problem(file: UploadFile = File(...), command: Optional[str] = Form(None)):
    content = await file.read()
    try:
        problem = load_problem(content)
    except ProblemFileError as e:
        logger.error(f"Error parsing uploaded file {file.filename}: {e}")
        return _respond({"command": command or "upload", "status": "error", **e.to_dict()})
    if problem.generator is not None and problem.generator.count is not None:
        options = resolve_options(problem, settings)
        return _respond(corpus_agent.run(problem.generator.seed, problem.generator.count, options.checked))
    name = command or UPLOAD_DISPATCH[problem.kind]
    if name not in COMMANDS:
        return _respond({"command": name, "status": "error", "message": f"unknown command {name!r}"})
    logger.info(f"upload {file.filename}: {problem.kind} payload -> {name}")
    return _run(name, problem.model_dump())


@app.post("/api/corpus")
async def corpus(request: CorpusRequest):
    checked = settings.checked if request.checked is None else request.checked
    return _respond(corpus_agent.run(request.seed, request.count, checked, settings.workers))


if __name__ == "__main__":
    uvicorn.run(app, host=settings.api_host, port=settings.port)
