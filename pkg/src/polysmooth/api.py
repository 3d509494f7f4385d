"""HTTP service around the analysis core."""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__, service
from .errors import ParseError, PolysmoothError, TopologyError
from .schemas import (AnalyzeRequest, AnalyzeResponse, ClassifyRequest, ClassifyResponse, DualRequest,
                      DualResponse, GaussImageRequest, GaussImageResponse, GenerateRequest, MeshIn,
                      MeshOut, TransformRequest)

app = FastAPI(title="polysmooth", version=__version__)


@app.exception_handler(PolysmoothError)
async def _domain_error(request: Request, exc: PolysmoothError):
    # malformed input is a client error; geometric failures are unprocessable
    status = 400 if isinstance(exc, (ParseError, TopologyError)) else 422
    return JSONResponse(status_code=status, content=service.error_payload(exc))


def _mesh(m: MeshIn):
    return service.parse_mesh(m.data, m.format)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/fixtures")
def fixtures():
    from .fixtures import FIXTURES
    return {"fixtures": sorted(FIXTURES)}


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest):
    return service.analyze(_mesh(req.mesh), req.colored_obj)


@app.post("/classify", response_model=ClassifyResponse)
def classify(req: ClassifyRequest):
    return service.classify(_mesh(req.mesh), req.vertex, req.face)


@app.post("/gaussimage", response_model=GaussImageResponse)
def gaussimage(req: GaussImageRequest):
    return service.gauss_images(_mesh(req.mesh), req.vertices, req.per_arc)


@app.post("/dual", response_model=DualResponse)
def dual(req: DualRequest):
    return service.dual(_mesh(req.mesh), req.center, req.check)


@app.post("/transform", response_model=MeshOut)
def transform(req: TransformRequest):
    return service.transform(_mesh(req.mesh), req.matrix)


@app.post("/generate", response_model=MeshOut)
def generate(req: GenerateRequest):
    return service.generate(req.fixture, req.params)
