"""FastAPI service exposing the six wire-protocol endpoints.

The app is stateless between requests; model handles live for the process.
Every error body is ``{"error": string}``: 400 for malformed requests, 413
for oversized ones, 500 for model failures.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from typofix_adapters.config import AdapterConfig
from typofix_adapters.errors import StartupError
from typofix_adapters.registry import build_models
from typofix_adapters.wire import decode_image, encode_image


class Box(BaseModel):
    left: int = Field(ge=0)
    top: int = Field(ge=0)
    width: int = Field(ge=1)
    height: int = Field(ge=1)


class Region(BaseModel):
    polygon: list[list[float]] = Field(min_length=3)


class Element(BaseModel):
    word: str
    width: int = Field(ge=1, le=128)
    height: int = Field(ge=1, le=128)
    left: int = Field(ge=0, le=127)
    top: int = Field(ge=0, le=127)


class EditTarget(BaseModel):
    box: Box
    word: str = Field(min_length=1)


class DetectRequest(BaseModel):
    image: str


class RecognizeRequest(BaseModel):
    image: str
    regions: list[Region]


class EraseRequest(BaseModel):
    image: str
    masks: list[Box]
    erase_all: bool = False


class PlanLayoutRequest(BaseModel):
    image: str
    existing: list[Element]
    missing: list[str]


class EditTextRequest(BaseModel):
    image: str
    targets: list[EditTarget]
    # Optional stream identity some test doubles use; real editors ignore it.
    rng: dict | None = None


class AugmentRequest(BaseModel):
    prompt: str


def create_app(config: AdapterConfig | None = None) -> FastAPI:
    """Build the service; raises :class:`StartupError` listing every port
    whose model failed to load."""
    config = config or AdapterConfig()
    models = build_models(config)
    app = FastAPI(title="typofix-adapters", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.models = models

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(part) for part in first.get("loc", ()))
        message = f"invalid request: {where}: {first.get('msg', 'validation failed')}"
        return JSONResponse(status_code=400, content={"error": message})

    @app.exception_handler(Exception)
    async def on_error(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.middleware("http")
    async def limit_request_size(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and int(length) > config.max_request_bytes:
            return JSONResponse(
                status_code=413,
                content={
                    "error": f"request of {length} bytes exceeds the "
                    f"{config.max_request_bytes}-byte limit"
                },
            )
        return await call_next(request)

    def model(port: str):
        try:
            return models[port]
        except KeyError:
            raise KeyError(f"port {port!r} is not enabled on this adapter")

    @app.post("/v1/detect")
    def detect(body: DetectRequest):
        image = decode_image(body.image)
        polygons = model("detector").detect(image)
        return {"regions": [{"polygon": polygon} for polygon in polygons]}

    @app.post("/v1/recognize")
    def recognize(body: RecognizeRequest):
        image = decode_image(body.image)
        polygons = [region.polygon for region in body.regions]
        return {"words": model("recognizer").recognize(image, polygons)}

    @app.post("/v1/erase")
    def erase(body: EraseRequest):
        image = decode_image(body.image)
        masks = [box.model_dump() for box in body.masks]
        erased = model("eraser").erase(image, masks, body.erase_all)
        return {"image": encode_image(erased)}

    @app.post("/v1/plan_layout")
    def plan_layout(body: PlanLayoutRequest):
        image = decode_image(body.image)
        existing = [element.model_dump() for element in body.existing]
        elements = model("planner").plan(image, existing, list(body.missing))
        return {"elements": elements}

    @app.post("/v1/edit_text")
    def edit_text(body: EditTextRequest):
        image = decode_image(body.image)
        targets = [target.model_dump() for target in body.targets]
        edited = model("editor").edit(image, targets)
        return {"image": encode_image(edited)}

    @app.post("/v1/augment")
    def augment(body: AugmentRequest):
        return {"prompt": model("augmenter").augment(body.prompt)}

    @app.get("/v1/capabilities")
    def capabilities():
        concurrency = {
            port: getattr(instance, "concurrency", "parallel")
            for port, instance in models.items()
        }
        return {"ports": sorted(models), "concurrency": concurrency}

    return app


def serve(config: AdapterConfig | None = None, host: str = "127.0.0.1", port: int = 8700) -> None:
    """Run the adapter service until interrupted."""
    try:
        import uvicorn
    except ImportError:
        raise StartupError({"service": "uvicorn is not installed (pip install uvicorn)"})
    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="warning")
