"""Read-only HTTP API over a finished export bundle."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import formats
from .errors import ValidationError

CACHE_CONTROL = "max-age=3600"


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def check_bundle(bundle_dir: str | Path) -> Path:
    bundle = Path(bundle_dir)
    if (bundle / ".incomplete").exists():
        raise ValidationError(f"bundle {bundle} is marked incomplete")
    for required in ("model.json", "dataset.json", "analytics/summaries.json"):
        if not (bundle / required).exists():
            raise ValidationError(f"bundle {bundle} is missing {required}")
    return bundle


def create_app(bundle_dir: str | Path) -> FastAPI:
    bundle = check_bundle(bundle_dir)
    model_doc = formats.read_json(bundle / "model.json")
    dataset_doc = formats.read_json(bundle / "dataset.json")
    summaries_doc = formats.read_json(bundle / "analytics" / "summaries.json")
    similarity_doc = formats.read_json(bundle / "analytics" / "similarity.json")
    layer_names = [layer["name"] for layer in model_doc["layers"]]
    n_classes = len(dataset_doc["class_names"])

    app = FastAPI(title="attrigraph", docs_url=None, redoc_url=None)

    @app.middleware("http")
    async def add_cache_control(request: Request, call_next):
        response = await call_next(request)
        response.headers["Cache-Control"] = CACHE_CONTROL
        return response

    @app.get("/api/meta")
    def meta():
        layers = []
        for layer in model_doc["layers"]:
            channels = sum(
                _branch_out_channels(bundle, branch) for branch in layer["branches"]
            )
            layers.append({"name": layer["name"], "channels": channels})
        return {
            "schema": formats.SCHEMA_VERSION,
            "model": model_doc["name"],
            "dataset": dataset_doc["name"],
            "n_classes": n_classes,
            "n_images": len(dataset_doc["images"]),
            "layers": layers,
        }

    @app.get("/api/classes")
    def classes(sort: str = "similarity:0", layer: str | None = None):
        layer = layer or similarity_doc["default_layer"]
        if layer not in similarity_doc["layers"]:
            return _error(404, f"unknown layer {layer!r}")
        sim_matrix = similarity_doc["layers"][layer]
        rows = [dict(entry) for entry in summaries_doc["classes"]]

        kind, _, arg = sort.partition(":")
        if kind == "similarity":
            if not arg.lstrip("-").isdigit():
                return _error(400, f"malformed sort parameter {sort!r}")
            selected = int(arg)
            if not 0 <= selected < n_classes:
                return _error(404, f"unknown class {selected}")
            for row in rows:
                row["similarity"] = sim_matrix[selected][row["id"]]
            rows.sort(key=lambda r: (r["id"] != selected, -r["similarity"], r["id"]))
        elif kind == "accuracy" and arg in ("asc", "desc"):
            for row in rows:
                row["similarity"] = None
            sign = 1 if arg == "asc" else -1
            rows.sort(key=lambda r: (sign * r["top1_accuracy"], r["id"]))
        else:
            return _error(400, f"malformed sort parameter {sort!r}")
        return {"schema": formats.SCHEMA_VERSION, "layer": layer, "sort": sort, "classes": rows}

    @app.get("/api/class/{class_id}/graph")
    def class_graph(class_id: int):
        path = bundle / "graphs" / f"class_{class_id}.json"
        if not 0 <= class_id < n_classes or not path.exists():
            return _error(404, f"unknown class {class_id}")
        return formats.read_json(path)

    @app.get("/api/embedding/{layer}")
    def embedding(layer: str):
        path = bundle / "analytics" / f"embedding_{layer}.json"
        if layer not in layer_names or not path.exists():
            return _error(404, f"unknown layer {layer!r}")
        return formats.read_json(path)

    @app.get("/api/channel/{layer}/{channel}/examples")
    def channel_examples(layer: str, channel: int, k: int = 10):
        path = bundle / "analytics" / f"examples_{layer}.json"
        if layer not in layer_names or not path.exists():
            return _error(404, f"unknown layer {layer!r}")
        if k < 1:
            return _error(400, f"k must be >= 1, got {k}")
        doc = formats.read_json(path)
        if not 0 <= channel < len(doc["channels"]):
            return _error(404, f"unknown channel {channel} in layer {layer!r}")
        return {
            "schema": formats.SCHEMA_VERSION,
            "layer": layer,
            "channel": channel,
            "examples": doc["channels"][channel][:k],
        }

    return app


def _branch_out_channels(bundle: Path, branch: dict) -> int:
    kernel = branch["steps"][-1]["kernel"]
    data = formats.read_tensor(bundle / "weights" / f"{kernel}.atg")
    return int(data.shape[3])


def serve(bundle_dir: str | Path, port: int = 8000, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(bundle_dir), host=host, port=port)
