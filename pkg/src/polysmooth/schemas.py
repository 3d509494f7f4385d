"""Request and response models for the HTTP service."""

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

Vec3 = Tuple[float, float, float]


class MeshIn(BaseModel):
    data: str = Field(..., description="mesh file contents")
    format: Literal["obj", "off"] = "obj"


class AnalyzeRequest(BaseModel):
    mesh: MeshIn
    colored_obj: bool = False


class AnalyzeResponse(BaseModel):
    smooth: bool
    conditions: Dict[str, bool]
    n_violations: int
    report: Dict[str, Any]
    colored_obj: Optional[str] = None


class ClassifyRequest(BaseModel):
    mesh: MeshIn
    vertex: Optional[int] = None
    face: Optional[int] = None

    @model_validator(mode="after")
    def _one_target(self):
        if (self.vertex is None) == (self.face is None):
            raise ValueError("give exactly one of vertex or face")
        return self


class ClassifyResponse(BaseModel):
    kind: Literal["vertex", "face"]
    id: int
    ok: bool
    record: Dict[str, Any]
    violations: List[Dict[str, Any]]


class GaussImageRequest(BaseModel):
    mesh: MeshIn
    vertices: List[int] = Field(..., min_length=1)
    per_arc: int = Field(32, ge=2, le=1024)


class GaussImageOut(BaseModel):
    vertex: int
    normals: List[Vec3]
    simple: bool
    K: float


class GaussImageResponse(BaseModel):
    images: List[GaussImageOut]
    svg: str


class DualRequest(BaseModel):
    mesh: MeshIn
    center: Optional[Vec3] = None
    check: bool = True


class DualityOut(BaseModel):
    ok: bool
    signs_all_match: bool
    inflection_all_match: bool
    double_dual_deviation: float
    gauss_projection_deviation: float
    primal_smooth: Optional[bool]
    dual_smooth: Optional[bool]
    problems: List[str]


class DualResponse(BaseModel):
    center: Vec3
    obj: str
    vertex_face: List[int]
    face_vertex: List[int]
    duality: Optional[DualityOut] = None


class TransformRequest(BaseModel):
    mesh: MeshIn
    matrix: List[float] = Field(..., min_length=16, max_length=16)


class MeshOut(BaseModel):
    obj: str
    n_vertices: int
    n_faces: int


class GenerateRequest(BaseModel):
    fixture: str
    params: Dict[str, Any] = Field(default_factory=dict)


class ErrorOut(BaseModel):
    error: str
    detail: str
