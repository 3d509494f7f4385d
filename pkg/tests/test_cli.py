import io
import json

import numpy as np
import pytest

from polysmooth import fixtures as fx
from polysmooth.cli import main
from polysmooth.mesh import export_mesh, export_obj, load_mesh


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def write_mesh(tmp_path):
    def write(mesh, name="m.obj", fmt="OBJ"):
        p = tmp_path / name
        p.write_bytes(export_mesh(mesh, fmt))
        return str(p)
    return write


def test_analyze_smooth_and_violations(write_mesh):
    code, out, _ = run("analyze", write_mesh(fx.cube()))
    assert code == 0 and out.startswith("smooth: 0 violation(s)")
    code, out, _ = run("analyze", write_mesh(fx.monkey_star()))
    assert code == 1
    assert "face 0: condition 4 MonkeySaddle" in out


def test_analyze_json_and_colored_obj(write_mesh, tmp_path):
    j, c = tmp_path / "r.json", tmp_path / "c.obj"
    code, _, _ = run("analyze", write_mesh(fx.hex_saddle()), "--json", str(j), "--colored-obj", str(c))
    assert code == 0
    assert json.loads(j.read_text())["smooth"] is True
    assert "# face 0 color" in c.read_text()
    code, out, _ = run("analyze", write_mesh(fx.hex_saddle()), "--json", "-")
    assert code == 0 and json.loads(out)["schema"] == 1


def test_analyze_off_input(write_mesh):
    code, _, _ = run("analyze", write_mesh(fx.cube(), "m.off", "OFF"))
    assert code == 0


def test_classify(write_mesh):
    p = write_mesh(fx.pseudo_triangle_b_star())
    code, out, _ = run("classify", p, "--vertex", "0")
    assert code == 0
    assert json.loads(out)["record"]["label"] == "PseudoTriangle_B"
    code, out, _ = run("classify", write_mesh(fx.antipodal_star(), "a.obj"), "--vertex", "0")
    assert code == 1


def test_classify_needs_one_target(write_mesh):
    with pytest.raises(SystemExit):
        run("classify", write_mesh(fx.cube()))


def test_gaussimage(write_mesh, tmp_path):
    svg = tmp_path / "g.svg"
    code, out, _ = run("gaussimage", write_mesh(fx.saddle_star()), "--vertex", "0", "--svg", str(svg))
    assert code == 0
    assert svg.read_text().startswith("<svg")
    assert "simple=True" in out
    code, _, _ = run("gaussimage", write_mesh(fx.graph_mesh("saddle", "b", 2), "b.obj"), "--vertex", "12")
    assert code == 1


def test_dual_round_trip(write_mesh, tmp_path):
    out_path = tmp_path / "d.obj"
    code, out, _ = run("dual", write_mesh(fx.convex_cap(3)), "-o", str(out_path))
    assert code == 0
    assert "duality ok=True" in out
    dual = load_mesh(out_path.read_text(), "OBJ")
    assert dual.n_faces == len(fx.convex_cap(3).interior_vertices())


def test_dual_with_center_on_face_plane_is_an_error(write_mesh):
    code, _, err = run("dual", write_mesh(fx.cube()), "--center", "1,1,1")
    assert code == 2 and "CenterOnFacePlane" in err


def test_transform(write_mesh, tmp_path):
    mat = tmp_path / "m.json"
    mat.write_text(json.dumps(np.diag([2.0, 2.0, 2.0, 1.0]).tolist()))
    out_path = tmp_path / "t.obj"
    code, _, _ = run("transform", write_mesh(fx.hex_saddle()), "--matrix", str(mat), "-o", str(out_path))
    assert code == 0
    assert np.allclose(load_mesh(out_path.read_text(), "OBJ").vertices, 2 * fx.hex_saddle().vertices)


def test_generate(tmp_path):
    code, out, _ = run("generate", "saddle_star")
    assert code == 0 and out.startswith("# fixture saddle_star")
    assert load_mesh(out, "OBJ").faces == fx.saddle_star().faces
    assert out.split("\n", 1)[1] == export_obj(fx.saddle_star()).decode()
    p = tmp_path / "g.obj"
    code, _, _ = run("generate", "graph_mesh", "tiling=\"b\"", "n=3", "-o", str(p))
    assert code == 0
    assert load_mesh(p.read_text(), "OBJ").n_vertices == 49


@pytest.mark.parametrize("argv", [
    ("generate", "nope"),
    ("generate", "graph_mesh", "n=1"),
    ("analyze", "/nonexistent/mesh.obj"),
])
def test_errors_exit_two(argv):
    code, _, err = run(*argv)
    assert code == 2 and err.startswith("polysmooth: error:")


def test_parse_error_exits_two(tmp_path):
    p = tmp_path / "bad.obj"
    p.write_text("v 0 0\n")
    code, _, err = run("analyze", str(p))
    assert code == 2 and "ParseError" in err


def test_console_script_is_installed():
    import shutil
    import subprocess
    exe = shutil.which("polysmooth")
    if exe is None:
        pytest.skip("package not installed")
    res = subprocess.run([exe, "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("polysmooth ")
