#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "manifold_gfdm/cli.hpp"
#include "manifold_gfdm/sampling.hpp"
#include "manifold_gfdm/vtk.hpp"

using namespace mgfdm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mgfdm_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// minimal legacy-VTK polydata reader used as the format oracle
struct ParsedVtk {
    std::vector<Vec3> points;
    std::map<std::string, std::vector<double>> arrays;
};

ParsedVtk parse_vtk(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    ParsedVtk out;
    std::getline(in, line);
    REQUIRE(line == "# vtk DataFile Version 3.0");
    std::getline(in, line);  // title
    std::getline(in, line);
    REQUIRE(line == "ASCII");
    std::getline(in, line);
    REQUIRE(line == "DATASET POLYDATA");

    std::string word;
    in >> word;
    REQUIRE(word == "POINTS");
    int n;
    std::string dtype;
    in >> n >> dtype;
    REQUIRE(dtype == "double");
    out.points.resize(n);
    for (int i = 0; i < n; ++i) in >> out.points[i][0] >> out.points[i][1] >> out.points[i][2];

    in >> word;
    REQUIRE(word == "VERTICES");
    int cells, ints;
    in >> cells >> ints;
    REQUIRE(cells == n);
    REQUIRE(ints == 2 * n);
    for (int i = 0; i < cells; ++i) {
        int one, idx;
        in >> one >> idx;
        REQUIRE(one == 1);
        REQUIRE(idx == i);
    }

    in >> word;
    REQUIRE(word == "POINT_DATA");
    int pd;
    in >> pd;
    REQUIRE(pd == n);
    while (in >> word) {
        REQUIRE(word == "SCALARS");
        std::string name, comps;
        in >> name >> dtype >> comps;
        REQUIRE(dtype == "double");
        in >> word >> dtype;  // LOOKUP_TABLE default
        auto& arr = out.arrays[name];
        arr.resize(n);
        for (int i = 0; i < n; ++i) in >> arr[i];
    }
    return out;
}

}  // namespace

TEST_CASE("doubles survive the 17-digit text round trip", "[io]") {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 12345.6789, 2e-5, 0.0}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("atomic writes leave no temp files", "[io]") {
    const fs::path dir = fresh_dir("atomic");
    write_text_atomic(dir / "a.txt", "hello\n");
    CHECK(read_text(dir / "a.txt") == "hello\n");
    int entries = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        ++entries;
        CHECK(e.path().extension() != ".tmp");
    }
    CHECK(entries == 1);
}

TEST_CASE("cloud CSV round trip preserves every value", "[io]") {
    SurfaceCloud cloud = sample_cylinder_patch(1.0, 3.0, 1.0, 0.2);
    cloud.tag_edges(Boundary::GammaI, Boundary::GammaP1, Boundary::GammaA, Boundary::GammaP2);
    const std::string csv = cloud_to_csv(cloud);
    CHECK(csv.rfind("x1,x2,x3,n1,n2,n3,hs,region,boundary\n", 0) == 0);

    const SurfaceCloud back = cloud_from_csv(csv);
    REQUIRE(back.size() == cloud.size());
    for (int i = 0; i < cloud.size(); ++i) {
        CHECK(back.positions[i] == cloud.positions[i]);
        CHECK(back.normals[i] == cloud.normals[i]);
        CHECK(back.hs_values[i] == cloud.hs_values[i]);
        CHECK(back.region[i] == cloud.region[i]);
        CHECK(back.boundary[i] == cloud.boundary[i]);
    }
    CHECK_THROWS_AS(cloud_from_csv("nonsense\n"), IoError);
}

TEST_CASE("vtk writer emits parseable polydata", "[io]") {
    CaseResult r;
    r.cloud = SurfaceCloud{};
    r.cloud.append(Vec3(0, 0, 0), Vec3(0, 0, 1), 0.0);
    r.cloud.append(Vec3(1, 0, 0), Vec3(0, 0, 1), 0.0);
    r.cloud.append(Vec3(0, 1, 0), Vec3(0, 0, 1), 0.0);
    r.field.values = Eigen::VectorXcd::Zero(3);
    r.field.values << Complex(0.25, -1.0 / 3.0), Complex(2e-5, 0.125), Complex(-1.5, 0.75);

    const std::string vtk = field_to_vtk(r, "three nodes");
    CHECK(vtk.find("POINTS 3 double") != std::string::npos);

    const ParsedVtk parsed = parse_vtk(vtk);
    REQUIRE(parsed.points.size() == 3);
    REQUIRE(parsed.arrays.count("re_u") == 1);
    REQUIRE(parsed.arrays.count("im_u") == 1);
    REQUIRE(parsed.arrays.count("abs_u") == 1);
    for (int i = 0; i < 3; ++i) {
        CHECK(parsed.points[i] == r.cloud.positions[i]);
        CHECK(parsed.arrays.at("re_u")[i] == r.field.values[i].real());
        CHECK(parsed.arrays.at("im_u")[i] == r.field.values[i].imag());
        CHECK(std::abs(parsed.arrays.at("abs_u")[i] - std::abs(r.field.values[i])) <= 1e-15);
    }
}

TEST_CASE("command line parsing", "[cli]") {
    SECTION("documented example with defaulted support") {
        const RunConfig cfg =
            parse_run_config({"run-case", "sphere", "--n", "2500", "--omega", "1000"});
        CHECK(cfg.command == Command::RunCase);
        CHECK(cfg.case_id == CaseId::Sphere);
        CHECK(cfg.n == 2500);
        CHECK(cfg.omega == 1000.0);
        CHECK(cfg.m == 40);
    }
    SECTION("empty argv lists the commands") {
        try {
            parse_run_config({});
            FAIL("expected UsageError");
        } catch (const UsageError& e) {
            const std::string what = e.what();
            for (const char* cmd : {"run-case", "sweep-frequency", "bandgap-scan",
                                    "curvature-sweep", "dump-cloud"})
                CHECK(what.find(cmd) != std::string::npos);
        }
    }
    SECTION("support size below the minimum is rejected") {
        CHECK_THROWS_AS(parse_run_config({"run-case", "sphere", "--m", "5"}), UsageError);
    }
    SECTION("unknown keys are rejected") {
        CHECK_THROWS_AS(parse_run_config({"run-case", "sphere", "--banana", "1"}), UsageError);
        CHECK_THROWS_AS(parse_run_config({"frobnicate"}), UsageError);
        CHECK_THROWS_AS(parse_run_config({"run-case", "torus"}), UsageError);
    }
    SECTION("out-of-range numerics are rejected") {
        CHECK_THROWS_AS(parse_run_config({"run-case", "sphere", "--n", "2"}), UsageError);
        CHECK_THROWS_AS(parse_run_config({"sweep-frequency", "--ff", "0.9"}), UsageError);
        CHECK_THROWS_AS(parse_run_config({"sweep-frequency", "--ka", "1.0"}), UsageError);
        CHECK_THROWS_AS(parse_run_config({"run-case", "sphere", "--omega", "x"}), UsageError);
    }
    SECTION("config file values apply, command line wins") {
        const fs::path dir = fresh_dir("config");
        write_text_atomic(dir / "run.cfg",
                          "# comment\nm = 60\nomega = 2500\nout = unused_dir\n");
        const RunConfig cfg = parse_run_config({"run-case", "sphere", "--config",
                                                (dir / "run.cfg").string(), "--omega", "1000"});
        CHECK(cfg.m == 60);
        CHECK(cfg.omega == 1000.0);
        CHECK(cfg.out_dir == "unused_dir");

        write_text_atomic(dir / "bad.cfg", "weird_key = 1\n");
        CHECK_THROWS_AS(
            parse_run_config({"run-case", "sphere", "--config", (dir / "bad.cfg").string()}),
            UsageError);
    }
    SECTION("boolean flags") {
        const RunConfig cfg = parse_run_config(
            {"sweep-frequency", "--literal-transmission-formula", "--steps", "3"});
        CHECK(cfg.literal_transmission);
        CHECK(cfg.steps == 3);
    }
}

TEST_CASE("run-case writes artifacts and a summary", "[cli]") {
    const fs::path dir = fresh_dir("run_sphere");
    RunConfig cfg = parse_run_config({"run-case", "sphere", "--n", "400", "--omega", "1000",
                                      "--out", dir.string()});
    std::ostringstream summary;
    CHECK(run(cfg, summary) == 0);
    CHECK(summary.str().find("global_error=") != std::string::npos);
    CHECK(fs::exists(dir / "field.csv"));
    CHECK(fs::exists(dir / "field.vtk"));
    CHECK(fs::exists(dir / "summary.txt"));

    // determinism: an identical run produces byte-identical files
    const fs::path dir2 = fresh_dir("run_sphere2");
    cfg.out_dir = dir2.string();
    std::ostringstream summary2;
    CHECK(run(cfg, summary2) == 0);
    CHECK(read_text(dir / "field.csv") == read_text(dir2 / "field.csv"));
    CHECK(read_text(dir / "field.vtk") == read_text(dir2 / "field.vtk"));
}

TEST_CASE("failed runs leave no partial outputs", "[cli]") {
    const fs::path dir = fresh_dir("run_fail");
    // spacing coarser than the patch: sampling throws before anything lands
    RunConfig cfg = parse_run_config(
        {"run-case", "cylinder", "--dh", "50", "--out", dir.string()});
    std::ostringstream sink;
    CHECK_THROWS_AS(run(cfg, sink), InvalidPatch);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("dump-cloud writes the tagged cloud", "[cli]") {
    const fs::path dir = fresh_dir("dump");
    RunConfig cfg = parse_run_config(
        {"dump-cloud", "sphere", "--n", "300", "--out", dir.string()});
    std::ostringstream sink;
    CHECK(run(cfg, sink) == 0);
    const SurfaceCloud cloud = cloud_from_csv(read_text(dir / "cloud.csv"));
    CHECK(cloud.size() == 300);
}

TEST_CASE("worker count honors the environment cap", "[cli]") {
    setenv("MANIFOLD_GFDM_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    unsetenv("MANIFOLD_GFDM_THREADS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("sweep command writes one spectrum row per step", "[cli]") {
    const fs::path dir = fresh_dir("sweep");
    RunConfig cfg = parse_run_config({"sweep-frequency", "--ff", "0.4", "--dh", "0.1",
                                      "--m", "30", "--ka", "0", "--steps", "3",
                                      "--f-lo", "0.4", "--f-hi", "0.6",
                                      "--out", dir.string()});
    std::ostringstream summary;
    CHECK(run(cfg, summary) == 0);
    CHECK(summary.str().find("min_T_db=") != std::string::npos);
    const std::string csv = read_text(dir / "spectrum.csv");
    CHECK(csv.rfind("f_norm,T_db\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 steps
}

TEST_CASE("stencil dump flag writes the weight table", "[cli]") {
    const fs::path dir = fresh_dir("stencil_dump");
    RunConfig cfg = parse_run_config({"run-case", "periodic-inclusions", "--dh", "0.1",
                                      "--m", "30", "--f-norm", "0.5", "--stencil-dump",
                                      "--out", dir.string()});
    std::ostringstream sink;
    CHECK(run(cfg, sink) == 0);
    CHECK(fs::exists(dir / "stencils.csv"));
    CHECK(read_text(dir / "stencils.csv").rfind("center,neighbor,deriv_code,weight\n", 0) == 0);
}
