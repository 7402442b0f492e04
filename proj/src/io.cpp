#include "isoc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace isoc {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i)
        arr.push_back(v[i]);
    return arr;
}

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array())
        throw IoError(std::string(what) + ": expected a nested array");
    const int rows = static_cast<int>(j.size());
    if (rows == 0)
        return Matrix(0, 0);
    const int cols = static_cast<int>(j.front().size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw IoError(std::string(what) + ": ragged matrix rows");
        for (int c = 0; c < cols; ++c)
            m(i, c) = row[c].get<double>();
    }
    return m;
}

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array())
        throw IoError(std::string(what) + ": expected an array");
    Vector v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i)
        v[i] = j[i].get<double>();
    return v;
}

std::vector<Matrix> matrix_list_from_json(const json& j, const char* what) {
    std::vector<Matrix> out;
    for (const auto& entry : j)
        out.push_back(matrix_from_json(entry, what));
    return out;
}

std::vector<Vector> vector_list_from_json(const json& j, const char* what) {
    std::vector<Vector> out;
    for (const auto& entry : j)
        out.push_back(vector_from_json(entry, what));
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_csv_row(const std::string& line, const char* what) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw IoError(std::string(what) + ": malformed numeric cell '" + cell + "'");
        }
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open for reading: " + path);
    return f;
}

} // namespace

json model_to_json(const ModelBundle& bundle) {
    json j;
    j["system"] = {{"A", matrix_to_json(bundle.system.A)},
                   {"B", matrix_to_json(bundle.system.B)},
                   {"H", matrix_to_json(bundle.system.H)},
                   {"M", matrix_to_json(bundle.system.M)},
                   {"x0_mean", vector_to_json(bundle.system.x0_mean)},
                   {"Omega_x0", matrix_to_json(bundle.system.Omega_x0)},
                   {"horizon", bundle.system.horizon},
                   {"dt", bundle.system.dt}};
    json qn = json::array(), qq = json::array(), qr = json::array();
    for (const auto& q : bundle.cost.qN_basis)
        qn.push_back(vector_to_json(q));
    for (const auto& q : bundle.cost.qQ_basis)
        qq.push_back(vector_to_json(q));
    for (const auto& q : bundle.cost.qR_basis)
        qr.push_back(vector_to_json(q));
    j["cost"] = {{"qN_basis", qn}, {"qQ_basis", qq}, {"qR_basis", qr},
                 {"s", vector_to_json(bundle.cost.s)}};
    json fs = json::array(), gs = json::array();
    for (const auto& f : bundle.noise.F)
        fs.push_back(matrix_to_json(f));
    for (const auto& g : bundle.noise.G)
        gs.push_back(matrix_to_json(g));
    j["noise"] = {{"Sigma_xi", matrix_to_json(bundle.noise.Sigma_xi)},
                  {"Sigma_omega", matrix_to_json(bundle.noise.Sigma_omega)},
                  {"F", fs},
                  {"sigma_u", vector_to_json(bundle.noise.sigma_u)},
                  {"G", gs},
                  {"sigma_x", vector_to_json(bundle.noise.sigma_x)}};
    if (bundle.noise.Omega_eta.size() > 0)
        j["noise"]["Omega_eta"] = matrix_to_json(bundle.noise.Omega_eta);
    json groups = json::array();
    for (const auto& group : bundle.layout.free_sigma_groups) {
        if (group.size() == 1)
            groups.push_back(group.front());
        else
            groups.push_back(group);
    }
    j["layout"] = {{"free_s_indices", bundle.layout.free_s_indices},
                   {"free_sigma_indices", groups}};
    return j;
}

ModelBundle model_from_json(const json& j) {
    try {
        ModelBundle bundle;
        const auto& sys = j.at("system");
        bundle.system.A = matrix_from_json(sys.at("A"), "system.A");
        bundle.system.B = matrix_from_json(sys.at("B"), "system.B");
        bundle.system.H = matrix_from_json(sys.at("H"), "system.H");
        bundle.system.M = matrix_from_json(sys.at("M"), "system.M");
        bundle.system.x0_mean = vector_from_json(sys.at("x0_mean"), "system.x0_mean");
        bundle.system.Omega_x0 = matrix_from_json(sys.at("Omega_x0"), "system.Omega_x0");
        bundle.system.horizon = sys.at("horizon").get<int>();
        bundle.system.dt = sys.value("dt", 0.0);

        const auto& cost = j.at("cost");
        bundle.cost.qN_basis = vector_list_from_json(cost.at("qN_basis"), "cost.qN_basis");
        bundle.cost.qQ_basis = vector_list_from_json(cost.at("qQ_basis"), "cost.qQ_basis");
        bundle.cost.qR_basis = vector_list_from_json(cost.at("qR_basis"), "cost.qR_basis");
        bundle.cost.s = vector_from_json(cost.at("s"), "cost.s");

        const auto& noise = j.at("noise");
        bundle.noise.Sigma_xi = matrix_from_json(noise.at("Sigma_xi"), "noise.Sigma_xi");
        bundle.noise.Sigma_omega = matrix_from_json(noise.at("Sigma_omega"), "noise.Sigma_omega");
        bundle.noise.F = matrix_list_from_json(noise.value("F", json::array()), "noise.F");
        bundle.noise.sigma_u =
            vector_from_json(noise.value("sigma_u", json::array()), "noise.sigma_u");
        bundle.noise.G = matrix_list_from_json(noise.value("G", json::array()), "noise.G");
        bundle.noise.sigma_x =
            vector_from_json(noise.value("sigma_x", json::array()), "noise.sigma_x");
        if (noise.contains("Omega_eta"))
            bundle.noise.Omega_eta = matrix_from_json(noise.at("Omega_eta"), "noise.Omega_eta");

        const auto& layout = j.at("layout");
        bundle.layout.free_s_indices =
            layout.at("free_s_indices").get<std::vector<int>>();
        for (const auto& entry : layout.at("free_sigma_indices")) {
            if (entry.is_array())
                bundle.layout.free_sigma_groups.push_back(entry.get<std::vector<int>>());
            else
                bundle.layout.free_sigma_groups.push_back({entry.get<int>()});
        }

        bundle.validate();
        return bundle;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed model file: ") + e.what());
    }
}

ModelBundle load_model(const std::string& spec) {
    if (spec == "builtin:reaching-lqg")
        return build_reaching_model(ModelKind::Lqg);
    if (spec == "builtin:reaching-lqs")
        return build_reaching_model(ModelKind::Lqs);
    return model_from_json(load_json(spec));
}

void save_model(const ModelBundle& bundle, const std::string& path) {
    save_json(model_to_json(bundle), path);
}

namespace {

void write_moment_rows(std::ofstream& f, const std::vector<Vector>& means,
                       const std::vector<Matrix>& covs) {
    const int dim = static_cast<int>(means.front().size());
    f << "t";
    for (int i = 1; i <= dim; ++i)
        f << ",mean_" << i;
    for (int i = 1; i <= dim; ++i)
        for (int j = 1; j <= dim; ++j)
            f << ",cov_" << i << "_" << j;
    f << "\n";
    for (std::size_t t = 0; t < means.size(); ++t) {
        f << t;
        for (int i = 0; i < dim; ++i)
            f << "," << format_double(means[t][i]);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                f << "," << format_double(covs[t](i, j));
        f << "\n";
    }
}

} // namespace

void save_moments_csv(const GroundTruthMoments& moments, const std::string& path) {
    auto f = open_out(path);
    write_moment_rows(f, moments.mean, moments.cov);
}

void save_trajectory_moments_csv(const MomentTrajectory& traj, const std::string& path) {
    auto f = open_out(path);
    write_moment_rows(f, traj.mean, traj.cov);
}

GroundTruthMoments load_moments_csv(const std::string& path) {
    auto f = open_in(path);
    std::string line;
    if (!std::getline(f, line))
        throw IoError("empty moments file: " + path);
    const auto cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
    // 1 + D + D^2 columns
    int dim = -1;
    for (int d = 1; d * d + d + 1 <= cols; ++d)
        if (d * d + d + 1 == cols)
            dim = d;
    if (dim <= 0)
        throw IoError("moments file has an invalid column count: " + path);

    GroundTruthMoments out;
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        const auto row = parse_csv_row(line, "moments csv");
        if (static_cast<int>(row.size()) != cols)
            throw IoError("moments row width mismatch in " + path);
        Vector mean(dim);
        for (int i = 0; i < dim; ++i)
            mean[i] = row[1 + i];
        Matrix cov(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                cov(i, j) = row[1 + dim + i * dim + j];
        out.mean.push_back(std::move(mean));
        out.cov.push_back(std::move(cov));
    }
    out.validate();
    return out;
}

void save_batch_csv(const TrajectoryBatch& batch, const std::string& csv_path,
                    const std::string& sidecar_path) {
    auto f = open_out(csv_path);
    f << "sample,t";
    for (int i = 1; i <= batch.state_dim; ++i)
        f << ",x_" << i;
    f << "\n";
    for (int k = 0; k < batch.sample_count; ++k)
        for (int t = 0; t <= batch.steps; ++t) {
            f << k << "," << t;
            for (int i = 0; i < batch.state_dim; ++i)
                f << "," << format_double(batch.at(k, t, i));
            f << "\n";
        }
    save_json(json{{"seed", batch.seed},
                   {"sample_count", batch.sample_count},
                   {"steps", batch.steps},
                   {"state_dim", batch.state_dim},
                   {"mode", batch.mode == ModelKind::Lqg ? "lqg" : "lqs"}},
              sidecar_path);
}

TrajectoryBatch load_batch_csv(const std::string& csv_path, const std::string& sidecar_path) {
    const json meta = load_json(sidecar_path);
    TrajectoryBatch batch;
    batch.seed = meta.at("seed").get<std::uint64_t>();
    batch.sample_count = meta.at("sample_count").get<int>();
    batch.steps = meta.at("steps").get<int>();
    batch.state_dim = meta.at("state_dim").get<int>();
    batch.mode = meta.at("mode").get<std::string>() == "lqs" ? ModelKind::Lqs : ModelKind::Lqg;
    batch.data.assign(
        static_cast<std::size_t>(batch.sample_count) * (batch.steps + 1) * batch.state_dim, 0.0);

    auto f = open_in(csv_path);
    std::string line;
    std::getline(f, line); // header
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        const auto row = parse_csv_row(line, "batch csv");
        if (static_cast<int>(row.size()) != 2 + batch.state_dim)
            throw IoError("batch row width mismatch in " + csv_path);
        const int k = static_cast<int>(row[0]);
        const int t = static_cast<int>(row[1]);
        if (k < 0 || k >= batch.sample_count || t < 0 || t > batch.steps)
            throw IoError("batch row indices out of range in " + csv_path);
        for (int i = 0; i < batch.state_dim; ++i)
            batch.at(k, t, i) = row[2 + i];
    }
    return batch;
}

namespace {

GridSearchConfig grid_from_json(const json& j) {
    GridSearchConfig cfg;
    cfg.lower = vector_from_json(j.at("lower"), "grid.lower");
    cfg.upper = vector_from_json(j.at("upper"), "grid.upper");
    cfg.grid_points = j.at("grid_points").get<int>();
    cfg.subsets = j.at("subsets").get<std::vector<std::vector<int>>>();
    cfg.shrink_rate = j.value("shrink_rate", 2.0);
    cfg.shrink_trigger = j.value("shrink_trigger", 0.01);
    cfg.stop_threshold = j.value("stop_threshold", 0.001);
    cfg.max_iterations = j.value("max_iterations", 20);
    cfg.elitism = j.value("elitism", true);
    cfg.verbose_trace = j.value("verbose_trace", false);
    const auto& obj = j.at("objective");
    cfg.objective.w_mean = vector_from_json(obj.at("w_mean"), "objective.w_mean");
    cfg.objective.w_cov = vector_from_json(obj.at("w_cov"), "objective.w_cov");
    cfg.objective.mode =
        obj.value("mode", std::string("diagonal")) == "full" ? CovMode::Full : CovMode::Diagonal;
    return cfg;
}

json grid_to_json(const GridSearchConfig& cfg) {
    return json{{"lower", vector_to_json(cfg.lower)},
                {"upper", vector_to_json(cfg.upper)},
                {"grid_points", cfg.grid_points},
                {"subsets", cfg.subsets},
                {"shrink_rate", cfg.shrink_rate},
                {"shrink_trigger", cfg.shrink_trigger},
                {"stop_threshold", cfg.stop_threshold},
                {"max_iterations", cfg.max_iterations},
                {"elitism", cfg.elitism},
                {"verbose_trace", cfg.verbose_trace},
                {"objective",
                 {{"w_mean", vector_to_json(cfg.objective.w_mean)},
                  {"w_cov", vector_to_json(cfg.objective.w_cov)},
                  {"mode", cfg.objective.mode == CovMode::Full ? "full" : "diagonal"}}}};
}

} // namespace

IsocConfig isoc_config_from_json(const json& j) {
    try {
        IsocConfig cfg;
        cfg.kind = j.at("kind").get<std::string>() == "lqs" ? ModelKind::Lqs : ModelKind::Lqg;
        cfg.outer_shrink = j.value("outer_shrink", 2.0);
        cfg.outer_iterations = j.value("outer_iterations", 3);
        if (j.contains("lqs_solver")) {
            cfg.lqs.max_iters = j["lqs_solver"].value("max_iters", 500);
            cfg.lqs.tol = j["lqs_solver"].value("tol", 1e-9);
        }
        cfg.s_grid = grid_from_json(j.at("s_grid"));
        cfg.sigma_grid = grid_from_json(j.at("sigma_grid"));
        return cfg;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed solver config: ") + e.what());
    }
}

json isoc_config_to_json(const IsocConfig& cfg) {
    return json{{"kind", cfg.kind == ModelKind::Lqs ? "lqs" : "lqg"},
                {"outer_shrink", cfg.outer_shrink},
                {"outer_iterations", cfg.outer_iterations},
                {"lqs_solver", {{"max_iters", cfg.lqs.max_iters}, {"tol", cfg.lqs.tol}}},
                {"s_grid", grid_to_json(cfg.s_grid)},
                {"sigma_grid", grid_to_json(cfg.sigma_grid)}};
}

IsocConfig load_isoc_config(const std::string& path) {
    return isoc_config_from_json(load_json(path));
}

json fit_report_to_json(const FitReport& fit) {
    json j;
    j["m_vaf"] = vector_to_json(fit.m_vaf);
    if (fit.mode == CovMode::Diagonal)
        j["omega_vaf"] = vector_to_json(fit.omega_vaf.diagonal());
    else
        j["omega_vaf"] = matrix_to_json(fit.omega_vaf);
    j["j_isoc"] = fit.score;
    j["mode"] = fit.mode == CovMode::Full ? "full" : "diagonal";
    return j;
}

json isoc_result_to_json(const IsocResult& result) {
    return json{{"s", vector_to_json(result.s)},
                {"sigma", vector_to_json(result.sigma)},
                {"theta_s", vector_to_json(result.theta_s)},
                {"theta_sigma", vector_to_json(result.theta_sigma)},
                {"fit", fit_report_to_json(result.fit)},
                {"evaluations", result.evaluations},
                {"wall_seconds", result.wall_seconds}};
}

void save_trace_jsonl(const std::vector<GridTraceRecord>& trace, const std::string& path) {
    auto f = open_out(path);
    for (const auto& rec : trace) {
        // Non-finite scores (failed candidates) serialize as null.
        json j{{"l", rec.outer_iteration}, {"step", rec.step},      {"v", rec.pass},
               {"subset", rec.subset},     {"best_j", rec.best_score},
               {"theta", vector_to_json(rec.incumbent)},            {"evals", rec.evaluations}};
        if (rec.candidate >= 0)
            j["candidate"] = rec.candidate;
        f << j.dump() << "\n";
    }
}

json gains_to_json(const GainSchedule& gains) {
    json l = json::array(), k = json::array();
    for (const auto& m : gains.L)
        l.push_back(matrix_to_json(m));
    for (const auto& m : gains.K)
        k.push_back(matrix_to_json(m));
    return json{{"L", l}, {"K", k}};
}

void save_json(const json& j, const std::string& path) {
    auto f = open_out(path);
    f << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
    auto f = open_in(path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
}

std::uint64_t fnv1a64_file(const std::string& path) {
    auto f = open_in(path);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buf[4096];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
        const auto got = f.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf)))
            break;
    }
    return hash;
}

} // namespace isoc
