// Regenerates the example model and solver-config files shipped under
// configs/. Usage: isoc_examples <output-dir>

#include <cstdio>
#include <filesystem>

#include "isoc/io.hpp"

using namespace isoc;

namespace {

GridSearchConfig grid(int dim, Vector upper, int points, int vmax,
                      std::vector<std::vector<int>> subsets, double w_mean, double w_cov) {
    GridSearchConfig g;
    g.lower = Vector::Zero(dim);
    g.upper = std::move(upper);
    g.grid_points = points;
    g.subsets = std::move(subsets);
    g.max_iterations = vmax;
    g.objective.w_mean = Vector::Constant(4, w_mean);
    g.objective.w_cov = Vector::Constant(4, w_cov);
    return g;
}

Vector s_upper() {
    Vector u(8);
    u << 4.0, 4.0, 0.4, 0.4, 0.004, 0.004, 4e-6, 4e-6;
    return u;
}

IsocConfig lqg_desk() {
    IsocConfig cfg;
    cfg.kind = ModelKind::Lqg;
    cfg.outer_iterations = 2;
    cfg.s_grid = grid(8, s_upper(), 6, 10, {{0, 2, 4, 6}, {1, 3, 5, 7}}, 0.9, 0.1);
    cfg.sigma_grid = grid(14, Vector::Constant(14, 4.0), 6, 10,
                          {{0, 2, 4, 6}, {1, 3, 5, 7}, {8, 10, 12}, {9, 11, 13}}, 0.1, 0.9);
    return cfg;
}

IsocConfig lqg_full() {
    IsocConfig cfg;
    cfg.kind = ModelKind::Lqg;
    cfg.outer_iterations = 3;
    cfg.s_grid = grid(8, s_upper(), 8, 20, {{0, 2, 4, 6}, {1, 3, 5, 7}}, 0.9, 0.1);
    cfg.sigma_grid = grid(14, Vector::Constant(14, 4.0), 8, 20,
                          {{0, 2, 4, 6}, {1, 3, 5, 7}, {8, 10, 12}, {9, 11, 13}}, 0.1, 0.9);
    return cfg;
}

IsocConfig lqs_full() {
    IsocConfig cfg;
    cfg.kind = ModelKind::Lqs;
    cfg.outer_iterations = 3;
    cfg.s_grid = grid(8, s_upper(), 10, 20, {{0, 2, 4, 6}, {1, 3, 5, 7}}, 0.9, 0.1);
    cfg.sigma_grid = grid(16, Vector::Constant(16, 4.0), 10, 20,
                          {{0, 2}, {1, 3}, {4, 6, 14}, {5, 7, 14},
                           {8, 10, 12, 15}, {9, 11, 13, 15}},
                          0.1, 0.9);
    return cfg;
}

IsocConfig lqs_desk() {
    IsocConfig cfg;
    cfg.kind = ModelKind::Lqs;
    cfg.outer_iterations = 2;
    cfg.s_grid = grid(2, Vector::Constant(2, 4.0), 8, 8, {{0, 1}}, 0.9, 0.1);
    cfg.sigma_grid = grid(2, Vector::Constant(2, 4.0), 8, 8, {{0, 1}}, 0.1, 0.9);
    return cfg;
}

// LQS reaching variant with only the terminal position weights and the
// two multiplicative scales free.
ModelBundle reaching_lqs_reduced() {
    ModelBundle b = build_reaching_model(ModelKind::Lqs);
    b.layout.free_s_indices = {0, 1};
    b.layout.free_sigma_groups = {{136, 137}, {138}};
    b.validate();
    return b;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <output-dir>\n", argv[0]);
        return 2;
    }
    const std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);

    save_model(build_reaching_model(ModelKind::Lqg), (dir / "reaching_lqg.json").string());
    save_model(build_reaching_model(ModelKind::Lqs), (dir / "reaching_lqs.json").string());
    save_model(reaching_lqs_reduced(), (dir / "reaching_lqs_reduced.json").string());
    save_json(isoc_config_to_json(lqg_desk()), (dir / "invert_lqg_desk.json").string());
    save_json(isoc_config_to_json(lqg_full()), (dir / "invert_lqg_full.json").string());
    save_json(isoc_config_to_json(lqs_desk()), (dir / "invert_lqs_desk.json").string());
    save_json(isoc_config_to_json(lqs_full()), (dir / "invert_lqs_full.json").string());
    std::printf("wrote 7 files to %s\n", dir.string().c_str());
    return 0;
}
