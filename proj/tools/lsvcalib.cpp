#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdint>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lsv/commands.hpp"
#include "lsv/errors.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::string out_dir;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config_path, "run configuration (JSON)")->required();
    sub->add_option("--seed", f.seed, "override the config seed")->each([&](const std::string&) {
        f.seed_set = true;
    });
    sub->add_option("--threads", f.threads, "worker thread count (results are thread-count invariant)");
    sub->add_option("--out", f.out_dir, "override the output directory");
}

lsv::RunConfig load(const CommonFlags& f) {
    auto cfg = lsv::load_run_config(f.config_path);
    if (f.seed_set) {
        cfg.seed = f.seed;
        cfg.calibration.seed = f.seed;
    }
    if (!f.out_dir.empty()) cfg.output.dir = f.out_dir;
    if (f.threads > 0) {
#ifdef _OPENMP
        omp_set_num_threads(f.threads);
#endif
    }
    Eigen::setNbThreads(1);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo LSV leverage calibration"};
    app.require_subcommand(1);

    CommonFlags fc, fv, fx;
    auto* calibrate = app.add_subcommand("calibrate", "calibrate the leverage surface");
    add_common(calibrate, fc);
    auto* validate = app.add_subcommand("validate", "reprice and report against the target surface");
    add_common(validate, fv);
    auto* compare = app.add_subcommand("compare", "side-by-side estimator comparison");
    add_common(compare, fx);

    CLI11_PARSE(app, argc, argv);

    try {
        if (calibrate->parsed()) return lsv::cmd_calibrate(load(fc));
        if (validate->parsed()) return lsv::cmd_validate(load(fv));
        if (compare->parsed()) return lsv::cmd_compare(load(fx));
    } catch (const lsv::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return lsv::kExitIo;
    } catch (const lsv::ConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return lsv::kExitNonConvergence;
    } catch (const lsv::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return lsv::kExitValidation;
    } catch (const lsv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lsv::kExitValidation;
    }
    return 0;
}
