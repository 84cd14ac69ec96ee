// Command-line driver: object generation, simulated acquisition,
// reconstruction and GI-vs-ordinary comparison.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mgi/config.hpp"
#include "mgi/image_io.hpp"
#include "mgi/measurement_io.hpp"
#include "mgi/reduction.hpp"
#include "mgi/sim.hpp"

namespace fs = std::filesystem;
using namespace mgi;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

std::string format_double(double v) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << v;
    return out.str();
}

BasisKind parse_basis(const std::string& name) {
    if (name == "none" || name == "identity") return BasisKind::identity;
    if (name == "dct") return BasisKind::dct2;
    if (name == "haar") return BasisKind::haar2;
    throw ConfigError("unknown basis: " + name + " (expected none, dct or haar)");
}

std::string basis_name(BasisKind kind) {
    switch (kind) {
        case BasisKind::identity: return "none";
        case BasisKind::dct2: return "dct";
        case BasisKind::haar2: return "haar";
    }
    return "?";
}

struct LoadedMeasurement {
    Measurement meas;
    MeasurementMeta meta;
};

LoadedMeasurement load_measurement_with_meta(const std::string& path) {
    LoadedMeasurement lm;
    GridShape det_grid;
    int arms = 0;
    lm.meas = read_measurement(path, &det_grid, &arms);
    lm.meta = read_measurement_meta(path + ".meta");
    if (lm.meta.config.arms != arms)
        throw ConfigError("measurement/meta arm count mismatch for " + path);
    lm.meas.config = lm.meta.config;
    lm.meas.model_fingerprint = lm.meta.model_fingerprint;
    return lm;
}

// Rebuilds the model from metadata and refuses measurements whose recorded
// fingerprint does not match it.
SensingModel model_from_meta(const MeasurementMeta& meta) {
    SensingModel model = build_calibrated_model(meta.geometry, meta.config);
    if (model.fingerprint() != meta.model_fingerprint)
        throw ConfigError("model fingerprint mismatch: measurement was simulated with "
                          "different parameters");
    return model;
}

struct CsvWriter {
    std::ofstream out;

    CsvWriter(const std::string& path, const std::string& header) : out(path) {
        if (!out) throw IoError("cannot open CSV " + path);
        out.imbue(std::locale::classic());
        out << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            out << cells[i] << (i + 1 < cells.size() ? "," : "");
        out << "\n";
    }
};

int cmd_gen_object(const std::string& pattern, int width, int height, double value,
                   const std::string& file, int bar_width, int gap, int bar_height,
                   const std::string& out_path) {
    GridShape grid{width, height};
    ObjectImage obj;
    if (pattern == "two-slit")
        obj = gen_two_slit(grid, bar_width, gap, bar_height);
    else if (pattern == "constant")
        obj = gen_constant(grid, value);
    else if (pattern == "bitmap") {
        if (file.empty()) throw ConfigError("gen-object bitmap requires --file");
        obj = gen_from_bitmap(file, grid);
    } else {
        throw ConfigError("unknown pattern: " + pattern);
    }
    write_pgm(out_path, obj.grid, obj.values);
    std::cout << "wrote " << out_path << " (" << width << "x" << height << ")\n";
    return 0;
}

int cmd_simulate(const std::string& object_path, const AcquisitionConfig& cfg,
                 int detector_size, const std::string& placement, bool ordinary,
                 const std::string& out_prefix) {
    PgmImage src = read_pgm(object_path);
    ObjectImage obj{src.grid, src.values};

    DetectorGeometry geometry;
    geometry.grid = obj.grid;
    geometry.detector_linear_size = detector_size;
    if (placement == "sliding")
        geometry.placement = DetectorPlacement::sliding;
    else if (placement == "tiled")
        geometry.placement = DetectorPlacement::tiled;
    else
        throw ConfigError("unknown placement: " + placement);

    AcquisitionConfig gi_cfg = cfg;
    gi_cfg.arms = 3;
    SensingModel model = build_calibrated_model(geometry, gi_cfg);
    Measurement meas = simulate_gi(obj, model, gi_cfg);
    const std::string gi_path = out_prefix + ".gi.mgim";
    write_measurement(gi_path, meas, geometry);
    write_measurement_meta(gi_path + ".meta", meas, geometry);
    std::cout << "wrote " << gi_path << "\n";

    if (ordinary) {
        AcquisitionConfig ord_cfg = cfg;
        ord_cfg.arms = 1;
        Measurement ord = simulate_ordinary(obj, ord_cfg, geometry);
        const std::string ord_path = out_prefix + ".ord.mgim";
        write_measurement(ord_path, ord, geometry);
        write_measurement_meta(ord_path + ".meta", ord, geometry);
        std::cout << "wrote " << ord_path << "\n";
    }
    return 0;
}

struct ReconRow {
    double lambda;
    std::string basis;
    double mse;
    double psnr;
    double worst_case_mse;
    bool converged;
    double runtime_s;
};

ReconRow reconstruct_one(const ReductionContext& ctx, const Measurement& meas,
                         BasisKind kind, double lambda, const ObjectImage& truth,
                         Vector* image_out) {
    const auto start = std::chrono::steady_clock::now();
    SparsityBasis basis(kind, ctx.model().geometry().grid);
    PipelineConfig cfg(basis, lambda);
    PipelineResult res = run_pipeline(ctx, meas, cfg);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    ImageMetrics met = compute_metrics(res.final_image, truth);
    if (image_out) *image_out = res.final_image;
    return ReconRow{lambda, basis_name(kind), met.mse, met.psnr, res.worst_case_mse,
                    res.converged, elapsed.count()};
}

void append_row(CsvWriter& csv, const ReconRow& row, bool omit_runtime) {
    csv.row({format_double(row.lambda), row.basis, format_double(row.mse),
             row.psnr == std::numeric_limits<double>::infinity()
                 ? "inf"
                 : format_double(row.psnr),
             format_double(row.worst_case_mse), row.converged ? "1" : "0",
             omit_runtime ? "0" : format_double(row.runtime_s)});
}

int cmd_reconstruct(const std::string& meas_path, const std::string& truth_path,
                    const std::string& bases_arg, const std::string& lambdas_arg,
                    const std::string& out_dir, const std::string& csv_path,
                    bool omit_runtime) {
    LoadedMeasurement lm = load_measurement_with_meta(meas_path);
    SensingModel model = model_from_meta(lm.meta);
    ReductionContext ctx(std::move(model));

    PgmImage truth_img = read_pgm(truth_path);
    ObjectImage truth{truth_img.grid, truth_img.values};
    if (truth.grid != ctx.model().geometry().grid)
        throw ConfigError("truth image grid does not match the measurement model");

    std::vector<double> lambdas = parse_double_list(lambdas_arg);
    if (lambdas.empty()) throw ConfigError("reconstruct: empty lambda list");

    std::vector<BasisKind> bases;
    std::istringstream bs(bases_arg);
    std::string tok;
    while (std::getline(bs, tok, ',')) bases.push_back(parse_basis(tok));
    if (bases.empty()) throw ConfigError("reconstruct: empty basis list");

    fs::create_directories(out_dir);
    CsvWriter csv(csv_path, "lambda,basis,mse,psnr,worst_case_mse,converged,runtime_s");

    const std::string stem = fs::path(meas_path).stem().string();
    for (BasisKind kind : bases) {
        for (double lambda : lambdas) {
            Vector image;
            ReconRow row = reconstruct_one(ctx, lm.meas, kind, lambda, truth, &image);
            std::ostringstream name;
            name << stem << "_" << basis_name(kind) << "_l" << format_double(lambda)
                 << ".pgm";
            write_pgm((fs::path(out_dir) / name.str()).string(),
                      ctx.model().geometry().grid, image);
            append_row(csv, row, omit_runtime);
        }
    }
    std::cout << "wrote " << csv_path << "\n";
    return 0;
}

int cmd_compare(const std::string& gi_arg, const std::string& ord_arg,
                const std::string& truth_path, const std::string& lambdas_arg,
                const std::string& out_path) {
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream in(s);
        std::string tok;
        while (std::getline(in, tok, ',')) out.push_back(tok);
        return out;
    };
    std::vector<std::string> gi_files = split(gi_arg);
    std::vector<std::string> ord_files = split(ord_arg);
    if (gi_files.empty() || gi_files.size() != ord_files.size())
        throw ConfigError("compare: need matching non-empty GI and ordinary file lists");
    std::vector<double> lambdas = parse_double_list(lambdas_arg);

    PgmImage truth_img = read_pgm(truth_path);
    ObjectImage truth{truth_img.grid, truth_img.values};

    // One context per channel; all seeds must share the channel's model.
    std::optional<ReductionContext> gi_ctx, ord_ctx;
    CsvWriter csv(out_path, "seed_file,channel,basis,lambda,mse");

    struct Cell {
        double sum = 0.0;
        int count = 0;
        std::vector<double> values;
    };
    std::map<std::string, Cell> cells;  // key: channel|basis|lambda

    auto run_channel = [&](const std::string& channel, const std::string& path,
                           std::optional<ReductionContext>& ctx) {
        LoadedMeasurement lm = load_measurement_with_meta(path);
        if (!ctx) ctx.emplace(model_from_meta(lm.meta));
        else if (ctx->model().fingerprint() != lm.meta.model_fingerprint)
            throw ConfigError("compare: mixed models within channel " + channel);

        std::vector<std::pair<BasisKind, double>> variants{{BasisKind::identity, 0.0}};
        for (double l : lambdas) variants.emplace_back(BasisKind::dct2, l);
        for (auto [kind, lambda] : variants) {
            ReconRow row = reconstruct_one(*ctx, lm.meas, kind, lambda, truth, nullptr);
            csv.row({fs::path(path).filename().string(), channel, row.basis,
                     format_double(lambda), format_double(row.mse)});
            Cell& c = cells[channel + "|" + row.basis + "|" + format_double(lambda)];
            c.sum += row.mse;
            ++c.count;
            c.values.push_back(row.mse);
        }
    };

    for (size_t i = 0; i < gi_files.size(); ++i) {
        run_channel("gi", gi_files[i], gi_ctx);
        run_channel("ordinary", ord_files[i], ord_ctx);
    }

    // Aggregates: per-cell mean, and per (basis, lambda) the number of seeds
    // where GI beats ordinary.
    csv.row({});
    csv.row({"aggregate", "channel", "basis", "lambda", "mean_mse"});
    for (const auto& [key, cell] : cells) {
        std::istringstream ks(key);
        std::string channel, basis, lambda;
        std::getline(ks, channel, '|');
        std::getline(ks, basis, '|');
        std::getline(ks, lambda, '|');
        csv.row({"mean", channel, basis, lambda, format_double(cell.sum / cell.count)});
    }
    csv.row({});
    csv.row({"winners", "basis", "lambda", "gi_wins", "seeds"});
    for (const auto& [key, cell] : cells) {
        if (key.rfind("gi|", 0) != 0) continue;
        const std::string tail = key.substr(3);
        auto ord_it = cells.find("ordinary|" + tail);
        if (ord_it == cells.end()) continue;
        int wins = 0;
        for (size_t i = 0; i < cell.values.size(); ++i)
            if (cell.values[i] < ord_it->second.values[i]) ++wins;
        std::istringstream ks(tail);
        std::string basis, lambda;
        std::getline(ks, basis, '|');
        std::getline(ks, lambda, '|');
        csv.row({"wins", basis, lambda, std::to_string(wins),
                 std::to_string(static_cast<int>(cell.values.size()))});
    }
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_metrics(const std::string& image_path, const std::string& truth_path) {
    PgmImage img = read_pgm(image_path);
    PgmImage truth_img = read_pgm(truth_path);
    ObjectImage truth{truth_img.grid, truth_img.values};
    ImageMetrics m = compute_metrics(img.values, truth);
    std::cout << "mse=" << format_double(m.mse) << "\n";
    std::cout << "psnr="
              << (m.psnr == std::numeric_limits<double>::infinity()
                      ? std::string("inf")
                      : format_double(m.psnr))
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiplexed ghost imaging simulation and reconstruction toolkit"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);
    app.allow_config_extras(false);

    // gen-object
    auto* gen = app.add_subcommand("gen-object", "Generate a test object (PGM)");
    std::string pattern, gen_file, gen_out = "object.pgm";
    int size = 64, width = -1, height = -1;
    double value = 1.0;
    int bar_width = 8, gap = 12, bar_height = -1;
    gen->add_option("pattern", pattern, "two-slit | constant | bitmap")->required();
    gen->add_option("--size", size, "square grid side");
    gen->add_option("--width", width);
    gen->add_option("--height", height);
    gen->add_option("--value", value, "constant transparency");
    gen->add_option("--file", gen_file, "source bitmap for pattern=bitmap");
    gen->add_option("--bar-width", bar_width);
    gen->add_option("--gap", gap);
    gen->add_option("--bar-height", bar_height);
    gen->add_option("--out", gen_out);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate GI acquisition");
    std::string sim_object, sim_out = "measurement", noise_mode = "gaussian";
    std::string placement = "sliding";
    AcquisitionConfig acq;
    int detector_size = 3;
    bool ordinary = false;
    sim->add_option("--object", sim_object, "object PGM")->required();
    sim->add_option("--photons", acq.photons_per_pixel, "photons per pixel");
    sim->add_option("--noise-photons", acq.noise_photons_per_pixel);
    sim->add_option("--p-acc", acq.p_acc, "coincidence acceptance probability");
    sim->add_option("--correlator-samples", acq.correlator_samples,
                    "correlation samples averaged per detector output");
    sim->add_option("--seed", acq.seed);
    sim->add_option("--noise-mode", noise_mode, "gaussian | poisson");
    sim->add_option("--detector-size", detector_size);
    sim->add_option("--placement", placement, "sliding | tiled");
    sim->add_flag("--ordinary", ordinary, "also write the single-arm baseline");
    sim->add_option("--out", sim_out, "output prefix");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "Reconstruct from a measurement");
    std::string rec_meas, rec_truth, rec_bases = "haar", rec_lambdas = "0";
    std::string rec_out_dir = ".", rec_csv = "reconstruction.csv";
    bool omit_runtime = false;
    rec->add_option("--measurement", rec_meas)->required();
    rec->add_option("--truth", rec_truth, "ground-truth PGM for metrics")->required();
    rec->add_option("--basis", rec_bases, "comma list: none, dct, haar");
    rec->add_option("--lambdas", rec_lambdas, "comma list of threshold multipliers");
    rec->add_option("--out-dir", rec_out_dir);
    rec->add_option("--csv", rec_csv);
    rec->add_flag("--omit-runtime", omit_runtime,
                  "write 0 in the runtime column (reproducible output)");

    // compare
    auto* cmp = app.add_subcommand("compare", "Compare GI against ordinary imaging");
    std::string cmp_gi, cmp_ord, cmp_truth, cmp_lambdas = "1.25";
    std::string cmp_out = "compare.csv";
    cmp->add_option("--gi", cmp_gi, "comma list of GI measurement files")->required();
    cmp->add_option("--ordinary", cmp_ord, "comma list of ordinary measurement files")
        ->required();
    cmp->add_option("--truth", cmp_truth)->required();
    cmp->add_option("--lambdas", cmp_lambdas);
    cmp->add_option("--out", cmp_out);

    // metrics
    auto* met = app.add_subcommand("metrics", "MSE/PSNR between two PGM images");
    std::string met_image, met_truth;
    met->add_option("--image", met_image)->required();
    met->add_option("--truth", met_truth)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) {
            const int w = width > 0 ? width : size;
            const int h = height > 0 ? height : size;
            return cmd_gen_object(pattern, w, h, value, gen_file, bar_width, gap,
                                  bar_height, gen_out);
        }
        if (sim->parsed()) {
            if (noise_mode == "gaussian")
                acq.noise_mode = NoiseMode::gaussian;
            else if (noise_mode == "poisson")
                acq.noise_mode = NoiseMode::poisson;
            else
                throw ConfigError("unknown noise mode: " + noise_mode);
            return cmd_simulate(sim_object, acq, detector_size, placement, ordinary,
                                sim_out);
        }
        if (rec->parsed())
            return cmd_reconstruct(rec_meas, rec_truth, rec_bases, rec_lambdas,
                                   rec_out_dir, rec_csv, omit_runtime);
        if (cmp->parsed())
            return cmd_compare(cmp_gi, cmp_ord, cmp_truth, cmp_lambdas, cmp_out);
        if (met->parsed()) return cmd_metrics(met_image, met_truth);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
