// Batch front door for the VDF-HCD pipeline: detect, evaluate, synth, sweep.

#include "vdf/detection.hpp"
#include "vdf/filter.hpp"
#include "vdf/image.hpp"
#include "vdf/matrix_io.hpp"
#include "vdf/metrics.hpp"
#include "vdf/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace vdf;

namespace {

struct RunConfig {
    std::string t1, t2, gt, di, cm;
    std::string out = "out";
    std::string config_file;
    std::uint64_t seed = 0;

    int n = 5000;
    int k = 0;  // 0 = floor(sqrt(N)) of the built graph
    int m = 4;
    double cutoff = 0.9;
    int iter = 5;
    std::string segmentation = "superpixel";
    int p = 8;
    std::string threshold = "otsu";
    std::string op = "wavg";
    std::string weights = "binary";
    double sigma = 1.0;
    double compactness = 0.3;
    int min_segment = 25;

    std::vector<int> bands_t1, bands_t2;

    // sweep grids
    std::vector<int> m_list;
    std::vector<double> cutoff_list;
    std::vector<int> k_list;

    // synth scene
    int height = 200, width = 200, classes = 6;
    double change_fraction = 0.1, noise = 0.05;
    int channels_a = 1, channels_b = 3;
};

VdfConfig to_vdf_config(const RunConfig& rc) {
    VdfConfig cfg;
    cfg.target_vertices = rc.n;
    cfg.k = rc.k;
    cfg.filter_order = rc.m;
    cfg.cutoff = rc.cutoff;
    cfg.max_iterations = rc.iter;
    cfg.patch_size = rc.p;
    cfg.slic_compactness = rc.compactness;
    cfg.min_segment_size = rc.min_segment;
    cfg.weight_sigma = rc.sigma;
    cfg.seed = rc.seed;

    if (rc.segmentation == "patch") cfg.segmentation = SegmentationMode::Patch;
    else if (rc.segmentation == "superpixel") cfg.segmentation = SegmentationMode::Superpixel;
    else throw CLI::ValidationError("--segmentation must be patch or superpixel");

    if (rc.threshold == "otsu") cfg.threshold = ThresholdMethod::Otsu;
    else if (rc.threshold == "kmeans") cfg.threshold = ThresholdMethod::KMeans2;
    else throw CLI::ValidationError("--threshold must be otsu or kmeans");

    if (rc.op == "wavg") cfg.op_kind = OperatorKind::AverageWeight;
    else if (rc.op == "p") cfg.op_kind = OperatorKind::RandomWalk;
    else if (rc.op == "lrw") cfg.op_kind = OperatorKind::RandomWalkLaplacian;
    else throw CLI::ValidationError("--operator must be wavg, p or lrw");

    if (rc.weights == "binary") cfg.weights = WeightScheme::Binary;
    else if (rc.weights == "inverse") cfg.weights = WeightScheme::InverseDistance;
    else if (rc.weights == "gaussian") cfg.weights = WeightScheme::Gaussian;
    else throw CLI::ValidationError("--weights must be binary, inverse or gaussian");
    return cfg;
}

// key=value lines, '#' comments. Unknown keys are rejected so typos surface.
void apply_config_file(CLI::App& app, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot read config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("config line " + std::to_string(lineno) +
                                       ": expected key=value");
        const std::string key = strip(trimmed.substr(0, eq));
        const std::string value = strip(trimmed.substr(eq + 1));
        CLI::Option* opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw CLI::ValidationError("config line " + std::to_string(lineno) +
                                       ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;  // command-line flags win
        opt->add_result(value);
        opt->run_callback();
    }
}

void write_manifest(const CLI::App& app, const RunConfig& rc, const std::string& path) {
    std::ofstream out(path);
    out << "command=" << app.get_name() << '\n';
    for (const CLI::Option* opt : app.get_options()) {
        const std::string name = opt->get_name();
        if (name.rfind("--", 0) != 0 || name == "--help" || name == "--config") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const std::string& piece : opt->results()) {
                if (!value.empty()) value += ',';
                value += piece;
            }
        } else {
            value = opt->get_default_str();
        }
        out << name.substr(2) << '=' << value << '\n';
    }
    out << "seed=" << rc.seed << '\n';
}

void write_report(const std::map<std::string, std::string>& kv, const std::string& path) {
    std::ofstream out(path);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

void write_metric_report(const CmScores& s, const ConfusionCounts& c, double aur, double aup,
                         const std::string& path) {
    std::map<std::string, std::string> kv;
    kv["tp"] = std::to_string(c.tp);
    kv["fp"] = std::to_string(c.fp);
    kv["tn"] = std::to_string(c.tn);
    kv["fn"] = std::to_string(c.fn);
    kv["oa"] = fmt(s.oa);
    kv["fm"] = fmt(s.fm);
    kv["kc"] = fmt(s.kc);
    kv["pre"] = fmt(s.pre);
    if (aur >= 0.0) kv["aur"] = fmt(aur);
    if (aup >= 0.0) kv["aup"] = fmt(aup);
    write_report(kv, path);
}

void emit_iteration_artifacts(const DetectionResult& result, const BinaryMask* gt,
                              const fs::path& dir) {
    for (const DetectionState& st : result.history) {
        const fs::path it_dir = dir / ("iter" + std::to_string(st.iteration));
        fs::create_directories(it_dir);
        write_score_png(map_to_pixels(result.segments, st.levels.forward), (it_dir / "fX.png").string());
        write_score_png(map_to_pixels(result.segments, st.levels.backward), (it_dir / "fY.png").string());
        write_score_png(map_to_pixels(result.segments, st.levels.fused), (it_dir / "fused.png").string());
        const BinaryMask cm = map_to_pixels(result.segments, st.changed);
        if (gt != nullptr) write_change_map(cm, *gt, (it_dir / "cm.png").string());
        else write_mask(cm, (it_dir / "cm.png").string());
    }
}

int cmd_detect(CLI::App& app, RunConfig& rc) {
    RasterImage a = load_image(rc.t1);
    RasterImage b = load_image(rc.t2);
    if (!rc.bands_t1.empty()) a = select_channels(a, rc.bands_t1);
    if (!rc.bands_t2.empty()) b = select_channels(b, rc.bands_t2);
    BinaryMask gt;
    const bool have_gt = !rc.gt.empty();
    if (have_gt) gt = load_mask(rc.gt);

    fs::create_directories(rc.out);
    const VdfConfig cfg = to_vdf_config(rc);
    const auto t0 = std::chrono::steady_clock::now();
    const DetectionResult result = run_vdf_hcd(a, b, cfg);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path out(rc.out);
    const RasterImage fused_px = map_to_pixels(result.segments, result.levels.fused);
    write_score_png(map_to_pixels(result.segments, result.levels.forward), (out / "fX.png").string());
    write_score_png(map_to_pixels(result.segments, result.levels.backward), (out / "fY.png").string());
    write_score_png(fused_px, (out / "fused.png").string());
    write_image(fused_px, (out / "fused.fmat").string());
    write_segment_labels(result.segments, (out / "segments.imat").string());
    write_coeffs_csv(result.filter, (out / "filter.csv").string());
    if (have_gt) write_change_map(result.change_map, gt, (out / "cm.png").string());
    else write_mask(result.change_map, (out / "cm.png").string());
    emit_iteration_artifacts(result, have_gt ? &gt : nullptr, out);

    std::map<std::string, std::string> kv;
    kv["iterations"] = std::to_string(result.history.size());
    kv["vertices"] = std::to_string(result.segments.segment_count);
    kv["k"] = std::to_string(result.k_used);
    kv["changed_vertices"] = std::to_string(std::count(
        result.changed_vertices.begin(), result.changed_vertices.end(), std::uint8_t{1}));
    kv["converged"] = result.history.empty() ? "0" : (result.history.back().converged ? "1" : "0");
    kv["guard_tripped"] =
        result.history.empty() ? "0" : (result.history.back().guard_tripped ? "1" : "0");
    kv["threshold"] = result.history.empty() ? "0" : fmt(result.history.back().threshold);
    kv["elapsed_seconds"] = fmt(elapsed);
    for (const DetectionState& st : result.history) {
        const std::string prefix = "iter" + std::to_string(st.iteration) + "_";
        kv[prefix + "changed"] = std::to_string(st.changed_count);
        kv[prefix + "threshold"] = fmt(st.threshold);
    }
    write_report(kv, (out / "state.txt").string());

    if (have_gt) {
        const CurveSet curves = roc_pr_curves(fused_px, gt);
        const ConfusionCounts counts = confusion(result.change_map, gt);
        write_roc_csv(curves, (out / "roc.csv").string());
        write_pr_csv(curves, (out / "pr.csv").string());
        write_metric_report(oa_fm_kc(counts), counts, curves.aur, curves.aup,
                            (out / "metrics.txt").string());
    }
    write_manifest(app, rc, (out / "manifest.txt").string());
    std::cout << "detect: " << result.segments.segment_count << " vertices, "
              << result.history.size() << " iterations, " << fmt(elapsed) << "s -> " << rc.out
              << '\n';
    return 0;
}

int cmd_evaluate(CLI::App& app, RunConfig& rc) {
    if (rc.di.empty() && rc.cm.empty())
        throw CLI::ValidationError("evaluate needs --di and/or --cm");
    const BinaryMask gt = load_mask(rc.gt);
    fs::create_directories(rc.out);
    const fs::path out(rc.out);

    double aur = -1.0, aup = -1.0;
    if (!rc.di.empty()) {
        RasterImage di = load_image(rc.di);
        if (di.channels != 1) throw CLI::ValidationError("--di must be single-channel");
        const CurveSet curves = roc_pr_curves(di, gt);
        aur = curves.aur;
        aup = curves.aup;
        write_roc_csv(curves, (out / "roc.csv").string());
        write_pr_csv(curves, (out / "pr.csv").string());
    }

    if (!rc.cm.empty()) {
        const BinaryMask cm = load_mask(rc.cm);
        const ConfusionCounts counts = confusion(cm, gt);
        write_metric_report(oa_fm_kc(counts), counts, aur, aup, (out / "metrics.txt").string());
    } else {
        std::map<std::string, std::string> kv;
        kv["aur"] = fmt(aur);
        kv["aup"] = fmt(aup);
        write_report(kv, (out / "metrics.txt").string());
    }
    write_manifest(app, rc, (out / "manifest.txt").string());
    std::cout << "evaluate -> " << rc.out << '\n';
    return 0;
}

int cmd_synth(CLI::App& app, RunConfig& rc) {
    SceneSpec spec;
    spec.height = rc.height;
    spec.width = rc.width;
    spec.n_classes = rc.classes;
    spec.seed = rc.seed;
    spec.change_fraction = rc.change_fraction;
    spec.noise_sigma = rc.noise;
    spec.modality_a_channels = rc.channels_a;
    spec.modality_b_channels = rc.channels_b;

    const SyntheticScene scene = generate_pair(spec);
    fs::create_directories(rc.out);
    const fs::path out(rc.out);
    const auto name = [](const RasterImage& img, const char* base) {
        // PNG can carry 1 or 3 channels; other band counts go to the sidecar.
        return std::string(base) + (img.channels == 1 || img.channels == 3 ? ".png" : ".fmat");
    };
    write_image(scene.image_a, (out / name(scene.image_a, "A")).string());
    write_image(scene.image_b, (out / name(scene.image_b, "B")).string());
    write_mask(scene.ground_truth, (out / "gt.png").string());
    write_manifest(app, rc, (out / "manifest.txt").string());
    std::cout << "synth -> " << rc.out << '\n';
    return 0;
}

int cmd_sweep(CLI::App& app, RunConfig& rc) {
    if (rc.m_list.empty()) rc.m_list = {rc.m};
    if (rc.cutoff_list.empty()) rc.cutoff_list = {rc.cutoff};
    if (rc.k_list.empty()) rc.k_list = {rc.k};

    RasterImage a = load_image(rc.t1);
    RasterImage b = load_image(rc.t2);
    if (!rc.bands_t1.empty()) a = select_channels(a, rc.bands_t1);
    if (!rc.bands_t2.empty()) b = select_channels(b, rc.bands_t2);
    const BinaryMask gt = load_mask(rc.gt);

    fs::create_directories(rc.out);
    std::ofstream csv(fs::path(rc.out) / "sweep.csv");
    csv << "m,cutoff,k,oa,fm,kc,aur\n";

    for (const int m : rc.m_list) {
        for (const double cutoff : rc.cutoff_list) {
            for (const int k : rc.k_list) {
                VdfConfig cfg = to_vdf_config(rc);
                cfg.filter_order = m;
                cfg.cutoff = cutoff;
                cfg.k = k;
                const DetectionResult result = run_vdf_hcd(a, b, cfg);
                const RasterImage fused_px = map_to_pixels(result.segments, result.levels.fused);
                const CmScores scores = oa_fm_kc(confusion(result.change_map, gt));
                const CurveSet curves = roc_pr_curves(fused_px, gt);
                csv << m << ',' << cutoff << ',' << k << ',' << fmt(scores.oa) << ','
                    << fmt(scores.fm) << ',' << fmt(scores.kc) << ',' << fmt(curves.aur) << '\n';
            }
        }
    }
    write_manifest(app, rc, (fs::path(rc.out) / "manifest.txt").string());
    std::cout << "sweep: " << rc.m_list.size() * rc.cutoff_list.size() * rc.k_list.size()
              << " runs -> " << rc.out << '\n';
    return 0;
}

void add_pipeline_flags(CLI::App* sub, RunConfig& rc) {
    sub->add_option("--n", rc.n, "Target vertex count");
    sub->add_option("--k", rc.k, "KNN neighbor count (0 = floor(sqrt(N)))");
    sub->add_option("--m", rc.m, "Polynomial filter order");
    sub->add_option("--cutoff", rc.cutoff, "Filter cut-off frequency in (-1,1)");
    sub->add_option("--iter", rc.iter, "Max detection iterations");
    sub->add_option("--segmentation", rc.segmentation, "patch | superpixel");
    sub->add_option("--p", rc.p, "Patch size (patch mode)");
    sub->add_option("--threshold", rc.threshold, "otsu | kmeans");
    sub->add_option("--operator", rc.op, "wavg | p | lrw");
    sub->add_option("--weights", rc.weights, "binary | inverse | gaussian");
    sub->add_option("--sigma", rc.sigma, "Gaussian weight bandwidth");
    sub->add_option("--compactness", rc.compactness, "SLIC compactness");
    sub->add_option("--min-segment", rc.min_segment, "Min co-segment size before merging");
    sub->add_option("--bands-t1", rc.bands_t1, "Band indices to keep from image 1")->delimiter(',');
    sub->add_option("--bands-t2", rc.bands_t2, "Band indices to keep from image 2")->delimiter(',');
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"VDF-HCD: heterogeneous change detection by vertex-domain graph filtering"};
    app.require_subcommand(1);
    RunConfig rc;

    CLI::App* detect = app.add_subcommand("detect", "Run change detection on an image pair");
    detect->add_option("--t1", rc.t1, "Pre-event image")->required();
    detect->add_option("--t2", rc.t2, "Post-event image")->required();
    detect->add_option("--gt", rc.gt, "Ground-truth mask (optional, enables metrics)");
    detect->add_option("--out", rc.out, "Output directory");
    detect->add_option("--config", rc.config_file, "key=value config file");
    detect->add_option("--seed", rc.seed, "Random seed");
    add_pipeline_flags(detect, rc);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a DI and/or CM against ground truth");
    evaluate->add_option("--di", rc.di, "Difference image (.fmat or grayscale png)");
    evaluate->add_option("--cm", rc.cm, "Binary change map image");
    evaluate->add_option("--gt", rc.gt, "Ground-truth mask")->required();
    evaluate->add_option("--out", rc.out, "Output directory");
    evaluate->add_option("--config", rc.config_file, "key=value config file");

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic heterogeneous pair");
    synth->add_option("--out", rc.out, "Output directory");
    synth->add_option("--config", rc.config_file, "key=value config file");
    synth->add_option("--seed", rc.seed, "Random seed");
    synth->add_option("--height", rc.height, "Scene height");
    synth->add_option("--width", rc.width, "Scene width");
    synth->add_option("--classes", rc.classes, "Number of land-cover classes");
    synth->add_option("--change-fraction", rc.change_fraction, "Fraction of changed pixels");
    synth->add_option("--noise", rc.noise, "Gaussian noise sigma");
    synth->add_option("--channels-a", rc.channels_a, "Modality A channel count");
    synth->add_option("--channels-b", rc.channels_b, "Modality B channel count");

    CLI::App* sweep = app.add_subcommand("sweep", "Grid-sweep M, cutoff and K on one pair");
    sweep->add_option("--t1", rc.t1, "Pre-event image")->required();
    sweep->add_option("--t2", rc.t2, "Post-event image")->required();
    sweep->add_option("--gt", rc.gt, "Ground-truth mask")->required();
    sweep->add_option("--out", rc.out, "Output directory");
    sweep->add_option("--config", rc.config_file, "key=value config file");
    sweep->add_option("--seed", rc.seed, "Random seed");
    sweep->add_option("--m-list", rc.m_list, "Filter orders to sweep")->delimiter(',');
    sweep->add_option("--cutoff-list", rc.cutoff_list, "Cut-offs to sweep")->delimiter(',');
    sweep->add_option("--k-list", rc.k_list, "Neighbor counts to sweep")->delimiter(',');
    add_pipeline_flags(sweep, rc);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!rc.config_file.empty()) apply_config_file(*sub, rc.config_file);
        if (sub == detect) return cmd_detect(*sub, rc);
        if (sub == evaluate) return cmd_evaluate(*sub, rc);
        if (sub == synth) return cmd_synth(*sub, rc);
        if (sub == sweep) return cmd_sweep(*sub, rc);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
