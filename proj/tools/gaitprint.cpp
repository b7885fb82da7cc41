// gaitprint: batch pipeline for PQRST-complex gait authentication
// experiments. Subcommands: synth, detect, features, evaluate, report.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitprint/dataset_ingest.hpp"
#include "gaitprint/evaluation.hpp"
#include "gaitprint/synth_oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string input;
    std::string output;
    std::string config_file;
    std::uint64_t seed = 0;
    int verbosity = 0;
};

std::string default_input_root(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("GAITPRINT_DATA")) return env;
    return {};
}

// Config-file values fill in options the user did not pass on the
// command line (precedence: flags > config file > defaults).
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gaitprint::IoError("cannot read config file: " + path);
    json cfg;
    in >> cfg;
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr || opt->count() > 0) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) opt->add_result("true");
        } else if (value.is_string()) {
            opt->add_result(value.get<std::string>());
        } else {
            opt->add_result(value.dump());
        }
        opt->run_callback();
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw gaitprint::IoError("cannot write " + path.string());
    out << text;
}

fs::path prepare_output(const std::string& output, const std::string& input) {
    if (output.empty()) throw gaitprint::Error("--output is required");
    if (!input.empty() && fs::weakly_canonical(output) == fs::weakly_canonical(input)) {
        throw gaitprint::Error("--output must differ from --input");
    }
    fs::create_directories(output);
    return output;
}

void echo_config(const fs::path& outdir, const std::string& command, const json& effective) {
    json j = effective;
    j["command"] = command;
    write_text(outdir / "effective_config.json", j.dump(2) + "\n");
}

struct PipelineArtifacts {
    gaitprint::CorpusManifest manifest;
    gaitprint::PreprocessedCorpus preprocessed;
};

PipelineArtifacts load_and_preprocess(const std::string& input) {
    const std::string root = default_input_root(input);
    if (root.empty()) {
        throw gaitprint::Error("no input: pass --input or set GAITPRINT_DATA");
    }
    PipelineArtifacts art;
    art.manifest = gaitprint::apply_subject_filters(gaitprint::load_corpus(root));
    art.preprocessed = gaitprint::preprocess_corpus(art.manifest);
    return art;
}

json point_json(const gaitprint::ExtremumPoint& pt) {
    return {{"index", pt.index}, {"amp", pt.amplitude}};
}

int cmd_synth(const CommonArgs& common, const gaitprint::CorpusConfig& cfg) {
    const fs::path outdir = prepare_output(common.output, common.input);
    gaitprint::generate_corpus(cfg, outdir);
    json eff = {{"subjects", cfg.n_subjects},
                {"seed", cfg.seed},
                {"fs", cfg.fs},
                {"noise", cfg.noise_sigma},
                {"jitter", cfg.jitter_rel},
                {"identical_subjects", cfg.identical_subjects}};
    for (const auto& [task, dur] : cfg.task_duration_s) {
        eff["durations"]["task_" + std::to_string(task)] = dur;
    }
    echo_config(outdir, "synth", eff);
    std::cout << "wrote " << cfg.n_subjects << "-subject corpus to " << outdir.string() << "\n";
    return 0;
}

json detector_config_json(const gaitprint::DetectorConfig& cfg) {
    return {{"cycle_min_ms", cfg.cycle_min_ms},
            {"cycle_max_ms", cfg.cycle_max_ms},
            {"backtrack_ms", cfg.backtrack_ms},
            {"qrst_search_ms", cfg.qrst_search_ms},
            {"prominence_gate", cfg.prominence_gate},
            {"anchor_max_percentile", cfg.anchor_max_percentile}};
}

int cmd_detect(const CommonArgs& common, const gaitprint::DetectorConfig& det_cfg) {
    const fs::path outdir = prepare_output(common.output, common.input);
    const PipelineArtifacts art = load_and_preprocess(common.input);

    std::ostringstream complexes;
    json diagnostics;
    diagnostics["recordings"] = json::array();
    const std::array<gaitprint::AxisId, 3> ids = {gaitprint::AxisId::X, gaitprint::AxisId::Y,
                                                  gaitprint::AxisId::Z};
    for (const auto& [key, rec] : art.preprocessed.recordings) {
        gaitprint::DetectionResult det;
        try {
            det = gaitprint::detect_complexes(rec, det_cfg);
        } catch (const gaitprint::SeriesTooShort& e) {
            diagnostics["recordings"].push_back({{"subject", key.subject},
                                                 {"session", key.session},
                                                 {"task", key.task},
                                                 {"error", e.what()}});
            continue;
        }
        for (gaitprint::AxisId id : ids) {
            for (const gaitprint::PqrstComplex& c : det.axis(id)) {
                json line = {{"subject", key.subject}, {"session", key.session},
                             {"task", key.task},       {"axis", gaitprint::axis_name(id)},
                             {"p", point_json(c.p)},   {"q", point_json(c.q)},
                             {"r", point_json(c.r)},   {"s", point_json(c.s)},
                             {"t", point_json(c.t)}};
                complexes << line.dump() << '\n';
            }
        }
        json rec_diag = {{"subject", key.subject},
                         {"session", key.session},
                         {"task", key.task},
                         {"anchors", det.diagnostics.n_anchors},
                         {"gaps", det.diagnostics.n_gaps}};
        for (gaitprint::AxisId id : ids) {
            const auto& ax = det.diagnostics.axis(id);
            rec_diag["axes"][gaitprint::axis_name(id)] = {
                {"completed", ax.completed},
                {"discarded_incomplete", ax.discarded_incomplete},
                {"discarded_invalid", ax.discarded_invalid}};
        }
        diagnostics["recordings"].push_back(rec_diag);
    }
    diagnostics["preprocess_exclusions"] = art.preprocessed.exclusions;
    diagnostics["filter_log"] = art.manifest.filter_log;

    write_text(outdir / "complexes.jsonl", complexes.str());
    write_text(outdir / "diagnostics.json", diagnostics.dump(2) + "\n");
    write_text(outdir / "manifest.json", art.manifest.to_json() + "\n");
    echo_config(outdir, "detect", detector_config_json(det_cfg));
    std::cout << "wrote complexes.jsonl and diagnostics.json to " << outdir.string() << "\n";
    return 0;
}

int cmd_features(const CommonArgs& common, const gaitprint::DetectorConfig& det_cfg,
                 std::size_t bins, bool per_subject) {
    const fs::path outdir = prepare_output(common.output, common.input);
    const PipelineArtifacts art = load_and_preprocess(common.input);
    const gaitprint::FeatureCorpus corpus =
        gaitprint::build_feature_corpus(art.preprocessed, det_cfg);

    std::ostringstream csv;
    csv << gaitprint::kFeatureCsvHeader << '\n';
    std::map<gaitprint::AxisId, std::vector<gaitprint::FeatureVector>> pooled;
    std::map<std::pair<std::string, gaitprint::AxisId>, std::vector<gaitprint::FeatureVector>>
        by_subject;
    for (const auto& [subject, sessions] : corpus) {
        for (const auto& [session, vectors] : sessions) {
            for (const gaitprint::FeatureVector& fv : vectors) {
                csv << gaitprint::feature_csv_row(fv) << '\n';
                pooled[fv.axis_id].push_back(fv);
                if (per_subject) by_subject[{subject, fv.axis_id}].push_back(fv);
            }
        }
    }
    write_text(outdir / "features.csv", csv.str());

    // Plot data for the per-feature histograms: one row per bin.
    std::ostringstream hist;
    hist << (per_subject ? "subject,axis,feature,bin_lo,bin_hi,count\n"
                         : "axis,feature,bin_lo,bin_hi,count\n");
    char buf[160];
    auto emit = [&](const std::string& prefix, gaitprint::AxisId axis,
                    const std::vector<gaitprint::FeatureVector>& vectors) {
        if (vectors.empty()) return;
        for (const auto& h : gaitprint::feature_histograms(vectors, bins)) {
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                std::snprintf(buf, sizeof(buf), "%s%s,%s,%.6f,%.6f,%zu\n", prefix.c_str(),
                              gaitprint::axis_name(axis), h.feature.c_str(), h.edges[b],
                              h.edges[b + 1], h.counts[b]);
                hist << buf;
            }
        }
    };
    if (per_subject) {
        for (const auto& [key, vectors] : by_subject) emit(key.first + ",", key.second, vectors);
    } else {
        for (const auto& [axis, vectors] : pooled) emit("", axis, vectors);
    }
    write_text(outdir / "histograms.csv", hist.str());

    json eff = detector_config_json(det_cfg);
    eff["bins"] = bins;
    eff["per_subject"] = per_subject;
    echo_config(outdir, "features", eff);
    std::cout << "wrote features.csv and histograms.csv to " << outdir.string() << "\n";
    return 0;
}

json protocol_config_json(const gaitprint::ProtocolConfig& cfg) {
    json axes = json::array(), sets = json::array(), classifiers = json::array();
    for (auto a : cfg.axes) axes.push_back(gaitprint::axis_name(a));
    for (auto s : cfg.sets) sets.push_back(gaitprint::feature_set_name(s));
    for (auto c : cfg.classifiers) classifiers.push_back(gaitprint::classifier_name(c));
    return {{"axes", axes},
            {"sets", sets},
            {"classifiers", classifiers},
            {"seed", cfg.seed},
            {"balance_train", cfg.balance_train},
            {"balance_test", cfg.balance_test},
            {"pooled_eer", cfg.pooled_eer},
            {"svm_c_param", cfg.svm_c_param},
            {"svm_epochs", cfg.svm_epochs}};
}

int cmd_evaluate(const CommonArgs& common, const gaitprint::DetectorConfig& det_cfg,
                 const gaitprint::ProtocolConfig& proto_cfg) {
    const fs::path outdir = prepare_output(common.output, common.input);
    const PipelineArtifacts art = load_and_preprocess(common.input);
    const gaitprint::FeatureCorpus corpus =
        gaitprint::build_feature_corpus(art.preprocessed, det_cfg);
    const gaitprint::EvalTable table = gaitprint::run_protocol(corpus, proto_cfg);

    write_text(outdir / "eval_table.csv", gaitprint::eval_table_csv(table));
    write_text(outdir / "eval_table.json", gaitprint::eval_table_json(table) + "\n");
    write_text(outdir / "pair_detail.csv", gaitprint::pair_detail_csv(table));
    json eff = protocol_config_json(proto_cfg);
    eff["detector"] = detector_config_json(det_cfg);
    echo_config(outdir, "evaluate", eff);
    std::cout << "wrote eval_table.csv/json and pair_detail.csv to " << outdir.string() << "\n";
    return 0;
}

int cmd_report(const std::string& input, const std::string& output) {
    const fs::path table_path = fs::path(input) / "eval_table.json";
    std::ifstream in(table_path);
    if (!in) {
        throw gaitprint::Error("report: " + table_path.string() +
                               " not found (run `gaitprint evaluate` first)");
    }
    json table;
    in >> table;

    std::ostringstream rep;
    rep << "PQRST gait authentication summary\n";
    rep << "=================================\n\n";
    rep << "axis  set  classifier  mean_ccr  mean_eer  n_pairs\n";
    std::map<std::pair<std::string, std::string>, double> ccr_by_axis_set;  // lda/svm mean
    std::map<std::string, std::vector<double>> ccr_by_axis;
    for (const auto& row : table["rows"]) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-4s  %-3s  %-10s  %8.2f  %8.2f  %7zu\n",
                      row["axis"].get<std::string>().c_str(),
                      row["set"].get<std::string>().c_str(),
                      row["classifier"].get<std::string>().c_str(),
                      row["mean_ccr"].get<double>(), row["mean_eer"].get<double>(),
                      row["n_pairs"].get<std::size_t>());
        rep << line;
        const auto key = std::make_pair(row["axis"].get<std::string>(),
                                        row["set"].get<std::string>());
        ccr_by_axis_set[key] += row["mean_ccr"].get<double>() / 2.0;  // mean over classifiers
        ccr_by_axis[key.first].push_back(row["mean_ccr"].get<double>());
    }

    rep << "\nDirectional checks\n------------------\n";
    bool obs1_all = true;
    for (const std::string axis : {"x", "y", "z"}) {
        const auto s1 = ccr_by_axis_set.find({axis, "1"});
        const auto s2 = ccr_by_axis_set.find({axis, "2"});
        if (s1 == ccr_by_axis_set.end() || s2 == ccr_by_axis_set.end()) continue;
        const bool holds = s1->second > s2->second;
        obs1_all = obs1_all && holds;
        char line[200];
        std::snprintf(line, sizeof(line),
                      "amplitude vs interval CCR on %s: %.2f vs %.2f -> %s\n", axis.c_str(),
                      s1->second, s2->second, holds ? "amplitude better" : "NOT better");
        rep << line;
    }
    rep << (obs1_all ? "[check] amplitude features outperform interval features\n"
                     : "[check] FAILED: interval features outperform amplitude features "
                       "somewhere\n");

    auto axis_mean = [&](const std::string& axis) {
        const auto it = ccr_by_axis.find(axis);
        if (it == ccr_by_axis.end() || it->second.empty()) return 0.0;
        double sum = 0.0;
        for (double v : it->second) sum += v;
        return sum / static_cast<double>(it->second.size());
    };
    const double mx = axis_mean("x"), my = axis_mean("y"), mz = axis_mean("z");
    if (mx > 0.0 && my > 0.0 && mz > 0.0) {
        const bool obs2 = my > mx && mz > mx;
        char line[200];
        std::snprintf(line, sizeof(line),
                      "mean CCR by axis: x=%.2f y=%.2f z=%.2f -> %s\n", mx, my, mz,
                      obs2 ? "y and z outperform x" : "y/z do NOT both outperform x");
        rep << line;
        rep << (obs2 ? "[check] y and z axes outperform x\n"
                     : "[check] FAILED: y and z do not both outperform x\n");
    }

    std::cout << rep.str();
    if (!output.empty()) {
        fs::create_directories(output);
        write_text(fs::path(output) / "report.txt", rep.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PQRST-complex gait cycle detection and pairwise authentication"};
    app.require_subcommand(1);

    CommonArgs common;
    gaitprint::CorpusConfig synth_cfg;
    gaitprint::DetectorConfig det_cfg;
    gaitprint::ProtocolConfig proto_cfg;
    std::string durations = "20,60,20";
    std::string axes = "x,y,z", sets = "1,2,3", classifiers = "lda,svm";
    std::size_t bins = 30;
    bool per_subject = false;
    double lda_reg = -1.0;

    auto add_common = [&](CLI::App* cmd, bool needs_input, bool needs_seed) {
        if (needs_input) {
            cmd->add_option("--input,-i", common.input,
                            "input corpus root (default: $GAITPRINT_DATA)");
        }
        cmd->add_option("--output,-o", common.output, "output directory")->required();
        cmd->add_option("--config", common.config_file, "JSON config file (flags win)");
        auto* seed = cmd->add_option("--seed", common.seed, "RNG seed");
        if (needs_seed) seed->required();
        cmd->add_flag("-v,--verbose", common.verbosity, "increase verbosity");
        return cmd;
    };
    auto add_detector_flags = [&](CLI::App* cmd) {
        cmd->add_option("--cycle-min", det_cfg.cycle_min_ms, "minimum gait cycle (ms)");
        cmd->add_option("--cycle-max", det_cfg.cycle_max_ms, "maximum gait cycle (ms)");
        cmd->add_option("--backtrack", det_cfg.backtrack_ms, "X/Y P lookback before Z's P (ms)");
        cmd->add_option("--qrst-search", det_cfg.qrst_search_ms, "Q..T search bound (ms)");
        cmd->add_option("--anchor-percentile", det_cfg.anchor_max_percentile,
                        "anchors must lie below this amplitude percentile");
        cmd->add_flag("--no-prominence-gate",
                      [&](std::size_t count) { det_cfg.prominence_gate = count == 0; },
                      "disable the anchor prominence gate");
    };

    CLI::App* synth = add_common(app.add_subcommand("synth", "generate a synthetic corpus"),
                                 false, true);
    synth->add_option("--subjects", synth_cfg.n_subjects, "number of subjects")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10000}));
    synth->add_option("--noise", synth_cfg.noise_sigma, "additive Gaussian noise sd");
    synth->add_option("--jitter", synth_cfg.jitter_rel, "relative cycle-to-cycle jitter sd");
    synth->add_option("--fs", synth_cfg.fs, "sample rate (Hz)");
    synth->add_option("--durations", durations, "task 1,3,5 durations in seconds (a,b,c)");
    synth->add_flag("--identical-subjects", synth_cfg.identical_subjects,
                    "give every subject identical gait parameters");

    CLI::App* detect =
        add_common(app.add_subcommand("detect", "detect PQRST complexes"), true, false);
    add_detector_flags(detect);

    CLI::App* features = add_common(
        app.add_subcommand("features", "extract features and histogram plot data"), true, false);
    add_detector_flags(features);
    features->add_option("--bins", bins, "histogram bins");
    features->add_flag("--per-subject", per_subject, "group histograms per subject");

    CLI::App* evaluate = add_common(
        app.add_subcommand("evaluate", "run the pairwise authentication protocol"), true, true);
    add_detector_flags(evaluate);
    evaluate->add_option("--axes", axes, "axes to evaluate (x,y,z)");
    evaluate->add_option("--sets", sets, "feature sets to evaluate (1,2,3)");
    evaluate->add_option("--classifiers", classifiers, "classifiers to evaluate (lda,svm)");
    evaluate->add_option("--svm-epochs", proto_cfg.svm_epochs, "SVM training epochs");
    evaluate->add_option("--svm-c", proto_cfg.svm_c_param, "SVM soft-margin cost");
    evaluate->add_option("--lda-reg", lda_reg, "LDA covariance regularization (<0 = auto)");
    evaluate->add_flag("--pooled-eer", proto_cfg.pooled_eer,
                       "also compute EER over scores pooled across pairs");

    CLI::App* report = app.add_subcommand("report", "summarize an evaluate output directory");
    std::string report_input, report_output;
    report->add_option("--input,-i", report_input, "directory with eval_table.json")->required();
    report->add_option("--output,-o", report_output, "optional directory for report.txt");

    CLI11_PARSE(app, argc, argv);

    try {
        for (CLI::App* cmd : {synth, detect, features, evaluate}) {
            if (cmd->parsed() && !common.config_file.empty()) {
                apply_config_file(cmd, common.config_file);
            }
        }

        if (synth->parsed()) {
            synth_cfg.seed = common.seed;
            std::stringstream ss(durations);
            std::string item;
            const int task_ids[3] = {1, 3, 5};
            for (int k = 0; k < 3 && std::getline(ss, item, ','); ++k) {
                synth_cfg.task_duration_s[task_ids[k]] = std::stod(item);
            }
            return cmd_synth(common, synth_cfg);
        }
        if (detect->parsed()) return cmd_detect(common, det_cfg);
        if (features->parsed()) return cmd_features(common, det_cfg, bins, per_subject);
        if (evaluate->parsed()) {
            proto_cfg.seed = common.seed;
            proto_cfg.axes.clear();
            proto_cfg.sets.clear();
            proto_cfg.classifiers.clear();
            std::stringstream sa(axes), st(sets), sc(classifiers);
            std::string item;
            while (std::getline(sa, item, ',')) {
                proto_cfg.axes.push_back(gaitprint::axis_from_name(item));
            }
            while (std::getline(st, item, ',')) {
                proto_cfg.sets.push_back(gaitprint::feature_set_from_name(item));
            }
            while (std::getline(sc, item, ',')) {
                proto_cfg.classifiers.push_back(gaitprint::classifier_from_name(item));
            }
            if (lda_reg >= 0.0) proto_cfg.lda_regularization = lda_reg;
            return cmd_evaluate(common, det_cfg, proto_cfg);
        }
        if (report->parsed()) return cmd_report(report_input, report_output);
    } catch (const gaitprint::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
