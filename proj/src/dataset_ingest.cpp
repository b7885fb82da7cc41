#include "gaitprint/dataset_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

namespace gaitprint {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCsvHeader = "t_ms,acc_x,acc_y,acc_z";

bool parse_row(const std::string& line, double out[4]) {
    const char* p = line.c_str();
    for (int field = 0; field < 4; ++field) {
        char* end = nullptr;
        out[field] = std::strtod(p, &end);
        if (end == p) return false;
        p = end;
        if (field < 3) {
            if (*p != ',') return false;
            ++p;
        }
    }
    while (*p == '\r' || *p == ' ') ++p;
    return *p == '\0';
}

std::string strip_eol(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

}  // namespace

std::vector<std::string> CorpusManifest::subjects() const {
    std::vector<std::string> out;
    for (const auto& [key, entry] : recordings) {
        if (out.empty() || out.back() != key.subject) out.push_back(key.subject);
    }
    return out;
}

std::string CorpusManifest::to_json() const {
    nlohmann::json j;
    j["root"] = root.string();
    j["sample_rate_hz"] = layout.sample_rate_hz;
    j["sd_convention"] = kSdConvention;
    j["recordings"] = nlohmann::json::array();
    for (const auto& [key, entry] : recordings) {
        j["recordings"].push_back({{"subject", key.subject},
                                   {"session", key.session},
                                   {"task", key.task},
                                   {"path", entry.path.string()},
                                   {"n_samples", entry.n_samples},
                                   {"skipped_rows", entry.skipped_rows},
                                   {"spacing_warnings", entry.spacing_warnings}});
    }
    j["filter_log"] = filter_log;
    j["warnings"] = warnings;
    return j.dump(2);
}

CorpusManifest load_corpus(const fs::path& root, const LayoutConfig& layout) {
    if (!fs::exists(root) || !fs::is_directory(root)) {
        throw MissingRoot("load_corpus: no such directory: " + root.string());
    }
    CorpusManifest manifest;
    manifest.root = root;
    manifest.layout = layout;

    std::vector<std::string> subject_dirs;
    for (const auto& dir : fs::directory_iterator(root)) {
        if (!dir.is_directory()) continue;
        const std::string name = dir.path().filename().string();
        if (name.rfind("subject_", 0) == 0) subject_dirs.push_back(name.substr(8));
    }
    std::sort(subject_dirs.begin(), subject_dirs.end());

    const double expect_step_ms = 1000.0 / layout.sample_rate_hz;
    for (const std::string& subject : subject_dirs) {
        for (int session : layout.sessions) {
            for (int task : layout.tasks) {
                const fs::path path = root / ("subject_" + subject) /
                                      ("session_" + std::to_string(session)) /
                                      ("task_" + std::to_string(task) + ".csv");
                if (!fs::exists(path)) continue;

                std::ifstream in(path);
                if (!in) {
                    manifest.warnings.push_back(path.string() + ": unreadable, skipped");
                    continue;
                }
                std::string line;
                if (!std::getline(in, line) || strip_eol(line) != kCsvHeader) {
                    manifest.warnings.push_back(path.string() + ": bad header, skipped");
                    continue;
                }

                RecordingEntry entry;
                entry.path = path;
                std::vector<double> xs, ys, zs;
                double prev_t = 0.0;
                bool have_prev = false;
                std::size_t line_no = 1;
                while (std::getline(in, line)) {
                    ++line_no;
                    const std::string row = strip_eol(line);
                    if (row.empty()) continue;
                    double fields[4];
                    if (!parse_row(row, fields)) {
                        ++entry.skipped_rows;
                        manifest.warnings.push_back(path.string() + ":" +
                                                    std::to_string(line_no) +
                                                    ": malformed row skipped");
                        continue;
                    }
                    if (have_prev &&
                        std::abs(fields[0] - prev_t - expect_step_ms) > 1.0) {
                        ++entry.spacing_warnings;
                    }
                    prev_t = fields[0];
                    have_prev = true;
                    xs.push_back(fields[1]);
                    ys.push_back(fields[2]);
                    zs.push_back(fields[3]);
                }
                if (xs.empty()) {
                    manifest.warnings.push_back(path.string() + ": empty recording");
                    continue;
                }
                entry.n_samples = xs.size();
                RecordingOrigin origin{subject, session, task, path.string()};
                entry.series = TriaxialSeries(layout.sample_rate_hz, std::move(xs),
                                              std::move(ys), std::move(zs), origin);
                manifest.recordings.emplace(RecordingKey{subject, session, task},
                                            std::move(entry));
            }
        }
    }
    return manifest;
}

CorpusManifest apply_subject_filters(const CorpusManifest& manifest) {
    CorpusManifest out = manifest;
    out.recordings.clear();

    std::set<std::string> subjects;
    for (const auto& [key, entry] : manifest.recordings) subjects.insert(key.subject);

    const std::size_t expected =
        manifest.layout.sessions.size() * manifest.layout.tasks.size();
    std::set<std::string> removed;
    for (const std::string& subject : subjects) {
        std::size_t found = 0;
        bool short_recording = false;
        for (int session : manifest.layout.sessions) {
            for (int task : manifest.layout.tasks) {
                const auto it = manifest.recordings.find({subject, session, task});
                if (it == manifest.recordings.end()) continue;
                ++found;
                if (it->second.n_samples < manifest.layout.min_samples) {
                    short_recording = true;
                }
            }
        }
        if (found < expected) {
            removed.insert(subject);
            out.filter_log.push_back(subject + ": incomplete (has " + std::to_string(found) +
                                     " of " + std::to_string(expected) + " recordings)");
        } else if (short_recording) {
            removed.insert(subject);
            out.filter_log.push_back(subject + ": recording under " +
                                     std::to_string(manifest.layout.min_samples) + " samples");
        }
    }

    for (const auto& [key, entry] : manifest.recordings) {
        if (removed.count(key.subject) == 0) out.recordings.emplace(key, entry);
    }
    if (out.recordings.empty()) {
        throw NoSubjectsRemain("apply_subject_filters: no subjects left after filtering");
    }
    return out;
}

PreprocessedCorpus preprocess_corpus(const CorpusManifest& manifest,
                                     std::size_t smoothing_window) {
    PreprocessedCorpus out;
    for (const auto& [key, entry] : manifest.recordings) {
        try {
            TriaxialSeries rec = entry.series;
            const std::array<AxisId, 3> ids = {AxisId::X, AxisId::Y, AxisId::Z};
            std::array<std::vector<double>, 3> processed;
            Provenance prov;
            for (std::size_t a = 0; a < 3; ++a) {
                AxisSeries axis = rec.axis(ids[a]);
                axis = zscore_normalize(axis);
                axis = smooth_moving_average(axis, smoothing_window);
                prov = axis.provenance;
                processed[a] = std::move(axis.values);
            }
            rec.x = std::move(processed[0]);
            rec.y = std::move(processed[1]);
            rec.z = std::move(processed[2]);
            rec.provenance = prov;
            out.recordings.emplace(key, std::move(rec));
        } catch (const DegenerateSeries& e) {
            out.exclusions.push_back(entry.path.string() + ": " + e.what());
        } catch (const WindowTooLarge& e) {
            out.exclusions.push_back(entry.path.string() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace gaitprint
