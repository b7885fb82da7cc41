#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gaitprint/signal_model.hpp"

namespace gaitprint {

struct RecordingKey {
    std::string subject;
    int session = 0;  // 1 or 2
    int task = 0;     // 1, 3 or 5 (flat-ground walking)

    bool operator<(const RecordingKey& other) const {
        if (subject != other.subject) return subject < other.subject;
        if (session != other.session) return session < other.session;
        return task < other.task;
    }
};

struct RecordingEntry {
    std::filesystem::path path;
    std::size_t n_samples = 0;
    std::size_t skipped_rows = 0;    // malformed rows dropped while parsing
    std::size_t spacing_warnings = 0;  // t_ms steps outside the +-1 ms band
    TriaxialSeries series;
};

struct LayoutConfig {
    double sample_rate_hz = 100.0;
    std::vector<int> sessions = {1, 2};
    std::vector<int> tasks = {1, 3, 5};
    std::size_t min_samples = 400;  // recordings shorter than 4 s disqualify a subject
};

struct CorpusManifest {
    std::filesystem::path root;
    LayoutConfig layout;
    std::map<RecordingKey, RecordingEntry> recordings;
    std::vector<std::string> filter_log;  // "subject: reason" removals
    std::vector<std::string> warnings;

    std::vector<std::string> subjects() const;
    std::string to_json() const;  // deterministic (sorted keys, no floats)
};

// Discovers root/subject_<id>/session_<s>/task_<t>.csv recordings with
// the bit-exact header "t_ms,acc_x,acc_y,acc_z". Malformed rows are
// skipped and logged; empty or unreadable files are logged and the
// recording is treated as missing. Throws MissingRoot.
CorpusManifest load_corpus(const std::filesystem::path& root, const LayoutConfig& layout = {});

// Subject completeness filters: drop subjects missing any (session,
// task) recording or with any recording under min_samples. Idempotent.
// Throws NoSubjectsRemain when nothing is left.
CorpusManifest apply_subject_filters(const CorpusManifest& manifest);

struct PreprocessedCorpus {
    std::map<RecordingKey, TriaxialSeries> recordings;
    std::vector<std::string> exclusions;  // recordings dropped (with reason)
};

// Per axis, per recording: z-score normalize then moving-average smooth
// (window 4). Degenerate (constant) axes exclude the recording.
PreprocessedCorpus preprocess_corpus(const CorpusManifest& manifest,
                                     std::size_t smoothing_window = 4);

}  // namespace gaitprint
