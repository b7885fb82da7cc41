#include "gaitprint/synth_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

namespace gaitprint {

namespace {

bool shape_valid(const AxisShape& sh) {
    const auto& a = sh.amplitudes;
    const double p = a[0], q = a[1], r = a[2], s = a[3], t = a[4];
    // PqrstComplex extremum inequalities plus valleys below / peaks above
    // the stance baseline, so the planted knots are true extrema.
    return q > p && q > r && s > r && s > t && p < sh.baseline && r < sh.baseline &&
           t < sh.baseline && q > sh.baseline && s > sh.baseline;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::size_t ms_to_samples(double ms, double fs) {
    return static_cast<std::size_t>(std::llround(ms * fs / 1000.0));
}

// Monotone cubic (smoothstep) segment between two knots; fills the open
// interval (i0, i1), endpoints are written by the knots themselves.
void fill_segment(std::vector<double>& v, std::size_t i0, double a, std::size_t i1, double b) {
    for (std::size_t i = i0 + 1; i < i1; ++i) {
        const double u = static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
        v[i] = a + (b - a) * (3.0 * u * u - 2.0 * u * u * u);
    }
}

struct CyclePlan {
    std::size_t p_index = 0;            // Z-axis P sample
    std::size_t swing_span = 0;         // samples P..T
    std::array<std::size_t, 3> inner;   // Q,R,S offsets from P
    std::array<AxisShape, 3> shapes;    // per-axis planted amplitudes
};

}  // namespace

void GaitParams::validate() const {
    if (cycle_ms < 800.0 || cycle_ms > 1400.0) {
        throw InvalidParams("cycle_ms must be in [800, 1400]");
    }
    if (swing_fraction <= 0.0 || swing_fraction >= 1.0) {
        throw InvalidParams("swing_fraction must be in (0, 1)");
    }
    double frac_sum = 0.0;
    for (double f : interval_fractions) {
        if (f <= 0.0) throw InvalidParams("interval_fractions must be positive");
        frac_sum += f;
    }
    if (std::abs(frac_sum - 1.0) > 1e-12) {
        throw InvalidParams("interval_fractions must sum to 1");
    }
    for (const AxisShape* sh : {&x, &y, &z}) {
        if (!shape_valid(*sh)) {
            throw InvalidParams("axis amplitudes violate the valley/peak pattern");
        }
    }
    if (jitter_rel < 0.0 || noise_sigma < 0.0) {
        throw InvalidParams("jitter_rel and noise_sigma must be >= 0");
    }
    const double swing_ms = cycle_ms * swing_fraction;
    if (swing_ms + pre_p_ramp_ms + post_t_ramp_ms >= cycle_ms) {
        throw InvalidParams("swing plus ramps must fit inside one cycle");
    }
    if (lead_in_ms < pre_p_ramp_ms) {
        throw InvalidParams("lead_in_ms must cover the pre-P ramp");
    }
}

SyntheticRecording generate_recording(const GaitParams& params, double duration_s, double fs) {
    params.validate();
    if (fs <= 0.0) throw InvalidParams("fs must be > 0");
    const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * fs));
    const std::size_t cycle_samples = ms_to_samples(params.cycle_ms, fs);
    if (n < cycle_samples) throw InvalidParams("duration must cover at least one cycle");

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto jitter = [&](double v) { return v * (1.0 + params.jitter_rel * gauss(rng)); };

    const std::size_t pre_ramp = std::max<std::size_t>(1, ms_to_samples(params.pre_p_ramp_ms, fs));
    const std::size_t post_ramp =
        std::max<std::size_t>(1, ms_to_samples(params.post_t_ramp_ms, fs));
    const std::size_t lead = params.axis_lead_samples;
    if (ms_to_samples(params.lead_in_ms, fs) < pre_ramp + lead) {
        throw InvalidParams("lead_in_ms must cover the pre-P ramp plus the axis lead");
    }

    // Plan cycles left to right; a cycle is planted only when its swing
    // and recovery ramp fit inside the recording.
    std::vector<CyclePlan> plan;
    std::size_t p_idx = ms_to_samples(params.lead_in_ms, fs);
    while (true) {
        const double cycle_len_ms = std::clamp(jitter(params.cycle_ms), 800.0, 1400.0);
        const double swing_ms = cycle_len_ms * params.swing_fraction;
        const std::size_t span = std::max<std::size_t>(8, ms_to_samples(swing_ms, fs));

        std::array<double, 4> fracs = params.interval_fractions;
        double fsum = 0.0;
        for (double& f : fracs) {
            f = std::max(0.02, jitter(f));
            fsum += f;
        }
        for (double& f : fracs) f /= fsum;

        CyclePlan cp;
        cp.p_index = p_idx;
        cp.swing_span = span;
        double acc = 0.0;
        std::size_t prev = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            acc += fracs[k];
            std::size_t off = static_cast<std::size_t>(std::llround(acc * span));
            off = std::max(off, prev + 1);
            off = std::min(off, span - (3 - k));  // leave room for later points
            cp.inner[k] = off;
            prev = off;
        }

        const std::array<const AxisShape*, 3> base = {&params.x, &params.y, &params.z};
        for (std::size_t ax = 0; ax < 3; ++ax) {
            AxisShape sh = *base[ax];
            for (double& amp : sh.amplitudes) amp = jitter(amp);
            if (!shape_valid(sh)) sh = *base[ax];  // jitter broke the pattern
            cp.shapes[ax] = sh;
        }

        if (p_idx + span + post_ramp >= n) break;
        plan.push_back(cp);
        p_idx += ms_to_samples(cycle_len_ms, fs);
    }

    SyntheticRecording out;
    std::array<std::vector<double>, 3> axes;
    for (std::size_t ax = 0; ax < 3; ++ax) {
        const AxisShape& base_shape = ax == 0 ? params.x : (ax == 1 ? params.y : params.z);
        axes[ax].assign(n, base_shape.baseline);
    }

    for (const CyclePlan& cp : plan) {
        for (std::size_t ax = 0; ax < 3; ++ax) {
            std::vector<double>& v = axes[ax];
            const AxisShape& sh = cp.shapes[ax];
            const std::size_t shift = ax == 2 ? 0 : lead;  // X/Y precede Z
            const std::size_t p = cp.p_index - shift;
            const std::array<std::size_t, 5> idx = {p, p + cp.inner[0], p + cp.inner[1],
                                                    p + cp.inner[2], p + cp.swing_span};
            // descent into P, the four swing segments, recovery to baseline
            fill_segment(v, p - pre_ramp, sh.baseline, p, sh.amplitudes[0]);
            for (std::size_t k = 0; k < 5; ++k) v[idx[k]] = sh.amplitudes[k];
            for (std::size_t k = 0; k + 1 < 5; ++k) {
                fill_segment(v, idx[k], sh.amplitudes[k], idx[k + 1], sh.amplitudes[k + 1]);
            }
            fill_segment(v, idx[4], sh.amplitudes[4], idx[4] + post_ramp, sh.baseline);

            PlantedCycle cycle;
            for (std::size_t k = 0; k < 5; ++k) cycle.points[k] = {idx[k], sh.amplitudes[k]};
            out.truth.per_axis[ax].push_back(cycle);
        }
    }

    if (params.noise_sigma > 0.0) {
        for (std::size_t ax = 0; ax < 3; ++ax) {
            for (double& v : axes[ax]) v += params.noise_sigma * gauss(rng);
        }
    }

    out.series =
        TriaxialSeries(fs, std::move(axes[0]), std::move(axes[1]), std::move(axes[2]));
    return out;
}

GaitParams sample_subject_params(const CorpusConfig& cfg, std::size_t subject_idx) {
    const std::uint64_t key = cfg.identical_subjects ? 0 : subject_idx;
    std::mt19937_64 rng(splitmix64(cfg.seed ^ (0xa11ce5ULL + key * 0x9e3779b97f4a7c15ULL)));
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    GaitParams p;
    p.cycle_ms = cfg.base_cycle_ms;  // interval structure shared across subjects
    p.jitter_rel = cfg.jitter_rel;
    p.noise_sigma = cfg.noise_sigma;

    auto sample_shape = [&](bool deep_p) {
        AxisShape sh;
        const double pv = deep_p ? uniform(-3.2, -2.0) : uniform(-2.4, -1.2);
        const double q = uniform(0.5, 1.5);
        const double r = uniform(-1.1, -0.3);
        const double s = uniform(0.6, 1.6);
        const double t = deep_p ? uniform(-1.7, -0.9) : uniform(-1.1, -0.4);
        sh.amplitudes = {pv, q, r, s, t};
        return sh;
    };
    p.x = sample_shape(false);
    p.y = sample_shape(false);
    p.z = sample_shape(true);  // P must stay the deepest point on Z
    return p;
}

void generate_corpus(const CorpusConfig& cfg, const std::filesystem::path& root) {
    if (cfg.n_subjects < 2) throw InvalidParams("generate_corpus: need >= 2 subjects");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("generate_corpus: cannot create " + root.string());

    for (std::size_t s = 0; s < cfg.n_subjects; ++s) {
        char subj[32];
        std::snprintf(subj, sizeof(subj), "%03zu", s + 1);
        const GaitParams base = sample_subject_params(cfg, s);
        for (int session : cfg.sessions) {
            const fs::path dir =
                root / ("subject_" + std::string(subj)) / ("session_" + std::to_string(session));
            fs::create_directories(dir, ec);
            if (ec) throw IoError("generate_corpus: cannot create " + dir.string());
            for (const auto& [task, duration_s] : cfg.task_duration_s) {
                GaitParams params = base;
                params.seed = splitmix64(cfg.seed ^ splitmix64((s + 1) * 1000003ULL +
                                                               session * 101ULL + task));
                SyntheticRecording rec = generate_recording(params, duration_s, cfg.fs);

                const fs::path csv_path = dir / ("task_" + std::to_string(task) + ".csv");
                std::ofstream csv(csv_path);
                if (!csv) throw IoError("generate_corpus: cannot write " + csv_path.string());
                csv << "t_ms,acc_x,acc_y,acc_z\n";
                char line[160];
                for (std::size_t i = 0; i < rec.series.size(); ++i) {
                    const long long t_ms = std::llround(static_cast<double>(i) * 1000.0 / cfg.fs);
                    std::snprintf(line, sizeof(line), "%lld,%.6f,%.6f,%.6f\n", t_ms,
                                  rec.series.x[i], rec.series.y[i], rec.series.z[i]);
                    csv << line;
                }

                const fs::path gt_path =
                    dir / ("task_" + std::to_string(task) + ".ground_truth.jsonl");
                std::ofstream gt(gt_path);
                if (!gt) throw IoError("generate_corpus: cannot write " + gt_path.string());
                const std::array<AxisId, 3> ids = {AxisId::X, AxisId::Y, AxisId::Z};
                for (AxisId id : ids) {
                    const auto& cycles = rec.truth.axis(id);
                    for (std::size_t c = 0; c < cycles.size(); ++c) {
                        nlohmann::json j;
                        j["axis"] = axis_name(id);
                        j["cycle"] = c;
                        const char* names[5] = {"p", "q", "r", "s", "t"};
                        for (std::size_t k = 0; k < 5; ++k) {
                            j[names[k]] = {{"index", cycles[c].points[k].index},
                                           {"amp", cycles[c].points[k].amplitude}};
                        }
                        gt << j.dump() << '\n';
                    }
                }
            }
        }
    }
}

}  // namespace gaitprint
