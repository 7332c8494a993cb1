#include "nsad/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nsad/rng.hpp"

namespace nsad::signals {

const char* to_string(AnomalyKind k) {
    switch (k) {
    case AnomalyKind::None: return "none";
    case AnomalyKind::Spike: return "spike";
    case AnomalyKind::Drift: return "drift";
    case AnomalyKind::Stuck: return "stuck";
    case AnomalyKind::CorrelationBreak: return "correlation-break";
    }
    return "none";
}

AnomalyKind anomaly_kind_from_string(const std::string& s) {
    if (s == "none") return AnomalyKind::None;
    if (s == "spike") return AnomalyKind::Spike;
    if (s == "drift") return AnomalyKind::Drift;
    if (s == "stuck") return AnomalyKind::Stuck;
    if (s == "correlation-break") return AnomalyKind::CorrelationBreak;
    throw DataError("unknown anomaly kind '" + s + "'");
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---- generator --------------------------------------------------------------

namespace {

constexpr double kFrac[3] = {0.8, 0.3, 0.1};
constexpr double kHarmonic[3] = {1.0, 2.7, 5.19};

double frac01(double x) { return x - std::floor(x); }

double phase(std::size_t c, std::size_t h) {
    return 2.0 * M_PI * frac01(0.37 * static_cast<double>(c) + 0.17 * static_cast<double>(h) + 0.11);
}

double period(std::size_t c) { return 40.0 + 16.0 * static_cast<double>(c); }

std::size_t joint_count(const GeneratorConfig& cfg) { return (cfg.channels + 1) / 2; }

double base_joint(const GeneratorConfig& cfg, std::size_t c, double t) {
    double v = 0.0;
    const std::size_t H = std::min<std::size_t>(cfg.sinusoids, 3);
    for (std::size_t h = 0; h < H; ++h)
        v += kFrac[h] * cfg.amplitude *
             std::sin(2.0 * M_PI * kHarmonic[h] * t / period(c) + phase(c, h));
    return v;
}

double own_component(const GeneratorConfig& cfg, std::size_t c, double t) {
    return cfg.amplitude * std::sin(2.0 * M_PI * t / period(c) + phase(c, 0));
}

} // namespace

double nominal_value(const GeneratorConfig& cfg, std::size_t channel, std::size_t t) {
    const std::size_t J = joint_count(cfg);
    const double td = static_cast<double>(t);
    if (channel < J) return base_joint(cfg, channel, td);
    const std::size_t partner = channel - J;
    return cfg.coupling * base_joint(cfg, partner, td) +
           (1.0 - cfg.coupling) * own_component(cfg, channel, td);
}

Generated generate_stream(const GeneratorConfig& cfg, std::uint64_t seed) {
    if (cfg.channels == 0) throw ConfigError("generator: channels must be >= 1");
    if (cfg.samples == 0) throw ConfigError("generator: samples must be >= 1");
    if (cfg.noise < 0.0) throw ConfigError("generator: noise must be >= 0");
    if (cfg.anomaly_rate < 0.0 || cfg.anomaly_rate > 0.5)
        throw ConfigError("generator: anomaly_rate must lie in [0, 0.5]");
    if (cfg.sinusoids < 1 || cfg.sinusoids > 3)
        throw ConfigError("generator: sinusoids must be 1..3");

    const std::size_t C = cfg.channels, N = cfg.samples, J = joint_count(cfg);

    Generated out;
    out.stream.channels.reserve(C);
    for (std::size_t c = 0; c < C; ++c) {
        if (c < J)
            out.stream.channels.push_back("joint" + std::to_string(c + 1));
        else
            out.stream.channels.push_back("current" + std::to_string(c - J + 1));
    }

    out.stream.data = Tensor({C, N});
    Rng rng(seed);
    for (std::size_t c = 0; c < C; ++c) {
        double* row = out.stream.data.data() + c * N;
        for (std::size_t t = 0; t < N; ++t)
            row[t] = nominal_value(cfg, c, t) + cfg.noise * rng.normal();
    }

    // ---- anomaly episodes ----
    std::vector<AnomalyKind> kinds;
    if (cfg.spikes) kinds.push_back(AnomalyKind::Spike);
    if (cfg.drifts) kinds.push_back(AnomalyKind::Drift);
    if (cfg.stucks) kinds.push_back(AnomalyKind::Stuck);
    if (cfg.corr_breaks && C > J) kinds.push_back(AnomalyKind::CorrelationBreak);

    if (cfg.anomaly_rate > 0.0 && !kinds.empty()) {
        const double r = cfg.anomaly_rate;
        std::size_t anom_total = 0; // anomalous samples placed
        std::size_t pos = 0;        // end of the last episode
        while (true) {
            const AnomalyKind kind = kinds[rng.uniform_index(kinds.size())];
            std::size_t len;
            if (kind == AnomalyKind::Spike)
                len = 2 + rng.uniform_index(3); // 2..4
            else
                len = 56 + rng.uniform_index(33); // 56..88

            // Gap sized so the running anomalous fraction tracks the target.
            const double want = (static_cast<double>(anom_total + len)) / r;
            double gap = want - static_cast<double>(pos + len);
            gap *= rng.uniform(0.85, 1.15);
            const std::size_t g = std::max<std::size_t>(16, gap > 0.0 ? static_cast<std::size_t>(gap) : 16);

            const std::size_t start = pos + g;
            const std::size_t end = start + len;
            if (end + 16 > N) break;

            std::size_t channel;
            if (kind == AnomalyKind::CorrelationBreak)
                channel = J + rng.uniform_index(C - J);
            else
                channel = rng.uniform_index(C);

            double* row = out.stream.data.data() + channel * N;
            switch (kind) {
            case AnomalyKind::Spike: {
                const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                const double amp = cfg.spike_amp * (0.8 + 0.4 * rng.uniform());
                for (std::size_t t = start; t < end; ++t) row[t] += sign * amp;
                break;
            }
            case AnomalyKind::Drift: {
                const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                for (std::size_t t = start; t < end; ++t) {
                    const double u = static_cast<double>(t - start + 1) / static_cast<double>(len);
                    row[t] += sign * cfg.drift_amp * u;
                }
                break;
            }
            case AnomalyKind::Stuck: {
                const double held = row[start];
                for (std::size_t t = start; t < end; ++t) row[t] = held;
                break;
            }
            case AnomalyKind::CorrelationBreak: {
                // replace the coupled part with an off-frequency sinusoid of
                // similar amplitude; marginals stay plausible, correlation dies
                const std::size_t partner = channel - J;
                for (std::size_t t = start; t < end; ++t) {
                    const double td = static_cast<double>(t);
                    const double fake = cfg.amplitude *
                        std::sin(2.0 * M_PI * 1.7 * td / period(channel) + 1.3);
                    row[t] += cfg.coupling * (fake - base_joint(cfg, partner, td));
                }
                break;
            }
            case AnomalyKind::None:
                break;
            }

            out.tags.push_back(AnomalyTag{kind, {channel}, start, end});
            anom_total += len;
            pos = end;
        }
    }

    if (out.tags.empty())
        out.tags.push_back(AnomalyTag{AnomalyKind::None, {}, 0, N});
    return out;
}

// ---- windowing ---------------------------------------------------------------

std::vector<Window> windowize(const Stream& stream, std::size_t length, std::size_t stride) {
    const std::size_t C = stream.channel_count(), N = stream.samples();
    if (length == 0 || length > N)
        throw DataError("windowize: window length " + std::to_string(length) +
                        " exceeds stream length " + std::to_string(N));
    if (stride == 0) throw ConfigError("windowize: stride must be >= 1");

    const std::size_t count = (N - length) / stride + 1;
    std::vector<Window> out;
    out.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        Window win;
        win.origin = w * stride;
        win.samples = Tensor({C, length});
        for (std::size_t c = 0; c < C; ++c) {
            const double* src = stream.data.data() + c * N + win.origin;
            double* dst = win.samples.data() + c * length;
            std::copy(src, src + length, dst);
        }
        out.push_back(std::move(win));
    }
    return out;
}

NormalizationStats fit_normalizer(const std::vector<Window>& windows,
                                  const std::vector<std::string>& channel_names) {
    if (windows.empty()) throw DataError("fit_normalizer: empty window corpus");
    const std::size_t C = windows.front().channel_count();
    const std::size_t L = windows.front().length();

    NormalizationStats stats;
    stats.mean.assign(C, 0.0);
    stats.stddev.assign(C, 0.0);

    const double n = static_cast<double>(windows.size() * L);
    for (std::size_t c = 0; c < C; ++c) {
        double sum = 0.0;
        for (const Window& w : windows) {
            const double* row = w.samples.data() + c * L;
            for (std::size_t t = 0; t < L; ++t) sum += row[t];
        }
        const double mean = sum / n;
        double sq = 0.0;
        for (const Window& w : windows) {
            const double* row = w.samples.data() + c * L;
            for (std::size_t t = 0; t < L; ++t) sq += (row[t] - mean) * (row[t] - mean);
        }
        const double var = sq / n;
        if (var < 1e-24) {
            const std::string name = c < channel_names.size() ? channel_names[c]
                                                              : "#" + std::to_string(c);
            throw DataError("fit_normalizer: channel '" + name + "' has zero variance");
        }
        stats.mean[c] = mean;
        stats.stddev[c] = std::sqrt(var);
    }
    return stats;
}

Window apply_normalizer(const Window& w, const NormalizationStats& stats) {
    const std::size_t C = w.channel_count(), L = w.length();
    if (stats.channel_count() != C)
        throw ShapeError("apply_normalizer: stats cover a different channel count");
    Window out;
    out.origin = w.origin;
    out.samples = Tensor({C, L});
    for (std::size_t c = 0; c < C; ++c) {
        const double* src = w.samples.data() + c * L;
        double* dst = out.samples.data() + c * L;
        for (std::size_t t = 0; t < L; ++t) dst[t] = (src[t] - stats.mean[c]) / stats.stddev[c];
    }
    return out;
}

Window denormalize(const Window& w, const NormalizationStats& stats) {
    const std::size_t C = w.channel_count(), L = w.length();
    if (stats.channel_count() != C)
        throw ShapeError("denormalize: stats cover a different channel count");
    Window out;
    out.origin = w.origin;
    out.samples = Tensor({C, L});
    for (std::size_t c = 0; c < C; ++c) {
        const double* src = w.samples.data() + c * L;
        double* dst = out.samples.data() + c * L;
        for (std::size_t t = 0; t < L; ++t) dst[t] = src[t] * stats.stddev[c] + stats.mean[c];
    }
    return out;
}

// ---- CSV ----------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
        throw DataError("csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                        ", column '" + col + "'");
    return v;
}

} // namespace

Stream ingest_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw DataError("csv: empty file");
    const auto header = split_csv_line(line);
    if (header.size() < 2)
        throw DataError("csv: need a timestamp column plus at least one channel");

    Stream stream;
    stream.channels.assign(header.begin() + 1, header.end());
    const std::size_t C = stream.channels.size();

    std::vector<std::vector<double>> cols(C);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("csv: ragged row " + std::to_string(row) + " (" +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()) + ")");
        for (std::size_t c = 0; c < C; ++c)
            cols[c].push_back(parse_cell(cells[c + 1], row, stream.channels[c]));
    }
    const std::size_t N = cols.empty() ? 0 : cols[0].size();
    if (N == 0) throw DataError("csv: no data rows");

    stream.data = Tensor({C, N});
    for (std::size_t c = 0; c < C; ++c)
        std::copy(cols[c].begin(), cols[c].end(), stream.data.data() + c * N);
    return stream;
}

Stream ingest_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return ingest_csv(in);
}

void export_csv(const Stream& stream, std::ostream& out) {
    out << "timestamp";
    for (const auto& ch : stream.channels) out << ',' << ch;
    out << '\n';
    const std::size_t C = stream.channel_count(), N = stream.samples();
    for (std::size_t t = 0; t < N; ++t) {
        out << t;
        for (std::size_t c = 0; c < C; ++c) out << ',' << format_double(stream.data(c, t));
        out << '\n';
    }
}

void export_csv_file(const Stream& stream, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    export_csv(stream, out);
    if (!out) throw DataError("write failed for '" + path + "'");
}

void export_tags_csv_file(const std::vector<AnomalyTag>& tags,
                          const std::vector<std::string>& channel_names,
                          const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "kind,channels,start,end\n";
    for (const auto& tag : tags) {
        out << to_string(tag.kind) << ',';
        for (std::size_t i = 0; i < tag.channels.size(); ++i) {
            if (i) out << ';';
            out << channel_names.at(tag.channels[i]);
        }
        out << ',' << tag.start << ',' << tag.end << '\n';
    }
}

std::vector<AnomalyTag> ingest_tags_csv_file(const std::string& path, const Stream& stream) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("tags csv: empty file");

    auto channel_index = [&stream](const std::string& name) {
        for (std::size_t c = 0; c < stream.channels.size(); ++c)
            if (stream.channels[c] == name) return c;
        throw DataError("tags csv: unknown channel '" + name + "'");
    };

    std::vector<AnomalyTag> tags;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4)
            throw DataError("tags csv: ragged row " + std::to_string(row));
        AnomalyTag tag;
        tag.kind = anomaly_kind_from_string(cells[0]);
        if (!cells[1].empty()) {
            std::stringstream ss(cells[1]);
            std::string name;
            while (std::getline(ss, name, ';')) tag.channels.push_back(channel_index(name));
        }
        tag.start = static_cast<std::size_t>(std::stoull(cells[2]));
        tag.end = static_cast<std::size_t>(std::stoull(cells[3]));
        if (tag.end > stream.samples() || tag.start > tag.end)
            throw DataError("tags csv: interval out of bounds at row " + std::to_string(row));
        tags.push_back(std::move(tag));
    }
    return tags;
}

std::vector<std::uint8_t> window_truth(const std::vector<AnomalyTag>& tags,
                                       const std::vector<Window>& windows) {
    std::vector<std::uint8_t> out(windows.size(), 0);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const std::size_t lo = windows[w].origin;
        const std::size_t hi = lo + windows[w].length();
        for (const auto& tag : tags) {
            if (tag.kind == AnomalyKind::None) continue;
            const std::size_t s = std::max(lo, tag.start);
            const std::size_t e = std::min(hi, tag.end);
            const double overlap = e > s ? static_cast<double>(e - s) : 0.0;
            if (overlap >= 0.25 * static_cast<double>(tag.end - tag.start)) {
                out[w] = 1;
                break;
            }
        }
    }
    return out;
}

} // namespace nsad::signals
