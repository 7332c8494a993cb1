#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsad/tensor.hpp"

namespace nsad::signals {

// Multivariate stream: one row per channel, one column per sample.
struct Stream {
    std::vector<std::string> channels;
    Tensor data; // C x N

    std::size_t channel_count() const { return channels.size(); }
    std::size_t samples() const { return data.size() == 0 ? 0 : data.cols(); }
};

enum class AnomalyKind { None, Spike, Drift, Stuck, CorrelationBreak };

const char* to_string(AnomalyKind k);
AnomalyKind anomaly_kind_from_string(const std::string& s);

// Ground-truth evaluation record. Never consumed by any training API.
struct AnomalyTag {
    AnomalyKind kind = AnomalyKind::None;
    std::vector<std::size_t> channels; // indices into the stream schema
    std::size_t start = 0;             // sample range [start, end)
    std::size_t end = 0;
};

struct GeneratorConfig {
    std::size_t channels = 6;   // first half "joints", second half coupled "currents"
    std::size_t samples = 40000;
    std::size_t sinusoids = 3;  // harmonics per channel, 1..3
    double amplitude = 1.0;
    double coupling = 0.8;      // current channel = coupling * its joint + own component
    double noise = 0.05;        // gaussian sigma added everywhere
    double anomaly_rate = 0.05; // target fraction of anomalous samples
    double spike_amp = 2.5;
    double drift_amp = 2.2;
    bool spikes = true;
    bool drifts = true;
    bool stucks = true;
    bool corr_breaks = true;
};

struct Generated {
    Stream stream;
    std::vector<AnomalyTag> tags;
};

// Nominal signal model, pinned so tests can evaluate it in closed form:
//   joint channel c:   sum_h frac[h] * A * sin(2*pi * f[h] * t / period(c) + phase(c,h))
//   current channel c: coupling * joint(c - J) + (1 - coupling) * own sinusoid
// with frac = {0.8, 0.3, 0.1}, f = {1, 2.7, 5.19}, period(c) = 40 + 16c and
// phase(c,h) = 2*pi * frac01(0.37c + 0.17h + 0.11). Gaussian noise rides on top.
double nominal_value(const GeneratorConfig& cfg, std::size_t channel, std::size_t t);

Generated generate_stream(const GeneratorConfig& cfg, std::uint64_t seed);

// Fixed-length view into a stream; the unit of training and scoring.
struct Window {
    std::size_t origin = 0;
    Tensor samples; // C x L

    std::size_t channel_count() const { return samples.rows(); }
    std::size_t length() const { return samples.cols(); }
};

std::vector<Window> windowize(const Stream& stream, std::size_t length, std::size_t stride);

struct NormalizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::size_t channel_count() const { return mean.size(); }
};

NormalizationStats fit_normalizer(const std::vector<Window>& windows,
                                  const std::vector<std::string>& channel_names);
Window apply_normalizer(const Window& w, const NormalizationStats& stats);
Window denormalize(const Window& w, const NormalizationStats& stats);

// ---- CSV ------------------------------------------------------------------
// Data: header "timestamp,<ch>..." with integer ticks; values in shortest
// round-trip decimal form. Tag sidecar: kind,channels,start,end with channel
// names semicolon-joined.

Stream ingest_csv(std::istream& in);
Stream ingest_csv_file(const std::string& path);
void export_csv(const Stream& stream, std::ostream& out);
void export_csv_file(const Stream& stream, const std::string& path);

std::vector<AnomalyTag> ingest_tags_csv_file(const std::string& path, const Stream& stream);
void export_tags_csv_file(const std::vector<AnomalyTag>& tags,
                          const std::vector<std::string>& channel_names,
                          const std::string& path);

// Evaluation-only window labels: a window is anomalous iff it covers at least
// a quarter of some tagged interval.
std::vector<std::uint8_t> window_truth(const std::vector<AnomalyTag>& tags,
                                       const std::vector<Window>& windows);

std::string format_double(double v); // shortest round-trip decimal

} // namespace nsad::signals
