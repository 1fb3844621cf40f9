#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphfx/audio_buffer.hpp"
#include "graphfx/graph.hpp"
#include "graphfx/tokenizer.hpp"

namespace graphfx {

struct ErrorRates {
  double node = 0.0;
  double edge = 0.0;
};

// Teacher-forced rates: pred[i] is the prediction for gt.tokens[i]. Start
// and end tokens count in the node stream. Throws Error on length mismatch.
ErrorRates token_error_rates(std::span<const Token> pred, const TokenSequence& gt);
// Position-aligned comparison of two free-running sequences; gt positions
// past the end of pred count as errors.
ErrorRates sequence_error_rates(const TokenSequence& pred, const TokenSequence& gt);

double invalid_rate(std::span<const DecodeResult> decoded);

// |A ∩ B| / |A ∪ B| over type multisets; 1 when both are empty.
double multiset_iou(std::vector<TypeId> a, std::vector<TypeId> b);
// Whole graph for singing; for drum the mean over the union of subgraph
// keys (mixing bus and one per source track).
double node_type_iou(const Graph& pred, const Graph& gt);

inline constexpr std::array<std::size_t, 6> kMssScales = {2048, 1024, 512, 256, 128, 64};
inline constexpr double kMssEps = 1e-7;

// Multi-scale spectral loss, averaged over scales and channels.
double mss(const AudioBuffer& a, const AudioBuffer& b);

// Spectra of one fixed signal for repeated mss() comparisons against it.
class MssReference {
 public:
  explicit MssReference(const AudioBuffer& a);
  double distance(const AudioBuffer& b) const;
  // distance(b) > threshold, stopping once the partial sum gets there.
  bool exceeds(const AudioBuffer& b, double threshold) const;

 private:
  double accumulate(const AudioBuffer& b, double stop_at) const;
  std::size_t length_;
  // Per (scale, channel): magnitudes and their logs.
  std::vector<std::vector<double>> mag_;
  std::vector<std::vector<double>> log_;
};

// Mean |difference| over normalized params and edge gains / 2. The graphs
// must share node types (in order) and edge endpoints; throws Error otherwise.
double parameter_loss(const Graph& pred, const Graph& gt);
bool same_structure(const Graph& a, const Graph& b);

struct MetricsReport {
  double node_error_rate = 0.0;
  double edge_error_rate = 0.0;
  double invalid_rate = 0.0;
  double iou = 0.0;
  // Unset when the prediction is invalid or lacks a matching structure.
  std::optional<double> parameter_loss;
  std::optional<double> mss_default;
  std::optional<double> mss_oracle;
  std::optional<double> mss_full;
  std::size_t count = 1;
};

struct EvalRequest {
  const Graph* gt = nullptr;
  // Decoded graph with estimated params; null when decoding failed.
  const Graph* pred_full = nullptr;
  // Ground-truth structure with estimated params; null to skip.
  const Graph* pred_oracle = nullptr;
  // Teacher-forced per-step predictions; when empty the decoded sequence
  // is compared position by position.
  std::span<const Token> teacher_forced;
  // Decoded sequence; used when pred_full is null to still score tokens.
  const TokenSequence* pred_tokens = nullptr;
  std::map<std::string, AudioBuffer> stems;
  std::size_t length = kDefaultSegmentLength;
};

MetricsReport evaluate(const EvalRequest& req);
// Means of rates and losses; MSS fields average over reports that have them.
MetricsReport aggregate(std::span<const MetricsReport> reports);

std::string report_to_json(const MetricsReport& r);
MetricsReport report_from_json(std::string_view text);

}  // namespace graphfx
