#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadmask/core/random.hpp"
#include "loadmask/nn/backend.hpp"

// Sequence-to-point disaggregation: a small 1-D CNN maps an m-sample window of the
// aggregate signal to one appliance's power at the window's centre sample.
namespace loadmask::nilm {

struct Seq2PointSpec {
  std::size_t sequence_length = 5;  // m, odd
  std::size_t conv1_channels = 16;
  std::size_t conv2_channels = 32;
  std::size_t kernel = 5;
  std::size_t padding = 2;

  void validate() const;
  [[nodiscard]] std::size_t conv1_length() const { return sequence_length + 2 * padding + 1 - kernel; }
  [[nodiscard]] std::size_t conv2_length() const { return conv1_length() + 2 * padding + 1 - kernel; }
  [[nodiscard]] std::size_t param_count() const;
};

struct NilmTrainConfig {
  std::size_t iterations = 100'000;  // minibatch gradient steps
  double lr_initial = 0.005;
  double lr_final = 0.001;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;

  void validate() const;
  /// Linear decay from lr_initial at iteration 0 to lr_final at the last iteration.
  [[nodiscard]] double learning_rate(std::size_t iteration) const;
};

/// One window per sample, flattened row-major [count][m].
struct WindowSet {
  std::size_t m = 0;
  std::size_t count = 0;
  std::vector<double> data;

  [[nodiscard]] std::span<const double> window(std::size_t t) const { return std::span(data).subspan(t * m, m); }
};

/// Window t covers samples t-(m-1)/2 .. t+(m-1)/2 (0-based); edges replicate the boundary value.
/// Throws ValidationError for even m or an empty series.
WindowSet make_windows(std::span<const double> series, std::size_t m);

/// Flat-parameter CNN: conv(1->c1) relu conv(c1->c2) relu global-average-pool dense(c2->1).
class Seq2PointNet {
 public:
  struct Cache {
    std::size_t batch = 0;
    std::vector<double> input, h1, h2, pooled, output;
    std::vector<double> d_pooled, d_h2, d_h1;
  };

  explicit Seq2PointNet(Seq2PointSpec spec, nn::Backend backend = nn::Backend::kParallel);

  [[nodiscard]] const Seq2PointSpec& spec() const { return spec_; }
  [[nodiscard]] std::span<double> params() { return params_; }
  [[nodiscard]] std::span<const double> params() const { return params_; }
  void set_params(std::span<const double> values);
  void set_backend(nn::Backend backend) { backend_ = backend; }

  void init_fan_in_uniform(Rng& rng);

  /// `x` holds `batch` windows of length m, already scaled. Output: one value per window.
  void forward(std::span<const double> x, std::size_t batch, Cache& cache) const;
  /// Gradient of sum(d_output * output) w.r.t. params (overwritten).
  void backward(Cache& cache, std::span<const double> d_output, std::span<double> grad) const;

  // Parameter blocks, exposed for hand-set tests.
  [[nodiscard]] std::span<double> conv1_weight();
  [[nodiscard]] std::span<double> conv1_bias();
  [[nodiscard]] std::span<double> conv2_weight();
  [[nodiscard]] std::span<double> conv2_bias();
  [[nodiscard]] std::span<double> fc_weight();
  [[nodiscard]] std::span<double> fc_bias();

 private:
  struct Offsets {
    std::size_t w1, b1, w2, b2, wf, bf;
  };

  Seq2PointSpec spec_;
  Offsets off_{};
  std::vector<double> params_;
  nn::Backend backend_;
};

/// A trained attacker for one appliance. Thread-safe for prediction.
struct Seq2PointModel {
  static constexpr int kFormatVersion = 1;

  std::string appliance;
  Seq2PointNet net{Seq2PointSpec{}};
  double input_scale = 1.0;   // kW; aggregate windows are divided by this
  double output_scale = 1.0;  // kW; network output is multiplied by this
  double threshold = 0.5;     // kW, on/off decision
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
};

/// Predicted appliance power (kW) for one aggregate window. Throws ValidationError on a
/// window of the wrong length.
double predict(const Seq2PointModel& model, std::span<const double> window);

/// Predicted appliance power for every sample of `series`.
std::vector<double> predict_series(const Seq2PointModel& model, std::span<const double> series);

/// on iff prediction > threshold.
bool classify(double prediction_kw, double threshold_kw = 0.5);

struct AttackOutput {
  std::vector<double> predicted_kw;
  std::vector<bool> predicted_on;
};

AttackOutput attack(const Seq2PointModel& model, std::span<const double> series);

struct NilmTrainResult {
  Seq2PointModel model;
  std::vector<double> losses;  // per iteration, in normalized units
};

/// Fits the attacker on an aligned (aggregate, appliance) pair by minibatch Adam on the
/// mean squared error. Throws NumericalError if the loss stops being finite.
NilmTrainResult train_nilm(std::span<const double> aggregate, std::span<const double> appliance,
                           const Seq2PointSpec& spec, const NilmTrainConfig& cfg, std::string appliance_name = {},
                           nn::Backend backend = nn::Backend::kParallel);

}  // namespace loadmask::nilm
