#include <cmath>
#include <stdexcept>
#include <string>

#include "spica/ttd_spica.hpp"

namespace spica {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

ThmMatrix thm(int n) {
  if (n < 2 || !is_power_of_two(n)) {
    throw std::invalid_argument("thm: order " + std::to_string(n) + " is not a power of two >= 2");
  }
  const Eigen::MatrixXd h = sylvester_hadamard<double>(n);
  return ThmMatrix{n, h.bottomRows(n - 1)};
}

std::vector<SampleFrame> mac_apply(std::span<const SampleFrame> frames, const ThmMatrix& m) {
  if (static_cast<int>(frames.size()) != m.n) {
    throw std::invalid_argument("mac_apply: got " + std::to_string(frames.size()) + " frames for an order-" +
                                std::to_string(m.n) + " matrix");
  }
  const Eigen::MatrixXcd x = stack_rows(frames);
  const Eigen::MatrixXcd y = m.rows.cast<Complex>() * x;

  std::vector<SampleFrame> out;
  out.reserve(static_cast<std::size_t>(m.row_count()));
  for (int r = 0; r < m.row_count(); ++r) {
    SampleFrame f;
    f.samples = y.row(r).transpose();
    f.sample_rate = frames.front().sample_rate;
    f.start_time = frames.front().start_time;
    f.element_tag = r;
    out.push_back(std::move(f));
  }
  return out;
}

SampleFrame single_input_row(const SampleFrame& element0, const ThmMatrix& m, int row) {
  if (row < 0 || row >= m.row_count()) throw std::out_of_range("single_input_row: row out of range");
  SampleFrame f = element0;
  f.samples *= m.rows(row, 0);
  f.element_tag = row;
  return f;
}

Complex desired_gain(double f_hz, double delta_s, int row, int n) {
  if (n < 2 || !is_power_of_two(n)) throw std::invalid_argument("desired_gain: n must be a power of two >= 2");
  if (row < 0 || row >= n - 1) throw std::out_of_range("desired_gain: row out of range");
  // Row r of the Sylvester matrix (r >= 1) has entry (-1)^popcount(r & i).
  const int r = row + 1;
  Complex g{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double sign = (__builtin_popcount(static_cast<unsigned>(r & i)) & 1) ? -1.0 : 1.0;
    g += sign * std::polar(1.0, 2.0 * kPi * f_hz * i * delta_s);
  }
  return g;
}

}  // namespace spica
