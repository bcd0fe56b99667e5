#include "spica/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace spica {

namespace {

// Distance below which the closed form is replaced by its limit.
constexpr double kSingularTol = 1e-9;

}  // namespace

double rrc_pulse(double t, double symbol_rate_hz, double rolloff, int span_symbols) {
  if (!(symbol_rate_hz > 0.0)) throw std::invalid_argument("rrc_pulse: symbol_rate must be > 0");
  if (rolloff < 0.0 || rolloff > 1.0) throw std::invalid_argument("rrc_pulse: rolloff outside [0, 1]");

  const double period = 1.0 / symbol_rate_hz;
  const double x = t * symbol_rate_hz;
  if (std::abs(x) > static_cast<double>(span_symbols)) return 0.0;

  const double norm = 1.0 / std::sqrt(period);
  const double b = rolloff;

  if (std::abs(x) < kSingularTol) return norm * (1.0 - b + 4.0 * b / kPi);

  if (b > 0.0 && std::abs(std::abs(x) - 1.0 / (4.0 * b)) < kSingularTol) {
    const double arg = kPi / (4.0 * b);
    return norm * (b / std::sqrt(2.0)) *
           ((1.0 + 2.0 / kPi) * std::sin(arg) + (1.0 - 2.0 / kPi) * std::cos(arg));
  }

  const double num = std::sin(kPi * x * (1.0 - b)) + 4.0 * b * x * std::cos(kPi * x * (1.0 + b));
  const double den = kPi * x * (1.0 - (4.0 * b * x) * (4.0 * b * x));
  return norm * num / den;
}

StreamTerm::StreamTerm(std::vector<Complex> symbols, double symbol_rate_hz, double rolloff,
                       int span_symbols)
    : symbol_rate_(symbol_rate_hz), rolloff_(rolloff), span_(span_symbols) {
  if (symbols.empty()) throw std::invalid_argument("StreamTerm: no symbols");
  if (!(symbol_rate_hz > 0.0)) throw std::invalid_argument("StreamTerm: symbol_rate must be > 0");
  if (rolloff < 0.0 || rolloff > 1.0) throw std::invalid_argument("StreamTerm: rolloff outside [0, 1]");
  if (span_symbols < 1) throw std::invalid_argument("StreamTerm: span_symbols must be >= 1");

  const double power =
      std::accumulate(symbols.begin(), symbols.end(), 0.0,
                      [](double acc, const Complex& s) { return acc + std::norm(s); }) /
      static_cast<double>(symbols.size());
  if (!(power > 0.0)) throw std::invalid_argument("StreamTerm: all-zero symbols");
  const double gain = 1.0 / std::sqrt(power);
  for (auto& s : symbols) s *= gain;
  symbols_ = std::make_shared<const std::vector<Complex>>(std::move(symbols));
}

double StreamTerm::pulse(double t) const {
  return std::sqrt(symbol_period()) * rrc_pulse(t, symbol_rate_, rolloff_, span_);
}

Complex StreamTerm::eval(double t) const {
  const auto& syms = *symbols_;
  const double pos = t * symbol_rate_;
  const auto count = static_cast<long long>(syms.size());
  const long long first = std::max(0LL, static_cast<long long>(std::ceil(pos - span_)));
  const long long last = std::min(count - 1, static_cast<long long>(std::floor(pos + span_)));

  Complex acc{0.0, 0.0};
  const double period = symbol_period();
  for (long long k = first; k <= last; ++k) {
    acc += syms[static_cast<std::size_t>(k)] * pulse(t - static_cast<double>(k) * period);
  }
  return acc;
}

Complex eval(const ToneTerm& term, double t) {
  return std::polar(term.amplitude, 2.0 * kPi * term.frequency_hz * t + term.phase_rad);
}

Waveform Waveform::tone(double amplitude, double frequency_hz, double phase_rad) {
  if (amplitude < 0.0) throw std::invalid_argument("Waveform::tone: amplitude must be >= 0");
  Waveform w;
  w.add(ToneTerm{amplitude, frequency_hz, phase_rad});
  return w;
}

Waveform Waveform::stream(StreamTerm term) {
  Waveform w;
  w.add(std::move(term));
  return w;
}

Waveform& Waveform::add(ToneTerm term, Complex weight) {
  if (term.amplitude < 0.0) throw std::invalid_argument("ToneTerm: amplitude must be >= 0");
  terms_.push_back({weight, term});
  return *this;
}

Waveform& Waveform::add(StreamTerm term, Complex weight) {
  terms_.push_back({weight, std::move(term)});
  return *this;
}

Complex Waveform::operator()(double t) const {
  Complex acc{0.0, 0.0};
  for (const auto& term : terms_) {
    const Complex v = std::visit([t](const auto& shape) { return eval(shape, t); }, term.shape);
    acc += term.weight * v;
  }
  return scale_ * acc;
}

Waveform operator*(Complex a, const Waveform& w) {
  Waveform out = w;
  out.scale_ *= a;
  return out;
}

Waveform operator+(const Waveform& a, const Waveform& b) {
  Waveform out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  for (const auto& t : a.terms_) out.terms_.push_back({a.scale_ * t.weight, t.shape});
  for (const auto& t : b.terms_) out.terms_.push_back({b.scale_ * t.weight, t.shape});
  return out;
}

std::vector<Complex> map_qpsk(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("map_qpsk: odd number of bits");
  const double a = 1.0 / std::sqrt(2.0);
  std::vector<Complex> out;
  out.reserve(bits.size() / 2);
  for (std::size_t k = 0; k < bits.size(); k += 2) {
    const double im = bits[k] ? -a : a;
    const double re = bits[k + 1] ? -a : a;
    out.emplace_back(re, im);
  }
  return out;
}

std::vector<Complex> random_qpsk(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> bits(2 * count);
  for (std::size_t k = 0; k < bits.size(); k += 64) {
    const std::uint64_t word = rng();
    for (std::size_t b = 0; b < 64 && k + b < bits.size(); ++b) {
      bits[k + b] = static_cast<std::uint8_t>((word >> b) & 1U);
    }
  }
  return map_qpsk(bits);
}

}  // namespace spica
